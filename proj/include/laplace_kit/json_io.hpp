#pragma once

#include "laplace_kit/certificate.hpp"
#include "laplace_kit/inverse.hpp"
#include "laplace_kit/iterations.hpp"
#include "laplace_kit/verifier.hpp"

#include <json.hpp>

#include <string>

namespace laplace_kit {

// Serialization is deterministic: object keys are sorted (nlohmann default)
// and doubles print in shortest round-trip form.

nlohmann::json to_json(const LaplaceCertificate& cert);
nlohmann::json to_json(const SoundnessReport& report);
nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const RegularityConstants& consts);
nlohmann::json to_json(const IterationTrace& trace);

std::string soundness_csv(const SoundnessReport& report);
std::string trace_csv(const IterationTrace& trace);

// writes with a trailing newline; creates parent directories
void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace laplace_kit
