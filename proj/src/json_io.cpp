#include "laplace_kit/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace laplace_kit {

namespace {

using nlohmann::json;

json num(double v) {
  // JSON has no inf/nan literals; encode them as strings so nothing is lost
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json vec(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

double clamp_prob(double v) { return std::min(1.0, std::max(0.0, v)); }

json prob_pair(double raw) {
  return json{{"raw", num(raw)}, {"clamped", num(clamp_prob(raw))}};
}

json opt_prob_pair(const std::optional<double>& raw) {
  return raw ? prob_pair(*raw) : json(nullptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_num(double v) {
  json j = num(v);
  return j.is_string() ? j.get<std::string>() : j.dump();
}

}  // namespace

json to_json(const LaplaceCertificate& cert) {
  json gates = json::object();
  for (const auto& [name, g] : cert.gates) {
    gates[name] = {{"pass", g.pass},
                   {"inequality", g.inequality},
                   {"lhs", num(g.lhs)},
                   {"rhs", num(g.rhs)}};
  }
  json prov = json::object();
  for (const auto& [k, v] : cert.provenance) prov[k] = v;

  return json{
      {"meta",
       {{"model", cert.model_id},
        {"seed", cert.seed},
        {"conditional_on_x0", cert.conditional_on_x0},
        {"contains_unspecified_constant", cert.contains_unspecified_constant},
        {"warnings", cert.warnings},
        {"all_gates_pass", cert.all_gates_pass()}}},
      {"geometry",
       {{"center", vec(cert.center)},
        {"p_g", num(cert.p_g)},
        {"r_g", num(cert.r_g)},
        {"x", num(cert.x)},
        {"nu", num(cert.nu)}}},
      {"remainders",
       {{"omega", num(cert.omega)},
        {"omega_raw", num(cert.omega_raw)},
        {"omega_grade", cert.omega_grade},
        {"c3", num(cert.c3)},
        {"c4", opt(cert.c4)},
        {"n", num(cert.n)},
        {"diamond2", opt(cert.diamond2)},
        {"diamond3", opt(cert.diamond3)},
        {"diamond4", opt(cert.diamond4)}}},
      {"bounds",
       {{"tv_all_sets", prob_pair(cert.tv_bound_all_sets)},
        {"tv_self_concordant", opt_prob_pair(cert.tv_bound_sc)},
        {"tv_symmetric_sets", opt_prob_pair(cert.tv_bound_symmetric_sets)},
        {"kl_forward", opt(cert.kl_forward)},
        {"kl_reverse", opt(cert.kl_reverse)},
        {"mean_shift_d_norm", opt(cert.mean_shift)},
        {"tail_rho", prob_pair(cert.tail_rho)},
        {"tail_rho_g", prob_pair(cert.tail_rho_g)},
        {"concentration", prob_pair(cert.concentration)},
        {"concentration_refined", prob_pair(cert.concentration_refined)}}},
      {"gates", gates},
      {"provenance", prov}};
}

json to_json(const SoundnessReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"name", r.name},
                    {"empirical", num(r.empirical)},
                    {"error", num(r.error)},
                    {"bound", num(r.bound)},
                    {"gate_valid", r.gate_valid},
                    {"holds", r.holds},
                    {"slack_ratio", num(r.slack_ratio)}});
  }
  return json{{"rows", rows}, {"missing", report.missing}, {"all_hold", report.all_hold}};
}

json to_json(const ConditionReport& report) {
  json lines = json::array();
  for (const auto& l : report.lines) {
    lines.push_back({{"name", l.name},
                     {"inequality", l.inequality},
                     {"lhs", num(l.lhs)},
                     {"rhs", num(l.rhs)},
                     {"pass", l.pass}});
  }
  return json{{"lines", lines},
              {"rho0", num(report.rho0)},
              {"delta", num(report.delta)},
              {"all_pass", report.all_pass}};
}

json to_json(const RegularityConstants& consts) {
  return json{{"c2", num(consts.c2_hat)},
              {"cn", num(consts.cn_hat)},
              {"c0", num(consts.c0_hat)},
              {"cg", num(consts.cg_hat)},
              {"c3", num(consts.c3_hat)},
              {"c4", opt(consts.c4_hat)},
              {"rho0", num(consts.rho0)},
              {"r0", num(consts.r0)},
              {"delta", num(consts.delta)},
              {"samples", consts.samples},
              {"seed", consts.seed},
              {"is_sup_estimate", consts.is_sup_estimate},
              {"skipped_directions", consts.skipped_directions}};
}

json to_json(const IterationTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"k", s.k},
                     {"x", vec(s.x)},
                     {"log_precision_scale", num(s.log_precision_scale)},
                     {"ess", num(s.stats.ess)},
                     {"max_log_weight", num(s.stats.max_log_weight)},
                     {"accepted_draws", s.stats.accepted_draws},
                     {"rejected_draws", s.stats.rejected_draws},
                     {"degenerate_weights", s.stats.degenerate_weights},
                     {"retries", s.stats.retries}});
  }
  return json{{"steps", steps},
              {"converged", trace.converged},
              {"best_x", vec(trace.best_x)},
              {"best_value", num(trace.best_value)}};
}

std::string soundness_csv(const SoundnessReport& report) {
  std::ostringstream out;
  out << "name,empirical,error,bound,gate_valid,holds,slack_ratio\n";
  for (const auto& r : report.rows) {
    out << csv_escape(r.name) << ',' << csv_num(r.empirical) << ',' << csv_num(r.error) << ','
        << csv_num(r.bound) << ',' << (r.gate_valid ? 1 : 0) << ',' << (r.holds ? 1 : 0) << ','
        << csv_num(r.slack_ratio) << '\n';
  }
  return out.str();
}

std::string trace_csv(const IterationTrace& trace) {
  std::ostringstream out;
  out << "k,ess,max_log_weight,accepted,rejected,retries,log_precision_scale";
  const int p = trace.steps.empty() ? 0 : static_cast<int>(trace.steps.front().x.size());
  for (int j = 0; j < p; ++j) out << ",x" << j;
  out << '\n';
  for (const auto& s : trace.steps) {
    out << s.k << ',' << csv_num(s.stats.ess) << ',' << csv_num(s.stats.max_log_weight) << ','
        << s.stats.accepted_draws << ',' << s.stats.rejected_draws << ',' << s.stats.retries << ','
        << csv_num(s.log_precision_scale);
    for (int j = 0; j < p; ++j) out << ',' << csv_num(s.x[j]);
    out << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2));
}

}  // namespace laplace_kit
