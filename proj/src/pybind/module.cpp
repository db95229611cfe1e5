#include "laplace_kit/common.hpp"
#include "laplace_kit/geometry.hpp"
#include "laplace_kit/iterations.hpp"
#include "laplace_kit/json_io.hpp"
#include "laplace_kit/models.hpp"
#include "laplace_kit/objective.hpp"
#include "laplace_kit/qmc.hpp"
#include "laplace_kit/remainders.hpp"
#include "laplace_kit/solver.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

namespace py = pybind11;
namespace lk = laplace_kit;

namespace {

using Params = std::map<std::string, double>;

lk::Objective scaled_negative(const lk::Objective& ell, double n) {
  lk::Objective h;
  h.dim = ell.dim;
  h.deriv_scale = ell.deriv_scale;
  h.value_fn = [ell, n](const lk::Vec& x) { return -lk::evaluate(ell, x) / n; };
  h.gradient_fn = [ell, n](const lk::Vec& x) { return lk::Vec(-lk::gradient(ell, x) / n); };
  h.hessian_fn = [ell, n](const lk::Vec& x) { return lk::Mat(-lk::hessian(ell, x) / n); };
  h.dir_deriv_fn = [ell, n](const lk::Vec& x, const lk::Vec& u, int order) {
    return -lk::directional_derivative(ell, x, u, order) / n;
  };
  return h;
}

// full certify pipeline, returned as a JSON string for a dependency-free API
std::string certify_json(const std::string& model_id, const Params& params, std::uint64_t seed,
                         double deviation_x, double nu, int n_dirs, int n_line) {
  const lk::BuiltModel model = lk::build_model(model_id, params, seed);
  const lk::MapResult map = lk::find_map(model.objective, model.start);
  const lk::LocalGeometry geom = lk::make_local_geometry(
      map.x_star, lk::PrecisionPair::from_total(map.neg_hessian, model.objective.penalty_precision),
      deviation_x, nu);
  const lk::RemainderReport report =
      lk::estimate_omega(model.objective.total(), geom, n_dirs, n_line, seed);
  const lk::Objective h = scaled_negative(model.objective.likelihood, model.sample_size);
  const lk::SelfConcordance sc =
      lk::estimate_self_concordance(h, geom, model.sample_size, n_dirs, n_line, seed, true);
  lk::CertificateOptions opts;
  opts.deviation_x = deviation_x;
  opts.nu = nu;
  lk::LaplaceCertificate cert = lk::build_certificate(model.objective, map, sc, report, opts);
  cert.model_id = model_id;
  cert.seed = seed;
  return lk::to_json(cert).dump();
}

std::string optimize_json(const std::string& model_id, const Params& params, std::uint64_t seed,
                          int m, double a, int steps, bool use_qmc) {
  const lk::BuiltModel model = lk::build_model(model_id, params, seed);
  const int p = model.objective.likelihood.dim;
  lk::IterationConfig cfg;
  cfg.x0 = model.start;
  cfg.g0_squared =
      model.iteration_g0_squared ? *model.iteration_g0_squared : lk::Mat::Identity(p, p);
  cfg.precision_factor = a;
  cfg.samples_per_step = m;
  cfg.max_steps = steps;
  cfg.seed = seed;
  cfg.use_qmc = use_qmc;
  const lk::IterationTrace trace = lk::run(model.objective.total(), cfg);
  return lk::to_json(trace).dump();
}

std::vector<double> find_map_py(const std::string& model_id, const Params& params,
                                std::uint64_t seed) {
  const lk::BuiltModel model = lk::build_model(model_id, params, seed);
  const lk::MapResult map = lk::find_map(model.objective, model.start);
  return std::vector<double>(map.x_star.data(), map.x_star.data() + map.x_star.size());
}

}  // namespace

PYBIND11_MODULE(_laplace_kit, m) {
  m.doc() = "Laplace-approximation certificates: core operations";

  m.def("model_registry", &lk::model_registry, "ids of the built-in models");
  m.def("certify", &certify_json, py::arg("model"), py::arg("params") = Params{},
        py::arg("seed") = 1, py::arg("x") = 4.0, py::arg("nu") = 2.0 / 3.0,
        py::arg("n_dirs") = 64, py::arg("n_line") = 32,
        "compute a certificate; returns the certificate as a JSON string");
  m.def("optimize", &optimize_json, py::arg("model"), py::arg("params") = Params{},
        py::arg("seed") = 1, py::arg("M") = 2048, py::arg("a") = 1.5, py::arg("steps") = 40,
        py::arg("qmc") = true, "run the sampling optimizer; returns the trace as JSON");
  m.def("find_map", &find_map_py, py::arg("model"), py::arg("params") = Params{},
        py::arg("seed") = 1, "MAP point of a built-in model");
  m.def("effective_dimension_radius", &lk::concentration_radius, py::arg("p_g"), py::arg("x"),
        "r_G = 2 sqrt(p_G) + sqrt(2 x)");
  m.def("inverse_normal_cdf", &lk::inverse_normal_cdf, py::arg("u"));
  m.def("set_thread_count", &lk::set_thread_count, py::arg("n"));
}
