#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "clab/cascade.hpp"
#include "clab/diffusion.hpp"
#include "clab/error.hpp"
#include "clab/ingest.hpp"
#include "clab/pipeline.hpp"
#include "clab/report.hpp"
#include "clab/spectrum.hpp"
#include "clab/stats/bootstrap.hpp"
#include "clab/stats/chow.hpp"
#include "clab/stats/distfit.hpp"
#include "clab/stats/permutation.hpp"

namespace py = pybind11;
using namespace clab;

namespace {

using Record = std::tuple<std::string, int, double>;

BankPanel to_panel(const std::vector<Record>& rows) {
  std::vector<BankRecord> recs;
  recs.reserve(rows.size());
  for (const auto& [id, year, assets] : rows) recs.push_back({id, year, assets, std::nullopt, std::nullopt});
  return BankPanel(std::move(recs));
}

std::vector<Record> from_panel(const BankPanel& p) {
  std::vector<Record> out;
  for (const auto& r : p.records()) out.emplace_back(r.bank_id, r.year, r.total_assets);
  return out;
}

ReconstructionConfig recon_config(const std::string& method, double rho, double threshold) {
  ReconstructionConfig c;
  c.method = parse_method(method);
  c.ratio_rule = RatioRule::fixed_ratio(rho);
  c.min_edge_threshold = threshold;
  c.validate();
  return c;
}

// Results cross the boundary as JSON text; the Python wrapper decodes them.
std::string js(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Interbank network reconstruction, spectra, contagion and inference";

  static py::exception<Error> error(m, "ClabError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  m.def("load_panel_csv", [](const std::string& text) {
    std::istringstream in(text);
    return from_panel(load_panel(in));
  }, py::arg("text"));

  m.def("panel_csv", [](const std::vector<Record>& rows) {
    std::ostringstream out;
    write_panel_csv(out, to_panel(rows));
    return out.str();
  }, py::arg("records"));

  m.def("synth_panel", [](int n_banks, std::uint64_t seed, double shrinkage, std::vector<int> years) {
    SynthConfig c;
    c.n_banks = n_banks;
    c.seed = seed;
    c.shrinkage = shrinkage;
    if (!years.empty()) c.years = std::move(years);
    return from_panel(synth_panel(c));
  }, py::arg("n_banks") = 70, py::arg("seed") = 1, py::arg("shrinkage") = 0.0,
        py::arg("years") = std::vector<int>{});

  m.def("reconstruct", [](const std::vector<double>& assets, const std::string& method, double rho) {
    return reconstruct(assets, recon_config(method, rho, 0.0)).X;
  }, py::arg("assets"), py::arg("method") = "maxent", py::arg("rho") = 0.05);

  m.def("laplacian_spectrum", [](const Eigen::MatrixXd& W) {
    return js(to_json(laplacian_spectrum(WeightedNetwork(W))));
  }, py::arg("weights"));

  m.def("effective_decay", [](double lambda2, double D, double kappa) {
    DiffusionParams p;
    p.D = D;
    p.kappa = kappa;
    return effective_decay(lambda2, p);
  }, py::arg("lambda2"), py::arg("D") = 1.0, py::arg("kappa") = 0.0);

  m.def("critical_distance", &critical_distance, py::arg("kappa_eff"), py::arg("epsilon") = 0.1);

  m.def("cascade", [](const Eigen::MatrixXd& W, Eigen::Index source, double s0, double theta, double kappa) {
    CascadeConfig c;
    c.source = source;
    c.s0 = s0;
    c.theta = theta;
    c.kappa = kappa;
    return js(to_json(cascade_trace(WeightedNetwork(W), c)));
  }, py::arg("weights"), py::arg("source"), py::arg("s0"), py::arg("theta"), py::arg("kappa") = 0.0);

  m.def("analyze", [](const std::vector<Record>& rows, const std::string& method, double rho, double threshold,
                      unsigned threads) {
    AnalysisConfig c;
    c.recon = recon_config(method, rho, threshold);
    c.threads = threads;
    const BankPanel panel = to_panel(rows);
    py::gil_scoped_release release;
    return js(to_json(analyze_panel(panel, c)));
  }, py::arg("records"), py::arg("method") = "maxent", py::arg("rho") = 0.05, py::arg("threshold") = 1.0,
        py::arg("threads") = 1);

  m.def("sweep", [](const std::vector<Record>& rows, double rho_min, double rho_max, int steps, double threshold,
                    unsigned threads) {
    AnalysisConfig c;
    c.recon.min_edge_threshold = threshold;
    c.threads = threads;
    SweepConfig s{rho_min, rho_max, steps};
    const BankPanel panel = to_panel(rows);
    py::gil_scoped_release release;
    return js(to_json(ratio_sweep(panel, c, s)));
  }, py::arg("records"), py::arg("rho_min") = 0.01, py::arg("rho_max") = 0.10, py::arg("steps") = 10,
        py::arg("threshold") = 1.0, py::arg("threads") = 1);

  m.def("bootstrap_lambda2", [](const std::vector<double>& assets, double rho, int B, double level,
                                std::uint64_t seed, unsigned threads) {
    BootstrapConfig b{B, level, seed, threads};
    const ReconstructionConfig rc = recon_config("maxent", rho, 1.0);
    py::gil_scoped_release release;
    return js(to_json(bootstrap_lambda2(assets, rc, b)));
  }, py::arg("assets"), py::arg("rho") = 0.05, py::arg("B") = 100, py::arg("level") = 0.95, py::arg("seed") = 42,
        py::arg("threads") = 1);

  m.def("permutation_test", [](const std::vector<double>& a, const std::vector<double>& b, int n_perm,
                               std::uint64_t seed) { return js(to_json(permutation_test(a, b, n_perm, seed))); },
        py::arg("a"), py::arg("b"), py::arg("n_perm") = 1000, py::arg("seed") = 42);

  m.def("fit_distributions", [](const std::vector<double>& sample, std::optional<double> x_min) {
    FitOptions o;
    o.x_min = x_min;
    return js(to_json(fit_distributions(sample, o)));
  }, py::arg("sample"), py::arg("x_min") = py::none());

  m.def("chow_test", [](const std::map<int, double>& series, int break_year) {
    return js(to_json(chow_test(series, break_year)));
  }, py::arg("series"), py::arg("break_year"));
}
