#include "tvbound/diagnostics.hpp"
#include "tvbound/experiment.hpp"
#include "tvbound/forward.hpp"
#include "tvbound/operators.hpp"
#include "tvbound/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace tvbound;

namespace {

Grid line_grid(Eigen::Index n, double spacing) { return Grid(static_cast<int>(n), spacing); }

Bounds make_bounds(const Vector& lower, const Vector& upper) {
  const Grid g = line_grid(lower.size(), 1.0);
  return Bounds(ModelVector(g, lower), ModelVector(g, upper));
}

py::dict history_dict(const std::vector<IterationRecord>& h) {
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::VectorXi k(n);
  Vector rel(n), split(n), proj(n), misfit(n), tv(n), obj(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = h[static_cast<std::size_t>(i)];
    k[i] = r.k;
    rel[i] = r.rel_model_change;
    split[i] = r.split_residual;
    proj[i] = r.proj_residual;
    misfit[i] = r.data_misfit;
    tv[i] = r.tv_value;
    obj[i] = r.objective;
  }
  py::dict d;
  d["k"] = k;
  d["rel_model_change"] = rel;
  d["split_residual"] = split;
  d["proj_residual"] = proj;
  d["data_misfit"] = misfit;
  d["tv_value"] = tv;
  d["objective"] = obj;
  return d;
}

py::dict metrics_dict(const MetricsReport& r) {
  py::dict d;
  d["rmse_vs_truth"] = r.rmse_vs_truth;
  d["max_bound_violation"] = r.max_bound_violation;
  d["data_misfit"] = r.data_misfit;
  d["tv_value"] = r.tv_value;
  d["objective"] = r.objective;
  d["stationarity_residual"] = r.stationarity_residual;
  return d;
}

py::dict result_dict(const SolveResult& r) {
  py::dict d;
  d["m"] = r.m.values;
  d["y"] = r.y.values;
  d["iterations"] = r.iterations;
  d["stop_reason"] = std::string(to_string(r.stop_reason));
  d["cg_breakdowns"] = r.cg_breakdowns;
  d["history"] = history_dict(r.history);
  py::list snaps;
  for (const auto& s : r.snapshots) snaps.append(py::make_tuple(s.k, s.m));
  d["snapshots"] = snaps;
  return d;
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
  std::vector<Variant> out;
  for (const auto& n : names) {
    auto v = parse_variant(n);
    if (!v) throw DomainError("unknown variant '" + n + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_tvbound, mod) {
  mod.doc() = "Bound-constrained total-variation inversion";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<DivergenceError>(mod, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(mod, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);

  mod.def(
      "grad_forward",
      [](const Vector& m, double spacing) { return grad_forward(ModelVector(line_grid(m.size(), spacing), m)).components[0]; },
      py::arg("m"), py::arg("spacing") = 1.0, "Forward differences with a zero last entry.");
  mod.def(
      "grad_adjoint",
      [](const Vector& g, double spacing) {
        const Grid grid = line_grid(g.size(), spacing);
        return grad_adjoint(GradField(grid, {g})).values;
      },
      py::arg("g"), py::arg("spacing") = 1.0, "Transpose of grad_forward.");
  mod.def(
      "grad_forward_2d",
      [](const Eigen::MatrixXd& m, double hx, double hy) {
        const Grid g(static_cast<int>(m.rows()), static_cast<int>(m.cols()), hx, hy);
        Vector flat(m.size());
        for (Eigen::Index i = 0; i < m.rows(); ++i) flat.segment(i * m.cols(), m.cols()) = m.row(i).transpose();
        const GradField f = grad_forward(ModelVector(g, flat));
        return py::make_tuple(f.components[0], f.components[1]);
      },
      py::arg("m"), py::arg("hx") = 1.0, py::arg("hy") = 1.0,
      "Gradient of a 2-D model (row-major) as a pair of flattened components.");
  mod.def("shrink_scalar", py::overload_cast<double, double>(&shrink), py::arg("t"), py::arg("gamma"));
  mod.def(
      "shrink",
      [](const std::vector<Vector>& comps, double gamma, bool grouped, std::optional<std::pair<int, int>> shape) {
        if (comps.empty() || comps.size() > 2) throw DimensionError("shrink: expected one or two components");
        Grid g = line_grid(comps[0].size(), 1.0);
        if (comps.size() == 2) {
          if (!shape) throw DimensionError("shrink: two components need shape=(nx, ny)");
          g = Grid(shape->first, shape->second, 1.0, 1.0);
        }
        const auto mode = grouped ? ShrinkMode::grouped : ShrinkMode::componentwise;
        return shrink(GradField(g, comps), gamma, mode).components;
      },
      py::arg("components"), py::arg("gamma"), py::arg("grouped") = false, py::arg("shape") = py::none(),
      "Shrinkage of the gradient components of a 1-D or 2-D grid.");
  mod.def(
      "project",
      [](const Vector& m, const Vector& lower, const Vector& upper) {
        return project(ModelVector(line_grid(m.size(), 1.0), m), make_bounds(lower, upper)).values;
      },
      py::arg("m"), py::arg("lower"), py::arg("upper"));
  mod.def(
      "tv_value",
      [](const Vector& m, double spacing) { return tv_value(ModelVector(line_grid(m.size(), spacing), m), TvMode::anisotropic); },
      py::arg("m"), py::arg("spacing") = 1.0);

  mod.def("uplift_kernel", &uplift_kernel, py::arg("depth"), py::arg("offset"));
  mod.def(
      "uplift_matrix",
      [](double depth, double aperture, int n_model, int n_data) {
        return uplift_matrix(UpliftGeometry{depth, aperture, n_model, n_data});
      },
      py::arg("depth") = 100.0, py::arg("aperture") = 2000.0, py::arg("n_model") = 200, py::arg("n_data") = 200);
  mod.def(
      "make_blocky_model",
      [](const std::vector<std::tuple<double, double, double>>& blocks, double aperture, int n) {
        std::vector<Block> bs;
        for (const auto& [a, b, v] : blocks) bs.push_back({a, b, v});
        return make_blocky_model(bs, UpliftGeometry{1.0, aperture, n, n}).values;
      },
      py::arg("blocks"), py::arg("aperture") = 2000.0, py::arg("n") = 200);
  mod.def("add_noise", &add_noise, py::arg("d"), py::arg("sigma_frac"), py::arg("seed"));

  py::class_<SolverConfig>(mod, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &SolverConfig::alpha)
      .def_readwrite("lambda_", &SolverConfig::lambda)
      .def_readwrite("delta", &SolverConfig::delta)
      .def_readwrite("n_inner", &SolverConfig::n_inner)
      .def_readwrite("n_outer", &SolverConfig::n_outer)
      .def_readwrite("cg_steps", &SolverConfig::cg_steps)
      .def_readwrite("target_accuracy", &SolverConfig::target_accuracy)
      .def_readwrite("stop_on_target", &SolverConfig::stop_on_target)
      .def_readwrite("tikhonov_beta", &SolverConfig::tikhonov_beta)
      .def_readwrite("snapshot_stride", &SolverConfig::snapshot_stride)
      .def_property(
          "variant", [](const SolverConfig& c) { return std::string(to_string(c.variant)); },
          [](SolverConfig& c, const std::string& s) { c.variant = parse_variants({s})[0]; })
      .def_property(
          "projection_rule", [](const SolverConfig& c) { return std::string(to_string(c.projection_rule)); },
          [](SolverConfig& c, const std::string& s) {
            auto r = parse_projection_rule(s);
            if (!r) throw DomainError("unknown projection rule '" + s + "'");
            c.projection_rule = *r;
          })
      .def("violations", &SolverConfig::violations);

  mod.def(
      "solve",
      [](const SolverConfig& cfg, const Eigen::MatrixXd& F, const Vector& d, const Vector& lower, const Vector& upper,
         std::optional<Vector> m0) {
        const MatrixOperator op(F);
        const Grid g = line_grid(F.cols(), 1.0);
        const ModelVector start(g, m0 ? *m0 : Vector::Zero(F.cols()));
        SolveResult r = [&] {
          py::gil_scoped_release release;
          return run(cfg, op, d, make_bounds(lower, upper), start);
        }();
        return result_dict(r);
      },
      py::arg("config"), py::arg("F"), py::arg("d"), py::arg("lower"), py::arg("upper"), py::arg("m0") = py::none(),
      "Solve with a dense forward matrix on a unit-spacing 1-D grid.");
  mod.def(
      "tikhonov_solve",
      [](const Eigen::MatrixXd& F, const Vector& d, double beta, int cg_steps) {
        return tikhonov_solve(MatrixOperator(F), d, line_grid(F.cols(), 1.0), beta, cg_steps).m.values;
      },
      py::arg("F"), py::arg("d"), py::arg("beta"), py::arg("cg_steps") = 1000);
  mod.def(
      "stationarity",
      [](const Vector& m, const Eigen::MatrixXd& F, const Vector& d, const Vector& lower, const Vector& upper,
         const SolverConfig& cfg) {
        return stationarity_check(ModelVector(line_grid(m.size(), 1.0), m), MatrixOperator(F), d,
                                  make_bounds(lower, upper), cfg);
      },
      py::arg("m"), py::arg("F"), py::arg("d"), py::arg("lower"), py::arg("upper"), py::arg("config"));
  mod.def(
      "evaluate",
      [](const Vector& m, const Vector& truth, const Eigen::MatrixXd& F, const Vector& d, const Vector& lower,
         const Vector& upper, const SolverConfig& cfg) {
        const Grid g = line_grid(m.size(), 1.0);
        return metrics_dict(
            evaluate(ModelVector(g, m), ModelVector(g, truth), MatrixOperator(F), d, make_bounds(lower, upper), cfg));
      },
      py::arg("m"), py::arg("truth"), py::arg("F"), py::arg("d"), py::arg("lower"), py::arg("upper"),
      py::arg("config"));

  mod.def(
      "validate_config",
      [](const std::filesystem::path& path) {
        std::vector<std::string> out;
        for (const auto& i : validate_config(path)) out.push_back(i.to_string());
        return out;
      },
      py::arg("path"), "Every problem in a config file; empty when valid.");
  mod.def(
      "run_experiment",
      [](const std::filesystem::path& path, std::optional<std::filesystem::path> output_dir,
         std::optional<std::uint64_t> seed, std::optional<std::vector<std::string>> variants, bool write_files) {
        ConfigParse p = load_experiment_config(path);
        if (!p.ok()) {
          std::string msg = "invalid experiment config:";
          for (const auto& i : p.issues) msg += "\n  " + i.to_string();
          throw DomainError(msg);
        }
        if (output_dir) p.config.output_dir = *output_dir;
        if (seed) p.config.seed = *seed;
        if (variants) p.config.variants = parse_variants(*variants);
        ExperimentOutcome out = [&] {
          py::gil_scoped_release release;
          return run_experiment(p.config, write_files);
        }();
        py::dict res;
        res["truth"] = out.truth.values;
        res["data_clean"] = out.clean;
        res["data_noisy"] = out.noisy;
        py::dict vs;
        for (const auto& v : out.variants) {
          py::dict e;
          e["model"] = v.reported.values;
          e["metrics"] = metrics_dict(v.metrics);
          e["result"] = result_dict(v.result);
          if (v.variant == Variant::tikhonov) e["tikhonov_beta"] = v.tikhonov_beta;
          vs[py::str(std::string(to_string(v.variant)))] = e;
        }
        res["variants"] = vs;
        return res;
      },
      py::arg("config"), py::arg("output_dir") = py::none(), py::arg("seed") = py::none(),
      py::arg("variants") = py::none(), py::arg("write_files") = true);
}
