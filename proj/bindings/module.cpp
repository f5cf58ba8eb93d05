#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bench/experiment_config.hpp"
#include "bench/runner.hpp"
#include "ranksurf/designer.hpp"
#include "ranksurf/fit.hpp"
#include "ranksurf/version.hpp"

namespace py = pybind11;
using namespace ranksurf;

namespace {

PosteriorAtPoint make_post(const Vec& means, const Vec& variances) {
  PosteriorAtPoint post;
  post.means = means;
  post.variances = variances;
  post.validate();
  return post;
}

}  // namespace

PYBIND11_MODULE(ranksurf, m) {
  m.doc() = "Adaptive ranking of stochastic response surfaces";
  m.attr("__version__") = kVersion;

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init([](double scale, const Vec& lengthscales, double trend) {
             KernelSpec spec;
             spec.scale = scale;
             spec.lengthscales = lengthscales;
             spec.trend = trend;
             spec.validate();
             return spec;
           }),
           py::arg("scale"), py::arg("lengthscales"), py::arg("trend") = 0.0)
      .def_static("from_lengthscales", &KernelSpec::from_lengthscales,
                  py::arg("scale"), py::arg("lengthscales"),
                  py::arg("trend") = 0.0)
      .def_readonly("scale", &KernelSpec::scale)
      .def_readonly("lengthscales", &KernelSpec::lengthscales)
      .def_readonly("trend", &KernelSpec::trend);

  m.def("kernel_eval", &kernel_eval, py::arg("spec"), py::arg("x"),
        py::arg("x2"));

  py::class_<ObservationSet>(m, "ObservationSet")
      .def(py::init([](const Mat& locations, const Vec& values,
                       const Vec& noise_variances) {
             ObservationSet obs;
             obs.locations = locations;
             obs.values = values;
             obs.noise_variances = noise_variances;
             obs.validate();
             return obs;
           }),
           py::arg("locations"), py::arg("values"), py::arg("noise_variances"))
      .def_readonly("locations", &ObservationSet::locations)
      .def_readonly("values", &ObservationSet::values)
      .def_readonly("noise_variances", &ObservationSet::noise_variances);

  py::class_<KrigingModel>(m, "KrigingModel")
      .def(py::init<KernelSpec, ObservationSet>(), py::arg("kernel"),
           py::arg("observations"))
      .def(
          "posterior",
          [](const KrigingModel& model, const Mat& query) {
            const PosteriorBatch post = model.posterior(query);
            return py::make_tuple(post.means, post.variances);
          },
          py::arg("query"))
      .def("with_observation", &KrigingModel::with_observation, py::arg("x"),
           py::arg("y"), py::arg("noise_var"))
      .def("variance_after_hypothetical",
           &KrigingModel::variance_after_hypothetical, py::arg("x_cand"),
           py::arg("noise_var"), py::arg("query"))
      .def_property_readonly("size", &KrigingModel::size);

  m.def(
      "fit_hyperparameters",
      [](const ObservationSet& obs, int restarts, bool fit_nugget,
         std::uint64_t seed) {
        FitOptions options;
        options.restarts = restarts;
        options.fit_nugget = fit_nugget;
        options.seed = seed;
        const FitResult fit = fit_hyperparameters(obs, options);
        return py::make_tuple(fit.spec, fit.nugget, fit.log_likelihood);
      },
      py::arg("observations"), py::arg("restarts") = 5,
      py::arg("fit_nugget") = false, py::arg("seed") = 0);

  m.def(
      "classify",
      [](const Vec& means, const Vec& vars) {
        return classify(make_post(means, vars));
      },
      py::arg("means"), py::arg("variances"));
  m.def(
      "gaps",
      [](const Vec& means, const Vec& vars) {
        const GapResult g = gaps(make_post(means, vars));
        return py::make_tuple(g.per_surface, g.min_gap);
      },
      py::arg("means"), py::arg("variances"));
  m.def(
      "min_prob",
      [](const Vec& means, const Vec& vars) {
        return min_prob(make_post(means, vars));
      },
      py::arg("means"), py::arg("variances"));
  m.def(
      "min_moments_two",
      [](double mu1, double var1, double mu2, double var2) {
        const MinMoments moments = min_moments_two(mu1, var1, mu2, var2);
        return py::make_tuple(moments.mean, moments.second_moment);
      },
      py::arg("mu1"), py::arg("var1"), py::arg("mu2"), py::arg("var2"));
  m.def(
      "min_mean",
      [](const Vec& means, const Vec& vars) {
        return min_mean(make_post(means, vars));
      },
      py::arg("means"), py::arg("variances"));
  m.def(
      "m_gap",
      [](const Vec& means, const Vec& vars) {
        return m_gap(make_post(means, vars));
      },
      py::arg("means"), py::arg("variances"));

  m.def(
      "gamma_schedule",
      [](double ucb_scale, double k) {
        AcquisitionSpec spec;
        spec.ucb_scale = ucb_scale;
        return gamma_schedule(spec, k);
      },
      py::arg("ucb_scale"), py::arg("k"));
  m.def(
      "gap_ucb_score",
      [](const Vec& means, const Vec& vars, int ell, double gamma) {
        return gap_ucb_score(make_post(means, vars), ell, gamma);
      },
      py::arg("means"), py::arg("variances"), py::arg("ell"), py::arg("gamma"));
  m.def(
      "gap_sur_score",
      [](const Vec& means, const Vec& vars, int ell, double noise_var) {
        return gap_sur_score(make_post(means, vars), ell, noise_var);
      },
      py::arg("means"), py::arg("variances"), py::arg("ell"),
      py::arg("noise_var"));

  m.def(
      "lhs_candidates",
      [](const Vec& lo, const Vec& hi, int count, std::uint64_t seed) {
        Box box;
        box.lo = lo;
        box.hi = hi;
        Rng rng(seed);
        return lhs_candidates(box, count, rng);
      },
      py::arg("lo"), py::arg("hi"), py::arg("count"), py::arg("seed") = 0);

  m.def(
      "sir_trajectory",
      [](int population, double beta_no_action, double beta_action,
         double recovery, const std::string& regime, int s0, int i0,
         std::uint64_t seed) {
        SirParams params;
        params.population = population;
        params.beta_no_action = beta_no_action;
        params.beta_action = beta_action;
        params.recovery = recovery;
        Rng rng(seed);
        const SirOutcome outcome = sir_trajectory(
            params,
            regime == "action" ? SirRegime::Action : SirRegime::NoAction, s0,
            i0, rng);
        return py::make_tuple(outcome.final_susceptibles, outcome.event_count);
      },
      py::arg("population"), py::arg("beta_no_action"), py::arg("beta_action"),
      py::arg("recovery"), py::arg("regime"), py::arg("s0"), py::arg("i0"),
      py::arg("seed") = 0);

  // A whole seeded experiment from a JSON config document.
  m.def(
      "run_experiment",
      [](const std::string& config_json, std::uint64_t seed) {
        const auto config =
            bench::ExperimentConfig::parse(config_json, "<python>");
        const SamplerFamily family = bench::make_family(config.problem);
        DesignerConfig designer = config.designer;
        designer.seed = seed;
        designer.validate(family);
        const TestGrid grid =
            bench::make_grid(config.problem, config.metrics, family);
        const RunReport report = run(designer, family, grid);
        py::dict out;
        out["empirical_loss"] = report.trace.back().empirical_loss;
        out["error_prob"] = report.trace.back().error_prob;
        if (report.trace.back().true_loss) {
          out["true_loss"] = *report.trace.back().true_loss;
        }
        out["d_counts"] = report.design.per_surface_counts;
        out["classifier"] = report.classifier_on_grid;
        out["grid"] = grid.points;
        return out;
      },
      py::arg("config_json"), py::arg("seed") = 0);
}
