#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "feedresp/core_model.hpp"
#include "feedresp/estimation.hpp"
#include "feedresp/evaluation.hpp"
#include "feedresp/inference.hpp"
#include "feedresp/io.hpp"
#include "feedresp/simulator.hpp"

namespace py = pybind11;
using namespace feedresp;

PYBIND11_MODULE(_feedresp, m) {
  m.doc() = "Stochastic model of follower response to advocate posts";
  m.attr("__version__") = kToolVersion;

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);

  py::enum_<Stance>(m, "Stance")
      .value("supporter", Stance::supporter)
      .value("opponent", Stance::opponent)
      .value("neutral", Stance::neutral);

  py::class_<UserRecord>(m, "UserRecord")
      .def(py::init<>())
      .def(py::init([](std::string id, double rate, std::int64_t friends, Stance stance,
                       std::int64_t m, std::int64_t n, std::int64_t M) {
             return UserRecord{std::move(id), rate, friends, stance, m, n, M};
           }),
           py::arg("user_id"), py::arg("posting_rate"), py::arg("friend_count"),
           py::arg("stance") = Stance::supporter, py::arg("topic_posts") = 0,
           py::arg("total_posts") = 0, py::arg("responses") = 0)
      .def_readwrite("user_id", &UserRecord::user_id)
      .def_readwrite("posting_rate", &UserRecord::posting_rate)
      .def_readwrite("friend_count", &UserRecord::friend_count)
      .def_readwrite("stance", &UserRecord::stance)
      .def_readwrite("topic_posts", &UserRecord::topic_posts)
      .def_readwrite("total_posts", &UserRecord::total_posts)
      .def_readwrite("responses", &UserRecord::responses)
      .def("__repr__", [](const UserRecord& u) {
        return "UserRecord('" + u.user_id + "', M=" + std::to_string(u.responses) + ")";
      });

  py::class_<PopulationParams>(m, "PopulationParams")
      .def(py::init([](std::string id, std::int64_t N, double rbar) {
             return PopulationParams{std::move(id), N, rbar};
           }),
           py::arg("advocate_id") = "advocate", py::arg("advocate_post_count") = 400,
           py::arg("typical_friend_rate") = 1.61)
      .def_readwrite("advocate_id", &PopulationParams::advocate_id)
      .def_readwrite("advocate_post_count", &PopulationParams::advocate_post_count)
      .def_readwrite("typical_friend_rate", &PopulationParams::typical_friend_rate);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double mu, double lambda, double v, double p) {
             return ModelParams{mu, lambda, v, p};
           }),
           py::arg("mu") = 14.0, py::arg("lambda_") = 14.0, py::arg("views_per_post") = 38.0,
           py::arg("p_act") = 0.12)
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("lambda_", &ModelParams::lambda)
      .def_readwrite("views_per_post", &ModelParams::views_per_post)
      .def_readwrite("p_act", &ModelParams::p_act)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(mu=" + format_double(p.mu) + ", lambda_=" + format_double(p.lambda) +
               ", views_per_post=" + format_double(p.views_per_post) +
               ", p_act=" + format_double(p.p_act) + ")";
      });

  py::class_<DerivedUserRates>(m, "DerivedUserRates")
      .def_readonly("receive_rate", &DerivedUserRates::receive_rate)
      .def_readonly("visit_rate", &DerivedUserRates::visit_rate)
      .def_readonly("rho", &DerivedUserRates::rho)
      .def_readonly("p_visible", &DerivedUserRates::p_visible)
      .def_readonly("degenerate", &DerivedUserRates::degenerate);

  py::class_<ResponseDistribution>(m, "ResponseDistribution")
      .def_readonly("pmf", &ResponseDistribution::pmf)
      .def_readonly("mean", &ResponseDistribution::mean)
      .def_readonly("std_dev", &ResponseDistribution::std_dev);

  m.def("p_view", py::overload_cast<std::int64_t, double, double>(&p_view), py::arg("newer_posts"),
        py::arg("mu"), py::arg("lambda_"));
  m.def("list_position_pmf", &list_position_pmf, py::arg("newer_posts"), py::arg("rho"));
  m.def("p_visible",
        py::overload_cast<const UserRecord&, const PopulationParams&, const ModelParams&>(&p_visible),
        py::arg("user"), py::arg("population"), py::arg("params"));
  m.def("topic_prior_density", &topic_prior_density, py::arg("p"), py::arg("topic_posts"),
        py::arg("total_posts"));
  m.def("response_pmf",
        py::overload_cast<std::int64_t, std::int64_t, std::int64_t, std::int64_t, double>(&response_pmf),
        py::arg("responses"), py::arg("topic_posts"), py::arg("total_posts"),
        py::arg("advocate_posts"), py::arg("scale"));
  m.def("response_distribution",
        py::overload_cast<const UserRecord&, const PopulationParams&, const ModelParams&>(
            &response_distribution),
        py::arg("user"), py::arg("population"), py::arg("params"));

  py::enum_<FreeParameters>(m, "FreeParameters")
      .value("views_and_p_act", FreeParameters::views_and_p_act)
      .value("surfing_views_and_p_act", FreeParameters::surfing_views_and_p_act);

  py::class_<FitConfig>(m, "FitConfig")
      .def(py::init<>())
      .def_readwrite("free", &FitConfig::free)
      .def_readwrite("initial", &FitConfig::initial)
      .def_readwrite("starts", &FitConfig::starts)
      .def_readwrite("intervals", &FitConfig::intervals)
      .def_readwrite("gradient_tolerance", &FitConfig::gradient_tolerance)
      .def_readwrite("max_evaluations", &FitConfig::max_evaluations);

  py::class_<Interval>(m, "Interval")
      .def_readonly("low", &Interval::low)
      .def_readonly("high", &Interval::high)
      .def_readonly("method", &Interval::method)
      .def_readonly("unbounded", &Interval::unbounded);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::params)
      .def_readonly("confidence_intervals", &FitResult::confidence_intervals)
      .def_readonly("log_likelihood", &FitResult::log_likelihood)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("gradient_norm", &FitResult::gradient_norm)
      .def_readonly("p_act_at_boundary", &FitResult::p_act_at_boundary)
      .def_readonly("included_users", &FitResult::included_users)
      .def_property_readonly("excluded_users", [](const FitResult& f) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : f.excluded_users) out.emplace_back(e.user_id, e.reason);
        return out;
      });

  m.def("fit_mle",
        [](const std::vector<UserRecord>& users, const PopulationParams& pop, const FitConfig& cfg) {
          py::gil_scoped_release release;
          return fit_mle(users, pop, cfg);
        },
        py::arg("users"), py::arg("population"), py::arg("config") = FitConfig{});

  py::class_<LogisticFit>(m, "LogisticFit")
      .def_readonly("beta0", &LogisticFit::beta0)
      .def_readonly("beta1", &LogisticFit::beta1)
      .def_readonly("se_beta0", &LogisticFit::se_beta0)
      .def_readonly("se_beta1", &LogisticFit::se_beta1)
      .def_readonly("iterations", &LogisticFit::iterations);
  m.def("fit_logistic",
        [](const std::vector<UserRecord>& users, const PopulationParams& pop) {
          return fit_logistic(users, pop);
        },
        py::arg("users"), py::arg("population"));

  py::class_<PredictionRecord>(m, "PredictionRecord")
      .def_readonly("user_id", &PredictionRecord::user_id)
      .def_readonly("predicted_mean", &PredictionRecord::predicted_mean)
      .def_readonly("predicted_std", &PredictionRecord::predicted_std)
      .def_readonly("observed", &PredictionRecord::observed)
      .def_readonly("abs_error", &PredictionRecord::abs_error)
      .def_readonly("advocate_posts", &PredictionRecord::advocate_posts);
  m.def("predict_users",
        [](const std::vector<UserRecord>& users, const PopulationParams& pop,
           const ModelParams& params) { return predict_users(users, pop, params); },
        py::arg("users"), py::arg("population"), py::arg("params"));
  m.def("predict_user_logistic", &predict_user_logistic, py::arg("user"), py::arg("fit"),
        py::arg("population"));

  py::class_<Classification>(m, "Classification")
      .def_readonly("set_size", &Classification::set_size)
      .def_readonly("true_positive", &Classification::true_positive)
      .def_readonly("false_positive", &Classification::false_positive)
      .def_readonly("false_negative", &Classification::false_negative)
      .def_readonly("true_negative", &Classification::true_negative)
      .def_readonly("precision", &Classification::precision)
      .def_readonly("recall", &Classification::recall)
      .def_readonly("error_fraction", &Classification::error_fraction);
  m.def("classify_top_responders",
        [](const std::vector<PredictionRecord>& p, double f) { return classify_top_responders(p, f); },
        py::arg("predictions"), py::arg("fraction") = 0.25);
  m.def("precision_recall_points",
        [](const std::vector<PredictionRecord>& p, double f) {
          std::vector<std::tuple<std::size_t, double, double>> out;
          for (const auto& pt : precision_recall_points(p, f)) out.emplace_back(pt.k, pt.recall, pt.precision);
          return out;
        },
        py::arg("predictions"), py::arg("fraction") = 0.25,
        "List of (k, recall, precision) tuples.");

  py::class_<InterestPosterior>(m, "InterestPosterior")
      .def_readonly("user_id", &InterestPosterior::user_id)
      .def_readonly("grid", &InterestPosterior::grid)
      .def_readonly("prior_density", &InterestPosterior::prior_density)
      .def_readonly("posterior_density", &InterestPosterior::posterior_density)
      .def_readonly("prior_mean", &InterestPosterior::prior_mean)
      .def_readonly("posterior_mean", &InterestPosterior::posterior_mean)
      .def_readonly("response_scale", &InterestPosterior::response_scale);
  m.def("posterior_interest",
        py::overload_cast<const UserRecord&, const PopulationParams&, const ModelParams&, int>(
            &posterior_interest),
        py::arg("user"), py::arg("population"), py::arg("params"), py::arg("grid_size") = 1001);

  py::class_<Correlation>(m, "Correlation")
      .def_readonly("rho", &Correlation::rho)
      .def_readonly("p_value", &Correlation::p_value)
      .def_readonly("defined", &Correlation::defined)
      .def_readonly("method", &Correlation::method);
  m.def("spearman_rho",
        [](const std::vector<double>& x, const std::vector<double>& y) { return spearman_rho(x, y); },
        py::arg("x"), py::arg("y"));
  m.def("fisher_exact",
        [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
          return fisher_exact({a, b, c, d}).p_value;
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
        "Two-sided p-value of the table [[a, b], [c, d]].");

  py::class_<UserTruth>(m, "UserTruth")
      .def_readonly("user_id", &UserTruth::user_id)
      .def_readonly("p_topic", &UserTruth::p_topic)
      .def_readonly("p_visible", &UserTruth::p_visible);
  m.def("simulate_population",
        [](std::int64_t user_count, std::uint64_t seed, const ModelParams& params,
           std::int64_t advocate_post_count) {
          PopulationConfig cfg;
          cfg.user_count = user_count;
          cfg.seed = seed;
          cfg.advocate_post_count = advocate_post_count;
          auto pop = generate_population(cfg);
          simulate_responses(pop.users, pop.truths, params, pop.population, seed);
          return py::make_tuple(pop.users, pop.truths, pop.population);
        },
        py::arg("user_count") = 500, py::arg("seed") = 1, py::arg("params") = ModelParams{},
        py::arg("advocate_post_count") = 400,
        "Synthetic population with simulated responses: (users, truths, population).");

  m.def("read_users_csv", &read_users_csv, py::arg("path"));
  m.def("write_users_csv",
        [](const std::filesystem::path& path, const std::vector<UserRecord>& users) {
          write_users_csv(path, users, {{"tool", std::string("feedresp ") + kToolVersion}});
        },
        py::arg("path"), py::arg("users"));
}
