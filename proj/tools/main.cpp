// feedresp command-line tool.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <map>

#include "feedresp/core_model.hpp"
#include "feedresp/estimation.hpp"
#include "feedresp/evaluation.hpp"
#include "feedresp/inference.hpp"
#include "feedresp/io.hpp"
#include "feedresp/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace feedresp;

namespace {

struct Options {
  std::string users;
  std::string params;
  std::string config;
  std::string out_dir;
  std::string user_id;
  std::optional<std::uint64_t> seed;
  std::optional<double> fraction;
  std::vector<std::string> predictions;
};

struct Context {
  RunConfig config;
  fs::path out_dir;

  Metadata metadata(const std::string& command) const {
    return {{"tool", std::string("feedresp ") + kToolVersion},
            {"command", command},
            {"config_hash", config_hash(config)},
            {"seed", std::to_string(config.seed)}};
  }
};

Context load_context(const Options& opt) {
  Context ctx;
  if (!opt.config.empty()) ctx.config = read_run_config(opt.config);
  if (opt.seed) {
    ctx.config.seed = *opt.seed;
    ctx.config.simulation.population.seed = *opt.seed;
  }
  if (opt.fraction) {
    if (!(*opt.fraction > 0.0 && *opt.fraction < 1.0))
      throw InputError("--fraction must lie in (0, 1)");
    ctx.config.fraction = *opt.fraction;
  }
  if (!opt.out_dir.empty()) ctx.config.output_dir = opt.out_dir;
  ctx.out_dir = ctx.config.output_dir;
  return ctx;
}

std::vector<UserRecord> load_users(const Options& opt, const PopulationParams& pop) {
  if (opt.users.empty()) throw InputError("--users is required");
  auto users = read_users_csv(opt.users);
  for (const auto& u : users) {
    try {
      pop.check_user(u);
    } catch (const InputError& e) {
      throw InputError(opt.users + ": " + e.what());
    }
  }
  return users;
}

ParamsFile load_params(const Options& opt, const RunConfig& config) {
  if (!opt.params.empty()) return read_params_file(opt.params);
  if (config.model) return ParamsFile{ModelKind::stochastic, *config.model, std::nullopt, std::nullopt};
  throw InputError("--params is required (config model is \"fit\")");
}

std::vector<PredictionRecord> make_predictions(const std::vector<UserRecord>& users,
                                               const PopulationParams& pop,
                                               const ParamsFile& params) {
  if (params.kind == ModelKind::stochastic) return predict_users(users, pop, params.params);
  std::vector<PredictionRecord> rows;
  rows.reserve(users.size());
  for (const auto& u : users) rows.push_back(predict_user_logistic(u, *params.logistic, pop));
  return rows;
}

std::string pr_curve_csv(const std::vector<PrecisionRecallPoint>& points, const Metadata& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + ": " + v + "\n";
  out += "k,recall,precision\n";
  for (const auto& p : points)
    out += std::to_string(p.k) + ',' + format_double(p.recall) + ',' + format_double(p.precision) + '\n';
  return out;
}

json metadata_json(const Metadata& meta) {
  json out = json::object();
  for (const auto& [k, v] : meta) out[k] = v;
  return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json correlation_json(const Correlation& c) {
  return {{"rho", number(c.rho)}, {"p_value", number(c.p_value)}, {"defined", c.defined},
          {"method", c.method}};
}

json classification_json(const Classification& c, double fisher_p) {
  return {{"fraction", c.fraction},
          {"set_size", c.set_size},
          {"true_positive", c.true_positive},
          {"false_positive", c.false_positive},
          {"false_negative", c.false_negative},
          {"true_negative", c.true_negative},
          {"precision", number(c.precision)},
          {"recall", number(c.recall)},
          {"error_fraction", number(c.error_fraction)},
          {"fisher_exact_p", number(fisher_p)},
          {"predicted_cutoff", number(c.predicted_cutoff)},
          {"actual_cutoff", number(c.actual_cutoff)},
          {"predicted_tie_group", c.predicted_tie_group},
          {"actual_tie_group", c.actual_tie_group}};
}

json difference_json(const DifferenceTest& t) {
  return {{"observed_difference", number(t.observed_difference)},
          {"p_value", number(t.p_value)},
          {"resamples", t.resamples},
          {"seed", t.seed},
          {"method", t.method}};
}

int cmd_fit(const Options& opt) {
  const auto ctx = load_context(opt);
  const auto& pop = ctx.config.population;
  const auto users = load_users(opt, pop);
  const auto meta = ctx.metadata("fit");
  const auto path = ctx.out_dir / "params.json";
  if (ctx.config.model_kind == ModelKind::logistic) {
    ParamsFile file;
    file.kind = ModelKind::logistic;
    file.logistic = fit_logistic(users, pop);
    write_params_file(path, file, meta);
    std::printf("logistic fit: beta0=%.6g (se %.3g) beta1=%.6g (se %.3g)\n", file.logistic->beta0,
                file.logistic->se_beta0, file.logistic->beta1, file.logistic->se_beta1);
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
  }
  const auto fit = fit_mle(users, pop, ctx.config.fit);
  ParamsFile file;
  file.params = fit.params;
  file.fit = fit;
  write_params_file(path, file, meta);
  std::printf("fit: views_per_post=%.6g p_act=%.6g mu=%.6g lambda=%.6g loglik=%.10g\n",
              fit.params.views_per_post, fit.params.p_act, fit.params.mu, fit.params.lambda,
              fit.log_likelihood);
  for (const auto& [name, iv] : fit.confidence_intervals)
    std::printf("  95%% %s: [%.6g, %.6g] (%s%s)\n", name.c_str(), iv.low, iv.high,
                iv.method.c_str(), iv.unbounded ? ", unbounded" : "");
  if (!fit.excluded_users.empty())
    std::printf("excluded %zu users\n", fit.excluded_users.size());
  std::printf("wrote %s\n", path.string().c_str());
  if (!fit.converged) {
    std::fprintf(stderr, "error: optimizer did not converge (gradient norm %.3g)\n",
                 fit.gradient_norm);
    return 1;
  }
  return 0;
}

int cmd_predict(const Options& opt) {
  const auto ctx = load_context(opt);
  const auto& pop = ctx.config.population;
  const auto params = load_params(opt, ctx.config);
  const auto users = load_users(opt, pop);
  const auto meta = ctx.metadata("predict");
  const auto rows = make_predictions(users, pop, params);
  const auto path = ctx.out_dir / "predictions.csv";
  write_predictions_csv(path, rows, meta);
  std::printf("wrote %s (%zu users)\n", path.string().c_str(), rows.size());
  if (ctx.config.response_distributions) {
    if (params.kind != ModelKind::stochastic)
      throw InputError("response distributions need a stochastic params file");
    std::string out;
    for (const auto& [k, v] : meta) out += "# " + k + ": " + v + "\n";
    out += "user_id,responses,probability\n";
    for (const auto& u : users) {
      const auto dist = response_distribution(u, pop, params.params);
      for (std::size_t M = 0; M < dist.pmf.size(); ++M)
        out += u.user_id + ',' + std::to_string(M) + ',' + format_double(dist.pmf[M]) + '\n';
    }
    const auto dpath = ctx.out_dir / "response_distributions.csv";
    write_text_file(dpath, out);
    std::printf("wrote %s\n", dpath.string().c_str());
  }
  return 0;
}

int cmd_classify(const Options& opt) {
  const auto ctx = load_context(opt);
  const auto& pop = ctx.config.population;
  const auto params = load_params(opt, ctx.config);
  const auto users = load_users(opt, pop);
  const auto meta = ctx.metadata("classify");
  const auto rows = make_predictions(users, pop, params);
  const auto eval = evaluate_model(std::string(to_string(params.kind)), rows, ctx.config.fraction);
  const auto& c = eval.classification;

  std::string labels;
  for (const auto& [k, v] : meta) labels += "# " + k + ": " + v + "\n";
  labels += "user_id,predicted_top,actual_top\n";
  for (const auto& l : c.labels)
    labels += l.user_id + ',' + (l.predicted_top ? "1" : "0") + ',' + (l.actual_top ? "1" : "0") + '\n';
  write_text_file(ctx.out_dir / "classification.csv", labels);

  json summary;
  summary["metadata"] = metadata_json(meta);
  summary["model"] = eval.model_name;
  summary["classification"] = classification_json(c, eval.classification_fisher_p);
  write_text_file(ctx.out_dir / "classification.json", summary.dump(2) + "\n");
  write_text_file(ctx.out_dir / "pr_curve.csv", pr_curve_csv(eval.pr_curve, meta));
  std::printf("top %zu of %zu: precision=%.4f recall=%.4f error=%.4f fisher_p=%.4g\n",
              c.set_size, c.labels.size(), c.precision, c.recall, c.error_fraction,
              eval.classification_fisher_p);
  return 0;
}

int cmd_evaluate(const Options& opt) {
  const auto ctx = load_context(opt);
  if (opt.predictions.size() != 2)
    throw InputError("evaluate takes two predictions files");
  const fs::path path_a = opt.predictions[0], path_b = opt.predictions[1];
  const auto a = read_predictions_csv(path_a);
  const auto b = read_predictions_csv(path_b);
  const auto meta = ctx.metadata("evaluate");
  const auto report = compare_models(path_a.stem().string(), a, path_b.stem().string(), b,
                                     ctx.config.fraction, ctx.config.bootstrap_resamples,
                                     ctx.config.seed);
  auto model_json = [](const ModelEvaluation& m) {
    return json{{"name", m.model_name},
                {"prediction_correlation", correlation_json(m.prediction)},
                {"error_std_correlation", correlation_json(m.error_vs_std)},
                {"classification", classification_json(m.classification, m.classification_fisher_p)}};
  };
  json doc;
  doc["metadata"] = metadata_json(meta);
  doc["users"] = a.size();
  doc["model_a"] = model_json(report.a);
  doc["model_b"] = model_json(report.b);
  doc["prediction_correlation_difference"] = difference_json(report.prediction_difference);
  doc["error_std_correlation_difference"] = difference_json(report.error_difference);
  write_text_file(ctx.out_dir / "evaluation.json", doc.dump(2) + "\n");
  write_text_file(ctx.out_dir / "pr_curve_a.csv", pr_curve_csv(report.a.pr_curve, meta));
  write_text_file(ctx.out_dir / "pr_curve_b.csv", pr_curve_csv(report.b.pr_curve, meta));
  std::printf("%s: spearman=%.4f (p=%.3g)\n%s: spearman=%.4f (p=%.3g)\ndifference p=%.4g\n",
              report.a.model_name.c_str(), report.a.prediction.rho, report.a.prediction.p_value,
              report.b.model_name.c_str(), report.b.prediction.rho, report.b.prediction.p_value,
              report.prediction_difference.p_value);
  return 0;
}

int cmd_posterior(const Options& opt) {
  const auto ctx = load_context(opt);
  const auto& pop = ctx.config.population;
  if (opt.user_id.empty()) throw InputError("--user-id is required");
  const auto params = load_params(opt, ctx.config);
  if (params.kind != ModelKind::stochastic)
    throw InputError("posterior needs a stochastic params file");
  const auto users = load_users(opt, pop);
  const auto it = std::find_if(users.begin(), users.end(),
                               [&](const UserRecord& u) { return u.user_id == opt.user_id; });
  if (it == users.end()) throw InputError("unknown user_id '" + opt.user_id + "'");
  const auto post = posterior_interest(*it, pop, params.params, ctx.config.posterior_grid);
  auto meta = ctx.metadata("posterior");
  meta.emplace_back("user_id", post.user_id);
  meta.emplace_back("response_scale", format_double(post.response_scale));
  meta.emplace_back("prior_mean", format_double(post.prior_mean));
  meta.emplace_back("posterior_mean", format_double(post.posterior_mean));
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + ": " + v + "\n";
  out += "p,prior,posterior\n";
  for (std::size_t i = 0; i < post.grid.size(); ++i)
    out += format_double(post.grid[i]) + ',' + format_double(post.prior_density[i]) + ',' +
           format_double(post.posterior_density[i]) + '\n';
  const auto path = ctx.out_dir / "posterior.csv";
  write_text_file(path, out);
  std::printf("user %s: prior mean %.5f, posterior mean %.5f\nwrote %s\n", post.user_id.c_str(),
              post.prior_mean, post.posterior_mean, path.string().c_str());
  return 0;
}

int cmd_simulate(const Options& opt) {
  const auto ctx = load_context(opt);
  const auto& sim = ctx.config.simulation;
  auto synthetic = generate_population(sim.population);
  simulate_responses(synthetic.users, synthetic.truths, sim.params, synthetic.population,
                     ctx.config.seed);
  const auto meta = ctx.metadata("simulate");
  write_users_csv(ctx.out_dir / "users.csv", synthetic.users, meta);
  write_truths_csv(ctx.out_dir / "truth.csv", synthetic.truths, meta);
  std::printf("wrote %zu users to %s\n", synthetic.users.size(),
              (ctx.out_dir / "users.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic model of follower response to advocate posts"};
  app.set_version_flag("--version", std::string("feedresp ") + kToolVersion);
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", opt.out_dir, "Directory for output files");
    cmd->add_option("--seed", opt.seed, "Seed (overrides the config)");
  };
  auto add_users = [&](CLI::App* cmd) {
    cmd->add_option("--users", opt.users, "Users table (CSV)")->required();
  };
  auto add_params = [&](CLI::App* cmd) {
    cmd->add_option("--params", opt.params, "Params file written by `fit`");
  };

  auto* fit = app.add_subcommand("fit", "Fit model parameters to a users table");
  add_common(fit);
  add_users(fit);
  auto* predict = app.add_subcommand("predict", "Predict response counts");
  add_common(predict);
  add_users(predict);
  add_params(predict);
  auto* classify = app.add_subcommand("classify", "Label the top responders");
  add_common(classify);
  add_users(classify);
  add_params(classify);
  classify->add_option("--fraction", opt.fraction, "Top fraction of users (default 0.25)");
  auto* evaluate = app.add_subcommand("evaluate", "Compare two prediction tables");
  add_common(evaluate);
  evaluate->add_option("predictions", opt.predictions, "Two predictions files (CSV)")
      ->required()
      ->expected(2);
  evaluate->add_option("--fraction", opt.fraction, "Top fraction of users (default 0.25)");
  auto* posterior = app.add_subcommand("posterior", "Posterior topic interest of one user");
  add_common(posterior);
  add_users(posterior);
  add_params(posterior);
  posterior->add_option("--user-id", opt.user_id, "User to analyse")->required();
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic users table");
  add_common(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::map<CLI::App*, int (*)(const Options&)> commands{
      {fit, cmd_fit},           {predict, cmd_predict},     {classify, cmd_classify},
      {evaluate, cmd_evaluate}, {posterior, cmd_posterior}, {simulate, cmd_simulate}};
  try {
    for (const auto& [cmd, run] : commands)
      if (cmd->parsed()) return run(opt);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
