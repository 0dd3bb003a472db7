#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "feedresp/core_model.hpp"
#include "feedresp/types.hpp"

namespace feedresp {

/// Which parameters the maximum-likelihood fit moves.
enum class FreeParameters {
  views_and_p_act,          // mu, lambda fixed
  surfing_views_and_p_act,  // mu free with lambda tied to mu
};

struct GridAxis {
  double low = 1.0;
  double high = 1.0;
  int points = 5;
};

struct FitConfig {
  FreeParameters free = FreeParameters::views_and_p_act;
  ModelParams initial;  // fixed values and fallback point
  GridAxis views_grid{4.0, 400.0, 7};
  GridAxis p_act_grid{0.01, 0.6, 6};
  GridAxis mu_grid{3.0, 60.0, 5};
  /// Box limits for the optimizer (inclusive, natural units).
  double views_min = 0.05, views_max = 1e5;
  double p_act_min = 1e-7, p_act_max = 1.0 - 1e-7;
  double mu_min = 0.5, mu_max = 500.0;
  int starts = 3;  // best grid points refined locally
  double objective_tolerance = 1e-8;
  double parameter_tolerance = 1e-6;
  double gradient_tolerance = 1e-3;
  int max_evaluations = 4000;
  bool intervals = true;
  double profile_drop = 1.92;  // chi-square(1) 95% quantile / 2

  void validate() const;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
  std::string method;  // "profile", "curvature", "boundary", "fixed"
  bool unbounded = false;
};

struct FitResult {
  ModelParams params;
  std::map<std::string, Interval> confidence_intervals;
  double log_likelihood = 0.0;
  bool converged = false;
  double gradient_norm = 0.0;
  bool p_act_at_boundary = false;
  std::vector<ExcludedUser> excluded_users;
  std::vector<std::string> free_parameters;
  double best_grid_log_likelihood = 0.0;
  std::int64_t evaluations = 0;
  std::int64_t included_users = 0;
};

/// Evaluates the fitting objective for a fixed training population. Users
/// that carry no likelihood (zero posting rate with responses, opponents
/// with responses) are excluded up front and listed.
class LikelihoodObjective {
 public:
  LikelihoodObjective(std::span<const UserRecord> users, const PopulationParams& pop);

  double operator()(const ModelParams& params) const;
  /// Per-user parameter-dependent log-likelihood terms of included users.
  std::vector<double> per_user(const ModelParams& params) const;

  const std::vector<ExcludedUser>& excluded() const { return excluded_; }
  std::size_t included() const { return users_.size(); }
  /// True if no included user with a possible response ever responded.
  bool no_responders() const { return no_responders_; }

 private:
  struct Row {
    double receive_rate;
    double posting_rate;
    std::int64_t m, n, M;
    bool opponent;
  };
  std::vector<Row> users_;
  std::vector<ExcludedUser> excluded_;
  PopulationParams pop_;
  bool no_responders_ = true;
};

FitResult fit_mle(std::span<const UserRecord> users, const PopulationParams& pop,
                  const FitConfig& config);

/// 95% intervals by profile likelihood, falling back to the observed
/// information when a profile runs into the optimizer box.
std::map<std::string, Interval> confidence_intervals(std::span<const UserRecord> users,
                                                     const PopulationParams& pop,
                                                     const FitResult& fit,
                                                     const FitConfig& config);

// --- logistic regression baseline ------------------------------------------

/// Raised when maximum-likelihood logistic coefficients do not exist.
class SeparationError : public ModelError {
 public:
  using ModelError::ModelError;
};

struct LogisticFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double se_beta0 = 0.0;
  double se_beta1 = 0.0;
  int iterations = 0;
  std::vector<std::string> skipped_users;  // zero posting rate
};

/// Logistic regression of per-post response on log posting rate, with each
/// user contributing M successes out of N trials. Fitted by IRLS.
LogisticFit fit_logistic(std::span<const UserRecord> users, const PopulationParams& pop);

struct LogisticPrediction {
  double expected_responses = 0.0;
  bool undefined_rate = false;  // zero posting rate: prediction fixed at 0
};

LogisticPrediction logistic_predict(const UserRecord& user, const LogisticFit& fit,
                                    const PopulationParams& pop);

}  // namespace feedresp
