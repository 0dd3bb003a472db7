#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "feedresp/estimation.hpp"
#include "feedresp/types.hpp"

namespace feedresp {

struct PredictionRecord {
  std::string user_id;
  double predicted_mean = 0.0;
  double predicted_std = 0.0;
  std::int64_t observed = 0;
  double abs_error = 0.0;
  std::int64_t advocate_posts = 1;  // N, used to rank by response fraction
};

/// Moments of the user's response distribution as a prediction of M. The
/// observed count only enters abs_error.
PredictionRecord predict_user(const UserRecord& user, const PopulationParams& pop,
                              const ModelParams& params);
std::vector<PredictionRecord> predict_users(std::span<const UserRecord> users,
                                            const PopulationParams& pop,
                                            const ModelParams& params);

/// Logistic-baseline prediction: N p with binomial spread sqrt(N p (1 - p)).
PredictionRecord predict_user_logistic(const UserRecord& user, const LogisticFit& fit,
                                       const PopulationParams& pop);

struct UserLabel {
  std::string user_id;
  bool predicted_top = false;
  bool actual_top = false;
};

struct Classification {
  double fraction = 0.25;
  std::size_t set_size = 0;  // k = ceil(fraction * U), for both label sets
  std::vector<UserLabel> labels;  // input order
  std::int64_t true_positive = 0, false_positive = 0, false_negative = 0, true_negative = 0;
  double precision = 0.0, recall = 0.0, error_fraction = 0.0;
  double predicted_cutoff = 0.0;  // predicted fraction of the k-th ranked user
  double actual_cutoff = 0.0;     // observed fraction of the k-th ranked user
  /// Users whose value equals the cutoff; membership among them was decided
  /// by user_id order.
  std::vector<std::string> predicted_tie_group;
  std::vector<std::string> actual_tie_group;
};

/// Top-fraction responder classification. Users are ranked by response
/// fraction M/N (predicted and observed); both label sets hold the top
/// ceil(fraction * U) users, ties broken by ascending user_id.
Classification classify_top_responders(std::span<const PredictionRecord> predictions,
                                       double fraction = 0.25);

struct PrecisionRecallPoint {
  std::size_t k = 0;
  double recall = 0.0;
  double precision = 0.0;
};

/// Precision and recall of the k highest predicted users against the
/// observed top-fraction label set, for k = 1..U.
std::vector<PrecisionRecallPoint> precision_recall_points(
    std::span<const PredictionRecord> predictions, double fraction = 0.25);

struct InterestPosterior {
  std::string user_id;
  std::vector<double> grid;
  std::vector<double> prior_density;
  std::vector<double> posterior_density;
  double prior_mean = 0.0;
  double posterior_mean = 0.0;
  double response_scale = 0.0;  // A used for the likelihood
};

/// Posterior of topic interest on a uniform grid over [0, 1]: prior from the
/// topical post counts times Binomial(N, A p; M), both normalized by the
/// trapezoidal rule on the grid.
InterestPosterior posterior_interest(const UserRecord& user, const PopulationParams& pop,
                                     const ModelParams& params, int grid_size = 1001);
InterestPosterior posterior_interest(std::int64_t topic_posts, std::int64_t total_posts,
                                     std::int64_t responses, std::int64_t advocate_posts,
                                     double scale, int grid_size = 1001);

/// Trapezoidal integral of samples on a uniform grid over [0, 1].
double trapezoid(std::span<const double> values);

}  // namespace feedresp
