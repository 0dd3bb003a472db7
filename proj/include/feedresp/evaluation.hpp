#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "feedresp/inference.hpp"

namespace feedresp {

struct Correlation {
  double rho = 0.0;
  double p_value = 1.0;
  bool defined = true;  // false for constant input
  std::string method;   // "exact-permutation" or "t-approximation"
};

/// Sample ranks with ties assigned their average (mid-rank), 1-based.
std::vector<double> mid_ranks(std::span<const double> values);

/// Spearman rank correlation with mid-rank ties. Two-sided p-value by exact
/// enumeration of all permutations for n <= 8 and by the Student t
/// approximation otherwise.
Correlation spearman_rho(std::span<const double> x, std::span<const double> y);

struct DifferenceTest {
  double p_value = 1.0;
  double observed_difference = 0.0;  // rho(x, y1) - rho(x, y2)
  std::int64_t resamples = 0;        // resamples with both correlations defined
  std::uint64_t seed = 0;
  std::string method = "paired-bootstrap";
};

/// Two-sided test that two dependent Spearman correlations against the same
/// observations are equal, by resampling users with replacement.
DifferenceTest correlation_difference_test(std::span<const double> x, std::span<const double> y1,
                                           std::span<const double> y2,
                                           std::int64_t resamples = 10000,
                                           std::uint64_t seed = 20130101);

struct FisherResult {
  double p_value = 1.0;
  bool degenerate = false;  // a zero margin
};

/// Two-sided Fisher exact test for the 2x2 table {{a, b}, {c, d}}: sums the
/// probabilities of tables with the same margins that are no more likely
/// than the observed one.
FisherResult fisher_exact(const std::array<std::int64_t, 4>& table);

/// Spearman correlation between |prediction error| and predicted std.
Correlation error_uncertainty_correlation(std::span<const PredictionRecord> predictions);

struct GoodnessOfFit {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Pearson chi-square goodness of fit of observed counts to a pmf; adjacent
/// cells are pooled until each expected count is at least `min_expected`.
GoodnessOfFit chi_square_gof(std::span<const std::int64_t> counts, std::span<const double> pmf,
                             double min_expected = 5.0);

struct ModelEvaluation {
  std::string model_name;
  Correlation prediction;    // predicted mean vs observed M
  Correlation error_vs_std;  // |error| vs predicted std
  Classification classification;
  double classification_fisher_p = 1.0;
  std::vector<PrecisionRecallPoint> pr_curve;
};

struct EvaluationReport {
  ModelEvaluation a;
  ModelEvaluation b;
  DifferenceTest prediction_difference;
  DifferenceTest error_difference;
};

ModelEvaluation evaluate_model(const std::string& name,
                               std::span<const PredictionRecord> predictions,
                               double fraction = 0.25);

/// Compares two prediction tables over the same users. Throws InputError
/// naming the symmetric difference if the user sets differ. Rows of `b`
/// are matched to `a` by user_id.
EvaluationReport compare_models(const std::string& name_a, std::span<const PredictionRecord> a,
                                const std::string& name_b, std::span<const PredictionRecord> b,
                                double fraction = 0.25, std::int64_t resamples = 10000,
                                std::uint64_t seed = 20130101);

}  // namespace feedresp
