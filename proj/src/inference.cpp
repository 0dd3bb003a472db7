#include "feedresp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "feedresp/core_model.hpp"
#include "feedresp/parallel.hpp"

namespace feedresp {
namespace {

double response_fraction(double count, std::int64_t advocate_posts) {
  return count / static_cast<double>(advocate_posts);
}

// Indices sorted by value descending, ties by ascending user_id.
std::vector<std::size_t> rank_descending(std::span<const PredictionRecord> predictions,
                                         const std::vector<double>& values) {
  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return predictions[a].user_id < predictions[b].user_id;
  });
  return order;
}

std::size_t top_count(std::size_t users, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw DomainError("classification fraction must lie in (0, 1)");
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(users) - 1e-12));
  if (k == 0) throw DomainError("classification fraction selects no users");
  return k;
}

std::vector<double> predicted_fractions(std::span<const PredictionRecord> predictions) {
  std::vector<double> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) out.push_back(response_fraction(p.predicted_mean, p.advocate_posts));
  return out;
}

std::vector<double> observed_fractions(std::span<const PredictionRecord> predictions) {
  std::vector<double> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions)
    out.push_back(response_fraction(static_cast<double>(p.observed), p.advocate_posts));
  return out;
}

std::vector<std::string> tie_group(std::span<const PredictionRecord> predictions,
                                   const std::vector<double>& values,
                                   const std::vector<std::size_t>& order, std::size_t k) {
  const double cutoff = values[order[k - 1]];
  std::vector<std::string> group;
  for (std::size_t i : order)
    if (values[i] == cutoff) group.push_back(predictions[i].user_id);
  // Only a tie that straddles the cutoff is interesting.
  const bool straddles = k < order.size() && values[order[k]] == cutoff;
  if (!straddles) group.clear();
  return group;
}

}  // namespace

PredictionRecord predict_user(const UserRecord& user, const PopulationParams& pop,
                              const ModelParams& params) {
  const auto dist = response_distribution(user, pop, params);
  PredictionRecord rec;
  rec.user_id = user.user_id;
  rec.predicted_mean = dist.mean;
  rec.predicted_std = dist.std_dev;
  rec.observed = user.responses;
  rec.abs_error = std::fabs(dist.mean - static_cast<double>(user.responses));
  rec.advocate_posts = pop.advocate_post_count;
  return rec;
}

std::vector<PredictionRecord> predict_users(std::span<const UserRecord> users,
                                            const PopulationParams& pop,
                                            const ModelParams& params) {
  params.validate();
  const SurfingLaw law(params.mu, params.lambda);
  std::vector<PredictionRecord> out(users.size());
  parallel_for(users.size(), [&](std::size_t i) {
    const UserRecord& user = users[i];
    pop.check_user(user);
    const double scale =
        p_visible(user, pop, params.views_per_post, law).p_visible * effective_p_act(user, params);
    const auto dist =
        response_distribution(user.topic_posts, user.total_posts, pop.advocate_post_count, scale);
    PredictionRecord& rec = out[i];
    rec.user_id = user.user_id;
    rec.predicted_mean = dist.mean;
    rec.predicted_std = dist.std_dev;
    rec.observed = user.responses;
    rec.abs_error = std::fabs(dist.mean - static_cast<double>(user.responses));
    rec.advocate_posts = pop.advocate_post_count;
  }, 4);
  return out;
}

PredictionRecord predict_user_logistic(const UserRecord& user, const LogisticFit& fit,
                                       const PopulationParams& pop) {
  const auto pred = logistic_predict(user, fit, pop);
  const double N = static_cast<double>(pop.advocate_post_count);
  const double p = pred.expected_responses / N;
  PredictionRecord rec;
  rec.user_id = user.user_id;
  rec.predicted_mean = pred.expected_responses;
  rec.predicted_std = std::sqrt(N * p * (1.0 - p));
  rec.observed = user.responses;
  rec.abs_error = std::fabs(rec.predicted_mean - static_cast<double>(user.responses));
  rec.advocate_posts = pop.advocate_post_count;
  return rec;
}

Classification classify_top_responders(std::span<const PredictionRecord> predictions,
                                       double fraction) {
  if (predictions.empty()) throw DomainError("classification requires at least one prediction");
  const std::size_t k = top_count(predictions.size(), fraction);
  const auto pred = predicted_fractions(predictions);
  const auto obs = observed_fractions(predictions);
  const auto pred_order = rank_descending(predictions, pred);
  const auto obs_order = rank_descending(predictions, obs);

  Classification c;
  c.fraction = fraction;
  c.set_size = k;
  c.labels.resize(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) c.labels[i].user_id = predictions[i].user_id;
  for (std::size_t r = 0; r < k; ++r) {
    c.labels[pred_order[r]].predicted_top = true;
    c.labels[obs_order[r]].actual_top = true;
  }
  for (const auto& l : c.labels) {
    if (l.predicted_top && l.actual_top) ++c.true_positive;
    else if (l.predicted_top) ++c.false_positive;
    else if (l.actual_top) ++c.false_negative;
    else ++c.true_negative;
  }
  const double kk = static_cast<double>(k);
  c.precision = static_cast<double>(c.true_positive) / kk;
  c.recall = static_cast<double>(c.true_positive) / kk;
  c.error_fraction = static_cast<double>(c.false_positive + c.false_negative) /
                     static_cast<double>(predictions.size());
  c.predicted_cutoff = pred[pred_order[k - 1]];
  c.actual_cutoff = obs[obs_order[k - 1]];
  c.predicted_tie_group = tie_group(predictions, pred, pred_order, k);
  c.actual_tie_group = tie_group(predictions, obs, obs_order, k);
  return c;
}

std::vector<PrecisionRecallPoint> precision_recall_points(
    std::span<const PredictionRecord> predictions, double fraction) {
  if (predictions.size() < 2) throw DomainError("precision-recall curve requires at least two users");
  const std::size_t k_actual = top_count(predictions.size(), fraction);
  const auto pred_order = rank_descending(predictions, predicted_fractions(predictions));
  const auto obs_order = rank_descending(predictions, observed_fractions(predictions));
  std::vector<bool> actual(predictions.size(), false);
  for (std::size_t r = 0; r < k_actual; ++r) actual[obs_order[r]] = true;

  std::vector<PrecisionRecallPoint> curve;
  curve.reserve(predictions.size());
  std::size_t hits = 0;
  for (std::size_t k = 1; k <= predictions.size(); ++k) {
    if (actual[pred_order[k - 1]]) ++hits;
    curve.push_back({k, static_cast<double>(hits) / static_cast<double>(k_actual),
                     static_cast<double>(hits) / static_cast<double>(k)});
  }
  return curve;
}

double trapezoid(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double h = 1.0 / static_cast<double>(values.size() - 1);
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * h;
}

InterestPosterior posterior_interest(std::int64_t topic_posts, std::int64_t total_posts,
                                     std::int64_t responses, std::int64_t advocate_posts,
                                     double scale, int grid_size) {
  if (grid_size < 101) throw DomainError("posterior grid needs at least 101 points");
  if (responses < 0 || responses > advocate_posts) throw DomainError("response count outside 0..N");
  if (!(scale >= 0.0 && scale <= 1.0)) throw DomainError("response scale A must lie in [0, 1]");
  if (scale == 0.0 && responses > 0)
    throw DomainError("posterior undefined: zero response probability with recorded responses");

  InterestPosterior post;
  post.response_scale = scale;
  const auto count = static_cast<std::size_t>(grid_size);
  post.grid.resize(count);
  post.prior_density.resize(count);
  post.posterior_density.resize(count);
  std::vector<double> log_post(count);
  const double M = static_cast<double>(responses);
  const double rest = static_cast<double>(advocate_posts - responses);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(count - 1);
    post.grid[i] = p;
    post.prior_density[i] = topic_prior_density(p, topic_posts, total_posts);
    // log Binomial(N, A p; M) up to a constant
    double log_lik = 0.0;
    if (M > 0.0) log_lik += p > 0.0 ? M * std::log(scale * p) : -std::numeric_limits<double>::infinity();
    if (rest > 0.0) log_lik += rest * std::log1p(-scale * p);
    log_post[i] = post.prior_density[i] > 0.0 ? std::log(post.prior_density[i]) + log_lik
                                              : -std::numeric_limits<double>::infinity();
    peak = std::max(peak, log_post[i]);
  }
  for (std::size_t i = 0; i < count; ++i) post.posterior_density[i] = std::exp(log_post[i] - peak);

  const double prior_area = trapezoid(post.prior_density);
  const double post_area = trapezoid(post.posterior_density);
  if (!(post_area > 0.0)) throw ModelError("posterior has no mass on the grid");
  std::vector<double> weighted_prior(count), weighted_post(count);
  for (std::size_t i = 0; i < count; ++i) {
    post.prior_density[i] /= prior_area;
    post.posterior_density[i] /= post_area;
    weighted_prior[i] = post.grid[i] * post.prior_density[i];
    weighted_post[i] = post.grid[i] * post.posterior_density[i];
  }
  post.prior_mean = trapezoid(weighted_prior);
  post.posterior_mean = trapezoid(weighted_post);
  return post;
}

InterestPosterior posterior_interest(const UserRecord& user, const PopulationParams& pop,
                                     const ModelParams& params, int grid_size) {
  pop.check_user(user);
  if (user.stance == Stance::opponent && user.responses > 0)
    throw DomainError("posterior undefined for an opponent with recorded responses");
  const double scale = response_scale(user, pop, params);
  InterestPosterior post = posterior_interest(user.topic_posts, user.total_posts, user.responses,
                                              pop.advocate_post_count, scale, grid_size);
  post.user_id = user.user_id;
  return post;
}

}  // namespace feedresp
