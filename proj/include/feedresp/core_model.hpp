#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "feedresp/types.hpp"

namespace feedresp {

/// Inverse Gaussian stopping density of the law of surfing evaluated at an
/// item count m >= 1 (unnormalized over the integers).
double surfing_stop_pmf(std::int64_t m_items, double mu, double lambda);

/// Discretized law of surfing: the stopping density evaluated at integer
/// m >= 1 and normalized over m = 1..max_items, where max_items is chosen so
/// the neglected tail is below 1e-14.
class SurfingLaw {
 public:
  SurfingLaw(double mu, double lambda);

  double mu() const { return mu_; }
  double lambda() const { return lambda_; }
  std::int64_t max_items() const { return static_cast<std::int64_t>(pmf_.size()); }

  /// Normalized probability of stopping after exactly m items.
  double pmf(std::int64_t m_items) const;
  /// Probability of examining more than `newer_posts` items, i.e. of reaching
  /// position newer_posts + 1. Exactly 1 at 0.
  double p_view(std::int64_t newer_posts) const;
  /// Visibility under a geometric feed position with ratio rho:
  /// sum_L Pposts(L) p_view(L) = sum_m pmf(m) (1 - q^m), q = rho / (1 + rho).
  double visibility(double rho) const;

 private:
  double mu_;
  double lambda_;
  std::vector<double> pmf_;   // index m - 1
  std::vector<double> tail_;  // tail_[L] = P(items > L), L = 0..max_items
};

/// Upper tail of the discretized law: probability a user examines more than
/// `newer_posts` items and so reaches a post at position newer_posts + 1.
double p_view(std::int64_t newer_posts, double mu, double lambda);

double receive_rate(std::int64_t friend_count, double typical_friend_rate);
double visit_rate(double posting_rate, double views_per_post);

/// Geometric law of the number of newer posts above an advocate post at the
/// next visit: (1/(1+rho)) (rho/(1+rho))^L.
double list_position_pmf(std::int64_t newer_posts, double rho);

/// Visibility of an advocate post together with the rates it was derived
/// from. Users with zero posting rate get p_visible = 0 and `degenerate`.
DerivedUserRates p_visible(const UserRecord& user, const PopulationParams& pop,
                           const ModelParams& params);
DerivedUserRates p_visible(const UserRecord& user, const PopulationParams& pop,
                           double views_per_post, const SurfingLaw& law);

/// Beta prior on topic interest: (n+1) C(n,m) p^m (1-p)^(n-m).
double topic_prior_density(double p, std::int64_t m, std::int64_t n);

/// P_act for this user: zero for opponents, the shared value otherwise.
double effective_p_act(const UserRecord& user, const ModelParams& params);

/// Response scale A = p_visible * P_act for one user.
double response_scale(const UserRecord& user, const PopulationParams& pop,
                      const ModelParams& params);

/// Closed-form probability of M responses out of N for a user with topical
/// counts (m, n) and response scale A.
double response_pmf(std::int64_t responses, std::int64_t topic_posts, std::int64_t total_posts,
                    std::int64_t advocate_posts, double scale);
double response_pmf(std::int64_t responses, const UserRecord& user, const PopulationParams& pop,
                    const ModelParams& params);

ResponseDistribution response_distribution(std::int64_t topic_posts, std::int64_t total_posts,
                                           std::int64_t advocate_posts, double scale);
ResponseDistribution response_distribution(const UserRecord& user, const PopulationParams& pop,
                                           const ModelParams& params);

/// Parameter-dependent part of the log response probability,
/// log(A^M 2F1(m+M+1, M-N; M+n+2; A)). Returns -infinity when A = 0 and M > 0.
double log_likelihood_term(std::int64_t responses, std::int64_t topic_posts,
                           std::int64_t total_posts, std::int64_t advocate_posts, double scale);

struct ExcludedUser {
  std::string user_id;
  std::string reason;
};

struct LikelihoodResult {
  double value = 0.0;  // sum over users with positive likelihood
  std::vector<ExcludedUser> zero_likelihood;
};

/// Sum of per-user log likelihood terms. Users whose likelihood vanishes
/// are listed instead of driving the total to -infinity.
LikelihoodResult log_likelihood(std::span<const UserRecord> users, const PopulationParams& pop,
                                const ModelParams& params);

}  // namespace feedresp
