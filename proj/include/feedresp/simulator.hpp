#pragma once

#include <cstdint>
#include <vector>

#include "feedresp/types.hpp"

namespace feedresp {

struct LogNormalLaw {
  double location = 0.0;  // mean of the log
  double scale = 1.0;     // std dev of the log
};

struct BetaLaw {
  double alpha = 1.0;
  double beta = 1.0;
  double mean() const { return alpha / (alpha + beta); }
};

struct StanceMix {
  double supporter = 1.0;
  double opponent = 0.0;
  double neutral = 0.0;
};

/// Generator settings for a synthetic follower population.
struct PopulationConfig {
  std::int64_t user_count = 500;
  LogNormalLaw posting_rate_law{0.0, 1.0};          // posts per day
  LogNormalLaw friend_count_law{5.3, 1.0};          // rounded, at least 1
  // Uniform P_topic makes Beta(m+1, n-m+1) the exact per-user posterior.
  BetaLaw topic_fraction_law{1.0, 1.0};             // true P_topic
  StanceMix stance_mix;
  double observation_days = 30.0;                   // n ~ Poisson(rate * days)
  std::int64_t advocate_post_count = 400;
  double typical_friend_rate = 1.61;
  std::uint64_t seed = 1;

  void validate() const;
  PopulationParams population() const;
};

/// Per-user quantities hidden from the observer.
struct UserTruth {
  std::string user_id;
  double p_topic = 0.0;
  double p_visible = 0.0;
};

struct SyntheticPopulation {
  std::vector<UserRecord> users;   // responses are 0 until simulated
  std::vector<UserTruth> truths;   // parallel to users
  PopulationParams population;
};

/// Draws a population; deterministic given config.seed.
SyntheticPopulation generate_population(const PopulationConfig& config);

/// Observed response counts with the truths used to produce them.
struct SimTrace {
  std::vector<UserTruth> truths;
  std::vector<std::int64_t> responses;
};

/// Runs the post-by-post generative process: for every advocate post and
/// user, draw the feed position L from the geometric law, view with
/// probability p_view(L), then respond with probability P_topic * P_act.
/// Writes the response counts into `users` and returns the trace. Streams
/// are keyed by (seed, user_id, post index), so the result does not depend
/// on evaluation order.
SimTrace simulate_responses(std::vector<UserRecord>& users, std::vector<UserTruth> truths,
                            const ModelParams& params, const PopulationParams& pop,
                            std::uint64_t seed);

/// Replicated response counts for one user where P_topic is redrawn from
/// the user's topic prior in every replicate, i.e. samples of the model's
/// marginal response distribution.
std::vector<std::int64_t> simulate_user_replicates(const UserRecord& user,
                                                   const ModelParams& params,
                                                   const PopulationParams& pop,
                                                   std::int64_t replicates, std::uint64_t seed);

struct EventStreamResult {
  std::vector<double> empirical_pmf;  // index L
  std::int64_t samples = 0;
  std::int64_t visits = 0;
  double mean_newer_posts = 0.0;
  double rho = 0.0;
};

/// Continuous-time simulation of the competition between received posts
/// and site visits. Advocate posts arrive as a third Poisson stream; for
/// each one the number of newer received posts at the next visit is
/// recorded. `advocate_rate` <= 0 selects the visit rate.
EventStreamResult simulate_event_stream(double receive_rate, double visit_rate, double duration,
                                        std::uint64_t seed, double advocate_rate = 0.0);
EventStreamResult simulate_event_stream(const UserRecord& user, const ModelParams& params,
                                        const PopulationParams& pop, double duration,
                                        std::uint64_t seed);

}  // namespace feedresp
