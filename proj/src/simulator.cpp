#include "feedresp/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <queue>
#include <string>

#include "feedresp/core_model.hpp"
#include "feedresp/parallel.hpp"
#include "feedresp/rng.hpp"

namespace feedresp {
namespace {

constexpr std::uint64_t kPopulationStream = 0x706f70;  // "pop"
constexpr std::uint64_t kReplicateStream = 0x726570;   // "rep"

std::string user_name(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%06lld", static_cast<long long>(index));
  return buf;
}

}  // namespace

void PopulationConfig::validate() const {
  if (user_count < 1) throw InputError("user_count must be >= 1");
  if (!(posting_rate_law.scale > 0.0) || !(friend_count_law.scale > 0.0))
    throw InputError("log-normal scales must be > 0");
  if (!(topic_fraction_law.alpha > 0.0) || !(topic_fraction_law.beta > 0.0))
    throw InputError("beta law parameters must be > 0");
  const double mix = stance_mix.supporter + stance_mix.opponent + stance_mix.neutral;
  if (stance_mix.supporter < 0.0 || stance_mix.opponent < 0.0 || stance_mix.neutral < 0.0 ||
      std::fabs(mix - 1.0) > 1e-9)
    throw InputError("stance_mix proportions must be nonnegative and sum to 1");
  if (!(observation_days > 0.0)) throw InputError("observation_days must be > 0");
  population().validate();
}

PopulationParams PopulationConfig::population() const {
  PopulationParams pop;
  pop.advocate_id = "synthetic";
  pop.advocate_post_count = advocate_post_count;
  pop.typical_friend_rate = typical_friend_rate;
  return pop;
}

SyntheticPopulation generate_population(const PopulationConfig& config) {
  config.validate();
  SyntheticPopulation out;
  out.population = config.population();
  out.users.reserve(static_cast<std::size_t>(config.user_count));
  out.truths.reserve(static_cast<std::size_t>(config.user_count));
  for (std::int64_t i = 0; i < config.user_count; ++i) {
    RandomStream rng(config.seed, {kPopulationStream, static_cast<std::uint64_t>(i)});
    UserRecord u;
    u.user_id = user_name(i);
    u.posting_rate = rng.lognormal(config.posting_rate_law.location, config.posting_rate_law.scale);
    u.friend_count = std::max<std::int64_t>(
        1, std::llround(rng.lognormal(config.friend_count_law.location,
                                      config.friend_count_law.scale)));
    const double s = rng.uniform();
    if (s < config.stance_mix.supporter)
      u.stance = Stance::supporter;
    else if (s < config.stance_mix.supporter + config.stance_mix.opponent)
      u.stance = Stance::opponent;
    else
      u.stance = Stance::neutral;
    const double p_topic =
        rng.beta(config.topic_fraction_law.alpha, config.topic_fraction_law.beta);
    u.total_posts = rng.poisson(u.posting_rate * config.observation_days);
    u.topic_posts = rng.binomial(u.total_posts, p_topic);
    out.truths.push_back({u.user_id, p_topic, 0.0});
    out.users.push_back(std::move(u));
  }
  return out;
}

SimTrace simulate_responses(std::vector<UserRecord>& users, std::vector<UserTruth> truths,
                            const ModelParams& params, const PopulationParams& pop,
                            std::uint64_t seed) {
  if (users.size() != truths.size())
    throw InputError("simulate_responses: users and truths differ in length");
  params.validate();
  pop.validate();
  const SurfingLaw law(params.mu, params.lambda);
  SimTrace trace;
  trace.responses.assign(users.size(), 0);
  parallel_for(users.size(), [&](std::size_t i) {
    UserRecord& user = users[i];
    const auto rates = p_visible(user, pop, params.views_per_post, law);
    truths[i].p_visible = rates.p_visible;
    const double respond_prob = truths[i].p_topic * effective_p_act(user, params);
    std::int64_t responses = 0;
    if (!rates.degenerate) {
      const double stay_on_top = 1.0 / (1.0 + rates.rho);
      const std::uint64_t user_key = fnv1a64(user.user_id);
      for (std::int64_t post = 0; post < pop.advocate_post_count; ++post) {
        RandomStream rng(seed, {user_key, static_cast<std::uint64_t>(post)});
        const std::int64_t newer = rng.geometric_failures(stay_on_top);
        const bool viewed = rng.uniform() < law.p_view(newer);
        if (viewed && rng.uniform() < respond_prob) ++responses;
      }
    }
    user.responses = responses;
    trace.responses[i] = responses;
  });
  trace.truths = std::move(truths);
  return trace;
}

std::vector<std::int64_t> simulate_user_replicates(const UserRecord& user,
                                                   const ModelParams& params,
                                                   const PopulationParams& pop,
                                                   std::int64_t replicates, std::uint64_t seed) {
  params.validate();
  pop.check_user(user);
  const SurfingLaw law(params.mu, params.lambda);
  const auto rates = p_visible(user, pop, params.views_per_post, law);
  const double p_act = effective_p_act(user, params);
  const double prior_a = static_cast<double>(user.topic_posts) + 1.0;
  const double prior_b = static_cast<double>(user.total_posts - user.topic_posts) + 1.0;
  const double stay_on_top = rates.degenerate ? 0.0 : 1.0 / (1.0 + rates.rho);
  const std::uint64_t user_key = fnv1a64(user.user_id);
  std::vector<std::int64_t> out(static_cast<std::size_t>(replicates), 0);
  parallel_for(out.size(), [&](std::size_t r) {
    RandomStream rng(seed, {kReplicateStream, user_key, static_cast<std::uint64_t>(r)});
    const double p_topic = rng.beta(prior_a, prior_b);
    std::int64_t responses = 0;
    if (!rates.degenerate) {
      for (std::int64_t post = 0; post < pop.advocate_post_count; ++post) {
        const std::int64_t newer = rng.geometric_failures(stay_on_top);
        const bool viewed = rng.uniform() < law.p_view(newer);
        if (viewed && rng.uniform() < p_topic * p_act) ++responses;
      }
    }
    out[r] = responses;
  }, 64);
  return out;
}

EventStreamResult simulate_event_stream(double receive_rate, double visit_rate, double duration,
                                        std::uint64_t seed, double advocate_rate) {
  if (!(receive_rate >= 0.0) || !(visit_rate > 0.0))
    throw DomainError("event stream requires receive_rate >= 0 and visit_rate > 0");
  if (!(duration > 0.0) || visit_rate * duration < 1e4)
    throw DomainError("event stream duration must allow at least 1e4 expected visits");
  if (advocate_rate <= 0.0) advocate_rate = visit_rate;

  enum class Kind { receive, visit, advocate };
  struct Event {
    double time;
    Kind kind;
    bool operator>(const Event& other) const { return time > other.time; }
  };

  RandomStream rng(seed, {0x65767473ULL});  // "evts"
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  if (receive_rate > 0.0) queue.push({rng.exponential(receive_rate), Kind::receive});
  queue.push({rng.exponential(visit_rate), Kind::visit});
  queue.push({rng.exponential(advocate_rate), Kind::advocate});

  // Received-post counter at each pending advocate post's arrival.
  std::vector<std::int64_t> pending;
  std::vector<std::int64_t> counts;
  std::int64_t received = 0;
  EventStreamResult result;
  long double sum_newer = 0;
  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    if (ev.time > duration) break;
    switch (ev.kind) {
      case Kind::receive:
        ++received;
        queue.push({ev.time + rng.exponential(receive_rate), Kind::receive});
        break;
      case Kind::advocate:
        pending.push_back(received);
        queue.push({ev.time + rng.exponential(advocate_rate), Kind::advocate});
        break;
      case Kind::visit:
        ++result.visits;
        for (std::int64_t at_arrival : pending) {
          const auto newer = static_cast<std::size_t>(received - at_arrival);
          if (counts.size() <= newer) counts.resize(newer + 1, 0);
          ++counts[newer];
          sum_newer += static_cast<long double>(newer);
          ++result.samples;
        }
        pending.clear();
        queue.push({ev.time + rng.exponential(visit_rate), Kind::visit});
        break;
    }
  }
  result.rho = receive_rate / visit_rate;
  result.empirical_pmf.resize(counts.size());
  for (std::size_t L = 0; L < counts.size(); ++L)
    result.empirical_pmf[L] =
        static_cast<double>(counts[L]) / static_cast<double>(std::max<std::int64_t>(1, result.samples));
  if (result.samples > 0)
    result.mean_newer_posts = static_cast<double>(sum_newer / result.samples);
  return result;
}

EventStreamResult simulate_event_stream(const UserRecord& user, const ModelParams& params,
                                        const PopulationParams& pop, double duration,
                                        std::uint64_t seed) {
  params.validate();
  const double receive = receive_rate(user.friend_count, pop.typical_friend_rate);
  const double visit = visit_rate(user.posting_rate, params.views_per_post);
  if (visit == 0.0) throw DomainError("event stream requires a positive visit rate");
  return simulate_event_stream(receive, visit, duration, seed ^ fnv1a64(user.user_id));
}

}  // namespace feedresp
