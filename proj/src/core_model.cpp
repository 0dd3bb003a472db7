#include "feedresp/core_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "feedresp/hypergeometric.hpp"

namespace feedresp {
namespace {

constexpr double kSurfingTailTolerance = 1e-14;
constexpr std::int64_t kMaxSurfingItems = 50'000'000;

double log_surfing_density(double m, double mu, double lambda) {
  const double d = m - mu;
  return 0.5 * std::log(lambda / (2.0 * std::numbers::pi * m * m * m)) -
         lambda * d * d / (2.0 * m * mu * mu);
}

void check_surfing_params(double mu, double lambda) {
  if (!(mu > 0.0) || !(lambda > 0.0) || !std::isfinite(mu) || !std::isfinite(lambda))
    throw DomainError("law of surfing requires mu > 0 and lambda > 0");
}

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double surfing_stop_pmf(std::int64_t m_items, double mu, double lambda) {
  check_surfing_params(mu, lambda);
  if (m_items < 1) throw DomainError("surfing_stop_pmf requires m >= 1");
  return std::exp(log_surfing_density(static_cast<double>(m_items), mu, lambda));
}

SurfingLaw::SurfingLaw(double mu, double lambda) : mu_(mu), lambda_(lambda) {
  check_surfing_params(mu, lambda);
  // Beyond m >= lambda/3 consecutive ratios are bounded by the asymptotic
  // ratio r = exp(-lambda / (2 mu^2)), so the tail after m is at most
  // f(m) r / (1 - r).
  const double ratio = std::exp(-lambda / (2.0 * mu * mu));
  const double ratio_factor = ratio / -std::expm1(-lambda / (2.0 * mu * mu));
  std::vector<double> raw;
  double total = 0.0;
  for (std::int64_t m = 1;; ++m) {
    if (m > kMaxSurfingItems)
      throw DomainError("law of surfing tail too heavy to discretize (mu/lambda too large)");
    const double md = static_cast<double>(m);
    const double f = std::exp(log_surfing_density(md, mu, lambda));
    raw.push_back(f);
    total += f;
    if (md >= lambda / 3.0 && md >= mu && total > 0.0 &&
        f * ratio_factor < kSurfingTailTolerance * total)
      break;
  }
  const std::size_t count = raw.size();
  tail_.assign(count + 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = count; i-- > 0;) {
    tail_[i + 1] = acc;
    acc += raw[i];
  }
  // acc now equals the sum over m >= 1, summed from the small end.
  pmf_.resize(count);
  for (std::size_t i = 0; i < count; ++i) pmf_[i] = raw[i] / acc;
  for (std::size_t L = 1; L <= count; ++L) tail_[L] /= acc;
  tail_[0] = 1.0;
}

double SurfingLaw::pmf(std::int64_t m_items) const {
  if (m_items < 1) throw DomainError("SurfingLaw::pmf requires m >= 1");
  if (m_items > max_items()) return 0.0;
  return pmf_[static_cast<std::size_t>(m_items - 1)];
}

double SurfingLaw::p_view(std::int64_t newer_posts) const {
  if (newer_posts < 0) throw DomainError("p_view requires L >= 0");
  if (newer_posts >= max_items()) return 0.0;
  return tail_[static_cast<std::size_t>(newer_posts)];
}

double SurfingLaw::visibility(double rho) const {
  if (!(rho >= 0.0)) throw DomainError("visibility requires rho >= 0");
  if (rho == 0.0) return 1.0;
  if (std::isinf(rho)) return 0.0;
  // sum_m pmf(m) (1 - q^m) with 1 - q^m accumulated as (1 - q) sum_{j<m} q^j,
  // so every operation adds nonnegative terms.
  const double miss = 1.0 / (1.0 + rho);  // 1 - q
  const double q = rho / (1.0 + rho);
  double power = 1.0;                     // q^(m-1)
  double seen = 0.0;                      // 1 - q^m
  double sum = 0.0;
  for (double p : pmf_) {
    seen += miss * power;
    power *= q;
    sum += p * seen;
  }
  return std::min(1.0, std::max(0.0, sum));
}

double p_view(std::int64_t newer_posts, double mu, double lambda) {
  check_surfing_params(mu, lambda);
  if (newer_posts < 0) throw DomainError("p_view requires L >= 0");
  if (newer_posts == 0) return 1.0;
  return SurfingLaw(mu, lambda).p_view(newer_posts);
}

double receive_rate(std::int64_t friend_count, double typical_friend_rate) {
  if (friend_count < 0 || !(typical_friend_rate > 0.0))
    throw DomainError("receive_rate requires friend_count >= 0 and typical rate > 0");
  return static_cast<double>(friend_count) * typical_friend_rate;
}

double visit_rate(double posting_rate, double views_per_post) {
  if (!(posting_rate >= 0.0) || !(views_per_post > 0.0))
    throw DomainError("visit_rate requires posting_rate >= 0 and views_per_post > 0");
  return views_per_post * posting_rate;
}

double list_position_pmf(std::int64_t newer_posts, double rho) {
  if (!(rho >= 0.0)) throw DomainError("list_position_pmf requires rho >= 0");
  if (newer_posts < 0) return 0.0;
  if (rho == 0.0) return newer_posts == 0 ? 1.0 : 0.0;
  // log((1/(1+rho)) (rho/(1+rho))^L)
  const double log_keep = -std::log1p(1.0 / rho);
  return std::exp(-std::log1p(rho) + static_cast<double>(newer_posts) * log_keep);
}

DerivedUserRates p_visible(const UserRecord& user, const PopulationParams& pop,
                           double views_per_post, const SurfingLaw& law) {
  DerivedUserRates rates;
  rates.receive_rate = receive_rate(user.friend_count, pop.typical_friend_rate);
  rates.visit_rate = visit_rate(user.posting_rate, views_per_post);
  if (rates.visit_rate == 0.0) {
    rates.rho = std::numeric_limits<double>::infinity();
    rates.p_visible = 0.0;
    rates.degenerate = true;
    return rates;
  }
  rates.rho = rates.receive_rate / rates.visit_rate;
  rates.p_visible = law.visibility(rates.rho);
  return rates;
}

DerivedUserRates p_visible(const UserRecord& user, const PopulationParams& pop,
                           const ModelParams& params) {
  params.validate();
  return p_visible(user, pop, params.views_per_post, SurfingLaw(params.mu, params.lambda));
}

double topic_prior_density(double p, std::int64_t m, std::int64_t n) {
  if (m < 0 || n < 0 || m > n) throw DomainError("topic_prior_density requires 0 <= m <= n");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("topic_prior_density requires p in [0, 1]");
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  if (n == 0) return 1.0;
  if ((p == 0.0 && m > 0) || (p == 1.0 && m < n)) return 0.0;
  double log_density = std::log(nd + 1.0) + log_choose(nd, md);
  if (m > 0) log_density += md * std::log(p);
  if (m < n) log_density += (nd - md) * std::log1p(-p);
  return std::exp(log_density);
}

double effective_p_act(const UserRecord& user, const ModelParams& params) {
  return user.stance == Stance::opponent ? 0.0 : params.p_act;
}

double response_scale(const UserRecord& user, const PopulationParams& pop,
                      const ModelParams& params) {
  return p_visible(user, pop, params).p_visible * effective_p_act(user, params);
}

double log_likelihood_term(std::int64_t responses, std::int64_t topic_posts,
                           std::int64_t total_posts, std::int64_t advocate_posts, double scale) {
  if (responses < 0 || responses > advocate_posts)
    throw DomainError("response count outside 0..N");
  if (topic_posts < 0 || topic_posts > total_posts)
    throw DomainError("topic counts require 0 <= m <= n");
  if (!(scale >= 0.0 && scale <= 1.0)) throw DomainError("response scale A must lie in [0, 1]");
  const double M = static_cast<double>(responses);
  if (scale == 0.0)
    return responses == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(topic_posts);
  const double n = static_cast<double>(total_posts);
  const double N = static_cast<double>(advocate_posts);
  return M * std::log(scale) + log_hyp2f1_terminating(m + M + 1.0, M - N, M + n + 2.0, scale);
}

double response_pmf(std::int64_t responses, std::int64_t topic_posts, std::int64_t total_posts,
                    std::int64_t advocate_posts, double scale) {
  const double log_core =
      log_likelihood_term(responses, topic_posts, total_posts, advocate_posts, scale);
  if (std::isinf(log_core)) return 0.0;
  const double M = static_cast<double>(responses);
  const double m = static_cast<double>(topic_posts);
  const double n = static_cast<double>(total_posts);
  const double N = static_cast<double>(advocate_posts);
  return std::exp(log_choose(M + m, m) + log_choose(N, M) - log_choose(M + n + 1.0, M) +
                  log_core);
}

double response_pmf(std::int64_t responses, const UserRecord& user, const PopulationParams& pop,
                    const ModelParams& params) {
  pop.check_user(user);
  if (responses < 0 || responses > pop.advocate_post_count)
    throw DomainError("response count outside 0..N");
  return response_pmf(responses, user.topic_posts, user.total_posts, pop.advocate_post_count,
                      response_scale(user, pop, params));
}

ResponseDistribution response_distribution(std::int64_t topic_posts, std::int64_t total_posts,
                                           std::int64_t advocate_posts, double scale) {
  ResponseDistribution dist;
  dist.pmf.resize(static_cast<std::size_t>(advocate_posts) + 1);
  for (std::int64_t M = 0; M <= advocate_posts; ++M)
    dist.pmf[static_cast<std::size_t>(M)] =
        response_pmf(M, topic_posts, total_posts, advocate_posts, scale);
  double mean = 0.0;
  for (std::size_t M = 0; M < dist.pmf.size(); ++M) mean += static_cast<double>(M) * dist.pmf[M];
  double var = 0.0;
  for (std::size_t M = 0; M < dist.pmf.size(); ++M) {
    const double d = static_cast<double>(M) - mean;
    var += d * d * dist.pmf[M];
  }
  dist.mean = mean;
  dist.std_dev = std::sqrt(var);
  return dist;
}

ResponseDistribution response_distribution(const UserRecord& user, const PopulationParams& pop,
                                           const ModelParams& params) {
  pop.check_user(user);
  return response_distribution(user.topic_posts, user.total_posts, pop.advocate_post_count,
                               response_scale(user, pop, params));
}

LikelihoodResult log_likelihood(std::span<const UserRecord> users, const PopulationParams& pop,
                                const ModelParams& params) {
  if (users.empty()) throw DomainError("log_likelihood requires at least one user");
  params.validate();
  const SurfingLaw law(params.mu, params.lambda);
  LikelihoodResult result;
  for (const auto& user : users) {
    pop.check_user(user);
    const auto rates = p_visible(user, pop, params.views_per_post, law);
    const double scale = rates.p_visible * effective_p_act(user, params);
    const double term = log_likelihood_term(user.responses, user.topic_posts, user.total_posts,
                                            pop.advocate_post_count, scale);
    if (std::isinf(term)) {
      std::string reason;
      if (user.stance == Stance::opponent)
        reason = "opponent with recorded responses";
      else if (rates.degenerate)
        reason = "zero posting rate with recorded responses";
      else
        reason = "zero response probability with recorded responses";
      result.zero_likelihood.push_back({user.user_id, reason});
      continue;
    }
    result.value += term;
  }
  return result;
}

}  // namespace feedresp
