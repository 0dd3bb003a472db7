#include "feedresp/core_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/quadrature.hpp"

using namespace feedresp;

namespace {

UserRecord make_user(double rate, std::int64_t friends, std::int64_t m, std::int64_t n,
                     std::int64_t M = 0, Stance stance = Stance::supporter) {
  UserRecord u;
  u.user_id = "u";
  u.posting_rate = rate;
  u.friend_count = friends;
  u.stance = stance;
  u.topic_posts = m;
  u.total_posts = n;
  u.responses = M;
  return u;
}

PopulationParams make_pop(std::int64_t N = 391, double rbar = 1.61) {
  PopulationParams p;
  p.advocate_id = "adv";
  p.advocate_post_count = N;
  p.typical_friend_rate = rbar;
  return p;
}

}  // namespace

// --- surfing law -----------------------------------------------------------

TEST(SurfingStopPmf, HighPrecisionReference) {
  // 120-digit evaluations (tests/oracles/frozen_values.py)
  EXPECT_NEAR(surfing_stop_pmf(14, 14, 14), 0.028495877171530905567, 1e-16);
  EXPECT_NEAR(surfing_stop_pmf(30, 14, 14), 0.0066978557196542819431, 1e-16);
  EXPECT_NEAR(surfing_stop_pmf(3, 7, 2.5), 0.10595232798327627459, 1e-15);
}

TEST(SurfingStopPmf, UnitParametersAtMean) {
  EXPECT_NEAR(surfing_stop_pmf(1, 1, 1), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

TEST(SurfingStopPmf, DomainErrors) {
  EXPECT_THROW(surfing_stop_pmf(0, 14, 14), DomainError);
  EXPECT_THROW(surfing_stop_pmf(5, 0, 14), DomainError);
  EXPECT_THROW(surfing_stop_pmf(5, 14, -1), DomainError);
}

TEST(SurfingLaw, DiscretePmfSumsToOne) {
  const SurfingLaw law(14, 14);
  long double sum = 0;
  for (std::int64_t m = 1; m <= 1'000'000; ++m) sum += law.pmf(m);
  EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-6);
  // The unnormalized integer samples of the continuous density are a Riemann
  // sum, close to but not exactly 1.
  long double raw = 0;
  for (std::int64_t m = 1; m <= 1'000'000; ++m) raw += surfing_stop_pmf(m, 14, 14);
  EXPECT_NEAR(static_cast<double>(raw), 1.0, 1e-3);
}

TEST(SurfingLaw, TruncationTailIsNegligible) {
  for (auto [mu, lambda] : {std::pair{14.0, 14.0}, {7.0, 7.0}, {3.0, 40.0}, {60.0, 20.0}}) {
    const SurfingLaw law(mu, lambda);
    long double beyond = 0;
    for (std::int64_t m = law.max_items() + 1; m <= law.max_items() * 20 + 1000; ++m)
      beyond += oracle::surfing_density(m, mu, lambda);
    long double inside = 0;
    for (std::int64_t m = 1; m <= law.max_items(); ++m)
      inside += oracle::surfing_density(m, mu, lambda);
    EXPECT_LT(static_cast<double>(beyond / inside), 1e-14) << mu << " " << lambda;
  }
}

TEST(PView, BoundaryValues) {
  EXPECT_EQ(p_view(0, 14, 14), 1.0);
  EXPECT_LT(p_view(1'000'000'000, 14, 14), 1e-12);
  EXPECT_THROW(p_view(3, -1, 14), DomainError);
}

TEST(PView, MatchesBruteForceTail) {
  // 120-digit reference and an independent long-double tail sum.
  EXPECT_NEAR(p_view(14, 14, 14), 0.31804409028306644417, 1e-13);
  EXPECT_NEAR(p_view(1, 14, 14), 0.99642819733113577062, 1e-13);
  const SurfingLaw law(9, 4);
  for (std::int64_t L : {0, 1, 3, 9, 25, 80})
    EXPECT_NEAR(law.p_view(L), oracle::surfing_tail(L, 9, 4), 1e-13) << L;
}

TEST(PView, MonotoneNonincreasing) {
  const SurfingLaw law(14, 14);
  double prev = law.p_view(0);
  EXPECT_EQ(prev, 1.0);
  for (std::int64_t L = 1; L <= law.max_items() + 5; ++L) {
    const double cur = law.p_view(L);
    EXPECT_LE(cur, prev) << L;
    prev = cur;
  }
}

// --- rates and feed position -------------------------------------------------

TEST(Rates, ReceiveRate) {
  EXPECT_EQ(receive_rate(0, 1.61), 0.0);
  EXPECT_NEAR(receive_rate(100, 1.61), 161.0, 1e-12);
  EXPECT_NEAR(receive_rate(215, 8.32), 1788.8, 1e-9);
}

TEST(Rates, VisitRate) {
  EXPECT_EQ(visit_rate(1.0, 38), 38.0);
  EXPECT_EQ(visit_rate(0.0, 38), 0.0);
  EXPECT_EQ(visit_rate(2.5, 10), 25.0);
}

TEST(ListPosition, ZeroRhoIsPointMass) {
  EXPECT_EQ(list_position_pmf(0, 0.0), 1.0);
  EXPECT_EQ(list_position_pmf(3, 0.0), 0.0);
  EXPECT_THROW(list_position_pmf(0, -0.5), DomainError);
}

TEST(ListPosition, SumsToOneWithMeanRho) {
  for (double rho : {0.5, 2.0, 10.0}) {
    long double sum = 0, mean = 0;
    const std::int64_t cutoff = rho == 10.0 ? 2000 : 1000;
    for (std::int64_t L = 0; L <= cutoff; ++L) {
      sum += list_position_pmf(L, rho);
      mean += L * list_position_pmf(L, rho);
    }
    // Neglected tail is q^(cutoff+1), q = rho/(1+rho): < 1e-40 here.
    EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-10) << rho;
    EXPECT_NEAR(static_cast<double>(mean), rho, 1e-9) << rho;
  }
}

// --- visibility --------------------------------------------------------------

TEST(PVisible, NoCompetingPostsIsCertain) {
  const auto r = p_visible(make_user(1.0, 0, 1, 2), make_pop(), ModelParams{});
  EXPECT_EQ(r.rho, 0.0);
  EXPECT_EQ(r.p_visible, 1.0);
}

TEST(PVisible, OverwhelmingFeed) {
  // p_visible ~ mu / rho for rho >> mu; rho ~ 2.2e7 at typical rate 8.32.
  const auto r = p_visible(make_user(0.01, 1'000'000, 1, 2), make_pop(391, 8.32), ModelParams{});
  EXPECT_LT(r.p_visible, 1e-6);
  EXPECT_GE(r.p_visible, 0.0);
}

TEST(PVisible, ZeroPostingRateIsDegenerate) {
  const auto r = p_visible(make_user(0.0, 50, 1, 2), make_pop(), ModelParams{});
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p_visible, 0.0);
}

TEST(PVisible, ExactIdentityMatchesTruncatedSeries) {
  // Independent route: sum_L Pposts(L|rho) p_view(L), truncated once the
  // remaining geometric mass is below 1e-12.
  const ModelParams params;
  const SurfingLaw law(params.mu, params.lambda);
  for (double rho : {0.01, 0.3, 1.0, 4.0, 25.0, 300.0}) {
    const double q = rho / (1 + rho);
    long double series = 0, remaining = 1;
    for (std::int64_t L = 0; remaining >= 1e-12L; ++L) {
      const double w = list_position_pmf(L, rho);
      series += w * law.p_view(L);
      remaining = std::pow(static_cast<long double>(q), L + 1);
    }
    EXPECT_NEAR(law.visibility(rho), static_cast<double>(series), 2e-12) << rho;
  }
}

TEST(PVisible, MonotoneInRho) {
  const SurfingLaw law(14, 14);
  double prev = 1.0;
  for (double rho = 0.0; rho < 200.0; rho = rho * 1.3 + 0.01) {
    const double v = law.visibility(rho);
    EXPECT_LE(v, prev + 1e-15);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    prev = v;
  }
}

TEST(PVisible, RhoIsRatioOfRates) {
  const auto r = p_visible(make_user(2.0, 100, 1, 2), make_pop(391, 1.5), ModelParams{});
  EXPECT_NEAR(r.rho, 150.0 / 76.0, 1e-14);
  EXPECT_NEAR(r.rho, r.receive_rate / r.visit_rate, 1e-15);
}

// --- topic prior ---------------------------------------------------------------

TEST(TopicPrior, UniformWithoutPosts) {
  for (double p : {0.0, 0.2, 0.5, 1.0}) EXPECT_EQ(topic_prior_density(p, 0, 0), 1.0);
}

TEST(TopicPrior, ModeAtFraction) {
  const double mode = 3.0 / 8.0;
  const double at_mode = topic_prior_density(mode, 3, 8);
  for (double p = 0.0; p <= 1.0; p += 0.01) EXPECT_LE(topic_prior_density(p, 3, 8), at_mode + 1e-14);
}

TEST(TopicPrior, IntegratesToOne) {
  using Q = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (auto [m, n] : {std::pair<int, int>{3, 5}, {0, 4}, {7, 7}, {20, 50}}) {
    const double area =
        Q::integrate([&](double p) { return topic_prior_density(p, m, n); }, 0.0, 1.0, 10, 1e-14);
    EXPECT_NEAR(area, 1.0, 1e-10) << m << "/" << n;
  }
}

TEST(TopicPrior, DomainErrors) {
  EXPECT_THROW(topic_prior_density(0.5, 6, 5), DomainError);
  EXPECT_THROW(topic_prior_density(1.5, 1, 5), DomainError);
}

// --- response distribution -------------------------------------------------------

TEST(ResponsePmf, ZeroScale) {
  EXPECT_EQ(response_pmf(0, 3, 5, 391, 0.0), 1.0);
  EXPECT_EQ(response_pmf(4, 3, 5, 391, 0.0), 0.0);
}

TEST(ResponsePmf, HighPrecisionReference) {
  EXPECT_NEAR(response_pmf(2, 3, 5, 391, 0.03) / 0.053038000920420064082, 1.0, 1e-11);
  EXPECT_NEAR(response_pmf(0, 3, 5, 391, 0.03) / 0.0086736310967799714536, 1.0, 1e-11);
}

TEST(ResponsePmf, MatchesQuadrature) {
  const ModelParams params;  // V = 38, P_act = 0.12
  const auto pop = make_pop(391);
  const auto user = make_user(1.2, 150, 3, 5);
  const double A = response_scale(user, pop, params);
  ASSERT_GT(A, 0.0);
  for (std::int64_t M = 0; M <= 20; ++M) {
    const double closed = response_pmf(M, 3, 5, 391, A);
    const double quad = oracle::response_pmf_quadrature(M, 3, 5, 391, A);
    EXPECT_NEAR(closed / quad, 1.0, 1e-9) << "M=" << M;
  }
}

TEST(ResponsePmf, OutOfRangeResponses) {
  EXPECT_THROW(response_pmf(-1, 3, 5, 20, 0.1), DomainError);
  EXPECT_THROW(response_pmf(21, 3, 5, 20, 0.1), DomainError);
}

TEST(ResponseDistribution, NormalizedWithExactMoments) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.001, 0.999);
  for (int trial = 0; trial < 60; ++trial) {
    const std::int64_t N = 1 + static_cast<std::int64_t>(gen() % 1500);
    const std::int64_t n = static_cast<std::int64_t>(gen() % 60);
    const std::int64_t m = n == 0 ? 0 : static_cast<std::int64_t>(gen() % (n + 1));
    const double A = unit(gen);
    const auto d = response_distribution(m, n, N, A);
    long double sum = 0, mean = 0;
    for (std::size_t M = 0; M < d.pmf.size(); ++M) {
      ASSERT_GE(d.pmf[M], 0.0);
      sum += d.pmf[M];
      mean += M * d.pmf[M];
    }
    EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-10) << N << " " << m << "/" << n << " " << A;
    // E[M] = N A E[P_topic] with E[P_topic] = (m+1)/(n+2).
    const double analytic_mean = N * A * (m + 1.0) / (n + 2.0);
    EXPECT_NEAR(d.mean, analytic_mean, 1e-9 * std::max(1.0, analytic_mean));
    EXPECT_NEAR(d.mean, static_cast<double>(mean), 1e-12 * std::max(1.0, d.mean));
  }
}

TEST(ResponseDistribution, OpponentNeverResponds) {
  const auto d = response_distribution(make_user(1.0, 10, 3, 5, 0, Stance::opponent),
                                       make_pop(50), ModelParams{});
  EXPECT_EQ(d.pmf[0], 1.0);
  EXPECT_EQ(d.mean, 0.0);
  EXPECT_EQ(d.std_dev, 0.0);
}

TEST(ResponseDistribution, VarianceMatchesBetaBinomialMixture) {
  // Var[M] = N A E[p](1 - A E[p]) + N(N-1) A^2 Var[p] for p ~ Beta(m+1, n-m+1)
  const std::int64_t m = 4, n = 9, N = 200;
  const double A = 0.07;
  const double a = m + 1.0, b = n - m + 1.0;
  const double ep = a / (a + b);
  const double vp = a * b / ((a + b) * (a + b) * (a + b + 1));
  const double var = N * A * ep * (1 - A * ep) + N * (N - 1.0) * A * A * vp;
  const auto d = response_distribution(m, n, N, A);
  EXPECT_NEAR(d.std_dev, std::sqrt(var), 1e-10);
}

// --- likelihood --------------------------------------------------------------------

TEST(LogLikelihood, ZeroScaleZeroResponseContributesNothing) {
  std::vector<UserRecord> users{make_user(1.0, 10, 3, 5, 0, Stance::opponent)};
  const auto r = log_likelihood(users, make_pop(50), ModelParams{});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.zero_likelihood.empty());
}

TEST(LogLikelihood, OpponentWithResponsesIsReported) {
  std::vector<UserRecord> users{make_user(1.0, 10, 3, 5, 2, Stance::opponent),
                                make_user(1.0, 10, 3, 5, 2, Stance::supporter)};
  users[0].user_id = "opp";
  const auto r = log_likelihood(users, make_pop(50), ModelParams{});
  ASSERT_EQ(r.zero_likelihood.size(), 1u);
  EXPECT_EQ(r.zero_likelihood[0].user_id, "opp");
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(LogLikelihood, DiffersFromFullPmfByParameterFreeConstant) {
  const auto pop = make_pop(120);
  std::vector<UserRecord> users{make_user(0.5, 80, 2, 9, 3), make_user(3.0, 400, 5, 6, 11),
                                make_user(1.0, 20, 0, 0, 0), make_user(0.2, 5, 1, 1, 1)};
  auto diff = [&](const ModelParams& params) {
    double full = 0;
    for (const auto& u : users) full += std::log(response_pmf(u.responses, u, pop, params));
    return full - log_likelihood(users, pop, params).value;
  };
  const double base = diff(ModelParams{14, 14, 38, 0.12});
  EXPECT_NEAR(diff(ModelParams{14, 14, 10, 0.5}), base, 1e-9);
  EXPECT_NEAR(diff(ModelParams{20, 9, 70, 0.03}), base, 1e-9);
}
