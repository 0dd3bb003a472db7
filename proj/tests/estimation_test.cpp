#include "feedresp/estimation.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "feedresp/core_model.hpp"
#include "feedresp/rng.hpp"
#include "feedresp/simulator.hpp"

using namespace feedresp;

namespace {

SyntheticPopulation simulated(std::int64_t users, std::uint64_t seed,
                              const ModelParams& truth = {}, StanceMix mix = {}) {
  PopulationConfig cfg;
  cfg.user_count = users;
  cfg.seed = seed;
  cfg.stance_mix = mix;
  auto pop = generate_population(cfg);
  simulate_responses(pop.users, pop.truths, truth, pop.population, seed);
  return pop;
}

FitConfig no_intervals() {
  FitConfig cfg;
  cfg.intervals = false;
  return cfg;
}

}  // namespace

TEST(LikelihoodObjective, MatchesCoreSum) {
  const auto pop = simulated(60, 1);
  const LikelihoodObjective obj(pop.users, pop.population);
  const ModelParams p{14, 14, 30, 0.2};
  EXPECT_NEAR(obj(p), log_likelihood(pop.users, pop.population, p).value, 1e-8);
  const auto terms = obj.per_user(p);
  double sum = 0;
  for (double t : terms) sum += t;
  EXPECT_NEAR(sum, obj(p), 1e-8);
}

TEST(LikelihoodObjective, ExcludesImpossibleUsers) {
  auto pop = simulated(30, 2);
  pop.users[0].posting_rate = 0.0;
  pop.users[0].responses = 2;
  pop.users[1].stance = Stance::opponent;
  pop.users[1].responses = 1;
  const LikelihoodObjective obj(pop.users, pop.population);
  ASSERT_EQ(obj.excluded().size(), 2u);
  EXPECT_EQ(obj.excluded()[0].user_id, pop.users[0].user_id);
  EXPECT_EQ(obj.included(), 28u);
  EXPECT_TRUE(std::isfinite(obj(ModelParams{})));
}

TEST(FitMle, RecoversSimulatedParameters) {
  const auto pop = simulated(500, 21);
  const auto fit = fit_mle(pop.users, pop.population, FitConfig{});
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.params.p_act, 0.12, 0.015);
  EXPECT_NEAR(fit.params.views_per_post, 38, 8);
  EXPECT_EQ(fit.params.mu, 14.0);
  const auto& ci = fit.confidence_intervals.at("p_act");
  EXPECT_EQ(ci.method, "profile");
  EXPECT_LT(ci.low, fit.params.p_act);
  EXPECT_GT(ci.high, fit.params.p_act);
  EXPECT_LE(fit.best_grid_log_likelihood, fit.log_likelihood);
  EXPECT_LT(fit.gradient_norm, 1e-3);
}

TEST(FitMle, IsDeterministic) {
  const auto pop = simulated(120, 4);
  const auto a = fit_mle(pop.users, pop.population, no_intervals());
  const auto b = fit_mle(pop.users, pop.population, no_intervals());
  EXPECT_EQ(a.params.p_act, b.params.p_act);
  EXPECT_EQ(a.params.views_per_post, b.params.views_per_post);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(FitMle, OptimumBeatsNeighbours) {
  const auto pop = simulated(200, 5);
  const auto fit = fit_mle(pop.users, pop.population, no_intervals());
  const LikelihoodObjective obj(pop.users, pop.population);
  for (double f : {0.97, 1.03}) {
    ModelParams p = fit.params;
    p.p_act *= f;
    EXPECT_LT(obj(p), fit.log_likelihood);
    p = fit.params;
    p.views_per_post *= f;
    EXPECT_LT(obj(p), fit.log_likelihood);
  }
}

TEST(FitMle, FreeSurfingParameters) {
  const auto pop = simulated(400, 6);
  FitConfig cfg = no_intervals();
  cfg.free = FreeParameters::surfing_views_and_p_act;
  const auto fit = fit_mle(pop.users, pop.population, cfg);
  EXPECT_EQ(fit.params.mu, fit.params.lambda);
  EXPECT_EQ(fit.free_parameters.size(), 3u);
  const auto fixed = fit_mle(pop.users, pop.population, no_intervals());
  EXPECT_GE(fit.log_likelihood, fixed.log_likelihood - 1e-6);
}

TEST(FitMle, NoRespondersGivesZeroPAct) {
  auto pop = simulated(50, 7);
  for (auto& u : pop.users) u.responses = 0;
  const auto fit = fit_mle(pop.users, pop.population, FitConfig{});
  EXPECT_EQ(fit.params.p_act, 0.0);
  EXPECT_TRUE(fit.p_act_at_boundary);
}

TEST(FitMle, TooFewUsers) {
  const auto pop = simulated(9, 8);
  EXPECT_THROW(fit_mle(pop.users, pop.population, FitConfig{}), ModelError);
  auto all_out = simulated(20, 8);
  for (auto& u : all_out.users) u.posting_rate = 0.0, u.responses = 1;
  EXPECT_THROW(fit_mle(all_out.users, all_out.population, FitConfig{}), ModelError);
}

TEST(FitConfig, Validation) {
  FitConfig cfg;
  cfg.views_grid.points = 0;
  EXPECT_ANY_THROW(cfg.validate());
  cfg = {};
  cfg.starts = 0;
  EXPECT_ANY_THROW(cfg.validate());
}

// --- logistic baseline -----------------------------------------------------

namespace {

std::vector<UserRecord> logistic_users(int count, std::int64_t N, double b0, double b1,
                                       std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<UserRecord> users;
  for (int i = 0; i < count; ++i) {
    UserRecord u;
    u.user_id = "l" + std::to_string(i);
    u.posting_rate = rng.lognormal(0.0, 1.5);
    u.friend_count = 100;
    const double p = 1.0 / (1.0 + std::exp(-(b0 + b1 * std::log(u.posting_rate))));
    u.responses = rng.binomial(N, p);
    users.push_back(u);
  }
  return users;
}

}  // namespace

TEST(Logistic, RecoversCoefficients) {
  const PopulationParams pop{"adv", 400, 1.61};
  const auto users = logistic_users(250, 400, -3.0, 0.8, 12);
  const auto fit = fit_logistic(users, pop);
  EXPECT_NEAR(fit.beta0, -3.0, 4 * fit.se_beta0);
  EXPECT_NEAR(fit.beta1, 0.8, 4 * fit.se_beta1);
  EXPECT_GT(fit.se_beta0, 0.0);
}

TEST(Logistic, PredictionIsNTimesRate) {
  const PopulationParams pop{"adv", 400, 1.61};
  LogisticFit fit;
  fit.beta0 = -5.01;
  fit.beta1 = 0.11;
  UserRecord u{"x", std::exp(2.0), 10, Stance::supporter, 0, 0, 0};
  const double p = 1.0 / (1.0 + std::exp(5.01 - 0.22));
  EXPECT_NEAR(logistic_predict(u, fit, pop).expected_responses, 400 * p, 1e-12);
  u.posting_rate = 0.0;
  EXPECT_TRUE(logistic_predict(u, fit, pop).undefined_rate);
}

TEST(Logistic, SeparationRaises) {
  const PopulationParams pop{"adv", 10, 1.61};
  std::vector<UserRecord> users;
  for (int i = 0; i < 20; ++i) {
    UserRecord u{"s" + std::to_string(i), 0.1 * (i + 1), 10, Stance::supporter, 0, 0, 0};
    users.push_back(u);
  }
  EXPECT_THROW(fit_logistic(users, pop), SeparationError);  // all zero
  for (int i = 0; i < 20; ++i) users[i].responses = i < 10 ? 0 : 10;
  EXPECT_THROW(fit_logistic(users, pop), SeparationError);  // complete separation
}
