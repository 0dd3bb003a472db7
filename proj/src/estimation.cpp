#include "feedresp/estimation.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "feedresp/parallel.hpp"

namespace feedresp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p) - std::log1p(-p); }
double inv_logit(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

using Vec = std::vector<double>;

// Mapping between natural parameters and the unconstrained coordinates the
// optimizer moves: log V, logit P_act and, when free, log mu (lambda = mu).
struct Parameterization {
  const FitConfig& config;

  std::size_t dim() const { return config.free == FreeParameters::views_and_p_act ? 2 : 3; }

  std::vector<std::string> names() const {
    if (dim() == 2) return {"views_per_post", "p_act"};
    return {"views_per_post", "p_act", "mu"};
  }

  Vec lower() const {
    Vec lo{std::log(config.views_min), logit(config.p_act_min)};
    if (dim() == 3) lo.push_back(std::log(config.mu_min));
    return lo;
  }
  Vec upper() const {
    Vec hi{std::log(config.views_max), logit(config.p_act_max)};
    if (dim() == 3) hi.push_back(std::log(config.mu_max));
    return hi;
  }

  ModelParams to_params(const Vec& theta) const {
    ModelParams p = config.initial;
    p.views_per_post = std::exp(theta[0]);
    p.p_act = inv_logit(theta[1]);
    if (dim() == 3) {
      p.mu = std::exp(theta[2]);
      p.lambda = p.mu;
    }
    return p;
  }

  Vec from_params(const ModelParams& p) const {
    Vec theta{std::log(p.views_per_post), logit(std::clamp(p.p_act, config.p_act_min, config.p_act_max))};
    if (dim() == 3) theta.push_back(std::log(p.mu));
    return theta;
  }

  double natural(std::size_t j, double t) const { return j == 1 ? inv_logit(t) : std::exp(t); }
};

// Objective in optimizer coordinates: negative log-likelihood, with a box.
struct Problem {
  const LikelihoodObjective& likelihood;
  const Parameterization& param;
  Vec lo, hi;
  mutable std::int64_t evaluations = 0;

  Vec clamp(Vec t) const {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::clamp(t[i], lo[i], hi[i]);
    return t;
  }

  double operator()(const Vec& theta) const {
    ++evaluations;
    return -likelihood(param.to_params(clamp(theta)));
  }
};

struct LocalResult {
  Vec theta;
  double value = kInf;
  bool converged = false;
};

// Nelder-Mead simplex with projection onto the box.
LocalResult nelder_mead(const std::function<double(const Vec&)>& f,
                        const std::function<Vec(Vec)>& project, Vec start, double step,
                        double ftol, double xtol, int max_evals) {
  const std::size_t n = start.size();
  std::vector<Vec> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (auto& v : simplex) v = project(v);
  Vec values(n + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]), ++evals;

  LocalResult out;
  std::vector<std::size_t> order(n + 1);
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        diameter = std::max(diameter, std::fabs(simplex[i][k] - simplex[best][k]));
    if (std::fabs(values[worst] - values[best]) <= ftol * (1.0 + std::fabs(values[best])) &&
        diameter <= xtol) {
      out.converged = true;
      break;
    }
    Vec centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    auto along = [&](double coef) {
      Vec p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + coef * (simplex[worst][k] - centroid[k]);
      return project(p);
    };
    const Vec reflected = along(-1.0);
    const double fr = f(reflected);
    ++evals;
    if (fr < values[best]) {
      const Vec expanded = along(-2.0);
      const double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
    } else {
      const bool outside = fr < values[worst];
      const Vec contracted = along(outside ? -0.5 : 0.5);
      const double fc = f(contracted);
      ++evals;
      if (fc < std::min(fr, values[worst])) {
        simplex[worst] = contracted;
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < n; ++k)
            simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          simplex[i] = project(simplex[i]);
          values[i] = f(simplex[i]);
          ++evals;
        }
      }
    }
  }
  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  out.theta = simplex[best];
  out.value = values[best];
  return out;
}

constexpr double kFdStep = 1e-4;

Vec gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a[i] += kFdStep;
    b[i] -= kFdStep;
    g[i] = (f(a) - f(b)) / (2 * kFdStep);
  }
  return g;
}

std::vector<Vec> hessian(const std::function<double(const Vec&)>& f, const Vec& x) {
  const std::size_t n = x.size();
  std::vector<Vec> h(n, Vec(n));
  const double h2 = 4 * kFdStep * kFdStep;
  const double fx = f(x);
  for (std::size_t i = 0; i < n; ++i) {
    Vec a = x, b = x;
    a[i] += kFdStep;
    b[i] -= kFdStep;
    h[i][i] = (f(a) - 2 * fx + f(b)) / (kFdStep * kFdStep);
    for (std::size_t j = i + 1; j < n; ++j) {
      Vec pp = x, pm = x, mp = x, mm = x;
      pp[i] += kFdStep, pp[j] += kFdStep;
      pm[i] += kFdStep, pm[j] -= kFdStep;
      mp[i] -= kFdStep, mp[j] += kFdStep;
      mm[i] -= kFdStep, mm[j] -= kFdStep;
      h[i][j] = h[j][i] = (f(pp) - f(pm) - f(mp) + f(mm)) / h2;
    }
  }
  return h;
}

// Solves H d = g for small symmetric positive definite H by Cholesky;
// returns false if H is not positive definite.
bool cholesky_solve(std::vector<Vec> h, Vec& rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = h[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= h[j][k] * h[j][k];
    if (!(d > 0.0)) return false;
    h[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = h[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= h[i][k] * h[j][k];
      h[i][j] = s / h[j][j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= h[i][k] * rhs[k];
    rhs[i] = s / h[i][i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= h[k][i] * rhs[k];
    rhs[i] = s / h[i][i];
  }
  return true;
}

// Diagonal of H^{-1}, or empty if H is not positive definite.
Vec inverse_diagonal(const std::vector<Vec>& h) {
  const std::size_t n = h.size();
  Vec diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    if (!cholesky_solve(h, e)) return {};
    diag[i] = e[i];
  }
  return diag;
}

// Newton refinement from a simplex optimum, accepting only improving steps.
LocalResult newton_polish(const std::function<double(const Vec&)>& f,
                          const std::function<Vec(Vec)>& project, LocalResult start) {
  for (int it = 0; it < 8; ++it) {
    const Vec g = gradient(f, start.theta);
    Vec step = g;
    if (!cholesky_solve(hessian(f, start.theta), step)) break;
    bool improved = false;
    for (double scale = 1.0; scale > 1e-3; scale *= 0.5) {
      Vec trial = start.theta;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= scale * step[i];
      trial = project(trial);
      const double v = f(trial);
      if (v <= start.value) {
        improved = v < start.value;
        start.theta = trial;
        start.value = v;
        break;
      }
    }
    if (!improved) break;
  }
  return start;
}

Vec axis_values(const GridAxis& axis, bool log_scale) {
  Vec out;
  if (axis.points <= 1) {
    out.push_back(log_scale ? std::sqrt(axis.low * axis.high) : 0.5 * (axis.low + axis.high));
    return out;
  }
  for (int i = 0; i < axis.points; ++i) {
    const double t = static_cast<double>(i) / (axis.points - 1);
    out.push_back(log_scale ? axis.low * std::pow(axis.high / axis.low, t)
                            : axis.low + t * (axis.high - axis.low));
  }
  return out;
}

bool at_box(const Vec& theta, const Vec& lo, const Vec& hi, std::size_t j) {
  const double span = hi[j] - lo[j];
  return theta[j] <= lo[j] + 1e-9 * span || theta[j] >= hi[j] - 1e-9 * span;
}

}  // namespace

void FitConfig::validate() const {
  initial.validate();
  for (const GridAxis* g : {&views_grid, &p_act_grid, &mu_grid})
    if (!(g->low > 0.0) || !(g->high >= g->low) || g->points < 1)
      throw InputError("grid axes need 0 < low <= high and at least one point");
  if (p_act_grid.high >= 1.0) throw InputError("p_act grid must lie below 1");
  if (!(views_min > 0.0 && views_max > views_min) || !(mu_min > 0.0 && mu_max > mu_min) ||
      !(p_act_min > 0.0 && p_act_max < 1.0 && p_act_max > p_act_min))
    throw InputError("invalid optimizer box");
  if (starts < 1 || max_evaluations < 10) throw InputError("starts >= 1 and max_evaluations >= 10 required");
  if (!(objective_tolerance > 0.0) || !(parameter_tolerance > 0.0) || !(gradient_tolerance > 0.0))
    throw InputError("tolerances must be > 0");
  if (!(profile_drop > 0.0)) throw InputError("profile_drop must be > 0");
}

LikelihoodObjective::LikelihoodObjective(std::span<const UserRecord> users,
                                         const PopulationParams& pop)
    : pop_(pop) {
  pop.validate();
  for (const auto& u : users) {
    pop.check_user(u);
    if (u.posting_rate == 0.0) {
      excluded_.push_back({u.user_id, "zero posting rate (no visit information)"});
      continue;
    }
    if (u.stance == Stance::opponent && u.responses > 0) {
      excluded_.push_back({u.user_id, "opponent with recorded responses (zero likelihood)"});
      continue;
    }
    users_.push_back({receive_rate(u.friend_count, pop.typical_friend_rate), u.posting_rate,
                      u.topic_posts, u.total_posts, u.responses, u.stance == Stance::opponent});
    if (u.stance != Stance::opponent && u.responses > 0) no_responders_ = false;
  }
}

std::vector<double> LikelihoodObjective::per_user(const ModelParams& params) const {
  const SurfingLaw law(params.mu, params.lambda);
  std::vector<double> terms(users_.size());
  parallel_for(users_.size(), [&](std::size_t i) {
    const Row& r = users_[i];
    if (r.opponent) {
      terms[i] = 0.0;  // A = 0 and M = 0
      return;
    }
    const double rho = r.receive_rate / (params.views_per_post * r.posting_rate);
    const double scale = law.visibility(rho) * params.p_act;
    terms[i] = log_likelihood_term(r.M, r.m, r.n, pop_.advocate_post_count, scale);
  }, 64);
  return terms;
}

double LikelihoodObjective::operator()(const ModelParams& params) const {
  const auto terms = per_user(params);
  double sum = 0.0;
  for (double t : terms) sum += t;
  return std::isnan(sum) ? -kInf : sum;
}

std::map<std::string, Interval> confidence_intervals(std::span<const UserRecord> users,
                                                     const PopulationParams& pop,
                                                     const FitResult& fit,
                                                     const FitConfig& config) {
  const LikelihoodObjective likelihood(users, pop);
  const Parameterization param{config};
  const Problem problem{likelihood, param, param.lower(), param.upper()};
  const auto names = param.names();
  const std::size_t dim = param.dim();
  const double target = fit.log_likelihood - config.profile_drop;
  std::map<std::string, Interval> out;

  auto natural_value = [&](std::size_t j) {
    if (j == 0) return fit.params.views_per_post;
    if (j == 1) return fit.params.p_act;
    return fit.params.mu;
  };

  // Boundary case: P_act = 0 maximizes the likelihood. Profile the upper
  // end of P_act with the other parameters free; V is not identifiable.
  if (fit.p_act_at_boundary) {
    std::function<double(double)> profile_at = [&](double t) {
      // Best log-likelihood with logit P_act = t: smallest visibility wins.
      Vec theta = param.from_params(fit.params);
      theta[1] = t;
      theta[0] = problem.lo[0];
      if (dim == 3) theta[2] = problem.lo[2];
      return -problem(theta);
    };
    Interval p;
    p.low = 0.0;
    p.method = "boundary";
    const double t_hi = problem.hi[1];
    if (profile_at(t_hi) > target) {
      p.high = 1.0;
      p.unbounded = true;
    } else {
      std::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(
          [&](double t) { return profile_at(t) - target; }, problem.lo[1], t_hi,
          boost::math::tools::eps_tolerance<double>(40), iters);
      p.high = inv_logit(0.5 * (r.first + r.second));
    }
    out["p_act"] = p;
    Interval v{config.views_min, config.views_max, "boundary", true};
    out["views_per_post"] = v;
    if (dim == 3) out["mu"] = Interval{config.mu_min, config.mu_max, "boundary", true};
  } else {
    const Vec theta_hat = param.from_params(fit.params);
    std::function<double(const Vec&)> f = std::cref(problem);
    const Vec inv_diag = inverse_diagonal(hessian(f, theta_hat));

    for (std::size_t j = 0; j < dim; ++j) {
      // Maximum log-likelihood with coordinate j held at t.
      Vec warm = theta_hat;
      auto profile_at = [&](double t) {
        Vec others;
        for (std::size_t k = 0; k < dim; ++k)
          if (k != j) others.push_back(warm[k]);
        auto embed = [&](const Vec& o) {
          Vec full(dim);
          for (std::size_t k = 0, i = 0; k < dim; ++k) full[k] = k == j ? t : o[i++];
          return full;
        };
        double best;
        if (others.size() == 1) {
          const std::size_t k = j == 0 ? 1 : 0;
          const double lo = std::max(problem.lo[k], others[0] - 4.0);
          const double hi = std::min(problem.hi[k], others[0] + 4.0);
          auto r = boost::math::tools::brent_find_minima(
              [&](double x) { return problem(embed(Vec{x})); }, lo, hi, 30);
          others[0] = r.first;
          best = r.second;
        } else {
          auto sub = [&](const Vec& o) { return problem(embed(o)); };
          auto project = [&](Vec o) {
            for (std::size_t k = 0, i = 0; k < dim; ++k)
              if (k != j) o[i] = std::clamp(o[i], problem.lo[k], problem.hi[k]), ++i;
            return o;
          };
          auto r = nelder_mead(sub, project, others, 0.2, 1e-10, 1e-6, 600);
          others = r.theta;
          best = r.value;
        }
        warm = embed(others);
        return -best;
      };

      Interval iv;
      iv.method = "profile";
      const double se = (!inv_diag.empty() && inv_diag[j] > 0.0) ? std::sqrt(inv_diag[j]) : 0.5;
      bool fallback = false;
      std::array<double, 2> ends{};
      for (int side = 0; side < 2; ++side) {
        const double dir = side == 0 ? -1.0 : 1.0;
        const double bound = side == 0 ? problem.lo[j] : problem.hi[j];
        warm = theta_hat;
        double inner = theta_hat[j];
        double outer = theta_hat[j] + dir * std::max(2.0 * se, 1e-3);
        bool bracketed = false;
        for (int expand = 0; expand < 40; ++expand) {
          if (dir * (outer - bound) >= 0.0) outer = bound;
          if (profile_at(outer) < target) {
            bracketed = true;
            break;
          }
          if (outer == bound) break;
          inner = outer;
          outer = theta_hat[j] + 2.0 * (outer - theta_hat[j]);
        }
        if (!bracketed) {
          fallback = true;
          break;
        }
        std::uintmax_t iters = 100;
        auto r = boost::math::tools::toms748_solve(
            [&](double t) { return profile_at(t) - target; }, std::min(inner, outer),
            std::max(inner, outer), boost::math::tools::eps_tolerance<double>(30), iters);
        ends[side] = 0.5 * (r.first + r.second);
      }
      if (fallback) {
        iv.method = "curvature";
        iv.unbounded = true;
        const double half = 1.959963984540054 * se;
        ends = {std::max(problem.lo[j], theta_hat[j] - half),
                std::min(problem.hi[j], theta_hat[j] + half)};
      }
      iv.low = std::min(param.natural(j, ends[0]), natural_value(j));
      iv.high = std::max(param.natural(j, ends[1]), natural_value(j));
      out[names[j]] = iv;
    }
  }

  if (dim == 2) {
    out["mu"] = Interval{fit.params.mu, fit.params.mu, "fixed", false};
    out["lambda"] = Interval{fit.params.lambda, fit.params.lambda, "fixed", false};
  } else {
    Interval tied = out["mu"];
    tied.method += " (tied to mu)";
    out["lambda"] = tied;
  }
  return out;
}

FitResult fit_mle(std::span<const UserRecord> users, const PopulationParams& pop,
                  const FitConfig& config) {
  config.validate();
  const LikelihoodObjective likelihood(users, pop);
  if (likelihood.included() == 0)
    throw ModelError("fit_mle: every user was excluded from the likelihood");
  if (likelihood.included() < 10)
    throw ModelError("fit_mle: at least 10 includable users with posting_rate > 0 are required");

  const Parameterization param{config};
  const Problem problem{likelihood, param, param.lower(), param.upper()};
  FitResult result;
  result.excluded_users = likelihood.excluded();
  result.included_users = static_cast<std::int64_t>(likelihood.included());
  result.free_parameters = param.names();

  if (likelihood.no_responders()) {
    result.params = config.initial;
    result.params.p_act = 0.0;
    result.p_act_at_boundary = true;
    result.log_likelihood = likelihood(result.params);
    result.best_grid_log_likelihood = result.log_likelihood;
    result.converged = true;
    if (config.intervals) result.confidence_intervals = confidence_intervals(users, pop, result, config);
    result.evaluations = problem.evaluations + 1;
    return result;
  }

  // Coarse deterministic grid.
  std::vector<std::pair<double, Vec>> grid;
  const Vec views = axis_values(config.views_grid, true);
  const Vec acts = axis_values(config.p_act_grid, true);
  const Vec mus = param.dim() == 3 ? axis_values(config.mu_grid, true) : Vec{config.initial.mu};
  for (double v : views)
    for (double a : acts)
      for (double mu : mus) {
        ModelParams p = config.initial;
        p.views_per_post = v;
        p.p_act = a;
        if (param.dim() == 3) p.mu = p.lambda = mu;
        const Vec theta = problem.clamp(param.from_params(p));
        grid.emplace_back(problem(theta), theta);
      }
  std::stable_sort(grid.begin(), grid.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  result.best_grid_log_likelihood = -grid.front().first;

  std::function<double(const Vec&)> f = std::cref(problem);
  auto project = [&](Vec t) { return problem.clamp(std::move(t)); };
  LocalResult best;
  const int starts = std::min<int>(config.starts, static_cast<int>(grid.size()));
  const int per_start = config.max_evaluations / starts;
  for (int s = 0; s < starts; ++s) {
    LocalResult local = nelder_mead(f, project, grid[static_cast<std::size_t>(s)].second, 0.3,
                                    config.objective_tolerance, config.parameter_tolerance,
                                    per_start);
    // Restart once from the optimum to escape a collapsed simplex.
    LocalResult again = nelder_mead(f, project, local.theta, 0.05, config.objective_tolerance,
                                    config.parameter_tolerance, per_start);
    if (again.value <= local.value) {
      again.converged = again.converged && local.converged;
      local = again;
    }
    local = newton_polish(f, project, local);
    if (local.value < best.value) best = local;
  }

  result.params = param.to_params(best.theta);
  result.log_likelihood = -best.value;
  const Vec g = gradient(f, best.theta);
  double norm = 0.0;
  bool interior = true;
  for (std::size_t j = 0; j < g.size(); ++j) {
    norm += g[j] * g[j];
    if (at_box(best.theta, problem.lo, problem.hi, j)) interior = false;
  }
  result.gradient_norm = std::sqrt(norm);
  result.converged = best.converged && interior && result.gradient_norm <= config.gradient_tolerance;
  if (config.intervals) result.confidence_intervals = confidence_intervals(users, pop, result, config);
  result.evaluations = problem.evaluations;
  return result;
}

// --- logistic baseline --------------------------------------------------------

LogisticFit fit_logistic(std::span<const UserRecord> users, const PopulationParams& pop) {
  pop.validate();
  const double trials = static_cast<double>(pop.advocate_post_count);
  struct Obs {
    double x, successes;
  };
  std::vector<Obs> data;
  LogisticFit fit;
  double total_successes = 0.0;
  for (const auto& u : users) {
    pop.check_user(u);
    if (u.posting_rate <= 0.0) {
      fit.skipped_users.push_back(u.user_id);
      continue;
    }
    data.push_back({std::log(u.posting_rate), static_cast<double>(u.responses)});
    total_successes += static_cast<double>(u.responses);
  }
  if (data.size() < 2) throw ModelError("fit_logistic: need at least two users with posting_rate > 0");
  const double total_trials = trials * static_cast<double>(data.size());
  if (total_successes == 0.0)
    throw SeparationError("fit_logistic: no responses at all; intercept diverges to -infinity");
  if (total_successes == total_trials)
    throw SeparationError("fit_logistic: every post answered; intercept diverges to +infinity");
  const auto [xmin, xmax] = std::minmax_element(data.begin(), data.end(),
                                                [](const Obs& a, const Obs& b) { return a.x < b.x; });
  if (xmin->x == xmax->x) throw ModelError("fit_logistic: log posting rate has no spread");

  // Complete separation: outcomes are all-or-nothing and split by a threshold.
  {
    bool all_or_nothing = true;
    for (const auto& o : data)
      if (o.successes != 0.0 && o.successes != trials) all_or_nothing = false;
    if (all_or_nothing) {
      double max_fail = -kInf, min_succ = kInf, max_succ = -kInf, min_fail = kInf;
      for (const auto& o : data) {
        if (o.successes == 0.0) {
          max_fail = std::max(max_fail, o.x);
          min_fail = std::min(min_fail, o.x);
        } else {
          min_succ = std::min(min_succ, o.x);
          max_succ = std::max(max_succ, o.x);
        }
      }
      if (max_fail < min_succ || max_succ < min_fail)
        throw SeparationError("fit_logistic: outcomes completely separated by log posting rate");
    }
  }

  auto loglik = [&](double b0, double b1) {
    double ll = 0.0;
    for (const auto& o : data) {
      const double eta = b0 + b1 * o.x;
      // log sigma(eta) and log(1 - sigma(eta)) without overflow
      const double log_p = -std::log1p(std::exp(-std::fabs(eta))) + std::min(eta, 0.0);
      const double log_q = log_p - eta;
      ll += o.successes * log_p + (trials - o.successes) * log_q;
    }
    return ll;
  };

  const double rate = total_successes / total_trials;
  double b0 = std::log(rate / (1.0 - rate)), b1 = 0.0;
  double ll = loglik(b0, b1);
  double h00 = 0, h01 = 0, h11 = 0;
  for (int it = 1; it <= 100; ++it) {
    double g0 = 0, g1 = 0;
    h00 = h01 = h11 = 0;
    for (const auto& o : data) {
      const double p = inv_logit(b0 + b1 * o.x);
      const double resid = o.successes - trials * p;
      const double w = trials * p * (1.0 - p);
      g0 += resid;
      g1 += resid * o.x;
      h00 += w;
      h01 += w * o.x;
      h11 += w * o.x * o.x;
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0.0)) throw SeparationError("fit_logistic: information matrix became singular");
    const double d0 = (h11 * g0 - h01 * g1) / det;
    const double d1 = (-h01 * g0 + h00 * g1) / det;
    double scale = 1.0;
    double next = loglik(b0 + d0, b1 + d1);
    while (next < ll && scale > 1e-6) {
      scale *= 0.5;
      next = loglik(b0 + scale * d0, b1 + scale * d1);
    }
    b0 += scale * d0;
    b1 += scale * d1;
    ll = next;
    fit.iterations = it;
    if (std::fabs(b0) > 60.0 || std::fabs(b1) > 60.0)
      throw SeparationError("fit_logistic: coefficients diverge (quasi-complete separation)");
    if (std::fabs(scale * d0) < 1e-11 && std::fabs(scale * d1) < 1e-11) break;
  }
  const double det = h00 * h11 - h01 * h01;
  fit.beta0 = b0;
  fit.beta1 = b1;
  fit.se_beta0 = std::sqrt(h11 / det);
  fit.se_beta1 = std::sqrt(h00 / det);
  return fit;
}

LogisticPrediction logistic_predict(const UserRecord& user, const LogisticFit& fit,
                                    const PopulationParams& pop) {
  LogisticPrediction out;
  if (user.posting_rate <= 0.0) {
    out.undefined_rate = true;
    return out;
  }
  const double eta = fit.beta0 + fit.beta1 * std::log(user.posting_rate);
  out.expected_responses = static_cast<double>(pop.advocate_post_count) * inv_logit(eta);
  return out;
}

}  // namespace feedresp
