#include "feedresp/evaluation.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "feedresp/parallel.hpp"
#include "feedresp/rng.hpp"

namespace feedresp {
namespace {

constexpr std::size_t kExactPermutationLimit = 8;

// Pearson correlation; NaN when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nan("");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double log_choose(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

}  // namespace

std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

Correlation spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("spearman_rho: inputs differ in length");
  if (x.size() < 3) throw DomainError("spearman_rho: need at least 3 pairs");
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  Correlation c;
  c.rho = pearson(rx, ry);
  if (std::isnan(c.rho)) {
    c.defined = false;
    c.p_value = std::nan("");
    c.method = "undefined (constant input)";
    return c;
  }
  const std::size_t n = x.size();
  if (n <= kExactPermutationLimit) {
    c.method = "exact-permutation";
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> shuffled(n);
    std::int64_t extreme = 0, total = 0;
    const double observed = std::fabs(c.rho) - 1e-12;
    do {
      for (std::size_t i = 0; i < n; ++i) shuffled[i] = ry[perm[i]];
      if (std::fabs(pearson(rx, shuffled)) >= observed) ++extreme;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    c.p_value = static_cast<double>(extreme) / static_cast<double>(total);
  } else {
    c.method = "t-approximation";
    const double df = static_cast<double>(n) - 2.0;
    if (std::fabs(c.rho) >= 1.0) {
      c.p_value = 0.0;
    } else {
      const double t = c.rho * std::sqrt(df / (1.0 - c.rho * c.rho));
      const boost::math::students_t dist(df);
      c.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
    }
  }
  return c;
}

DifferenceTest correlation_difference_test(std::span<const double> x, std::span<const double> y1,
                                           std::span<const double> y2, std::int64_t resamples,
                                           std::uint64_t seed) {
  if (x.size() != y1.size() || x.size() != y2.size())
    throw DomainError("correlation_difference_test: inputs differ in length");
  if (x.size() < 10) throw DomainError("correlation_difference_test: need at least 10 users");
  if (resamples < 1) throw DomainError("correlation_difference_test: resamples must be >= 1");
  DifferenceTest test;
  test.seed = seed;
  const double r1 = pearson(mid_ranks(x), mid_ranks(y1));
  const double r2 = pearson(mid_ranks(x), mid_ranks(y2));
  test.observed_difference = r1 - r2;

  const std::size_t n = x.size();
  std::vector<double> diffs(static_cast<std::size_t>(resamples), std::nan(""));
  parallel_for(diffs.size(), [&](std::size_t b) {
    RandomStream rng(seed, {0x626f6f74ULL, static_cast<std::uint64_t>(b)});  // "boot"
    std::vector<double> bx(n), b1(n), b2(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(rng.below(n));
      bx[i] = x[j];
      b1[i] = y1[j];
      b2[i] = y2[j];
    }
    const auto rx = mid_ranks(bx);
    diffs[b] = pearson(rx, mid_ranks(b1)) - pearson(rx, mid_ranks(b2));
  }, 64);
  std::int64_t at_or_below = 0, at_or_above = 0;
  for (double d : diffs) {
    if (std::isnan(d)) continue;
    ++test.resamples;
    if (d <= 0.0) ++at_or_below;
    if (d >= 0.0) ++at_or_above;
  }
  if (test.resamples == 0) throw DomainError("correlation_difference_test: every resample was degenerate");
  test.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(at_or_below, at_or_above)) /
                                   static_cast<double>(test.resamples));
  return test;
}

FisherResult fisher_exact(const std::array<std::int64_t, 4>& table) {
  for (auto v : table)
    if (v < 0) throw DomainError("fisher_exact: counts must be nonnegative");
  const auto [a, b, c, d] = table;
  const std::int64_t row1 = a + b, row2 = c + d, col1 = a + c, col2 = b + d;
  FisherResult r;
  if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0) {
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }
  const std::int64_t total = row1 + row2;
  // P(top-left = x) for fixed margins.
  auto log_prob = [&](std::int64_t x) {
    return log_choose(static_cast<double>(row1), static_cast<double>(x)) +
           log_choose(static_cast<double>(row2), static_cast<double>(col1 - x)) -
           log_choose(static_cast<double>(total), static_cast<double>(col1));
  };
  const std::int64_t lo = std::max<std::int64_t>(0, col1 - row2);
  const std::int64_t hi = std::min(row1, col1);
  const double observed = log_prob(a);
  double p = 0.0;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double lp = log_prob(x);
    if (lp <= observed + 1e-7) p += std::exp(lp);
  }
  r.p_value = std::min(1.0, p);
  return r;
}

Correlation error_uncertainty_correlation(std::span<const PredictionRecord> predictions) {
  std::vector<double> err, sd;
  err.reserve(predictions.size());
  sd.reserve(predictions.size());
  for (const auto& p : predictions) {
    err.push_back(p.abs_error);
    sd.push_back(p.predicted_std);
  }
  return spearman_rho(err, sd);
}

GoodnessOfFit chi_square_gof(std::span<const std::int64_t> counts, std::span<const double> pmf,
                             double min_expected) {
  if (counts.size() > pmf.size()) throw DomainError("chi_square_gof: counts outside pmf support");
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw DomainError("chi_square_gof: no observations");
  std::vector<double> obs_cells, exp_cells;
  double obs_acc = 0.0, exp_acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    obs_acc += i < counts.size() ? static_cast<double>(counts[i]) : 0.0;
    exp_acc += total * pmf[i];
    if (exp_acc >= min_expected) {
      obs_cells.push_back(obs_acc);
      exp_cells.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  // Remaining tail joins the last cell.
  if ((obs_acc > 0.0 || exp_acc > 0.0)) {
    if (obs_cells.empty()) {
      obs_cells.push_back(obs_acc);
      exp_cells.push_back(exp_acc);
    } else {
      obs_cells.back() += obs_acc;
      exp_cells.back() += exp_acc;
    }
  }
  GoodnessOfFit g;
  g.degrees_of_freedom = static_cast<int>(obs_cells.size()) - 1;
  for (std::size_t i = 0; i < obs_cells.size(); ++i) {
    const double d = obs_cells[i] - exp_cells[i];
    g.statistic += d * d / exp_cells[i];
  }
  if (g.degrees_of_freedom < 1) {
    g.p_value = 1.0;
    return g;
  }
  const boost::math::chi_squared dist(g.degrees_of_freedom);
  g.p_value = boost::math::cdf(boost::math::complement(dist, g.statistic));
  return g;
}

ModelEvaluation evaluate_model(const std::string& name,
                               std::span<const PredictionRecord> predictions, double fraction) {
  ModelEvaluation e;
  e.model_name = name;
  std::vector<double> observed, predicted;
  for (const auto& p : predictions) {
    observed.push_back(static_cast<double>(p.observed));
    predicted.push_back(p.predicted_mean);
  }
  e.prediction = spearman_rho(predicted, observed);
  e.error_vs_std = error_uncertainty_correlation(predictions);
  e.classification = classify_top_responders(predictions, fraction);
  const auto& c = e.classification;
  e.classification_fisher_p =
      fisher_exact({c.true_positive, c.false_positive, c.false_negative, c.true_negative}).p_value;
  e.pr_curve = precision_recall_points(predictions, fraction);
  return e;
}

EvaluationReport compare_models(const std::string& name_a, std::span<const PredictionRecord> a,
                                const std::string& name_b, std::span<const PredictionRecord> b,
                                double fraction, std::int64_t resamples, std::uint64_t seed) {
  std::map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : b) by_id[p.user_id] = &p;
  std::set<std::string> ids_a;
  for (const auto& p : a) ids_a.insert(p.user_id);
  std::vector<std::string> missing;
  for (const auto& id : ids_a)
    if (!by_id.count(id)) missing.push_back(id);
  for (const auto& [id, _] : by_id)
    if (!ids_a.count(id)) missing.push_back(id);
  if (!missing.empty() || a.size() != b.size()) {
    std::string msg = "prediction tables cover different users:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw InputError(msg);
  }
  std::vector<PredictionRecord> b_aligned;
  b_aligned.reserve(a.size());
  for (const auto& p : a) b_aligned.push_back(*by_id.at(p.user_id));

  EvaluationReport report;
  report.a = evaluate_model(name_a, a, fraction);
  report.b = evaluate_model(name_b, b_aligned, fraction);
  std::vector<double> observed, pa, pb, ea, eb, sa, sb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    observed.push_back(static_cast<double>(a[i].observed));
    pa.push_back(a[i].predicted_mean);
    pb.push_back(b_aligned[i].predicted_mean);
  }
  report.prediction_difference = correlation_difference_test(observed, pa, pb, resamples, seed);
  // Error-vs-spread difference: pair each model's |error| with its own std.
  // Resampling users jointly keeps the comparison paired.
  {
    std::vector<double> idx(a.size());
    std::iota(idx.begin(), idx.end(), 0.0);
    DifferenceTest t;
    t.seed = seed;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
      ea.push_back(a[i].abs_error);
      sa.push_back(a[i].predicted_std);
      eb.push_back(b_aligned[i].abs_error);
      sb.push_back(b_aligned[i].predicted_std);
    }
    const auto ca = spearman_rho(ea, sa), cb = spearman_rho(eb, sb);
    t.observed_difference = (ca.defined ? ca.rho : 0.0) - (cb.defined ? cb.rho : 0.0);
    if (n >= 10 && ca.defined && cb.defined) {
      std::vector<double> diffs(static_cast<std::size_t>(resamples), std::nan(""));
      parallel_for(diffs.size(), [&](std::size_t r) {
        RandomStream rng(seed, {0x65727273ULL, static_cast<std::uint64_t>(r)});  // "errs"
        std::vector<double> xa(n), ya(n), xb(n), yb(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto j = static_cast<std::size_t>(rng.below(n));
          xa[i] = ea[j], ya[i] = sa[j], xb[i] = eb[j], yb[i] = sb[j];
        }
        diffs[r] = pearson(mid_ranks(xa), mid_ranks(ya)) - pearson(mid_ranks(xb), mid_ranks(yb));
      }, 64);
      std::int64_t le = 0, ge = 0;
      for (double d : diffs) {
        if (std::isnan(d)) continue;
        ++t.resamples;
        if (d <= 0.0) ++le;
        if (d >= 0.0) ++ge;
      }
      if (t.resamples > 0)
        t.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) /
                                      static_cast<double>(t.resamples));
    } else {
      t.method = "not computed (undefined correlation or fewer than 10 users)";
      t.p_value = std::nan("");
    }
    report.error_difference = t;
  }
  return report;
}

}  // namespace feedresp
