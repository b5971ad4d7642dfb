#include "crude/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "crude/crude.hpp"

namespace crude {

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Wichura's PPND16. Three rational pieces: a central one in q = p - 0.5 and
// two tail ones in sqrt(-log(min(p, 1 - p))).
double normal_quantile(double p) {
  detail::check_probability_open(p);

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                             6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                           1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                         1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                             3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                           5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                         4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }

  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    const double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                             2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                           3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                         4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                             1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                           6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                         2.05319162663775882187e0) * r + 1.0);
    z = num / den;
  } else {
    r -= 5.0;
    const double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                             1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                           2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                         5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                             1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                           1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                         5.99832206555887937690e-1) * r + 1.0);
    z = num / den;
  }
  return (q < 0.0) ? -z : z;
}

GaussianMleModel fit_gaussian_mle(const PredictionSet& cal) {
  if (!cal.empty() && cal.size() < 2) throw TooFewPoints(cal.size(), 2);
  const auto z = sorted_z_scores(cal);
  const double n = static_cast<double>(z.size());
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  return {mean, std::max(std::sqrt(ss / n), kMinMleScale)};
}

double gaussian_mle_quantile(const GaussianMleModel& model, Prediction pred, double p) {
  detail::check_probability_open(p);
  detail::check_query_sigma(pred.sigma);
  return pred.mu + pred.sigma * model.m + pred.sigma * model.s * normal_quantile(p);
}

std::vector<double> pava(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& weights) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  if (y.size() != weights.size()) throw LengthMismatch(y.size(), weights.size());
  if (y.empty()) throw EmptySet("isotonic input");
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i] <= x[i + 1])) throw ValidationError("isotonic x values must be sorted");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw ValidationError("isotonic weights must be positive");
  }

  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], weights[i], 1});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double w = prev.weight + top.weight;
      prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / w;
      prev.weight = w;
      prev.count += top.count;
    }
  }

  std::vector<double> fitted;
  fitted.reserve(y.size());
  for (const Block& b : blocks) fitted.insert(fitted.end(), b.count, b.mean);
  return fitted;
}

namespace {

// Keeps base CDF values strictly inside (0, 1) so the pinned endpoint knots
// stay distinct from every data knot.
constexpr double kBaseCdfClamp = 1e-15;

}  // namespace

KuleshovModel fit_kuleshov(const PredictionSet& cal) {
  if (!cal.empty() && cal.size() < 2) throw TooFewPoints(cal.size(), 2);
  if (cal.empty()) throw EmptySet("calibration set");
  if (!cal.labeled) throw UnlabeledSet("calibration set");

  const std::size_t n = cal.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = cal.records[i];
    detail::check_query_sigma(r.sigma);
    const double z = (*r.y - r.mu) / r.sigma;
    if (!std::isfinite(z)) throw NonFiniteValue(i);
    q[i] = std::clamp(normal_cdf(z), kBaseCdfClamp, 1.0 - kBaseCdfClamp);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return q[a] < q[b]; });

  // Empirical CDF targets with average ranks on ties; tied q values collapse
  // into one weighted knot, so iso_x comes out strictly increasing.
  std::vector<double> knot_x, knot_y, knot_w;
  knot_x.reserve(n);
  knot_y.reserve(n);
  knot_w.reserve(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && q[order[j]] == q[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    knot_x.push_back(q[order[i]]);
    knot_y.push_back(avg_rank / static_cast<double>(n));
    knot_w.push_back(static_cast<double>(j - i));
    i = j;
  }

  std::vector<double> iso = pava(knot_x, knot_y, knot_w);

  KuleshovModel model;
  model.iso_x.reserve(iso.size() + 2);
  model.iso_y.reserve(iso.size() + 2);
  model.iso_x.push_back(0.0);
  model.iso_y.push_back(0.0);
  model.iso_x.insert(model.iso_x.end(), knot_x.begin(), knot_x.end());
  model.iso_y.insert(model.iso_y.end(), iso.begin(), iso.end());
  model.iso_x.push_back(1.0);
  model.iso_y.push_back(1.0);
  return model;
}

double kuleshov_map(const KuleshovModel& model, double p) {
  const auto& xs = model.iso_x;
  const auto& ys = model.iso_y;
  if (xs.size() < 2 || xs.size() != ys.size()) throw ValidationError("malformed isotonic map");
  if (p <= xs.front()) return ys.front();
  if (p >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), p);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double t = (p - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

namespace {

// Smallest p' with R(p') >= p. lower_bound lands on the left edge of any
// flat stretch, which is exactly the infimum rule.
double kuleshov_invert(const KuleshovModel& model, double p) {
  const auto& xs = model.iso_x;
  const auto& ys = model.iso_y;
  const auto it = std::lower_bound(ys.begin(), ys.end(), p);
  if (it == ys.begin()) return xs.front();
  if (it == ys.end()) return xs.back();
  const std::size_t j = static_cast<std::size_t>(it - ys.begin());
  return xs[j - 1] + (p - ys[j - 1]) / (ys[j] - ys[j - 1]) * (xs[j] - xs[j - 1]);
}

}  // namespace

double kuleshov_quantile(const KuleshovModel& model, Prediction pred, double p) {
  detail::check_probability_open(p);
  detail::check_query_sigma(pred.sigma);
  if (model.iso_x.size() < 2 || model.iso_x.size() != model.iso_y.size()) {
    throw ValidationError("malformed isotonic map");
  }
  const double level = std::clamp(kuleshov_invert(model, p), kKuleshovLevelClamp,
                                  1.0 - kKuleshovLevelClamp);
  return pred.mu + pred.sigma * normal_quantile(level);
}

double identity_quantile(Prediction pred, double p) {
  detail::check_probability_open(p);
  detail::check_query_sigma(pred.sigma);
  return pred.mu + pred.sigma * normal_quantile(p);
}

}  // namespace crude
