#include "bart/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bart::stats {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Wichura (1988), algorithm AS 241, PPND16.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("normal_quantile: p outside [0, 1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double reg_gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("reg_gamma_p: a <= 0");
  if (x < 0.0) throw std::invalid_argument("reg_gamma_p: x < 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double reg_gamma_q(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("reg_gamma_q: a <= 0");
  if (x < 0.0) throw std::invalid_argument("reg_gamma_q: x < 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 1000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double reg_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chi_squared_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  return reg_gamma_p(0.5 * df, 0.5 * x);
}

double chi_squared_quantile(double p, double df) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("chi_squared_quantile: p outside [0, 1)");
  }
  if (p == 0.0) return 0.0;
  double lo = 0.0;
  double hi = df;
  while (chi_squared_cdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-10 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi_squared_cdf(mid, df) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double student_t_cdf(double t, double df) {
  const double ib = reg_beta(0.5 * df, 0.5, df / (df + t * t));
  return (t >= 0.0) ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double two_sided_t_pvalue(double t, double df) {
  return reg_beta(0.5 * df, 0.5, df / (df + t * t));
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("variance: need n >= 2");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, q);
}

double permutation_threshold(std::vector<double> nulls, double alpha) {
  if (nulls.empty()) throw std::invalid_argument("permutation_threshold: empty");
  std::sort(nulls.begin(), nulls.end());
  const double n = static_cast<double>(nulls.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * (n + 1.0)));
  k = std::min(std::max<std::size_t>(k, 1), nulls.size());
  return nulls[k - 1];
}

FitStats fit_stats(std::span<const double> y, std::span<const double> y_hat,
                   double sst_mean) {
  if (y.size() != y_hat.size() || y.empty()) {
    throw std::invalid_argument("fit_stats: size mismatch");
  }
  FitStats out;
  double sst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - y_hat[i];
    out.l1 += std::abs(e);
    out.l2 += e * e;
    sst += (y[i] - sst_mean) * (y[i] - sst_mean);
  }
  out.rmse = std::sqrt(out.l2 / static_cast<double>(y.size()));
  out.pseudo_r_sq = (sst > 0.0) ? 1.0 - out.l2 / sst
                                : (out.l2 == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity());
  return out;
}

FitStats fit_stats(std::span<const double> y, std::span<const double> y_hat) {
  return fit_stats(y, y_hat, mean(y));
}

long ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

long ConfusionMatrix::errors() const { return counts[0][1] + counts[1][0]; }

double ConfusionMatrix::error_rate() const {
  const long t = total();
  return t == 0 ? 0.0 : static_cast<double>(errors()) / static_cast<double>(t);
}

double ConfusionMatrix::actual_error_rate(int label) const {
  const long row = counts[label][0] + counts[label][1];
  return row == 0 ? 0.0
                  : static_cast<double>(counts[label][1 - label]) /
                        static_cast<double>(row);
}

double ConfusionMatrix::predicted_error_rate(int label) const {
  const long col = counts[0][label] + counts[1][label];
  return col == 0 ? 0.0
                  : static_cast<double>(counts[1 - label][label]) /
                        static_cast<double>(col);
}

ConfusionMatrix confusion_matrix(std::span<const int> y,
                                 std::span<const int> y_hat) {
  if (y.size() != y_hat.size()) {
    throw std::invalid_argument("confusion_matrix: size mismatch");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y.size(); ++i) {
    cm.counts[y[i] ? 1 : 0][y_hat[i] ? 1 : 0]++;
  }
  return cm;
}

}  // namespace bart::stats
