#include "bart/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bart/errors.hpp"
#include "bart/inference.hpp"
#include "bart/stats.hpp"

namespace bart::diag {

ShapiroWilk shapiro_wilk(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3 || n > 5000) {
    throw DataError("shapiro_wilk: sample size must be in [3, 5000]");
  }
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) {
    throw DataError("shapiro_wilk: constant sample");
  }

  const double nd = static_cast<double>(n);
  std::vector<double> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = stats::normal_quantile((static_cast<double>(i + 1) - 0.375) / (nd + 0.25));
  }
  double m_sq = 0.0;
  for (double v : m) m_sq += v * v;

  std::vector<double> a(n, 0.0);
  const double u = 1.0 / std::sqrt(nd);
  const double rsm = 1.0 / std::sqrt(m_sq);
  if (n <= 5) {
    a[n - 1] = -2.706056 * std::pow(u, 5.0) + 4.434685 * std::pow(u, 4.0) -
               2.071190 * std::pow(u, 3.0) - 0.147981 * u * u + 0.221157 * u +
               m[n - 1] * rsm;
    const double phi = (m_sq - 2.0 * m[n - 1] * m[n - 1]) /
                       (1.0 - 2.0 * a[n - 1] * a[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) a[i] = m[i] / std::sqrt(phi);
    a[0] = -a[n - 1];
  } else {
    a[n - 1] = -2.706056 * std::pow(u, 5.0) + 4.434685 * std::pow(u, 4.0) -
               2.071190 * std::pow(u, 3.0) - 0.147981 * u * u + 0.221157 * u +
               m[n - 1] * rsm;
    a[n - 2] = -3.582633 * std::pow(u, 5.0) + 5.682633 * std::pow(u, 4.0) -
               1.752461 * std::pow(u, 3.0) - 0.293762 * u * u + 0.042981 * u +
               m[n - 2] * rsm;
    const double phi =
        (m_sq - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
        (1.0 - 2.0 * a[n - 1] * a[n - 1] - 2.0 * a[n - 2] * a[n - 2]);
    for (std::size_t i = 2; i + 2 < n; ++i) a[i] = m[i] / std::sqrt(phi);
    a[0] = -a[n - 1];
    a[1] = -a[n - 2];
  }

  const double mean_x = stats::mean(x);
  double numer = 0.0;
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    numer += a[i] * x[i];
    denom += (x[i] - mean_x) * (x[i] - mean_x);
  }
  ShapiroWilk result;
  result.w = numer * numer / denom;
  result.w = std::min(result.w, 1.0);

  if (n == 3) {
    constexpr double kPi6 = 1.90985931710274;   // 6/pi
    constexpr double kStqr = 1.04719755119660;  // asin(sqrt(3/4))
    double p = kPi6 * (std::asin(std::sqrt(result.w)) - kStqr);
    result.p_value = std::clamp(p, 0.0, 1.0);
    return result;
  }
  double mu, sigma, z;
  if (n <= 11) {
    const double g = -2.273 + 0.459 * nd;
    mu = 0.5440 - 0.39978 * nd + 0.025054 * nd * nd - 0.0006714 * nd * nd * nd;
    sigma = std::exp(1.3822 - 0.77857 * nd + 0.062767 * nd * nd -
                     0.0020322 * nd * nd * nd);
    z = (-std::log(g - std::log1p(-result.w)) - mu) / sigma;
  } else {
    const double ln = std::log(nd);
    mu = -1.5861 - 0.31082 * ln - 0.083751 * ln * ln + 0.0038915 * ln * ln * ln;
    sigma = std::exp(-0.4803 - 0.082676 * ln + 0.0030302 * ln * ln);
    z = (std::log1p(-result.w) - mu) / sigma;
  }
  result.p_value = 1.0 - stats::normal_cdf(z);
  return result;
}

double zero_mean_t_test(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  if (n < 2) throw DataError("zero_mean_t_test: need n >= 2");
  const double mean = stats::mean(residuals);
  const double sd = std::sqrt(stats::variance(residuals));
  if (sd == 0.0) throw DataError("zero_mean_t_test: zero sample standard deviation");
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  return stats::two_sided_t_pvalue(t, static_cast<double>(n - 1));
}

std::string TraceSeries::to_csv(const std::string& value_name) const {
  std::ostringstream os;
  os.precision(17);
  os << "chain,iteration,after_burn_in," << value_name << "\n";
  for (std::size_t i = 0; i < value.size(); ++i) {
    os << chain[i] << "," << iteration[i] << "," << after_burn_in[i] << ","
       << value[i] << "\n";
  }
  return os.str();
}

namespace {

void append_series(TraceSeries& series, int chain, const std::vector<double>& values,
                   long burn_in, bool kept_only) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    series.chain.push_back(chain);
    series.iteration.push_back(static_cast<long>(i) + 1 +
                               (kept_only ? burn_in : 0));
    series.after_burn_in.push_back(
        kept_only || static_cast<long>(i) >= burn_in ? 1 : 0);
    series.value.push_back(values[i]);
  }
}

}  // namespace

ConvergenceTrace convergence_trace(const PosteriorEnsemble& ensemble) {
  if (ensemble.traces.empty()) {
    throw DataError("convergence_trace: no recorded diagnostics");
  }
  ConvergenceTrace trace;
  for (std::size_t c = 0; c < ensemble.traces.size(); ++c) {
    const ChainTrace& ct = ensemble.traces[c];
    append_series(trace.sigma_sq, static_cast<int>(c) + 1, ct.sigma_sq, ct.burn_in,
                  false);
    append_series(trace.acceptance, static_cast<int>(c) + 1, ct.acceptance,
                  ct.burn_in, false);
    append_series(trace.mean_leaves, static_cast<int>(c) + 1, ct.mean_leaves,
                  ct.burn_in, true);
    append_series(trace.mean_depth, static_cast<int>(c) + 1, ct.mean_depth,
                  ct.burn_in, true);
  }
  return trace;
}

std::string ResidualDiagnostics::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "fitted,residual\n";
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    os << fitted[i] << "," << residuals[i] << "\n";
  }
  return os.str();
}

ResidualDiagnostics residuals_vs_fitted(const PosteriorEnsemble& ensemble,
                                        const ModelFrame& frame, int threads) {
  ResidualDiagnostics out;
  out.fitted = predict_point(ensemble, frame, threads);
  out.residuals.resize(out.fitted.size());
  for (std::size_t i = 0; i < out.fitted.size(); ++i) {
    out.residuals[i] = frame.response()[i] - out.fitted[i];
  }
  return out;
}

double avg_sigsq_after_burn_in(const PosteriorEnsemble& ensemble) {
  double total = 0.0;
  for (const PosteriorSample& s : ensemble.samples) total += s.sigma_sq;
  return total / static_cast<double>(ensemble.samples.size());
}

std::string model_summary(const PosteriorEnsemble& ensemble, const ModelFrame& frame,
                          int threads) {
  std::ostringstream os;
  const bool classification = ensemble.meta.classification;
  os << "bart model for " << (classification ? "classification" : "regression")
     << "\n\n";
  if (ensemble.meta.use_missing_data) os << "missing data feature on\n";
  os << "training data n = " << frame.n_rows() << " and p = " << frame.n_cols()
     << "\n";
  os.precision(3);
  os << "built in " << ensemble.build_seconds << " secs on " << ensemble.chains
     << (ensemble.chains == 1 ? " chain, " : " chains, ") << ensemble.hyper.num_trees
     << " trees, " << ensemble.burn_in << " burn-in and "
     << ensemble.samples.size() << " post. samples\n\n";

  if (classification) {
    const PredictionResult pred = predict(ensemble, frame, threads);
    std::vector<int> actual(frame.n_rows());
    for (std::size_t i = 0; i < frame.n_rows(); ++i) {
      actual[i] = frame.response()[i] > 0.5 ? 1 : 0;
    }
    const stats::ConfusionMatrix cm = stats::confusion_matrix(actual, pred.label);
    const std::string neg = ensemble.meta.negative_level;
    const std::string pos = ensemble.meta.positive_level;
    os << "confusion matrix:\n\n";
    os << "              predicted " << neg << "  predicted " << pos
       << "  model errors\n";
    os.precision(3);
    os << "actual " << neg << "  " << cm.counts[0][0] << "  " << cm.counts[0][1]
       << "  " << cm.actual_error_rate(0) << "\n";
    os << "actual " << pos << "  " << cm.counts[1][0] << "  " << cm.counts[1][1]
       << "  " << cm.actual_error_rate(1) << "\n";
    os << "use errors  " << cm.predicted_error_rate(0) << "  "
       << cm.predicted_error_rate(1) << "  " << cm.error_rate() << "\n";
    return os.str();
  }

  os.precision(4);
  os << "sigsq est for y beforehand: " << ensemble.calibrated.sigsq_hat << "\n";
  os << "avg sigsq estimate after burn-in: " << avg_sigsq_after_burn_in(ensemble)
     << "\n\n";
  const ResidualDiagnostics resid = residuals_vs_fitted(ensemble, frame, threads);
  const stats::FitStats fit = stats::fit_stats(frame.response(), resid.fitted);
  os << "in-sample statistics:\n";
  os << " L1 = " << fit.l1 << "\n";
  os << " L2 = " << fit.l2 << "\n";
  os << " rmse = " << fit.rmse << "\n";
  os << " Pseudo-Rsq = " << fit.pseudo_r_sq << "\n";
  try {
    const ShapiroWilk sw = shapiro_wilk(resid.residuals);
    os << "p-val for shapiro-wilk test of normality of residuals: " << sw.p_value
       << "\n";
  } catch (const DataError&) {
    os << "p-val for shapiro-wilk test of normality of residuals: n/a\n";
  }
  try {
    os << "p-val for zero-mean noise: " << zero_mean_t_test(resid.residuals) << "\n";
  } catch (const DataError&) {
    os << "p-val for zero-mean noise: n/a\n";
  }
  return os.str();
}

}  // namespace bart::diag
