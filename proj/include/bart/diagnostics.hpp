#pragma once

#include <span>
#include <string>
#include <vector>

#include "bart/dataset.hpp"
#include "bart/sampler.hpp"

namespace bart::diag {

struct ShapiroWilk {
  double w = 0.0;
  double p_value = 0.0;
};

// Royston's AS R94 approximation; 3 <= n <= 5000, non-constant input.
ShapiroWilk shapiro_wilk(std::span<const double> values);

// Two-sided one-sample t-test of mean zero.
double zero_mean_t_test(std::span<const double> residuals);

// The recorded per-iteration series, flattened across chains with boundary
// bookkeeping for plotting.
struct TraceSeries {
  std::vector<int> chain;       // 1-based
  std::vector<long> iteration;  // within chain, 1-based
  std::vector<int> after_burn_in;
  std::vector<double> value;

  std::string to_csv(const std::string& value_name) const;
};

struct ConvergenceTrace {
  TraceSeries sigma_sq;      // burn-in plus kept iterations
  TraceSeries acceptance;    // same layout
  TraceSeries mean_leaves;   // kept iterations only
  TraceSeries mean_depth;    // kept iterations only
};

ConvergenceTrace convergence_trace(const PosteriorEnsemble& ensemble);

struct ResidualDiagnostics {
  std::vector<double> fitted;
  std::vector<double> residuals;

  std::string to_csv() const;
};

// In-sample fitted values and residuals (heteroskedasticity checks).
ResidualDiagnostics residuals_vs_fitted(const PosteriorEnsemble& ensemble,
                                        const ModelFrame& frame, int threads = 1);

// Plain-text report: data shape, build info, noise estimates, in-sample
// errors and the two residual tests (confusion matrix for classification).
std::string model_summary(const PosteriorEnsemble& ensemble, const ModelFrame& frame,
                          int threads = 1);

// Mean of the kept sigma^2 draws across all chains.
double avg_sigsq_after_burn_in(const PosteriorEnsemble& ensemble);

}  // namespace bart::diag
