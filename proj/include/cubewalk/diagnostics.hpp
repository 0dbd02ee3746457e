#pragma once

// Chain-quality estimators and spectral-gap error-bound formulas.
//
// The autocorrelation estimator uses a single shared mean and a common
// denominator (the biased normalization), which keeps |rho| <= 1 and the
// sequence positive semidefinite. The integrated autocorrelation time is
// truncated by Geyer's initial-positive-sequence rule.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "cubewalk/forward.hpp"

namespace cubewalk {

struct AcfSeries {
  std::vector<double> rho;  // lag 0 .. max_lag, rho[0] = 1
  std::size_t n = 0;        // series length
};

namespace detail {

inline std::vector<double> autocovariance_direct(std::span<const double> x,
                                                 double mean, int max_lag) {
  const std::size_t n = x.size();
  std::vector<double> c(max_lag + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t)
      s += (x[t] - mean) * (x[t + k] - mean);
    c[k] = s;
  }
  return c;
}

/// Same sums as the direct path, via a zero-padded FFT.
inline std::vector<double> autocovariance_fft(std::span<const double> x,
                                              double mean, int max_lag) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<double> padded(m, 0.0);
  for (std::size_t t = 0; t < n; ++t) padded[t] = x[t] - mean;

  std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
  fftw_complex* spec = fftw_alloc_complex(m / 2 + 1);
  double* buf = fftw_alloc_real(m);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf, spec,
                                       FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(m), spec, buf,
                                       FFTW_ESTIMATE);
  std::copy(padded.begin(), padded.end(), buf);
  fftw_execute(fwd);
  for (std::size_t k = 0; k <= m / 2; ++k) {
    spec[k][0] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    spec[k][1] = 0.0;
  }
  fftw_execute(bwd);
  std::vector<double> c(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) c[k] = buf[k] / static_cast<double>(m);
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(spec);
  fftw_free(buf);
  return c;
}

}  // namespace detail

/// Autocorrelation up to max_lag: rho[k] = sum_t (x_t - m)(x_{t+k} - m) /
/// sum_t (x_t - m)^2 with the single shared mean m.
inline AcfSeries acf(std::span<const double> x, int max_lag) {
  const std::size_t n = x.size();
  if (max_lag < 0) throw std::invalid_argument("acf: max_lag must be >= 0");
  if (n < static_cast<std::size_t>(4 * std::max(1, max_lag)))
    throw std::invalid_argument("acf: series shorter than 4*max_lag");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  const bool use_fft =
      static_cast<double>(n) * (max_lag + 1) > 4e7 && max_lag > 0;
  std::vector<double> c =
      use_fft ? detail::autocovariance_fft(x, mean, max_lag)
              : detail::autocovariance_direct(x, mean, max_lag);
  if (!(c[0] > 0.0)) throw std::invalid_argument("acf: zero-variance series");
  AcfSeries out;
  out.n = n;
  out.rho.resize(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) out.rho[k] = c[k] / c[0];
  out.rho[0] = 1.0;
  return out;
}

struct IatResult {
  double tau = 1.0;       // integrated autocorrelation time
  double ess = 0.0;       // n / tau
  int truncation_lag = 0; // last lag included in the sum
};

/// Geyer initial-positive-sequence truncation: accumulate lag-pair sums
/// Gamma_m = rho[2m] + rho[2m+1] while they stay positive;
/// tau = 2 * sum Gamma - 1.
inline IatResult iat(const AcfSeries& series) {
  double sum = 0.0;
  int last = 0;
  const int max_lag = static_cast<int>(series.rho.size()) - 1;
  for (int m = 0; 2 * m + 1 <= max_lag; ++m) {
    const double pair = series.rho[2 * m] + series.rho[2 * m + 1];
    if (pair <= 0.0) break;
    sum += pair;
    last = 2 * m + 1;
  }
  IatResult r;
  r.tau = 2.0 * sum - 1.0;
  if (r.tau <= 0.0) r.tau = series.rho[0];  // degenerate; tau ~ 1 floor
  r.ess = static_cast<double>(series.n) / r.tau;
  r.truncation_lag = last;
  return r;
}

inline IatResult iat(std::span<const double> x) {
  const int max_lag =
      static_cast<int>(std::min<std::size_t>(x.size() / 4, 20000));
  return iat(acf(x, max_lag));
}

/// Kipnis-Varadhan bound on the asymptotic variance: 2 var(f) / gap.
inline double kv_variance_bound(double f_variance, double gap) {
  if (!(gap > 0.0)) throw std::invalid_argument("kv_variance_bound: gap <= 0");
  if (f_variance < 0.0)
    throw std::invalid_argument("kv_variance_bound: negative variance");
  return 2.0 * f_variance / gap;
}

/// Non-asymptotic MSE bound 2/(n gap) + 2/(n gap)^2, valid for ||f||_2 <= 1
/// after adequate burn-in (see burnin_steps).
inline double rudolf_mse_bound(std::int64_t n, double gap) {
  if (n < 1) throw std::invalid_argument("rudolf_mse_bound: n must be >= 1");
  if (!(gap > 0.0)) throw std::invalid_argument("rudolf_mse_bound: gap <= 0");
  const double d = static_cast<double>(n) * gap;
  return 2.0 / d + 2.0 / (d * d);
}

/// Smallest burn-in length n0(p) satisfying the mean-square-error bound
/// hypothesis, for a start distribution nu with
/// nu_norm = ||d nu / d mu - 1||_{p/(p-2)}.
inline std::int64_t burnin_steps(double p, double gap, double nu_norm) {
  if (!(p > 2.0)) throw std::invalid_argument("burnin_steps: p must be > 2");
  if (!(gap > 0.0 && gap <= 1.0))
    throw std::invalid_argument("burnin_steps: gap must lie in (0,1]");
  if (nu_norm < 0.0)
    throw std::invalid_argument("burnin_steps: nu_norm must be >= 0");
  if (nu_norm == 0.0) return 0;  // started in stationarity
  const double beta = 1.0 - gap;
  if (beta <= 0.0) return 0;
  const double inv_log = 1.0 / std::log(1.0 / beta);
  const double factor =
      p < 4.0 ? (p / (2.0 * (p - 2.0))) * std::log(32.0 * p / (p - 2.0))
              : std::log(64.0);
  const double value = inv_log * factor * nu_norm;
  return static_cast<std::int64_t>(std::ceil(value - 1e-9));
}

struct QuadratureOracle {
  std::vector<double> grid;     // uniform nodes on [-1,1]
  std::vector<double> density;  // normalized posterior density of u_0
};

/// Normalized posterior density of the single coordinate u_0 on a fine
/// uniform grid, by direct quadrature of exp(log-likelihood). Only valid
/// as a posterior oracle for J = 1.
inline QuadratureOracle posterior_quadrature_oracle(
    const std::function<double(double)>& log_lik_1d, int grid_points = 2001) {
  if (grid_points < 3)
    throw std::invalid_argument("posterior_quadrature_oracle: grid too small");
  QuadratureOracle oracle;
  oracle.grid.resize(grid_points);
  oracle.density.resize(grid_points);
  const double h = 2.0 / (grid_points - 1);
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    oracle.grid[i] = -1.0 + i * h;
    oracle.density[i] = log_lik_1d(oracle.grid[i]);
    max_log = std::max(max_log, oracle.density[i]);
  }
  double mass = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    oracle.density[i] = std::exp(oracle.density[i] - max_log);
    mass += (i == 0 || i == grid_points - 1 ? 0.5 : 1.0) * oracle.density[i];
  }
  mass *= h;
  for (double& d : oracle.density) d /= mass;
  return oracle;
}

/// Oracle probability mass per histogram bin; the bin count must divide the
/// grid cell count so bins align with grid nodes.
inline std::vector<double> oracle_bin_masses(const QuadratureOracle& oracle,
                                             int n_bins) {
  const int cells = static_cast<int>(oracle.grid.size()) - 1;
  if (n_bins < 1 || cells % n_bins != 0)
    throw std::invalid_argument(
        "oracle_bin_masses: bin count must divide the grid cells");
  const int per = cells / n_bins;
  const double h = 2.0 / cells;
  std::vector<double> mass(n_bins, 0.0);
  for (int b = 0; b < n_bins; ++b) {
    double m = 0.0;
    for (int c = 0; c < per; ++c) {
      const int i = b * per + c;
      m += 0.5 * h * (oracle.density[i] + oracle.density[i + 1]);
    }
    mass[b] = m;
  }
  double total = 0.0;
  for (double m : mass) total += m;
  for (double& m : mass) m /= total;
  return mass;
}

/// Total-variation distance between the empirical histogram of samples in
/// [-1,1] and the oracle bin masses.
inline double tv_distance_to_oracle(std::span<const double> samples,
                                    const QuadratureOracle& oracle,
                                    int n_bins) {
  if (samples.empty())
    throw std::invalid_argument("tv_distance_to_oracle: empty sample set");
  const std::vector<double> mass = oracle_bin_masses(oracle, n_bins);
  std::vector<double> counts(n_bins, 0.0);
  for (double s : samples) {
    int b = static_cast<int>((s + 1.0) / 2.0 * n_bins);
    if (b < 0) b = 0;
    if (b >= n_bins) b = n_bins - 1;
    counts[b] += 1.0;
  }
  double tv = 0.0;
  for (int b = 0; b < n_bins; ++b)
    tv += std::abs(counts[b] / static_cast<double>(samples.size()) - mass[b]);
  return 0.5 * tv;
}

}  // namespace cubewalk
