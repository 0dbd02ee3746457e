#pragma once

// Shared helpers for the test suites: chi-square goodness-of-fit machinery
// (via boost.math) and small sampling utilities.

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "cubewalk/rng.hpp"

namespace testutil {

inline double chi_square_p_value(double stat, int dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Pearson statistic of binned samples against the uniform law on [lo, hi].
struct ChiSquare {
  double stat = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

inline ChiSquare uniform_chi_square(std::span<const double> samples, int bins,
                                    double lo, double hi) {
  std::vector<double> counts(bins, 0.0);
  for (double s : samples) {
    int b = static_cast<int>((s - lo) / (hi - lo) * bins);
    if (b < 0) b = 0;
    if (b >= bins) b = bins - 1;
    counts[b] += 1.0;
  }
  const double expected = static_cast<double>(samples.size()) / bins;
  ChiSquare out;
  for (double c : counts) out.stat += (c - expected) * (c - expected) / expected;
  out.dof = bins - 1;
  out.p_value = chi_square_p_value(out.stat, out.dof);
  return out;
}

/// Two-sample Pearson chi-square over a shared binning of [lo, hi].
inline ChiSquare two_sample_chi_square(std::span<const double> a,
                                       std::span<const double> b, int bins,
                                       double lo, double hi) {
  std::vector<double> ca(bins, 0.0), cb(bins, 0.0);
  auto tally = [&](std::span<const double> xs, std::vector<double>& counts) {
    for (double x : xs) {
      int k = static_cast<int>((x - lo) / (hi - lo) * bins);
      if (k < 0) k = 0;
      if (k >= bins) k = bins - 1;
      counts[k] += 1.0;
    }
  };
  tally(a, ca);
  tally(b, cb);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  ChiSquare out;
  int used = 0;
  for (int k = 0; k < bins; ++k) {
    const double tot = ca[k] + cb[k];
    if (tot == 0.0) continue;
    const double term = std::sqrt(nb / na) * ca[k] - std::sqrt(na / nb) * cb[k];
    out.stat += term * term / tot;
    ++used;
  }
  out.dof = used - 1;
  out.p_value = chi_square_p_value(out.stat, out.dof);
  return out;
}

inline std::vector<double> thin(std::span<const double> x, int every) {
  std::vector<double> out;
  for (std::size_t i = every - 1; i < x.size();
       i += static_cast<std::size_t>(every))
    out.push_back(x[i]);
  return out;
}

/// AR(1) series with the given lag-1 correlation and unit marginal variance.
inline std::vector<double> ar1_series(cubewalk::RngStream& rng, double rho,
                                      std::size_t n) {
  std::vector<double> x(n);
  double state = rng.standard_normal();
  const double innovation = std::sqrt(1.0 - rho * rho);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = state;
    state = rho * state + innovation * rng.standard_normal();
  }
  return x;
}

}  // namespace testutil
