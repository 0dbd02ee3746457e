#pragma once

// Uniform-series prior for the diffusion coefficient:
//
//   a(u)(x) = abar + gamma_0 u_0
//           + sum_{j=1}^{K} gamma_{2j-1} u_{2j-1} cos(2 pi j x)
//           + sum_{j=1}^{K} gamma_{2j}   u_{2j}   sin(2 pi j x)
//
// with coefficients u_j i.i.d. uniform on [-1,1]. The default weights are
// gamma_0 = 1 and gamma_{2j-1} = gamma_{2j} = j^-2, so the field admits a
// J-independent positive lower bound (see field_min_bound).

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cubewalk/rng.hpp"

namespace cubewalk {

struct BasisSpec {
  double mean_level = 4.38;      // constant mean level abar
  int frequency_pairs = 0;       // K; coefficient dimension is J = 2K + 1
  std::vector<double> weights;   // gamma_0 .. gamma_{2K}, all > 0

  int dimension() const { return 2 * frequency_pairs + 1; }

  /// Default basis: gamma_0 = 1, gamma_{2j-1} = gamma_{2j} = j^-2.
  static BasisSpec with_defaults(int K, double abar = 4.38) {
    if (K < 0) throw std::invalid_argument("BasisSpec: K must be >= 0");
    BasisSpec spec;
    spec.mean_level = abar;
    spec.frequency_pairs = K;
    spec.weights.resize(2 * K + 1);
    spec.weights[0] = 1.0;
    for (int j = 1; j <= K; ++j) {
      const double w = 1.0 / (static_cast<double>(j) * j);
      spec.weights[2 * j - 1] = w;
      spec.weights[2 * j] = w;
    }
    return spec;
  }

  void validate() const {
    if (static_cast<int>(weights.size()) != dimension())
      throw std::invalid_argument("BasisSpec: weight count must equal 2K+1");
    for (double w : weights)
      if (!(w > 0.0))
        throw std::invalid_argument("BasisSpec: weights must be positive");
  }
};

/// Point in the cube [-1,1]^J. Out-of-range entries are rejected on
/// construction; the random-walk sampler handles cube exit through zero
/// acceptance, never by clamping here.
class CoefficientVector {
 public:
  explicit CoefficientVector(std::vector<double> values)
      : values_(std::move(values)) {
    for (double v : values_) {
      if (!std::isfinite(v) || v < -1.0 || v > 1.0)
        throw std::invalid_argument(
            "CoefficientVector: entries must be finite and in [-1,1], got " +
            std::to_string(v));
    }
  }

  static CoefficientVector zeros(int dimension) {
    return CoefficientVector(std::vector<double>(dimension, 0.0));
  }

  int dimension() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> span() const { return values_; }

 private:
  std::vector<double> values_;
};

/// True iff every entry of a raw vector lies in [-1,1].
inline bool inside_cube(std::span<const double> u) {
  for (double v : u)
    if (!(v >= -1.0 && v <= 1.0)) return false;
  return true;
}

inline double evaluate_field(const BasisSpec& spec, std::span<const double> u,
                             double x) {
  if (static_cast<int>(u.size()) != spec.dimension())
    throw std::invalid_argument("evaluate_field: dimension mismatch");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("evaluate_field: x must lie in [0,1]");
  double a = spec.mean_level + spec.weights[0] * u[0];
  for (int j = 1; j <= spec.frequency_pairs; ++j) {
    const double phase = 2.0 * std::numbers::pi * j * x;
    a += spec.weights[2 * j - 1] * u[2 * j - 1] * std::cos(phase) +
         spec.weights[2 * j] * u[2 * j] * std::sin(phase);
  }
  return a;
}

inline double evaluate_field(const BasisSpec& spec,
                             const CoefficientVector& u, double x) {
  return evaluate_field(spec, u.span(), x);
}

/// Direct (term-by-term) evaluation on a set of nodes. `mean_profile`, when
/// non-empty, replaces the constant mean level node-by-node.
inline std::vector<double> evaluate_field_on_nodes(
    const BasisSpec& spec, std::span<const double> u,
    std::span<const double> nodes, std::span<const double> mean_profile = {}) {
  if (!mean_profile.empty() && mean_profile.size() != nodes.size())
    throw std::invalid_argument(
        "evaluate_field_on_nodes: mean profile size must match node count");
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    values[i] = evaluate_field(spec, u, nodes[i]);
    if (!mean_profile.empty()) values[i] += mean_profile[i] - spec.mean_level;
  }
  return values;
}

/// Analytic lower bound on inf_{x, u in the cube} a(u)(x).
///
/// Each frequency pair contributes amplitude at most
/// sqrt(gamma_c^2 + gamma_s^2) since sup_x |c cos + s sin| = sqrt(c^2+s^2);
/// for the default equal weights this is sqrt(2) j^-2 per pair, giving
/// abar - 1 - sqrt(2) sum j^-2 (about 1.0537 for abar = 4.38 as K -> inf).
inline double field_min_bound(const BasisSpec& spec) {
  spec.validate();
  double bound = spec.mean_level - spec.weights[0];
  for (int j = 1; j <= spec.frequency_pairs; ++j)
    bound -= std::hypot(spec.weights[2 * j - 1], spec.weights[2 * j]);
  return bound;
}

/// Draw from the prior: J i.i.d. uniform coordinates on [-1,1].
inline CoefficientVector sample_prior(RngStream& rng, int dimension) {
  if (dimension < 1)
    throw std::invalid_argument("sample_prior: dimension must be >= 1");
  std::vector<double> u(dimension);
  for (double& v : u) v = rng.uniform_sym();
  return CoefficientVector(std::move(u));
}

}  // namespace cubewalk
