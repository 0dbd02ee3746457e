#pragma once

// Finite-chain spectral laboratory.
//
// Reversible kernels on n states are represented by a row-stochastic matrix
// plus stationary weights. Two gap conventions coexist and every report
// carries both:
//
//   gap_abs      1 - max|lambda| over non-unit eigenvalues; the operator
//                norm gap on mean-zero functions (tensorization preserves
//                this one);
//   gap_lambda2  1 - lambda_2 with lambda_2 the second-largest *signed*
//                eigenvalue; this is the quantity Cheeger's inequality
//                controls.
//
// Reflected-walk kernels have negative eigenvalues, so conflating the two
// conventions produces false bound violations.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "cubewalk/rng.hpp"
#include "cubewalk/samplers.hpp"

namespace cubewalk {

struct FiniteKernel {
  Eigen::MatrixXd P;   // row-stochastic transition matrix
  Eigen::VectorXd pi;  // stationary weights, positive, summing to 1

  int size() const { return static_cast<int>(P.rows()); }

  void validate(double row_tol = 1e-12) const {
    const int n = size();
    if (P.cols() != n || pi.size() != n)
      throw std::invalid_argument("FiniteKernel: shape mismatch");
    for (int i = 0; i < n; ++i) {
      if (!(pi(i) > 0.0))
        throw std::invalid_argument("FiniteKernel: weights must be positive");
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        if (P(i, j) < -row_tol)
          throw std::invalid_argument("FiniteKernel: negative entry");
        row += P(i, j);
      }
      if (std::abs(row - 1.0) > row_tol)
        throw std::invalid_argument("FiniteKernel: row does not sum to 1");
    }
    if (std::abs(pi.sum() - 1.0) > 1e-10)
      throw std::invalid_argument("FiniteKernel: weights must sum to 1");
  }

  /// Max detailed-balance residual |pi_i P_ij - pi_j P_ji|.
  double reversibility_residual() const {
    double r = 0.0;
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j)
        r = std::max(r, std::abs(pi(i) * P(i, j) - pi(j) * P(j, i)));
    return r;
  }

  void assert_reversible(double tol = 1e-10) const {
    if (reversibility_residual() > tol)
      throw std::invalid_argument("FiniteKernel: not reversible");
  }
};

struct GapReport {
  double beta_abs = 0.0;      // max |lambda|, one unit eigenvalue removed
  double gap_abs = 0.0;       // 1 - beta_abs
  double lambda2 = 0.0;       // second-largest signed eigenvalue
  double gap_lambda2 = 0.0;   // 1 - lambda2
  std::optional<double> conductance;  // filled by the conductance checks
};

/// Spectral gap of a reversible kernel through the symmetrized matrix
/// S = D^{1/2} P D^{-1/2}, D = diag(pi). Dense symmetric eigensolve;
/// guarded to n <= 5000. Throws if the symmetrization residual exceeds
/// 1e-8 (non-reversible input).
inline GapReport spectral_gap(const FiniteKernel& kernel) {
  const int n = kernel.size();
  if (n > 5000)
    throw std::invalid_argument("spectral_gap: n > 5000 not supported");
  if (n < 1) throw std::invalid_argument("spectral_gap: empty kernel");
  GapReport report;
  if (n == 1) {
    report.beta_abs = 0.0;
    report.gap_abs = 1.0;
    report.lambda2 = 0.0;
    report.gap_lambda2 = 1.0;
    return report;
  }
  Eigen::VectorXd sqrt_pi = kernel.pi.array().sqrt();
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S(i, j) = sqrt_pi(i) * kernel.P(i, j) / sqrt_pi(j);
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8)
    throw std::invalid_argument(
        "spectral_gap: kernel is not reversible (residual " +
        std::to_string(asym) + ")");
  S = 0.5 * (S + S.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S,
                                                        Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = solver.eigenvalues();  // ascending
  report.lambda2 = ev(n - 2);
  report.gap_lambda2 = 1.0 - report.lambda2;
  report.beta_abs = std::max(std::abs(ev(0)), std::abs(ev(n - 2)));
  report.gap_abs = 1.0 - report.beta_abs;
  return report;
}

/// Exact conductance min_{0 < pi(A) <= 1/2} flow(A, A^c)/pi(A) by subset
/// enumeration in Gray-code order. Exhaustive, hence the n <= 22 guard.
inline double conductance_exact(const FiniteKernel& kernel) {
  const int n = kernel.size();
  if (n > 22)
    throw std::invalid_argument("conductance_exact: n > 22 not supported");
  if (n < 2)
    throw std::invalid_argument("conductance_exact: need at least 2 states");
  Eigen::MatrixXd flow(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) flow(i, j) = kernel.pi(i) * kernel.P(i, j);

  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<char> in_set(n, 0);
  double cut = 0.0, mass = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0, mask = 0;
  for (std::uint64_t g = 1; g < count; ++g) {
    const int k = std::countr_zero(g);  // Gray code toggles bit k
    if (!in_set[k]) {
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        if (in_set[j])
          cut -= flow(j, k);
        else
          cut += flow(k, j);
      }
      in_set[k] = 1;
      mass += kernel.pi(k);
      mask |= std::uint64_t{1} << k;
    } else {
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        if (in_set[j])
          cut += flow(j, k);
        else
          cut -= flow(k, j);
      }
      in_set[k] = 0;
      mass -= kernel.pi(k);
      mask &= ~(std::uint64_t{1} << k);
    }
    if (mask != 0 && mass <= 0.5 + 1e-12) {
      const double ratio = cut / mass;
      if (ratio < best) {
        best = ratio;
        best_mask = mask;
      }
    }
  }
  // Recompute the winning cut directly; the incremental sums drift a little
  // over millions of toggles.
  double exact_cut = 0.0, exact_mass = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!((best_mask >> i) & 1)) continue;
    exact_mass += kernel.pi(i);
    for (int j = 0; j < n; ++j)
      if (!((best_mask >> j) & 1)) exact_cut += flow(i, j);
  }
  return std::max(0.0, exact_cut / exact_mass);
}

struct CheegerReport {
  double conductance = 0.0;
  GapReport gap;
  double lower = 0.0;   // C^2/2
  double upper = 0.0;   // 2C
  bool lower_holds = false;
  bool upper_holds = false;
  double lower_tightness = 0.0;  // gap_lambda2 / lower
  double upper_tightness = 0.0;  // upper / gap_lambda2
  bool ok() const { return lower_holds && upper_holds; }
};

/// Check C^2/2 <= 1 - lambda_2 <= 2C with slack 1e-10. The eigenvalue side
/// uses the lambda_2 gap, since Cheeger's inequality does not control
/// negative eigenvalues.
inline CheegerReport cheeger_check(const FiniteKernel& kernel) {
  kernel.assert_reversible();
  CheegerReport rep;
  rep.conductance = conductance_exact(kernel);
  rep.gap = spectral_gap(kernel);
  rep.gap.conductance = rep.conductance;
  rep.lower = 0.5 * rep.conductance * rep.conductance;
  rep.upper = 2.0 * rep.conductance;
  rep.lower_holds = rep.gap.gap_lambda2 >= rep.lower - 1e-10;
  rep.upper_holds = rep.gap.gap_lambda2 <= rep.upper + 1e-10;
  rep.lower_tightness = rep.lower > 0.0 ? rep.gap.gap_lambda2 / rep.lower : 0.0;
  rep.upper_tightness =
      rep.gap.gap_lambda2 > 0.0 ? rep.upper / rep.gap.gap_lambda2 : 0.0;
  return rep;
}

/// Metropolize a mu0-reversible proposal kernel towards the target
/// mu proportional to L * mu0. Off-diagonal entries get the usual
/// min(1, mu_j Q_ji / (mu_i Q_ij)) factor; the diagonal absorbs the
/// rejected mass. The result is mu-reversible by construction (asserted).
inline FiniteKernel mh_finite(const FiniteKernel& proposal,
                              const Eigen::VectorXd& likelihood) {
  const int n = proposal.size();
  if (likelihood.size() != n)
    throw std::invalid_argument("mh_finite: likelihood size mismatch");
  for (int i = 0; i < n; ++i)
    if (!(likelihood(i) > 0.0))
      throw std::invalid_argument("mh_finite: likelihood entries must be > 0");
  Eigen::VectorXd mu = likelihood.cwiseProduct(proposal.pi);
  FiniteKernel out;
  out.P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i || proposal.P(i, j) <= 0.0) continue;
      const double ratio =
          (mu(j) * proposal.P(j, i)) / (mu(i) * proposal.P(i, j));
      out.P(i, j) = proposal.P(i, j) * std::min(1.0, ratio);
      off += out.P(i, j);
    }
    out.P(i, i) = std::max(0.0, 1.0 - off);
  }
  out.pi = mu / mu.sum();
  out.assert_reversible(1e-10);
  return out;
}

struct GapTransferReport {
  GapReport proposal_gap;
  GapReport mh_gap;
  double likelihood_ratio = 1.0;  // L_star / L_sup, in (0,1]
  double lower_bound = 0.0;       // ratio^4 * gap_prop^2 / 8
  double upper_bound = 0.0;       // 2 ratio^-2 sqrt(gap_prop)
  bool lower_holds = false;
  bool upper_holds = false;
  double lower_tightness = 0.0;   // mh gap / lower bound
  double upper_tightness = 0.0;   // upper bound / mh gap
};

/// Gap-transfer check: bounds on the MH gap from the proposal gap and the
/// likelihood range. Both bounds are evaluated on the lambda_2 gaps (the
/// conductance-compatible convention); gap_abs is carried alongside in the
/// embedded reports. The lower bound is the asserted one; the upper bound
/// is recorded only.
inline GapTransferReport gap_transfer_check(const FiniteKernel& proposal,
                                       const Eigen::VectorXd& likelihood) {
  GapTransferReport rep;
  rep.proposal_gap = spectral_gap(proposal);
  const FiniteKernel mh = mh_finite(proposal, likelihood);
  rep.mh_gap = spectral_gap(mh);
  rep.likelihood_ratio = likelihood.minCoeff() / likelihood.maxCoeff();
  const double r = rep.likelihood_ratio;
  const double gq = rep.proposal_gap.gap_lambda2;
  const double gp = rep.mh_gap.gap_lambda2;
  rep.lower_bound = std::pow(r, 4) * gq * gq / 8.0;
  rep.upper_bound = 2.0 / (r * r) * std::sqrt(std::max(0.0, gq));
  rep.lower_holds = gp >= rep.lower_bound - 1e-12;
  rep.upper_holds = gp <= rep.upper_bound + 1e-12;
  rep.lower_tightness = rep.lower_bound > 0.0 ? gp / rep.lower_bound : 0.0;
  rep.upper_tightness = gp > 0.0 ? rep.upper_bound / gp : 0.0;
  return rep;
}

struct SharpTransferReport {
  double lower_bound = 0.0;  // (L_star/L_sup)   * gap_prop
  double upper_bound = 0.0;  // (L_sup/L_star) * gap_prop
  double mh_gap = 0.0;
  bool lower_holds = false;
  bool upper_holds = false;
};

/// Probe of the conjectured sharper transfer inequalities. Reported only;
/// the conjecture is open, so a failing instance is data, not an error.
inline SharpTransferReport sharp_transfer_probe(const FiniteKernel& proposal,
                                     const Eigen::VectorXd& likelihood) {
  SharpTransferReport rep;
  const double gq = spectral_gap(proposal).gap_lambda2;
  const FiniteKernel mh = mh_finite(proposal, likelihood);
  rep.mh_gap = spectral_gap(mh).gap_lambda2;
  const double r = likelihood.minCoeff() / likelihood.maxCoeff();
  rep.lower_bound = r * gq;
  rep.upper_bound = gq / r;
  rep.lower_holds = rep.mh_gap >= rep.lower_bound - 1e-12;
  rep.upper_holds = rep.mh_gap <= rep.upper_bound + 1e-12;
  return rep;
}

enum class StepKind { uniform, gaussian };

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace detail

/// Midpoint-cell discretization of the reflected random walk proposal on
/// [-1,1] with uniform stationary weights. Uniform steps use the exact
/// piecewise-constant density (band plus fold-back corners); Gaussian steps
/// use the wrapped image sum truncated once the tail is below 1e-14, then
/// rows are renormalized. Reversibility is asserted on the result.
inline FiniteKernel discretize_reflected_walk(double eps, StepKind step_kind,
                                              int n_grid) {
  if (n_grid < 64)
    throw std::invalid_argument("discretize_reflected_walk: n_grid >= 64");
  if (step_kind == StepKind::uniform && !(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument(
        "discretize_reflected_walk: uniform steps need 0 < eps < 1");
  if (step_kind == StepKind::gaussian && !(eps > 0.0))
    throw std::invalid_argument(
        "discretize_reflected_walk: eps must be positive");

  const int n = n_grid;
  const double h = 2.0 / n;
  FiniteKernel kernel;
  kernel.P = Eigen::MatrixXd::Zero(n, n);
  kernel.pi = Eigen::VectorXd::Constant(n, 1.0 / n);

  auto overlap = [](double a, double b, double lo, double hi) {
    return std::max(0.0, std::min(b, hi) - std::max(a, lo));
  };

  if (step_kind == StepKind::uniform) {
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + (i + 0.5) * h;
      for (int j = 0; j < n; ++j) {
        const double lo = -1.0 + j * h;
        const double hi = lo + h;
        double mass = overlap(x - eps, x + eps, lo, hi);
        mass += overlap(-1.0, -x - 2.0 + eps, lo, hi);   // fold at -1
        mass += overlap(-x + 2.0 - eps, 1.0, lo, hi);    // fold at +1
        kernel.P(i, j) = mass / (2.0 * eps);
      }
    }
  } else {
    // Images of y under unfolding live at y + 4k and -y - 2 + 4k. Truncate
    // once the furthest image is beyond 10 standard deviations.
    const int k_max = static_cast<int>(std::ceil((4.0 + 10.0 * eps) / 4.0)) + 1;
    const double tail =
        2.0 * detail::normal_cdf(-(4.0 * k_max - 4.0) / eps);
    if (tail > 1e-14)
      throw std::runtime_error(
          "discretize_reflected_walk: gaussian tail bound not met");
    for (int i = 0; i < n; ++i) {
      const double x = -1.0 + (i + 0.5) * h;
      for (int j = 0; j < n; ++j) {
        const double lo = -1.0 + j * h;
        const double hi = lo + h;
        double mass = 0.0;
        for (int k = -k_max; k <= k_max; ++k) {
          mass += detail::normal_cdf((hi - x + 4.0 * k) / eps) -
                  detail::normal_cdf((lo - x + 4.0 * k) / eps);
          mass += detail::normal_cdf((x + hi + 2.0 + 4.0 * k) / eps) -
                  detail::normal_cdf((x + lo + 2.0 + 4.0 * k) / eps);
        }
        kernel.P(i, j) = mass;
      }
      const double row = kernel.P.row(i).sum();
      if (std::abs(row - 1.0) > 1e-12)
        throw std::runtime_error(
            "discretize_reflected_walk: row mass lost to truncation");
      kernel.P.row(i) /= row;
    }
  }
  kernel.assert_reversible(1e-10);
  return kernel;
}

struct WalkGapBoundRow {
  double eps = 0.0;
  int small_set_steps = 0;        // ceil(4/eps)
  double gap_abs = 0.0;
  double gap_lambda2 = 0.0;
  double bound_intermediate = 0.0;  // 1 - (4/5)^(1/ceil(4/eps))
  double bound_linear = 0.0;        // 4 eps / 25
  bool gap_ge_intermediate = false;
  bool intermediate_ge_linear = false;
  bool gap_ge_linear = false;
};

/// Numeric audit of the claimed chain gap >= 1-(4/5)^(1/ceil(4/eps))
/// >= 4 eps/25 for the reflected uniform walk. Each link is marked
/// separately and nothing is asserted: the constants are under audit.
inline std::vector<WalkGapBoundRow> walk_gap_bound_table(std::span<const double> eps_list,
                                                 int n_grid = 2001) {
  std::vector<WalkGapBoundRow> rows;
  rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    WalkGapBoundRow row;
    row.eps = eps;
    row.small_set_steps = static_cast<int>(std::ceil(4.0 / eps));
    const GapReport gap =
        spectral_gap(discretize_reflected_walk(eps, StepKind::uniform, n_grid));
    row.gap_abs = gap.gap_abs;
    row.gap_lambda2 = gap.gap_lambda2;
    row.bound_intermediate =
        1.0 - std::pow(0.8, 1.0 / row.small_set_steps);
    row.bound_linear = 4.0 * eps / 25.0;
    row.gap_ge_intermediate = row.gap_abs >= row.bound_intermediate;
    row.intermediate_ge_linear = row.bound_intermediate >= row.bound_linear;
    row.gap_ge_linear = row.gap_abs >= row.bound_linear;
    rows.push_back(row);
  }
  return rows;
}

/// Product kernel on the product space with product weights. The product
/// size guard keeps the dense eigensolve tractable.
inline FiniteKernel tensor_product(const FiniteKernel& a,
                                   const FiniteKernel& b) {
  const int na = a.size(), nb = b.size();
  if (static_cast<long>(na) * nb > 5000)
    throw std::invalid_argument("tensor_product: product size > 5000");
  FiniteKernel out;
  out.P.resize(na * nb, na * nb);
  out.pi.resize(na * nb);
  for (int i = 0; i < na; ++i)
    for (int x = 0; x < nb; ++x) {
      out.pi(i * nb + x) = a.pi(i) * b.pi(x);
      for (int j = 0; j < na; ++j)
        for (int y = 0; y < nb; ++y)
          out.P(i * nb + x, j * nb + y) = a.P(i, j) * b.P(x, y);
    }
  out.assert_reversible(1e-10);
  return out;
}

struct MinorizationReport {
  double eps = 0.0;
  int n_steps = 0;          // ceil(4/eps)
  int n_grid = 0;
  double min_density = 0.0;     // min over cells of the n-step density
  double min_density_2n = 0.0;  // same after 2n steps
  double claimed = 0.1;         // the proof's claimed floor
  bool claim_holds = false;
};

/// Minimal n-step transition density of the discretized reflected uniform
/// walk, n = ceil(4/eps), via matrix powers. Audits the 1/10 minorization
/// claim numerically; the report never throws on a miss.
inline MinorizationReport minorization_probe(double eps, int n_grid = 512) {
  MinorizationReport rep;
  rep.eps = eps;
  rep.n_steps = static_cast<int>(std::ceil(4.0 / eps));
  rep.n_grid = n_grid;
  const FiniteKernel base =
      discretize_reflected_walk(eps, StepKind::uniform, n_grid);
  const double h = 2.0 / n_grid;

  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n_grid, n_grid);
  Eigen::MatrixXd sq = base.P;
  int e = rep.n_steps;
  while (e > 0) {  // binary powering
    if (e & 1) power = (power * sq).eval();
    e >>= 1;
    if (e > 0) sq = (sq * sq).eval();
  }
  const double row_err = (power.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_err > 1e-10)
    throw std::runtime_error("minorization_probe: power lost stochasticity");
  rep.min_density = power.minCoeff() / h;
  rep.min_density_2n = (power * power).minCoeff() / h;
  rep.claim_holds = rep.min_density >= rep.claimed;
  return rep;
}

/// Exact asymptotic variance <((I+P)(I-P)^{-1}) f~, f~>_pi of the sample
/// average of f, with f~ = f - pi(f). Inverts on the orthogonal complement
/// of constants via the fundamental-matrix trick.
inline double exact_asymptotic_variance(const FiniteKernel& kernel,
                                        const Eigen::VectorXd& f) {
  const int n = kernel.size();
  if (f.size() != n)
    throw std::invalid_argument("exact_asymptotic_variance: size mismatch");
  const double mean = kernel.pi.dot(f);
  const Eigen::VectorXd centered = f.array() - mean;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - kernel.P +
                      Eigen::VectorXd::Ones(n) * kernel.pi.transpose();
  const Eigen::VectorXd g = A.partialPivLu().solve(centered);
  const Eigen::VectorXd pg = kernel.P * g;
  double sigma_sq = 0.0;
  for (int i = 0; i < n; ++i)
    sigma_sq += kernel.pi(i) * centered(i) * (g(i) + pg(i));
  return sigma_sq;
}

// ---------------------------------------------------------------------------
// Random instances for the verification suites.

struct SuiteInstance {
  FiniteKernel proposal;     // reversible w.r.t. its pi (the "prior")
  Eigen::VectorXd likelihood;
  std::uint64_t seed = 0;
};

/// Seeded random reversible instance: Dirichlet(1) stationary weights, a
/// connected random-graph symmetric base chain metropolized towards those
/// weights, and log-uniform likelihood entries with ratio at most
/// max_likelihood_ratio.
inline SuiteInstance random_reversible_instance(std::uint64_t seed,
                                                int min_states, int max_states,
                                                double max_likelihood_ratio) {
  if (min_states < 2 || max_states < min_states)
    throw std::invalid_argument("random_reversible_instance: bad state range");
  RngStream rng(seed);
  const int n = min_states +
                static_cast<int>(rng.next_u64() %
                                 static_cast<std::uint64_t>(max_states -
                                                            min_states + 1));

  // Dirichlet(1,...,1) stationary weights.
  Eigen::VectorXd mu0(n);
  for (int i = 0; i < n; ++i) mu0(i) = -std::log(1.0 - rng.uniform01());
  mu0 /= mu0.sum();

  // Random-graph symmetric base: a ring for connectivity plus random
  // chords, lazified by the max row sum.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const double v = 0.2 + 0.8 * rng.uniform01();
    w(i, j) = w(j, i) = v;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j) {
      if ((i == 0 && j == n - 1) || rng.uniform01() > 0.5) continue;
      const double v = 0.2 + 0.8 * rng.uniform01();
      w(i, j) = w(j, i) = v;
    }
  const double scale = 2.0 * w.rowwise().sum().maxCoeff();
  FiniteKernel base;
  base.P = w / scale;
  for (int i = 0; i < n; ++i) base.P(i, i) = 1.0 - base.P.row(i).sum();
  base.pi = Eigen::VectorXd::Constant(n, 1.0 / n);

  SuiteInstance inst;
  inst.seed = seed;
  inst.proposal = mh_finite(base, mu0 * static_cast<double>(n));
  inst.likelihood.resize(n);
  const double log_ratio = std::log(max_likelihood_ratio);
  for (int i = 0; i < n; ++i)
    inst.likelihood(i) = std::exp(rng.uniform01() * log_ratio);
  return inst;
}

/// Plain-text dump of an instance (for reproducing reported violations).
inline void dump_instance(std::ostream& os, const SuiteInstance& inst) {
  os << "seed " << inst.seed << "\n";
  os << "n " << inst.proposal.size() << "\n";
  os << "pi";
  for (int i = 0; i < inst.proposal.size(); ++i)
    os << " " << inst.proposal.pi(i);
  os << "\nL";
  for (int i = 0; i < inst.likelihood.size(); ++i)
    os << " " << inst.likelihood(i);
  os << "\nP\n";
  for (int i = 0; i < inst.proposal.size(); ++i) {
    for (int j = 0; j < inst.proposal.size(); ++j)
      os << (j ? " " : "") << inst.proposal.P(i, j);
    os << "\n";
  }
}

}  // namespace cubewalk
