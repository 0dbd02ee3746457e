#pragma once

// Metropolis-Hastings machinery on the cube [-1,1]^J.
//
// Four proposal kernels:
//   IS     fresh prior draw, independent of the current state
//   RWM    u + eps*xi, xi standard normal; proposals may exit the cube and
//          are then rejected outright
//   RURWM  reflect(u_j + eps*xi_j) per coordinate, xi_j uniform on [-1,1]
//   RSRWM  reflect(u_j + eps*xi_j) per coordinate, xi_j standard normal
//
// The reflected kernels are reversible with respect to the uniform prior,
// so the acceptance ratio reduces to the likelihood ratio. For RWM the
// proposal is symmetric and the flat prior density cancels, leaving the
// same ratio plus the out-of-cube rejection.
//
// Step-size convention: eps always scales the raw step (u + eps*xi), i.e.
// for RWM and RSRWM eps is the per-coordinate standard deviation.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cubewalk/field.hpp"
#include "cubewalk/rng.hpp"

namespace cubewalk {

/// Fold a real number into [-1,1] by repeated reflection at the endpoints.
/// Periodic with period 4 and the identity on [-1,1].
inline double reflect(double x) {
  if (!std::isfinite(x)) throw std::domain_error("reflect: non-finite input");
  if (x >= -1.0 && x <= 1.0) return x;  // exact identity on the cube
  double y = std::fmod(x, 4.0);
  if (y < 0.0) y += 4.0;
  if (y >= 4.0) y = 0.0;  // fmod rounding can land exactly on 4
  if (y <= 1.0) return y;
  if (y < 3.0) return 2.0 - y;
  return y - 4.0;
}

enum class ProposalFamily { independence, random_walk, reflected_uniform,
                            reflected_gaussian };

struct ProposalKind {
  ProposalFamily family = ProposalFamily::independence;
  double step = 0.0;  // eps; unused by the independence sampler

  static ProposalKind independence() {
    return {ProposalFamily::independence, 0.0};
  }
  static ProposalKind rwm(double eps) {
    return {ProposalFamily::random_walk, eps};
  }
  static ProposalKind rurwm(double eps) {
    return {ProposalFamily::reflected_uniform, eps};
  }
  static ProposalKind rsrwm(double eps) {
    return {ProposalFamily::reflected_gaussian, eps};
  }

  bool is_local() const { return family != ProposalFamily::independence; }

  void validate() const {
    if (is_local() && !(step > 0.0))
      throw std::invalid_argument("ProposalKind: step size must be positive");
  }

  std::string name() const {
    switch (family) {
      case ProposalFamily::independence: return "IS";
      case ProposalFamily::random_walk: return "RWM";
      case ProposalFamily::reflected_uniform: return "RURWM";
      case ProposalFamily::reflected_gaussian: return "RSRWM";
    }
    return "?";
  }

  static ProposalKind parse(const std::string& name, double eps) {
    if (name == "IS") return independence();
    if (name == "RWM") return rwm(eps);
    if (name == "RURWM") return rurwm(eps);
    if (name == "RSRWM") return rsrwm(eps);
    throw std::invalid_argument("unknown proposal kind: " + name);
  }
};

/// Draw a candidate. RWM candidates are returned raw and may exit the cube;
/// all other kinds always land inside it.
inline std::vector<double> propose(const ProposalKind& kind,
                                   std::span<const double> u, RngStream& rng) {
  std::vector<double> cand(u.size());
  switch (kind.family) {
    case ProposalFamily::independence:
      for (double& c : cand) c = rng.uniform_sym();
      break;
    case ProposalFamily::random_walk:
      for (std::size_t j = 0; j < u.size(); ++j)
        cand[j] = u[j] + kind.step * rng.standard_normal();
      break;
    case ProposalFamily::reflected_uniform:
      for (std::size_t j = 0; j < u.size(); ++j)
        cand[j] = reflect(u[j] + kind.step * rng.uniform_sym());
      break;
    case ProposalFamily::reflected_gaussian:
      for (std::size_t j = 0; j < u.size(); ++j)
        cand[j] = reflect(u[j] + kind.step * rng.standard_normal());
      break;
  }
  return cand;
}

/// Acceptance probability min(1, L(cand)/L(cur)); zero for RWM candidates
/// outside the cube.
inline double acceptance_prob(const ProposalKind& kind, double ell_current,
                              double ell_candidate,
                              std::span<const double> candidate) {
  if (std::isnan(ell_current) || std::isnan(ell_candidate))
    throw std::invalid_argument("acceptance_prob: NaN log-likelihood");
  if (kind.family == ProposalFamily::random_walk && !inside_cube(candidate))
    return 0.0;
  const double diff = ell_candidate - ell_current;
  return diff >= 0.0 ? 1.0 : std::exp(diff);
}

struct ChainState {
  CoefficientVector u;
  double log_lik = 0.0;  // cached log-likelihood of u
};

/// One MH transition. Draw order is fixed (candidate coordinates, then the
/// acceptance uniform) so the random stream layout does not depend on the
/// outcome. Moves iff alpha > U. Exactly one likelihood evaluation per
/// in-cube proposal.
template <class LogLik>
bool mh_step(const ProposalKind& kind, ChainState& state, RngStream& rng,
             LogLik&& log_lik) {
  std::vector<double> cand = propose(kind, state.u.span(), rng);
  const double uni = rng.uniform01();
  if (kind.family == ProposalFamily::random_walk && !inside_cube(cand))
    return false;
  const double ell_cand = log_lik(std::span<const double>(cand));
  const double alpha = acceptance_prob(kind, state.log_lik, ell_cand, cand);
  if (alpha > uni) {
    state = ChainState{CoefficientVector(std::move(cand)), ell_cand};
    return true;
  }
  return false;
}

struct Functional {
  std::string id;
  std::function<double(const ChainState&)> eval;
};

/// Functional registry: "u0", "loglik", "field_mid" (= a(u)(0.5)).
inline Functional functional_by_id(const std::string& id,
                                   const BasisSpec& spec) {
  if (id == "u0")
    return {id, [](const ChainState& s) { return s.u[0]; }};
  if (id == "loglik")
    return {id, [](const ChainState& s) { return s.log_lik; }};
  if (id == "field_mid")
    return {id, [spec](const ChainState& s) {
              return evaluate_field(spec, s.u, 0.5);
            }};
  throw std::invalid_argument("unknown functional id: " + id);
}

inline std::vector<Functional> default_functionals(const BasisSpec& spec) {
  return {functional_by_id("u0", spec), functional_by_id("loglik", spec),
          functional_by_id("field_mid", spec)};
}

struct ChainOutput {
  std::vector<std::string> functional_ids;
  std::vector<std::vector<double>> series;  // one series per functional
  std::int64_t n_steps = 0;                 // total steps taken
  std::int64_t burn_in = 0;
  std::int64_t accept_count = 0;            // accepted moves after burn-in
  std::uint64_t seed = 0;
  std::string config_hash;
  // optional thinned state dump (debugging; off by default)
  std::int64_t dump_every = 0;
  std::vector<std::vector<double>> dumped_states;

  double accept_rate() const {
    const std::int64_t kept = n_steps - burn_in;
    return kept > 0 ? static_cast<double>(accept_count) / kept : 0.0;
  }
};

/// Run a chain for n_steps transitions, recording the registered
/// functionals after burn_in. Deterministic given the stream.
template <class LogLik>
ChainOutput run_chain(const ProposalKind& kind, ChainState init,
                      std::int64_t n_steps, std::int64_t burn_in,
                      const std::vector<Functional>& functionals,
                      RngStream& rng, LogLik&& log_lik,
                      std::int64_t dump_every = 0) {
  kind.validate();
  if (burn_in < 0 || n_steps <= burn_in)
    throw std::invalid_argument("run_chain: need n_steps > burn_in >= 0");
  ChainOutput out;
  out.n_steps = n_steps;
  out.burn_in = burn_in;
  out.seed = rng.seed();
  out.dump_every = dump_every;
  out.functional_ids.reserve(functionals.size());
  for (const Functional& f : functionals) out.functional_ids.push_back(f.id);
  out.series.assign(functionals.size(),
                    std::vector<double>());
  for (auto& s : out.series) s.reserve(n_steps - burn_in);

  ChainState state = std::move(init);
  for (std::int64_t step = 1; step <= n_steps; ++step) {
    const bool accepted = mh_step(kind, state, rng, log_lik);
    if (step <= burn_in) continue;
    if (accepted) ++out.accept_count;
    for (std::size_t k = 0; k < functionals.size(); ++k)
      out.series[k].push_back(functionals[k].eval(state));
    if (dump_every > 0 && (step - burn_in) % dump_every == 0)
      out.dumped_states.push_back(state.u.values());
#ifndef NDEBUG
    if (step % 8192 == 0) {
      const double fresh = log_lik(state.u.span());
      if (std::abs(fresh - state.log_lik) >
          1e-10 * std::max(1.0, std::abs(fresh)))
        throw std::logic_error("run_chain: stale log-likelihood cache");
    }
#endif
  }
  return out;
}

/// Transition density of the reflected uniform walk on [-1,1], 0 < eps < 1.
/// Piecewise constant: 1/(2 eps) on the step band, doubled on the two
/// fold-back corners, zero elsewhere.
inline double rurwm_density(double x, double y, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("rurwm_density: eps must lie in (0,1)");
  if (!(x >= -1.0 && x <= 1.0 && y >= -1.0 && y <= 1.0))
    throw std::domain_error("rurwm_density: x, y must lie in [-1,1]");
  int w = 0;
  if (std::abs(x - y) <= eps) ++w;
  if (x + y <= -2.0 + eps) ++w;
  if (x + y >= 2.0 - eps) ++w;
  return w / (2.0 * eps);
}

}  // namespace cubewalk
