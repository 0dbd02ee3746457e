#pragma once

// 1D Darcy forward model on [0,1]:
//
//   -(a p')' = g,   p(0) = p(1) = 0,
//
// solved through the explicit flux formula. With G(x) = int_0^x g the flux
// is a p' = C - G where C = (int_0^1 G/a) / (int_0^1 1/a), and
// p(x) = int_0^x (C - G)/a. All integrals use the trapezoidal rule on a
// uniform mesh; the discretization error is O(h^2).
//
// Observations are pointwise pressure values at uniformly spaced locations
// i*d, i = 0..floor(1/d), read off by linear interpolation.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "cubewalk/field.hpp"

namespace cubewalk {

struct Mesh {
  int n_cells = 0;

  static Mesh uniform(int n_cells) {
    if (n_cells < 2) throw std::invalid_argument("Mesh: n_cells must be >= 2");
    return Mesh{n_cells};
  }

  int n_nodes() const { return n_cells + 1; }
  double spacing() const { return 1.0 / n_cells; }
  double node(int i) const { return static_cast<double>(i) / n_cells; }

  std::vector<double> nodes() const {
    std::vector<double> xs(n_nodes());
    for (int i = 0; i < n_nodes(); ++i) xs[i] = node(i);
    return xs;
  }
};

struct SourceTerm {
  std::vector<double> values;  // one value per mesh node

  static SourceTerm constant(const Mesh& mesh, double value = 1.0) {
    return SourceTerm{std::vector<double>(mesh.n_nodes(), value)};
  }

  void validate(const Mesh& mesh) const {
    if (static_cast<int>(values.size()) != mesh.n_nodes())
      throw std::invalid_argument("SourceTerm: size must match mesh nodes");
    for (double v : values)
      if (!std::isfinite(v))
        throw std::invalid_argument("SourceTerm: values must be finite");
  }
};

struct PressureSolution {
  std::vector<double> values;  // one value per mesh node, endpoints zero
};

struct ObservationOperator {
  double spacing = 1.0;  // d, observation locations i*d for i = 0..floor(1/d)

  static ObservationOperator uniform(double spacing) {
    if (!(spacing > 0.0 && spacing <= 1.0))
      throw std::invalid_argument(
          "ObservationOperator: spacing must lie in (0,1]");
    return ObservationOperator{spacing};
  }

  int count() const { return static_cast<int>(1.0 / spacing + 1e-9) + 1; }
  double location(int i) const { return std::min(1.0, i * spacing); }
};

/// Cumulative source G(x_i) = int_0^{x_i} g by the trapezoidal rule.
inline std::vector<double> cumulative_source(const SourceTerm& g,
                                             const Mesh& mesh) {
  g.validate(mesh);
  const double h = mesh.spacing();
  std::vector<double> G(mesh.n_nodes());
  G[0] = 0.0;
  for (int i = 1; i < mesh.n_nodes(); ++i)
    G[i] = G[i - 1] + 0.5 * h * (g.values[i - 1] + g.values[i]);
  return G;
}

namespace detail {

/// Flux-formula solve given the precomputed cumulative source.
/// Writes the pressure into `p` (resized to n_nodes) and returns the flux
/// constant C.
inline double solve_pressure_impl(std::span<const double> a_nodes,
                                  std::span<const double> G, const Mesh& mesh,
                                  std::vector<double>& p) {
  const int n = mesh.n_cells;
  if (static_cast<int>(a_nodes.size()) != mesh.n_nodes())
    throw std::invalid_argument("solve_pressure: coefficient size mismatch");
  for (double a : a_nodes)
    if (!(a > 0.0))
      throw std::domain_error(
          "solve_pressure: diffusion coefficient must be positive at every "
          "node");
  const double h = mesh.spacing();

  double int_G_over_a = 0.0, int_inv_a = 0.0;
  for (int i = 0; i < n; ++i) {
    int_G_over_a += 0.5 * h * (G[i] / a_nodes[i] + G[i + 1] / a_nodes[i + 1]);
    int_inv_a += 0.5 * h * (1.0 / a_nodes[i] + 1.0 / a_nodes[i + 1]);
  }
  const double flux = int_G_over_a / int_inv_a;

  p.assign(mesh.n_nodes(), 0.0);
  for (int i = 1; i <= n; ++i) {
    const double fl = (flux - G[i - 1]) / a_nodes[i - 1];
    const double fr = (flux - G[i]) / a_nodes[i];
    p[i] = p[i - 1] + 0.5 * h * (fl + fr);
  }
  // The trapezoid choice of C makes p[n] vanish up to roundoff; subtract the
  // linear-in-index ramp so the boundary condition holds exactly.
  const double residual = p[n];
  if (residual != 0.0)
    for (int i = 1; i <= n; ++i)
      p[i] -= residual * (static_cast<double>(i) / n);
  p[n] = 0.0;
  return flux;
}

}  // namespace detail

inline PressureSolution solve_pressure(std::span<const double> a_nodes,
                                       const SourceTerm& g, const Mesh& mesh) {
  const std::vector<double> G = cumulative_source(g, mesh);
  PressureSolution p;
  detail::solve_pressure_impl(a_nodes, G, mesh, p.values);
  return p;
}

/// As solve_pressure, but also exposes the flux constant C and the
/// cumulative source, for flux-consistency checks.
struct FluxSolve {
  PressureSolution pressure;
  double flux_constant = 0.0;
  std::vector<double> cumulative_source;
};

inline FluxSolve solve_pressure_detail(std::span<const double> a_nodes,
                                       const SourceTerm& g, const Mesh& mesh) {
  FluxSolve out;
  out.cumulative_source = cumulative_source(g, mesh);
  out.flux_constant = detail::solve_pressure_impl(
      a_nodes, out.cumulative_source, mesh, out.pressure.values);
  return out;
}

/// Pointwise observation by linear interpolation of the nodal pressure.
inline std::vector<double> observe(const PressureSolution& p, const Mesh& mesh,
                                   const ObservationOperator& obs) {
  std::vector<double> y(obs.count());
  for (int i = 0; i < obs.count(); ++i) {
    const double s = obs.location(i) * mesh.n_cells;
    const int i0 = std::min(static_cast<int>(s), mesh.n_cells - 1);
    const double w = s - i0;
    y[i] = (1.0 - w) * p.values[i0] + w * p.values[i0 + 1];
  }
  return y;
}

/// Full forward map G(u): field synthesis, pressure solve, observation.
/// Reference implementation with direct field evaluation; the chain driver
/// uses ForwardModel below, which is numerically equivalent but caches the
/// mesh transforms.
inline std::vector<double> forward_map(const BasisSpec& spec,
                                       const CoefficientVector& u,
                                       const SourceTerm& g, const Mesh& mesh,
                                       const ObservationOperator& obs) {
  const std::vector<double> nodes = mesh.nodes();
  const std::vector<double> a = evaluate_field_on_nodes(spec, u.span(), nodes);
  return observe(solve_pressure(a, g, mesh), mesh, obs);
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Evaluates the trigonometric series on the uniform mesh via an inverse
/// real FFT when the frequencies are representable (2K < n_cells), falling
/// back to direct summation otherwise. Agreement with the direct path is
/// exercised in the tests.
///
/// Instances own their FFTW plan and buffers: use one instance per thread.
class FieldSynthesizer {
 public:
  FieldSynthesizer(const BasisSpec& spec, const Mesh& mesh)
      : spec_(spec), mesh_(mesh), use_fft_(2 * spec.frequency_pairs <
                                           mesh.n_cells) {
    spec_.validate();
    if (use_fft_) {
      const int n = mesh_.n_cells;
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      spectrum_ = fftw_alloc_complex(n / 2 + 1);
      grid_ = fftw_alloc_real(n);
      plan_ = fftw_plan_dft_c2r_1d(n, spectrum_, grid_, FFTW_ESTIMATE);
      if (plan_ == nullptr) throw std::runtime_error("FFTW plan failed");
      for (int k = 0; k <= n / 2; ++k) spectrum_[k][0] = spectrum_[k][1] = 0.0;
    }
  }

  ~FieldSynthesizer() {
    if (use_fft_) {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
      fftw_free(spectrum_);
      fftw_free(grid_);
    }
  }

  FieldSynthesizer(const FieldSynthesizer&) = delete;
  FieldSynthesizer& operator=(const FieldSynthesizer&) = delete;

  const BasisSpec& spec() const { return spec_; }
  const Mesh& mesh() const { return mesh_; }

  /// Field values at all mesh nodes. `mean_profile`, when non-empty, is a
  /// per-node mean replacing the constant level.
  void evaluate(std::span<const double> u, std::vector<double>& a_nodes,
                std::span<const double> mean_profile = {}) const {
    if (static_cast<int>(u.size()) != spec_.dimension())
      throw std::invalid_argument("FieldSynthesizer: dimension mismatch");
    const int n = mesh_.n_cells;
    a_nodes.resize(n + 1);
    if (!use_fft_) {
      a_nodes = evaluate_field_on_nodes(spec_, u, mesh_.nodes(), mean_profile);
      return;
    }
    // c2r transforms overwrite their input, so the whole spectrum is
    // rewritten on every call.
    for (int k = 0; k <= n / 2; ++k) spectrum_[k][0] = spectrum_[k][1] = 0.0;
    spectrum_[0][0] = spec_.weights[0] * u[0];
    for (int k = 1; k <= spec_.frequency_pairs; ++k) {
      spectrum_[k][0] = 0.5 * spec_.weights[2 * k - 1] * u[2 * k - 1];
      spectrum_[k][1] = -0.5 * spec_.weights[2 * k] * u[2 * k];
    }
    fftw_execute(plan_);
    for (int i = 0; i < n; ++i) {
      const double mean =
          mean_profile.empty() ? spec_.mean_level : mean_profile[i];
      a_nodes[i] = mean + grid_[i];
    }
    // The oscillatory part has period 1, so node n repeats node 0.
    a_nodes[n] =
        (mean_profile.empty() ? spec_.mean_level : mean_profile[n]) + grid_[0];
  }

 private:
  BasisSpec spec_;
  Mesh mesh_;
  bool use_fft_;
  fftw_complex* spectrum_ = nullptr;
  double* grid_ = nullptr;
  fftw_plan plan_ = nullptr;
};

/// Bundles basis, mesh, source and observation operator and reuses the
/// spectral synthesis plan plus scratch buffers across calls. One PDE solve
/// per map() call. Not shareable across threads; build one per worker.
class ForwardModel {
 public:
  ForwardModel(BasisSpec spec, Mesh mesh, SourceTerm source,
               ObservationOperator obs, std::vector<double> mean_profile = {})
      : synth_(spec, mesh),
        source_(std::move(source)),
        obs_(obs),
        mean_profile_(std::move(mean_profile)),
        cumulative_source_(cumulative_source(source_, mesh)) {
    if (!mean_profile_.empty() &&
        static_cast<int>(mean_profile_.size()) != mesh.n_nodes())
      throw std::invalid_argument(
          "ForwardModel: mean profile size must match mesh nodes");
  }

  const BasisSpec& spec() const { return synth_.spec(); }
  const Mesh& mesh() const { return synth_.mesh(); }
  const SourceTerm& source() const { return source_; }
  const ObservationOperator& observation() const { return obs_; }

  double source_sup() const {
    double m = 0.0;
    for (double v : cumulative_source_) m = std::max(m, std::abs(v));
    return m;
  }

  std::vector<double> map(std::span<const double> u) const {
    synth_.evaluate(u, a_buffer_, mean_profile_);
    detail::solve_pressure_impl(a_buffer_, cumulative_source_, synth_.mesh(),
                                p_buffer_);
    PressureSolution p{std::move(p_buffer_)};
    std::vector<double> y = observe(p, synth_.mesh(), obs_);
    p_buffer_ = std::move(p.values);
    return y;
  }

  std::vector<double> map(const CoefficientVector& u) const {
    return map(u.span());
  }

 private:
  FieldSynthesizer synth_;
  SourceTerm source_;
  ObservationOperator obs_;
  std::vector<double> mean_profile_;
  std::vector<double> cumulative_source_;
  mutable std::vector<double> a_buffer_;
  mutable std::vector<double> p_buffer_;
};

}  // namespace cubewalk
