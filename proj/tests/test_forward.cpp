#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cubewalk/forward.hpp"

using namespace cubewalk;

namespace {

std::vector<double> constant_field(const Mesh& mesh, double value) {
  return std::vector<double>(mesh.n_nodes(), value);
}

}  // namespace

TEST_CASE("constant-coefficient analytic solution") {
  const Mesh mesh = Mesh::uniform(4096);
  const SourceTerm g = SourceTerm::constant(mesh);

  // a = 1: p = x(1-x)/2
  const PressureSolution p1 = solve_pressure(constant_field(mesh, 1.0), g, mesh);
  CHECK(p1.values[2048] == Catch::Approx(0.125).margin(1e-7));
  CHECK(p1.values.front() == 0.0);
  CHECK(p1.values.back() == 0.0);

  // a = 2 scales the solution by 1/2
  const PressureSolution p2 = solve_pressure(constant_field(mesh, 2.0), g, mesh);
  CHECK(p2.values[2048] == Catch::Approx(0.0625).margin(1e-7));
}

TEST_CASE("piecewise coefficient: flux continuity value") {
  const Mesh mesh = Mesh::uniform(4096);
  const SourceTerm g = SourceTerm::constant(mesh);
  std::vector<double> a(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i)
    a[i] = mesh.node(i) <= 0.5 ? 1.0 : 2.0;
  const FluxSolve solved = solve_pressure_detail(a, g, mesh);
  CHECK(solved.flux_constant == Catch::Approx(5.0 / 12.0).margin(1e-4));
  CHECK(solved.pressure.values[2048] ==
        Catch::Approx(1.0 / 12.0).margin(1e-5));
}

TEST_CASE("solver rejects non-positive coefficients") {
  const Mesh mesh = Mesh::uniform(16);
  const SourceTerm g = SourceTerm::constant(mesh);
  std::vector<double> a = constant_field(mesh, 1.0);
  a[7] = 0.0;
  CHECK_THROWS_AS(solve_pressure(a, g, mesh), std::domain_error);
  a[7] = -0.5;
  CHECK_THROWS_AS(solve_pressure(a, g, mesh), std::domain_error);
}

TEST_CASE("observation operator") {
  const Mesh mesh = Mesh::uniform(4096);
  const SourceTerm g = SourceTerm::constant(mesh);
  const PressureSolution p = solve_pressure(constant_field(mesh, 1.0), g, mesh);

  const auto y_end = observe(p, mesh, ObservationOperator::uniform(1.0));
  REQUIRE(y_end.size() == 2);
  CHECK(y_end[0] == 0.0);
  CHECK(y_end[1] == 0.0);

  const auto y_half = observe(p, mesh, ObservationOperator::uniform(0.5));
  REQUIRE(y_half.size() == 3);
  CHECK(y_half[1] == Catch::Approx(0.125).margin(1e-7));

  CHECK(observe(p, mesh, ObservationOperator::uniform(0.1)).size() == 11);
  CHECK(ObservationOperator::uniform(0.03).count() == 34);
  CHECK(ObservationOperator::uniform(0.03125).count() == 33);
  CHECK(ObservationOperator::uniform(0.04).count() == 26);
  CHECK(ObservationOperator::uniform(0.05).count() == 21);
  CHECK_THROWS_AS(ObservationOperator::uniform(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ObservationOperator::uniform(1.5), std::invalid_argument);
}

TEST_CASE("forward map at the prior mean") {
  const BasisSpec spec = BasisSpec::with_defaults(4);
  const Mesh mesh = Mesh::uniform(4096);
  const SourceTerm g = SourceTerm::constant(mesh);
  const ObservationOperator obs = ObservationOperator::uniform(0.1);
  const CoefficientVector zero = CoefficientVector::zeros(spec.dimension());
  const auto y = forward_map(spec, zero, g, mesh, obs);
  REQUIRE(y.size() == 11);
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.1 * i;
    CHECK(y[i] == Catch::Approx(x * (1.0 - x) / 2.0 / 4.38).margin(1e-6));
  }
}

TEST_CASE("forward map is deterministic and matches the cached model") {
  const BasisSpec spec = BasisSpec::with_defaults(6);
  const Mesh mesh = Mesh::uniform(512);
  const SourceTerm g = SourceTerm::constant(mesh);
  const ObservationOperator obs = ObservationOperator::uniform(0.2);
  RngStream rng(31);
  const CoefficientVector u = sample_prior(rng, spec.dimension());

  const auto y1 = forward_map(spec, u, g, mesh, obs);
  const auto y2 = forward_map(spec, u, g, mesh, obs);
  REQUIRE(y1.size() == y2.size());
  for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == y2[i]);

  const ForwardModel model(spec, mesh, g, obs);
  const auto y3 = model.map(u);
  const auto y4 = model.map(u);
  for (std::size_t i = 0; i < y1.size(); ++i) {
    CHECK(y3[i] == y4[i]);  // bit-identical across calls
    CHECK(y3[i] == Catch::Approx(y1[i]).margin(1e-12));
  }
}

TEST_CASE("trapezoid convergence is second order") {
  const BasisSpec spec = BasisSpec::with_defaults(8);
  RngStream rng(77);
  const CoefficientVector u = sample_prior(rng, spec.dimension());

  const Mesh ref_mesh = Mesh::uniform(1 << 16);
  const auto a_ref =
      evaluate_field_on_nodes(spec, u.span(), ref_mesh.nodes());
  const PressureSolution p_ref =
      solve_pressure(a_ref, SourceTerm::constant(ref_mesh), ref_mesh);

  auto error_at = [&](int n_cells) {
    const Mesh mesh = Mesh::uniform(n_cells);
    const auto a = evaluate_field_on_nodes(spec, u.span(), mesh.nodes());
    const PressureSolution p =
        solve_pressure(a, SourceTerm::constant(mesh), mesh);
    double err = 0.0;
    const int stride = (1 << 16) / n_cells;
    for (int i = 0; i <= n_cells; ++i)
      err = std::max(err, std::abs(p.values[i] - p_ref.values[i * stride]));
    return err;
  };

  const double e1024 = error_at(1024);
  const double e2048 = error_at(2048);
  const double e4096 = error_at(4096);
  CHECK(e1024 / e2048 >= 3.2);  // factor 4 within 20 percent
  CHECK(e1024 / e2048 <= 4.8);
  CHECK(e2048 / e4096 >= 3.5);  // Richardson ratio band
  CHECK(e2048 / e4096 <= 4.5);
}

TEST_CASE("scaling the coefficient scales the solution") {
  const BasisSpec spec = BasisSpec::with_defaults(5);
  const Mesh mesh = Mesh::uniform(1024);
  const SourceTerm g = SourceTerm::constant(mesh);
  RngStream rng(13);
  const CoefficientVector u = sample_prior(rng, spec.dimension());
  auto a = evaluate_field_on_nodes(spec, u.span(), mesh.nodes());
  const PressureSolution p = solve_pressure(a, g, mesh);
  for (double& v : a) v *= 2.0;
  const PressureSolution p_scaled = solve_pressure(a, g, mesh);
  for (int i = 0; i <= mesh.n_cells; ++i)
    CHECK(p_scaled.values[i] == Catch::Approx(p.values[i] / 2.0).margin(1e-10));
}

TEST_CASE("discrete flux reproduces a * p' at cell midpoints") {
  const BasisSpec spec = BasisSpec::with_defaults(3);
  RngStream rng(17);
  const CoefficientVector u = sample_prior(rng, spec.dimension());

  auto flux_residual = [&](int n_cells) {
    const Mesh mesh = Mesh::uniform(n_cells);
    const SourceTerm g = SourceTerm::constant(mesh);
    const auto a = evaluate_field_on_nodes(spec, u.span(), mesh.nodes());
    const FluxSolve solved = solve_pressure_detail(a, g, mesh);
    const double h = mesh.spacing();
    double worst = 0.0;
    for (int i = 0; i < n_cells; ++i) {
      const double dp =
          (solved.pressure.values[i + 1] - solved.pressure.values[i]) / h;
      const double a_mid = 0.5 * (a[i] + a[i + 1]);
      const double flux_mid =
          solved.flux_constant -
          0.5 * (solved.cumulative_source[i] + solved.cumulative_source[i + 1]);
      worst = std::max(worst, std::abs(a_mid * dp - flux_mid));
    }
    return worst;
  };

  const double r256 = flux_residual(256);
  const double r512 = flux_residual(512);
  CHECK(r256 < 1e-4);
  CHECK(r256 / r512 >= 3.0);  // second-order decay
  CHECK(r256 / r512 <= 5.0);
}
