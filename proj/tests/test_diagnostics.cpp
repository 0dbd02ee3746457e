#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cubewalk/diagnostics.hpp"
#include "cubewalk/posterior.hpp"
#include "cubewalk/samplers.hpp"
#include "cubewalk/spectral.hpp"
#include "testutil.hpp"

using namespace cubewalk;

TEST_CASE("acf pinned values") {
  const std::vector<double> alternating{1.0, -1.0, 1.0, -1.0};
  const AcfSeries a = acf(alternating, 1);
  CHECK(a.rho[0] == 1.0);
  CHECK(a.rho[1] == Catch::Approx(-0.75).margin(1e-15));

  RngStream rng(1);
  std::vector<double> iid(100000);
  for (double& v : iid) v = rng.uniform_sym();
  const AcfSeries b = acf(iid, 10);
  CHECK(std::abs(b.rho[1]) < 0.02);
}

TEST_CASE("acf error paths and invariances") {
  const std::vector<double> constant(64, 3.0);
  CHECK_THROWS_AS(acf(constant, 4), std::invalid_argument);
  const std::vector<double> tiny{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(acf(tiny, 4), std::invalid_argument);

  RngStream rng(2);
  std::vector<double> x(2000);
  for (double& v : x) v = rng.standard_normal();
  const AcfSeries base = acf(x, 50);

  // scaling by a power of two is exact in floating point
  std::vector<double> doubled(x);
  for (double& v : doubled) v *= 2.0;
  const AcfSeries scaled = acf(doubled, 50);
  for (int k = 0; k <= 50; ++k) CHECK(scaled.rho[k] == base.rho[k]);

  std::vector<double> affine(x);
  for (double& v : affine) v = 1.7 * v - 0.3;
  const AcfSeries shifted = acf(affine, 50);
  for (int k = 0; k <= 50; ++k)
    CHECK(shifted.rho[k] == Catch::Approx(base.rho[k]).margin(1e-12));

  for (int k = 0; k <= 50; ++k) CHECK(std::abs(base.rho[k]) <= 1.0 + 1e-12);
}

TEST_CASE("fft and direct autocovariance agree") {
  RngStream rng(3);
  std::vector<double> x(300000);
  double state = 0.0;
  for (double& v : x) {
    state = 0.7 * state + rng.standard_normal();
    v = state;
  }
  // direct path (small lag count) vs fft path (forced by volume)
  const AcfSeries direct = acf(std::span<const double>(x).subspan(0, 2000), 40);
  const AcfSeries fft = acf(x, 2000);
  // cross-check the estimators on the same data: recompute directly at a few
  // lags over the full series
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (int k : {0, 1, 7, 100}) {
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      den += (x[t] - mean) * (x[t] - mean);
      if (t + k < x.size()) num += (x[t] - mean) * (x[t + k] - mean);
    }
    CHECK(fft.rho[k] == Catch::Approx(num / den).margin(1e-10));
  }
  CHECK(direct.rho[0] == 1.0);
}

TEST_CASE("iat on iid, AR(1), and degenerate series") {
  RngStream rng(4);
  std::vector<double> iid(100000);
  for (double& v : iid) v = rng.uniform_sym();
  CHECK(iat(iid).tau == Catch::Approx(1.0).margin(0.05));

  const auto ar = testutil::ar1_series(rng, 0.9, 1000000);
  const IatResult r = iat(ar);
  CHECK(r.tau == Catch::Approx(19.0).epsilon(0.15));
  CHECK(r.ess == Catch::Approx(1000000.0 / r.tau).margin(1e-6));

  const std::vector<double> constant(1000, 1.0);
  CHECK_THROWS_AS(iat(constant), std::invalid_argument);
}

TEST_CASE("kv variance bound") {
  CHECK(kv_variance_bound(1.0, 1.0) == 2.0);
  CHECK(kv_variance_bound(0.0, 0.5) == 0.0);
  CHECK_THROWS_AS(kv_variance_bound(1.0, 0.0), std::invalid_argument);

  // two-state resolvent oracle stays below the bound
  FiniteKernel k;
  k.P.resize(2, 2);
  k.P << 0.7, 0.3, 0.3, 0.7;
  k.pi = Eigen::VectorXd::Constant(2, 0.5);
  Eigen::VectorXd f(2);
  f << 1.0, -1.0;
  const double exact = exact_asymptotic_variance(k, f);
  const double gap = spectral_gap(k).gap_lambda2;
  CHECK(exact <= kv_variance_bound(1.0, gap));
  CHECK(exact == Catch::Approx(7.0 / 3.0).margin(1e-12));
}

TEST_CASE("rudolf mse bound: plug-in, monotonicity, monte-carlo dominance") {
  CHECK(rudolf_mse_bound(100, 0.5) == Catch::Approx(0.0408).margin(1e-12));
  CHECK_THROWS_AS(rudolf_mse_bound(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(rudolf_mse_bound(10, 0.0), std::invalid_argument);

  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t n : {1, 2, 5, 10, 100, 1000, 100000}) {
    const double b = rudolf_mse_bound(n, 0.25);
    CHECK(b < prev);
    prev = b;
  }

  // 2-state chain started in stationarity, ||f||_2 = 1
  const double p = 0.3, gap = 2.0 * p;
  const int n_len = 50, reps = 10000;
  RngStream rng(5);
  double mse = 0.0;
  for (int r = 0; r < reps; ++r) {
    int s = rng.uniform01() < 0.5 ? 0 : 1;
    double sum = 0.0;
    for (int t = 0; t < n_len; ++t) {
      if (rng.uniform01() < p) s = 1 - s;
      sum += (s == 0 ? 1.0 : -1.0);
    }
    const double avg = sum / n_len;
    mse += avg * avg;  // mu(f) = 0
  }
  mse /= reps;
  CHECK(mse <= rudolf_mse_bound(n_len, gap));
}

TEST_CASE("burn-in step formula") {
  CHECK(burnin_steps(4.0, 0.5, 1.0) == 6);
  CHECK(burnin_steps(3.0, 0.5, 1.0) == 10);
  CHECK(burnin_steps(7.0, 0.5, 0.0) == 0);
  CHECK_THROWS_AS(burnin_steps(2.0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(burnin_steps(4.0, 0.0, 1.0), std::invalid_argument);

  // non-increasing in the gap
  std::int64_t prev = std::numeric_limits<std::int64_t>::max();
  for (double gap : {0.05, 0.1, 0.3, 0.5, 0.9}) {
    const std::int64_t n0 = burnin_steps(3.5, gap, 2.0);
    CHECK(n0 <= prev);
    prev = n0;
  }
  // non-decreasing in the start-distribution norm
  prev = -1;
  for (double nu : {0.0, 0.5, 1.0, 4.0, 16.0}) {
    const std::int64_t n0 = burnin_steps(5.0, 0.3, nu);
    CHECK(n0 >= prev);
    prev = n0;
  }
}

TEST_CASE("quadrature oracle: flat case and normalization") {
  const QuadratureOracle flat =
      posterior_quadrature_oracle([](double) { return 0.0; });
  REQUIRE(flat.grid.size() == 2001);
  for (double d : flat.density) CHECK(d == Catch::Approx(0.5).margin(1e-12));

  const QuadratureOracle peaked = posterior_quadrature_oracle(
      [](double u) { return -8.0 * (u - 0.3) * (u - 0.3); });
  double mass = 0.0;
  const double h = 2.0 / 2000;
  for (std::size_t i = 0; i + 1 < peaked.grid.size(); ++i)
    mass += 0.5 * h * (peaked.density[i] + peaked.density[i + 1]);
  CHECK(mass == Catch::Approx(1.0).margin(1e-10));

  const auto bins = oracle_bin_masses(peaked, 50);
  double total = 0.0;
  for (double b : bins) total += b;
  CHECK(total == Catch::Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(oracle_bin_masses(peaked, 3), std::invalid_argument);
}

TEST_CASE("chain histogram approaches the quadrature posterior (small case)") {
  const BasisSpec spec = BasisSpec::with_defaults(0);
  const Mesh mesh = Mesh::uniform(256);
  const ForwardModel model(spec, mesh, SourceTerm::constant(mesh),
                           ObservationOperator::uniform(0.25));
  const Dataset data = make_synthetic_data(99, model, 0.1);
  const LogLikelihood ell(model, data);

  const QuadratureOracle oracle = posterior_quadrature_oracle(
      [&](double u) { return ell(std::vector<double>{u}); });

  RngStream rng(6);
  ChainState init{sample_prior(rng, 1), 0.0};
  init.log_lik = ell(init.u);
  const ChainOutput out = run_chain(
      ProposalKind::rurwm(0.5), init, 200000, 20000,
      {functional_by_id("u0", spec)}, rng,
      [&](std::span<const double> u) { return ell(u); });
  CHECK(tv_distance_to_oracle(out.series[0], oracle, 50) < 0.05);
}
