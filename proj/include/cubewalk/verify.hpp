#pragma once

// The spectral-verify command: randomized Cheeger and gap-transfer suites,
// tensorization checks, the reflected-walk gap table, and the minorization
// probe. Asserted invariants (Cheeger bounds, the gap-transfer lower bound,
// tensor gap equality, the Fourier gap oracle, minorization monotonicity)
// make the command fail; audits of the small-set argument's claimed
// constants are reported only.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cubewalk/experiment.hpp"
#include "cubewalk/spectral.hpp"

namespace cubewalk {

struct SpectralVerifySummary {
  int cheeger_checked = 0;
  int cheeger_failures = 0;
  int transfer_checked = 0;
  int transfer_lower_failures = 0;
  int transfer_upper_holds = 0;
  int sharp_variant_holds = 0;
  int tensor_checked = 0;
  int tensor_failures = 0;
  int oracle_failures = 0;
  int minorization_failures = 0;
  double transfer_min_lower_tightness = std::numeric_limits<double>::infinity();

  int asserted_failures() const {
    return cheeger_failures + transfer_lower_failures + tensor_failures +
           oracle_failures + minorization_failures;
  }
};

namespace detail {

inline void dump_counterexample(const std::filesystem::path& dir,
                                const std::string& label,
                                const SuiteInstance& inst) {
  std::filesystem::create_directories(dir / "counterexamples");
  std::ofstream out(dir / "counterexamples" /
                    (label + "_" + std::to_string(inst.seed) + ".txt"));
  dump_instance(out, inst);
}

}  // namespace detail

inline SpectralVerifySummary cmd_spectral_verify(const ExperimentConfig& cfg,
                                                 int workers) {
  const auto dir = ensure_output_dir(cfg);
  SpectralVerifySummary summary;

  // --- Cheeger + gap-transfer randomized suites -------------------------
  struct InstanceRecord {
    SuiteInstance inst;
    CheegerReport cheeger_prop;
    CheegerReport cheeger_mh;
    GapTransferReport transfer;
    SharpTransferReport sharp;
  };
  std::vector<InstanceRecord> records(cfg.suite_instances);
  run_parallel(cfg.suite_instances, workers, [&](int i) {
    InstanceRecord rec;
    rec.inst = random_reversible_instance(
        derive_stream_seed(cfg.master_seed,
                           stream_task(StreamCategory::suite, i)),
        2, cfg.suite_max_states, cfg.suite_l_ratio);
    const FiniteKernel mh = mh_finite(rec.inst.proposal, rec.inst.likelihood);
    rec.cheeger_prop = cheeger_check(rec.inst.proposal);
    rec.cheeger_mh = cheeger_check(mh);
    rec.transfer = gap_transfer_check(rec.inst.proposal, rec.inst.likelihood);
    rec.sharp = sharp_transfer_probe(rec.inst.proposal, rec.inst.likelihood);
    records[i] = std::move(rec);
  });

  {
    CsvWriter cheeger_csv((dir / "cheeger_suite.csv").string(),
                          cfg.config_hash, cfg.master_seed,
                          {"instance", "seed", "kernel", "n", "conductance",
                           "gap_lambda2", "gap_abs", "lower", "upper",
                           "lower_ok", "upper_ok"});
    CsvWriter thm_csv(
        (dir / "gap_transfer_suite.csv").string(), cfg.config_hash,
        cfg.master_seed,
        {"instance", "seed", "n", "l_ratio", "gap_prop_lambda2",
         "gap_mh_lambda2", "gap_prop_abs", "gap_mh_abs", "lower_bound",
         "lower_holds", "lower_tightness", "upper_bound", "upper_holds",
         "upper_tightness", "sharp_lower", "sharp_lower_holds",
         "sharp_upper", "sharp_upper_holds"});
    for (int i = 0; i < cfg.suite_instances; ++i) {
      const InstanceRecord& rec = records[i];
      for (const auto& [kernel_name, rep] :
           {std::pair<const char*, const CheegerReport&>{"proposal",
                                                         rec.cheeger_prop},
            {"mh", rec.cheeger_mh}}) {
        cheeger_csv.cell(static_cast<std::int64_t>(i))
            .cell(rec.inst.seed)
            .cell(std::string(kernel_name))
            .cell(rec.inst.proposal.size())
            .cell(rep.conductance)
            .cell(rep.gap.gap_lambda2)
            .cell(rep.gap.gap_abs)
            .cell(rep.lower)
            .cell(rep.upper)
            .cell(std::string(rep.lower_holds ? "1" : "0"))
            .cell(std::string(rep.upper_holds ? "1" : "0"));
        cheeger_csv.end_row();
        ++summary.cheeger_checked;
        if (!rep.ok()) {
          ++summary.cheeger_failures;
          detail::dump_counterexample(dir, "cheeger", rec.inst);
        }
      }
      const GapTransferReport& t = rec.transfer;
      thm_csv.cell(static_cast<std::int64_t>(i))
          .cell(rec.inst.seed)
          .cell(rec.inst.proposal.size())
          .cell(1.0 / t.likelihood_ratio)
          .cell(t.proposal_gap.gap_lambda2)
          .cell(t.mh_gap.gap_lambda2)
          .cell(t.proposal_gap.gap_abs)
          .cell(t.mh_gap.gap_abs)
          .cell(t.lower_bound)
          .cell(std::string(t.lower_holds ? "1" : "0"))
          .cell(t.lower_tightness)
          .cell(t.upper_bound)
          .cell(std::string(t.upper_holds ? "1" : "0"))
          .cell(t.upper_tightness)
          .cell(rec.sharp.lower_bound)
          .cell(std::string(rec.sharp.lower_holds ? "1" : "0"))
          .cell(rec.sharp.upper_bound)
          .cell(std::string(rec.sharp.upper_holds ? "1" : "0"));
      thm_csv.end_row();
      ++summary.transfer_checked;
      if (!t.lower_holds) {
        ++summary.transfer_lower_failures;
        detail::dump_counterexample(dir, "gap_transfer_lower", rec.inst);
      }
      if (t.upper_holds) ++summary.transfer_upper_holds;
      if (rec.sharp.lower_holds && rec.sharp.upper_holds)
        ++summary.sharp_variant_holds;
      if (t.lower_bound > 0.0)
        summary.transfer_min_lower_tightness =
            std::min(summary.transfer_min_lower_tightness, t.lower_tightness);
    }
  }

  // --- Tensorization -----------------------------------------------------
  {
    CsvWriter csv((dir / "tensor_suite.csv").string(), cfg.config_hash,
                  cfg.master_seed,
                  {"instance", "seed", "n", "gap_abs", "gap_product_abs",
                   "abs_diff", "ok"});
    std::vector<std::array<double, 3>> rows(cfg.tensor_checks);
    std::vector<std::uint64_t> seeds(cfg.tensor_checks);
    std::vector<int> sizes(cfg.tensor_checks);
    run_parallel(cfg.tensor_checks, workers, [&](int i) {
      const std::uint64_t seed = derive_stream_seed(
          cfg.master_seed, stream_task(StreamCategory::suite, 100000 + i));
      const SuiteInstance inst = random_reversible_instance(seed, 2, 30, 4.0);
      const double gap = spectral_gap(inst.proposal).gap_abs;
      const double gap2 =
          spectral_gap(tensor_product(inst.proposal, inst.proposal)).gap_abs;
      rows[i] = {gap, gap2, std::abs(gap - gap2)};
      seeds[i] = seed;
      sizes[i] = inst.proposal.size();
    });
    for (int i = 0; i < cfg.tensor_checks; ++i) {
      const bool ok = rows[i][2] <= 1e-9;
      csv.cell(static_cast<std::int64_t>(i))
          .cell(seeds[i])
          .cell(sizes[i])
          .cell(rows[i][0])
          .cell(rows[i][1])
          .cell(rows[i][2])
          .cell(std::string(ok ? "1" : "0"));
      csv.end_row();
      ++summary.tensor_checked;
      if (!ok) ++summary.tensor_failures;
    }
  }

  // --- Reflected-walk gap vs small-set bound table ------------------------
  {
    const std::vector<WalkGapBoundRow> rows =
        walk_gap_bound_table(cfg.walk_bound_eps, cfg.spectral_n_grid);
    CsvWriter csv((dir / "walk_gap_bounds.csv").string(), cfg.config_hash,
                  cfg.master_seed,
                  {"eps", "small_set_steps", "gap_abs", "gap_lambda2",
                   "fourier_oracle", "oracle_rel_err", "bound_intermediate",
                   "bound_linear", "gap_ge_intermediate",
                   "intermediate_ge_linear", "gap_ge_linear"});
    for (const WalkGapBoundRow& row : rows) {
      const double oracle =
          1.0 - std::sin(std::numbers::pi * row.eps / 2.0) /
                    (std::numbers::pi * row.eps / 2.0);
      const double rel_err = std::abs(row.gap_abs - oracle) / oracle;
      csv.cell(row.eps)
          .cell(row.small_set_steps)
          .cell(row.gap_abs)
          .cell(row.gap_lambda2)
          .cell(oracle)
          .cell(rel_err)
          .cell(row.bound_intermediate)
          .cell(row.bound_linear)
          .cell(std::string(row.gap_ge_intermediate ? "1" : "0"))
          .cell(std::string(row.intermediate_ge_linear ? "1" : "0"))
          .cell(std::string(row.gap_ge_linear ? "1" : "0"));
      csv.end_row();
      if (rel_err > 0.02) ++summary.oracle_failures;
    }
  }

  // --- Minorization probe -------------------------------------------------
  {
    CsvWriter csv((dir / "minorization.csv").string(), cfg.config_hash,
                  cfg.master_seed,
                  {"eps", "n_steps", "n_grid", "min_density",
                   "min_density_2n", "claimed", "claim_holds", "monotone_ok"});
    for (double eps : cfg.minorization_eps) {
      const MinorizationReport rep =
          minorization_probe(eps, cfg.minorization_grid);
      const bool monotone = rep.min_density_2n >= rep.min_density - 1e-12;
      csv.cell(rep.eps)
          .cell(rep.n_steps)
          .cell(rep.n_grid)
          .cell(rep.min_density)
          .cell(rep.min_density_2n)
          .cell(rep.claimed)
          .cell(std::string(rep.claim_holds ? "1" : "0"))
          .cell(std::string(monotone ? "1" : "0"));
      csv.end_row();
      if (!monotone) ++summary.minorization_failures;
    }
  }

  // --- Dimension-independent lower bound plug-in ---------------------------
  // J-independent lower bound on the posterior-chain gap, from the
  // computable likelihood floor and the one-dimensional proposal gap
  // (tensorization makes the J-dimensional proposal gap equal to it).
  {
    const Dataset data = load_or_build_dataset(cfg);
    const GapReport proposal = spectral_gap(discretize_reflected_walk(
        std::min(cfg.fixed_epsilon, 0.999), StepKind::uniform,
        cfg.spectral_n_grid));
    CsvWriter csv((dir / "dimension_free_bound.csv").string(), cfg.config_hash,
                  cfg.master_seed,
                  {"K", "sigma", "d", "epsilon", "L_lower", "proposal_gap_abs",
                   "j_independent_lower_bound"});
    for (int k : cfg.k_list) {
      const LikelihoodBounds bounds = likelihood_lower_bound(
          data, cfg.basis_for(k), cfg.source(), cfg.mesh());
      const double bound = std::pow(bounds.lower, 4) *
                           proposal.gap_abs * proposal.gap_abs / 8.0;
      csv.cell(k)
          .cell(data.sigma)
          .cell(data.spacing)
          .cell(std::min(cfg.fixed_epsilon, 0.999))
          .cell(bounds.lower)
          .cell(proposal.gap_abs)
          .cell(bound);
      csv.end_row();
    }
  }

  std::cout << "cheeger suite: " << summary.cheeger_checked << " kernels, "
            << summary.cheeger_failures << " violations\n";
  std::cout << "gap-transfer suite: " << summary.transfer_checked
            << " instances, " << summary.transfer_lower_failures
            << " lower-bound violations, upper bound held on "
            << summary.transfer_upper_holds << ", sharper variant held on "
            << summary.sharp_variant_holds << " (min lower tightness "
            << format_double(summary.transfer_min_lower_tightness, 4) << ")\n";
  std::cout << "tensor suite: " << summary.tensor_checked << " kernels, "
            << summary.tensor_failures << " mismatches\n";
  std::cout << "gap oracle: " << summary.oracle_failures
            << " failures; minorization: " << summary.minorization_failures
            << " failures\n";
  if (summary.asserted_failures() > 0)
    throw InvariantFailure("spectral-verify: " +
                           std::to_string(summary.asserted_failures()) +
                           " asserted invariant failures (see " +
                           (dir / "counterexamples").string() + ")");
  return summary;
}

}  // namespace cubewalk
