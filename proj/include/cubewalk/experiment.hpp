#pragma once

// Experiment drivers behind the CLI: synthetic data generation, the
// acceptance-vs-stepsize sweep, autocorrelation comparisons, the spectral
// verification suites, and CSV plotting.
//
// Concurrency: cells run on a bounded worker pool; every cell owns a
// random stream derived from (master_seed, category, cell index), and
// results are aggregated by cell index, so outputs are identical for any
// worker count.

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cubewalk/config.hpp"
#include "cubewalk/csv.hpp"
#include "cubewalk/diagnostics.hpp"
#include "cubewalk/field.hpp"
#include "cubewalk/forward.hpp"
#include "cubewalk/posterior.hpp"
#include "cubewalk/samplers.hpp"
#include "cubewalk/spectral.hpp"
#include "cubewalk/svg.hpp"

namespace cubewalk {

// Stream categories: the task index passed to derive_stream_seed is
// (category << 32) | cell_index.
enum class StreamCategory : std::uint64_t {
  dataset = 0,
  sweep = 1,
  tuning = 2,
  production = 3,
  suite = 4,
};

inline std::uint64_t stream_task(StreamCategory cat, std::uint64_t index) {
  return (static_cast<std::uint64_t>(cat) << 32) | index;
}

struct ExperimentConfig {
  std::vector<int> k_list{25, 250};
  int k_truth = -1;  // -1: max of k_list
  double abar = 4.38;
  std::vector<double> gamma_override;  // optional, single-K runs only
  std::vector<double> mean_profile;    // optional, per mesh node
  std::vector<double> source_profile;  // optional, per mesh node
  int n_cells = 4096;
  double obs_spacing = 0.1;  // d
  double sigma = 0.1;
  std::vector<std::string> algorithms{"IS", "RWM", "RURWM", "RSRWM"};
  std::vector<double> epsilon_list{0.05, 0.1, 0.2, 0.4, 0.7, 1.0};
  double fixed_epsilon = 0.5;  // RURWM/RSRWM step for autocorr runs
  std::int64_t n_steps = 200000;
  std::int64_t burn_in = -1;  // -1: n_steps / 10
  std::int64_t autocorr_steps = 1000000;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  std::vector<std::string> functionals{"u0", "loglik", "field_mid"};
  double target_acceptance = 0.135;
  double target_tolerance = 0.05;
  std::vector<double> tuning_epsilon;  // empty: geometric default grid
  std::int64_t tuning_steps = 20000;
  int acf_max_lag = 2000;
  int spectral_n_grid = 2001;
  int suite_instances = 1000;
  int suite_max_states = 12;
  double suite_l_ratio = 10.0;
  int tensor_checks = 100;
  std::vector<double> walk_bound_eps{0.1, 0.25, 0.5};
  std::vector<double> minorization_eps{0.5};
  int minorization_grid = 512;
  std::string dataset_path;  // optional: reuse files from generate-data
  bool dump_chains = false;  // also write per-cell chain CSVs in autocorr

  std::string config_hash;  // hex of the canonical description

  int truth_pairs() const {
    if (k_truth >= 0) return k_truth;
    int m = 0;
    for (int k : k_list) m = std::max(m, k);
    return m;
  }

  std::int64_t effective_burn_in() const {
    return burn_in >= 0 ? burn_in : n_steps / 10;
  }

  std::vector<double> tuning_grid() const {
    if (!tuning_epsilon.empty()) return tuning_epsilon;
    // geometric grid wide enough for targets from J ~ 3 up to J ~ 500
    std::vector<double> grid(28);
    for (int i = 0; i < 28; ++i)
      grid[i] = 0.002 * std::pow(4.0 / 0.002, i / 27.0);
    return grid;
  }

  static const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "K",            "k_truth",        "abar",
        "gamma_override", "mean_profile", "source_profile",
        "n_cells",      "obs_spacing_d",  "sigma",
        "algorithms",   "epsilon",        "fixed_epsilon",
        "n_steps",      "burn_in",        "autocorr_steps",
        "master_seed",  "output_dir",     "functionals",
        "target_acceptance", "target_tolerance", "tuning_epsilon",
        "tuning_steps", "acf_max_lag",    "spectral_n_grid",
        "suite_instances", "suite_max_states", "suite_l_ratio",
        "tensor_checks", "walk_bound_eps", "minorization_eps",
        "minorization_grid", "dataset", "dump_chains"};
    return keys;
  }

  static ExperimentConfig from_kv(const KeyValueConfig& kv) {
    kv.reject_unknown_keys(known_keys());
    ExperimentConfig c;
    c.k_list = kv.get_int_list("K", c.k_list);
    c.k_truth = static_cast<int>(kv.get_int("k_truth", c.k_truth));
    c.abar = kv.get_double("abar", c.abar);
    c.gamma_override = kv.get_double_list("gamma_override", {});
    c.mean_profile = kv.get_double_list("mean_profile", {});
    c.source_profile = kv.get_double_list("source_profile", {});
    c.n_cells = static_cast<int>(kv.get_int("n_cells", c.n_cells));
    c.obs_spacing = kv.get_double("obs_spacing_d", c.obs_spacing);
    c.sigma = kv.get_double("sigma", c.sigma);
    c.algorithms = kv.get_string_list("algorithms", c.algorithms);
    c.epsilon_list = kv.get_double_list("epsilon", c.epsilon_list);
    c.fixed_epsilon = kv.get_double("fixed_epsilon", c.fixed_epsilon);
    c.n_steps = kv.get_int("n_steps", c.n_steps);
    c.burn_in = kv.get_int("burn_in", c.burn_in);
    c.autocorr_steps = kv.get_int("autocorr_steps", c.autocorr_steps);
    c.master_seed = kv.get_u64("master_seed", c.master_seed);
    c.output_dir = kv.get_string("output_dir", c.output_dir);
    c.functionals = kv.get_string_list("functionals", c.functionals);
    c.target_acceptance = kv.get_double("target_acceptance", c.target_acceptance);
    c.target_tolerance = kv.get_double("target_tolerance", c.target_tolerance);
    c.tuning_epsilon = kv.get_double_list("tuning_epsilon", {});
    c.tuning_steps = kv.get_int("tuning_steps", c.tuning_steps);
    c.acf_max_lag = static_cast<int>(kv.get_int("acf_max_lag", c.acf_max_lag));
    c.spectral_n_grid =
        static_cast<int>(kv.get_int("spectral_n_grid", c.spectral_n_grid));
    c.suite_instances =
        static_cast<int>(kv.get_int("suite_instances", c.suite_instances));
    c.suite_max_states =
        static_cast<int>(kv.get_int("suite_max_states", c.suite_max_states));
    c.suite_l_ratio = kv.get_double("suite_l_ratio", c.suite_l_ratio);
    c.tensor_checks =
        static_cast<int>(kv.get_int("tensor_checks", c.tensor_checks));
    c.walk_bound_eps = kv.get_double_list("walk_bound_eps", c.walk_bound_eps);
    c.minorization_eps =
        kv.get_double_list("minorization_eps", c.minorization_eps);
    c.minorization_grid =
        static_cast<int>(kv.get_int("minorization_grid", c.minorization_grid));
    c.dataset_path = kv.get_string("dataset", "");
    c.dump_chains = kv.get_int("dump_chains", 0) != 0;
    c.validate();
    c.config_hash = c.compute_hash();
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    return from_kv(KeyValueConfig::parse_file(path));
  }

  static ExperimentConfig defaults() { return from_kv(KeyValueConfig()); }

  void validate() const {
    if (k_list.empty()) throw ConfigError("config: K list is empty");
    for (int k : k_list)
      if (k < 0) throw ConfigError("config: K entries must be >= 0");
    if (n_cells < 2) throw ConfigError("config: n_cells must be >= 2");
    if (!(obs_spacing > 0.0 && obs_spacing <= 1.0))
      throw ConfigError("config: obs_spacing_d must lie in (0,1]");
    if (!(sigma > 0.0)) throw ConfigError("config: sigma must be positive");
    if (n_steps < 10) throw ConfigError("config: n_steps too small");
    if (burn_in >= n_steps)
      throw ConfigError("config: burn_in must be below n_steps");
    for (const std::string& a : algorithms) {
      try {
        ProposalKind::parse(a, 0.5);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
    for (double e : epsilon_list)
      if (!(e > 0.0)) throw ConfigError("config: epsilon entries must be > 0");
    if (!(fixed_epsilon > 0.0))
      throw ConfigError("config: fixed_epsilon must be > 0");
    if (!gamma_override.empty() && k_list.size() != 1)
      throw ConfigError("config: gamma_override requires a single K");
    if (!gamma_override.empty() &&
        static_cast<int>(gamma_override.size()) != 2 * k_list[0] + 1)
      throw ConfigError("config: gamma_override needs 2K+1 entries");
  }

  /// Canonical text of every effective field; hashing this (rather than the
  /// raw file) makes the hash invariant to comment/order changes and
  /// sensitive to CLI overrides.
  std::string canonical_description() const {
    std::ostringstream os;
    auto list_d = [&os](const char* key, const std::vector<double>& v) {
      os << key << "=";
      for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << format_double(v[i], 17);
      os << "\n";
    };
    os << "K=";
    for (std::size_t i = 0; i < k_list.size(); ++i)
      os << (i ? "," : "") << k_list[i];
    os << "\nk_truth=" << truth_pairs() << "\n";
    os << "abar=" << format_double(abar, 17) << "\n";
    list_d("gamma_override", gamma_override);
    list_d("mean_profile", mean_profile);
    list_d("source_profile", source_profile);
    os << "n_cells=" << n_cells << "\n";
    os << "obs_spacing_d=" << format_double(obs_spacing, 17) << "\n";
    os << "sigma=" << format_double(sigma, 17) << "\n";
    os << "algorithms=";
    for (std::size_t i = 0; i < algorithms.size(); ++i)
      os << (i ? "," : "") << algorithms[i];
    os << "\n";
    list_d("epsilon", epsilon_list);
    os << "fixed_epsilon=" << format_double(fixed_epsilon, 17) << "\n";
    os << "n_steps=" << n_steps << "\n";
    os << "burn_in=" << effective_burn_in() << "\n";
    os << "autocorr_steps=" << autocorr_steps << "\n";
    os << "master_seed=" << master_seed << "\n";
    os << "functionals=";
    for (std::size_t i = 0; i < functionals.size(); ++i)
      os << (i ? "," : "") << functionals[i];
    os << "\n";
    os << "target_acceptance=" << format_double(target_acceptance, 17) << "\n";
    os << "target_tolerance=" << format_double(target_tolerance, 17) << "\n";
    list_d("tuning_epsilon", tuning_grid());
    os << "tuning_steps=" << tuning_steps << "\n";
    os << "acf_max_lag=" << acf_max_lag << "\n";
    os << "spectral_n_grid=" << spectral_n_grid << "\n";
    os << "suite_instances=" << suite_instances << "\n";
    os << "suite_max_states=" << suite_max_states << "\n";
    os << "suite_l_ratio=" << format_double(suite_l_ratio, 17) << "\n";
    os << "tensor_checks=" << tensor_checks << "\n";
    list_d("walk_bound_eps", walk_bound_eps);
    list_d("minorization_eps", minorization_eps);
    os << "minorization_grid=" << minorization_grid << "\n";
    os << "dataset=" << dataset_path << "\n";
    os << "dump_chains=" << (dump_chains ? 1 : 0) << "\n";
    return os.str();
  }

  std::string compute_hash() const {
    return hex64(fnv1a64(canonical_description()));
  }

  BasisSpec basis_for(int frequency_pairs) const {
    if (!gamma_override.empty()) {
      BasisSpec spec;
      spec.mean_level = abar;
      spec.frequency_pairs = frequency_pairs;
      spec.weights = gamma_override;
      spec.validate();
      return spec;
    }
    return BasisSpec::with_defaults(frequency_pairs, abar);
  }

  Mesh mesh() const { return Mesh::uniform(n_cells); }

  SourceTerm source() const {
    const Mesh m = mesh();
    if (source_profile.empty()) return SourceTerm::constant(m);
    SourceTerm s{source_profile};
    s.validate(m);
    return s;
  }

  ObservationOperator observation() const {
    return ObservationOperator::uniform(obs_spacing);
  }

  ForwardModel make_model(int frequency_pairs) const {
    return ForwardModel(basis_for(frequency_pairs), mesh(), source(),
                        observation(), mean_profile);
  }
};

// ---------------------------------------------------------------------------
// Worker pool

template <class Fn>
void run_parallel(int n_tasks, int n_workers, Fn&& fn) {
  if (n_workers <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int count = std::min(n_workers, n_tasks);
  for (int w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n_tasks) return;
        try {
          fn(i);
        } catch (...) {
          {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
          next.store(n_tasks);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Dataset files

inline std::filesystem::path ensure_output_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Dataset build_dataset(const ExperimentConfig& cfg) {
  const ForwardModel model = cfg.make_model(cfg.truth_pairs());
  const std::uint64_t seed = derive_stream_seed(
      cfg.master_seed, stream_task(StreamCategory::dataset, 0));
  return make_synthetic_data(seed, model, cfg.sigma);
}

inline void write_dataset(const std::filesystem::path& dir,
                          const Dataset& data, const ExperimentConfig& cfg) {
  const ObservationOperator obs = cfg.observation();
  CsvWriter csv((dir / "dataset.csv").string(), cfg.config_hash,
                cfg.master_seed, {"index", "location", "y"});
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    csv.cell(static_cast<std::int64_t>(i))
        .cell(obs.location(static_cast<int>(i)), 17)
        .cell(data.y[i], 17);
    csv.end_row();
  }
  nlohmann::json meta;
  meta["artifact_version"] = kArtifactVersion;
  meta["config_hash"] = cfg.config_hash;
  meta["master_seed"] = cfg.master_seed;
  meta["sigma"] = data.sigma;
  meta["d"] = data.spacing;
  meta["truth_seed"] = data.truth_seed;
  meta["n_cells"] = cfg.n_cells;
  meta["k_truth"] = cfg.truth_pairs();
  meta["abar"] = cfg.abar;
  std::ofstream out(dir / "dataset.meta.json");
  if (!out) throw std::runtime_error("cannot write dataset metadata");
  out << meta.dump(2) << "\n";
}

inline Dataset read_dataset(const std::string& csv_path) {
  const CsvTable table = read_csv(csv_path);
  if (!table.has_columns({"index", "location", "y"}))
    throw ConfigError("dataset csv: expected columns index, location, y");
  std::filesystem::path meta_path(csv_path);
  meta_path.replace_extension();
  meta_path += ".meta.json";
  std::ifstream meta_in(meta_path);
  if (!meta_in)
    throw ConfigError("dataset metadata not found: " + meta_path.string());
  nlohmann::json meta = nlohmann::json::parse(meta_in);
  Dataset data;
  data.sigma = meta.at("sigma").get<double>();
  data.spacing = meta.at("d").get<double>();
  data.truth_seed = meta.at("truth_seed").get<std::uint64_t>();
  const int y_col = table.column("y");
  for (const auto& row : table.rows)
    data.y.push_back(std::stod(row[y_col]));
  data.validate();
  return data;
}

inline Dataset load_or_build_dataset(const ExperimentConfig& cfg) {
  if (!cfg.dataset_path.empty()) return read_dataset(cfg.dataset_path);
  return build_dataset(cfg);
}

inline void cmd_generate_data(const ExperimentConfig& cfg) {
  const auto dir = ensure_output_dir(cfg);
  const Dataset data = build_dataset(cfg);
  write_dataset(dir, data, cfg);
  std::cout << "wrote " << (dir / "dataset.csv").string() << " ("
            << data.y.size() << " observations, sigma=" << data.sigma
            << ", d=" << data.spacing << ")\n";
}

// ---------------------------------------------------------------------------
// Acceptance sweep (step size vs acceptance rate, per algorithm and K)

struct SweepRow {
  std::string algorithm;
  int frequency_pairs = 0;
  double epsilon = 0.0;
  double accept_rate = 0.0;
  std::int64_t n_steps = 0;
  std::uint64_t seed = 0;
};

/// One chain per (algorithm, K, epsilon) cell; the IS sampler has no step
/// size, so it runs once per K and its value is replicated across the
/// epsilon column.
inline std::vector<SweepRow> sweep_acceptance_rows(const ExperimentConfig& cfg,
                                                   const Dataset& data,
                                                   int workers) {
  struct Cell {
    ProposalKind kind;
    int frequency_pairs;
    double epsilon_label;
    std::uint64_t cell_index;
  };
  std::vector<Cell> cells;
  for (const std::string& name : cfg.algorithms) {
    for (int k : cfg.k_list) {
      if (name == "IS") {
        cells.push_back({ProposalKind::independence(), k, 0.0,
                         static_cast<std::uint64_t>(cells.size())});
      } else {
        for (double eps : cfg.epsilon_list)
          cells.push_back({ProposalKind::parse(name, eps), k, eps,
                           static_cast<std::uint64_t>(cells.size())});
      }
    }
  }

  std::vector<SweepRow> rows(cells.size());
  run_parallel(static_cast<int>(cells.size()), workers, [&](int i) {
    const Cell& cell = cells[i];
    const ForwardModel model = cfg.make_model(cell.frequency_pairs);
    const LogLikelihood log_lik(model, data);
    RngStream rng(derive_stream_seed(
        cfg.master_seed, stream_task(StreamCategory::sweep, cell.cell_index)));
    const BasisSpec& spec = model.spec();
    CoefficientVector init = sample_prior(rng, spec.dimension());
    ChainState state{init, log_lik(init)};
    const auto lik = [&log_lik](std::span<const double> u) {
      return log_lik(u);
    };
    ChainOutput out =
        run_chain(cell.kind, std::move(state), cfg.n_steps,
                  cfg.effective_burn_in(), {functional_by_id("u0", spec)}, rng,
                  lik);
    rows[i] = SweepRow{cell.kind.name(), cell.frequency_pairs,
                       cell.epsilon_label, out.accept_rate(), cfg.n_steps,
                       out.seed};
  });

  // Replicate the IS value across the epsilon grid, then order rows by
  // (algorithm, K, epsilon) independent of execution order.
  std::vector<SweepRow> expanded;
  for (const SweepRow& row : rows) {
    if (row.algorithm == "IS") {
      for (double eps : cfg.epsilon_list) {
        SweepRow r = row;
        r.epsilon = eps;
        expanded.push_back(r);
      }
    } else {
      expanded.push_back(row);
    }
  }
  std::sort(expanded.begin(), expanded.end(),
            [](const SweepRow& a, const SweepRow& b) {
              if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
              if (a.frequency_pairs != b.frequency_pairs)
                return a.frequency_pairs < b.frequency_pairs;
              return a.epsilon < b.epsilon;
            });
  return expanded;
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            const std::vector<SweepRow>& rows,
                            const ExperimentConfig& cfg) {
  CsvWriter csv(path.string(), cfg.config_hash, cfg.master_seed,
                {"algorithm", "K", "epsilon", "accept_rate", "n_steps",
                 "seed"});
  for (const SweepRow& r : rows) {
    csv.cell(r.algorithm)
        .cell(r.frequency_pairs)
        .cell(r.epsilon)
        .cell(r.accept_rate)
        .cell(r.n_steps)
        .cell(r.seed);
    csv.end_row();
  }
}

inline void cmd_sweep_acceptance(const ExperimentConfig& cfg, int workers) {
  const auto dir = ensure_output_dir(cfg);
  const Dataset data = load_or_build_dataset(cfg);
  const std::vector<SweepRow> rows = sweep_acceptance_rows(cfg, data, workers);
  write_sweep_csv(dir / "acceptance.csv", rows, cfg);

  std::vector<PlotSeries> series;
  for (const SweepRow& r : rows) {
    const std::string label =
        r.algorithm + " K=" + std::to_string(r.frequency_pairs);
    if (series.empty() || series.back().label != label)
      series.push_back({label, {}});
    series.back().points.emplace_back(r.epsilon, r.accept_rate);
  }
  write_text_file(
      (dir / "acceptance.svg").string(),
      render_line_plot("Acceptance rate vs step size", "epsilon",
                       "acceptance rate", series,
                       std::string("artifact_version=") + kArtifactVersion +
                           " config_hash=" + cfg.config_hash +
                           " master_seed=" + std::to_string(cfg.master_seed),
                       /*log_x=*/true));
  std::cout << "wrote " << (dir / "acceptance.csv").string() << " ("
            << rows.size() << " rows)\n";
}

// ---------------------------------------------------------------------------
// Autocorrelation comparison

/// Chain dump: one row per retained step and functional, with the
/// acceptance summary in the preamble.
inline void write_chain_csv(const std::string& path, const ChainOutput& out,
                            const ExperimentConfig& cfg) {
  CsvWriter csv(path, cfg.config_hash, cfg.master_seed,
                {"step", "functional_id", "value"});
  csv.write_row_strings({"summary", "accept_rate",
                         format_double(out.accept_rate(), 17)});
  csv.write_row_strings({"summary", "n_steps", std::to_string(out.n_steps)});
  csv.write_row_strings({"summary", "seed", std::to_string(out.seed)});
  for (std::size_t f = 0; f < out.series.size(); ++f)
    for (std::size_t t = 0; t < out.series[f].size(); ++t) {
      csv.cell(static_cast<std::int64_t>(out.burn_in + 1 +
                                         static_cast<std::int64_t>(t)))
          .cell(out.functional_ids[f])
          .cell(out.series[f][t], 17);
      csv.end_row();
    }
}

struct AutocorrCellResult {
  std::string algorithm;
  int frequency_pairs = 0;
  double epsilon = 0.0;  // tuned (RWM), fixed (RURWM/RSRWM), 0 (IS)
  double accept_rate = 0.0;
  double iat_u0 = 0.0;
  double ess_u0 = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> functional_ids;
  std::vector<AcfSeries> acfs;  // one per functional
};

namespace detail {

/// Mean acceptance of a short pilot RWM chain at the given step size.
inline double pilot_acceptance(const ExperimentConfig& cfg,
                               const ForwardModel& model,
                               const LogLikelihood& log_lik, double eps,
                               std::uint64_t pilot_index) {
  RngStream rng(derive_stream_seed(
      cfg.master_seed, stream_task(StreamCategory::tuning, pilot_index)));
  CoefficientVector init = sample_prior(rng, model.spec().dimension());
  ChainState state{init, log_lik(init)};
  ChainOutput out = run_chain(
      ProposalKind::rwm(eps), std::move(state), cfg.tuning_steps,
      cfg.tuning_steps / 10, {functional_by_id("u0", model.spec())}, rng,
      [&log_lik](std::span<const double> u) { return log_lik(u); });
  return out.accept_rate();
}

}  // namespace detail

/// Step size for the RWM production run: sweep the tuning grid and keep the
/// step whose pilot acceptance lands closest to the target. Throws if no
/// grid point achieves target +- tolerance.
inline double tune_rwm_step(const ExperimentConfig& cfg,
                            const ForwardModel& model,
                            const LogLikelihood& log_lik,
                            std::uint64_t pilot_base) {
  const std::vector<double> grid = cfg.tuning_grid();
  double best_eps = 0.0;
  double best_miss = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double acc = detail::pilot_acceptance(cfg, model, log_lik, grid[i],
                                                pilot_base + i);
    const double miss = std::abs(acc - cfg.target_acceptance);
    if (miss < best_miss) {
      best_miss = miss;
      best_eps = grid[i];
    }
  }
  if (best_miss > cfg.target_tolerance)
    throw ConfigError(
        "autocorr: RWM tuning failed; no step size in the sweep range "
        "achieves the target acceptance within tolerance");
  return best_eps;
}

inline std::vector<AutocorrCellResult> autocorr_cells(
    const ExperimentConfig& cfg, const Dataset& data, int workers) {
  struct Cell {
    std::string algorithm;
    int frequency_pairs;
    std::uint64_t index;
  };
  std::vector<Cell> cells;
  for (const std::string& name : cfg.algorithms)
    for (int k : cfg.k_list)
      cells.push_back({name, k, static_cast<std::uint64_t>(cells.size())});

  std::vector<AutocorrCellResult> results(cells.size());
  run_parallel(static_cast<int>(cells.size()), workers, [&](int i) {
    const Cell& cell = cells[i];
    const ForwardModel model = cfg.make_model(cell.frequency_pairs);
    const LogLikelihood log_lik(model, data);
    const BasisSpec& spec = model.spec();

    ProposalKind kind = ProposalKind::independence();
    if (cell.algorithm == "RWM") {
      kind = ProposalKind::rwm(
          tune_rwm_step(cfg, model, log_lik, cell.index * 1000));
    } else if (cell.algorithm != "IS") {
      kind = ProposalKind::parse(cell.algorithm, cfg.fixed_epsilon);
    }

    RngStream rng(derive_stream_seed(
        cfg.master_seed, stream_task(StreamCategory::production, cell.index)));
    CoefficientVector init = sample_prior(rng, spec.dimension());
    ChainState state{init, log_lik(init)};
    std::vector<Functional> funcs;
    for (const std::string& id : cfg.functionals)
      funcs.push_back(functional_by_id(id, spec));
    ChainOutput out = run_chain(
        kind, std::move(state), cfg.autocorr_steps, cfg.autocorr_steps / 10,
        funcs, rng, [&log_lik](std::span<const double> u) { return log_lik(u); });
    out.config_hash = cfg.config_hash;
    if (cfg.dump_chains) {
      const auto dir = ensure_output_dir(cfg);
      write_chain_csv((dir / ("chain_" + cell.algorithm + "_K" +
                              std::to_string(cell.frequency_pairs) + ".csv"))
                          .string(),
                      out, cfg);
    }

    AutocorrCellResult res;
    res.algorithm = cell.algorithm;
    res.frequency_pairs = cell.frequency_pairs;
    res.epsilon = kind.is_local() ? kind.step : 0.0;
    res.accept_rate = out.accept_rate();
    res.seed = out.seed;
    res.functional_ids = out.functional_ids;
    const int kept = static_cast<int>(out.series[0].size());
    const int max_lag = std::min(cfg.acf_max_lag, kept / 4);
    for (const auto& series : out.series)
      res.acfs.push_back(acf(series, max_lag));
    const IatResult tau = iat(out.series[0]);  // u0 is the lead functional
    res.iat_u0 = tau.tau;
    res.ess_u0 = tau.ess;
    results[i] = res;
  });

  std::sort(results.begin(), results.end(),
            [](const AutocorrCellResult& a, const AutocorrCellResult& b) {
              if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
              return a.frequency_pairs < b.frequency_pairs;
            });
  return results;
}

inline void cmd_autocorr(const ExperimentConfig& cfg, int workers) {
  const auto dir = ensure_output_dir(cfg);
  const Dataset data = load_or_build_dataset(cfg);
  const std::vector<AutocorrCellResult> cells =
      autocorr_cells(cfg, data, workers);

  CsvWriter acf_csv((dir / "acf.csv").string(), cfg.config_hash,
                    cfg.master_seed,
                    {"algorithm", "K", "epsilon", "functional_id", "lag",
                     "rho"});
  for (const AutocorrCellResult& cell : cells)
    for (std::size_t f = 0; f < cell.acfs.size(); ++f)
      for (std::size_t lag = 0; lag < cell.acfs[f].rho.size(); ++lag) {
        acf_csv.cell(cell.algorithm)
            .cell(cell.frequency_pairs)
            .cell(cell.epsilon)
            .cell(cell.functional_ids[f])
            .cell(static_cast<std::int64_t>(lag))
            .cell(cell.acfs[f].rho[lag]);
        acf_csv.end_row();
      }

  CsvWriter summary((dir / "summary.csv").string(), cfg.config_hash,
                    cfg.master_seed,
                    {"algorithm", "K", "epsilon", "accept_rate", "iat", "ess",
                     "seed"});
  for (const AutocorrCellResult& cell : cells) {
    summary.cell(cell.algorithm)
        .cell(cell.frequency_pairs)
        .cell(cell.epsilon)
        .cell(cell.accept_rate)
        .cell(cell.iat_u0)
        .cell(cell.ess_u0)
        .cell(cell.seed);
    summary.end_row();
  }

  std::vector<PlotSeries> series;
  for (const AutocorrCellResult& cell : cells) {
    PlotSeries s;
    s.label = cell.algorithm + " K=" + std::to_string(cell.frequency_pairs);
    const AcfSeries& a = cell.acfs[0];
    for (std::size_t lag = 0; lag < a.rho.size(); ++lag)
      s.points.emplace_back(static_cast<double>(lag), a.rho[lag]);
    series.push_back(std::move(s));
  }
  write_text_file(
      (dir / "acf.svg").string(),
      render_line_plot(
          "Autocorrelation of u0", "lag", "rho", series,
          std::string("artifact_version=") + kArtifactVersion +
              " config_hash=" + cfg.config_hash +
              " master_seed=" + std::to_string(cfg.master_seed) +
              " functional=u0 (lead diagnostic functional; loglik and "
              "field_mid are recorded alongside in acf.csv)"));
  std::cout << "wrote " << (dir / "summary.csv").string() << " ("
            << cells.size() << " cells)\n";
}

}  // namespace cubewalk
