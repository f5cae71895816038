#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bgpc/certify.hpp"
#include "bgpc/combinatorics.hpp"
#include "bgpc/error.hpp"
#include "bgpc/model.hpp"
#include "bgpc/parallel.hpp"
#include "bgpc/recover.hpp"
#include "bgpc/rng.hpp"

namespace bgpc {

struct IntRange {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
};

struct SweepConfig {
  Mode mode = Mode::Subspace;
  std::size_t n = 0;
  std::size_t m = 0;  // dictionary size, joint-sparse mode only
  IntRange dim_range;  // m (subspace) or s (joint sparse)
  IntRange N_range;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  std::optional<double> tol;
  std::string output_path;  // CSV destination, used by the CLI
  bool require_recovery = false;
  // Wall-clock timing makes output nondeterministic, so it is opt-in; when
  // off, mean_runtime_ms is written as 0.
  bool record_timing = false;
  std::uint64_t max_cells = 1'000'000;
  std::size_t threads = 1;
};

struct PhaseCell {
  Mode mode = Mode::Subspace;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t N = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate = 0.0;
  bool threshold_met = false;
  double mean_runtime_ms = 0.0;
  std::string skipped_reason;  // empty when the cell ran
};

inline void validate(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw InputError("sweep: trials must be >= 1");
  if (cfg.dim_range.first > cfg.dim_range.last || cfg.N_range.first > cfg.N_range.last)
    throw InputError("sweep: ranges must be nonempty (first <= last)");
  if (cfg.n == 0) throw InputError("sweep: n must be positive");
  if (cfg.mode == Mode::JointSparse && cfg.m == 0)
    throw InputError("sweep: joint-sparse mode needs the dictionary size m");
}

/// Seed of one trial; a function of the grid coordinates only.
inline std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t dim, std::size_t N,
                                std::size_t trial) {
  return derive_seed(base, {n, dim, N, trial});
}

namespace detail {

inline std::string skip_reason(const SweepConfig& cfg, std::size_t dim, std::size_t N) {
  if (N < 2) return "N<2";
  if (dim < 1) return "dim<1";
  if (cfg.mode == Mode::Subspace) {
    if (cfg.n <= dim) return "n<=m";
    return {};
  }
  if (dim > cfg.m) return "s>m";
  if (cfg.n <= 2 * dim) return "n<=2s";
  if (binomial(cfg.m, dim) > cfg.max_cells) return "budget";
  return {};
}

inline bool threshold_met(const SweepConfig& cfg, std::size_t dim, std::size_t N) {
  return cfg.mode == Mode::Subspace ? N >= min_samples_subspace(cfg.n, dim)
                                    : N >= min_samples_joint_sparse(cfg.n, dim);
}

inline bool run_trial(const SweepConfig& cfg, std::size_t dim, std::size_t N, std::uint64_t seed) {
  const bool sparse = cfg.mode == Mode::JointSparse;
  const Instance inst = sparse ? random_instance(cfg.n, cfg.m, N, seed, dim)
                               : random_instance(cfg.n, dim, N, seed);
  const CertificateReport rep =
      sparse ? certify_joint_sparse(inst, dim, JointSparseOptions{cfg.tol, cfg.max_cells, 1})
             : certify_subspace(inst, cfg.tol);
  bool ok = rep.verdict == Verdict::IdentifiableUpToScaling;
  if (ok && cfg.require_recovery) {
    RecoverOptions ro;
    ro.tol = cfg.tol;
    ro.max_cells = cfg.max_cells;
    try {
      const ComplexMatrix Y = forward(inst);
      const RecoveryResult r = sparse ? recover_joint_sparse(Y, inst.A, dim, ro) : recover(Y, inst.A, ro);
      ok = r.status == RecoveryStatus::Unique;
    } catch (const InconsistentError&) {
      ok = false;
    }
  }
  return ok;
}

}  // namespace detail

/// Runs every (dim, N) cell of the grid, dim-major. Trials across all cells
/// share one worker pool; results are aggregated in grid order.
inline std::vector<PhaseCell> run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  std::vector<PhaseCell> cells;
  for (std::size_t dim = cfg.dim_range.first; dim <= cfg.dim_range.last; ++dim) {
    for (std::size_t N = cfg.N_range.first; N <= cfg.N_range.last; ++N) {
      PhaseCell c;
      c.mode = cfg.mode;
      c.n = cfg.n;
      c.dim = dim;
      c.N = N;
      c.skipped_reason = detail::skip_reason(cfg, dim, N);
      if (c.skipped_reason.empty()) {
        c.trials = cfg.trials;
        c.threshold_met = detail::threshold_met(cfg, dim, N);
      }
      cells.push_back(std::move(c));
    }
  }

  struct Job {
    std::size_t cell;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (std::size_t ci = 0; ci < cells.size(); ++ci)
    for (std::size_t t = 0; t < cells[ci].trials; ++t) jobs.push_back({ci, t});

  std::vector<char> success(jobs.size(), 0);
  std::vector<double> elapsed_ms(jobs.size(), 0.0);
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const PhaseCell& c = cells[jobs[i].cell];
    const auto start = std::chrono::steady_clock::now();
    success[i] = detail::run_trial(cfg, c.dim, c.N,
                                   trial_seed(cfg.base_seed, c.n, c.dim, c.N, jobs[i].trial));
    if (cfg.record_timing)
      elapsed_ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    PhaseCell& c = cells[jobs[i].cell];
    c.successes += success[i] ? 1 : 0;
    c.mean_runtime_ms += elapsed_ms[i];
  }
  for (auto& c : cells) {
    if (c.trials == 0) continue;
    c.rate = static_cast<double>(c.successes) / static_cast<double>(c.trials);
    c.mean_runtime_ms /= static_cast<double>(c.trials);
  }
  return cells;
}

inline constexpr const char* kSweepCsvHeader =
    "mode,n,dim,N,threshold_met,trials,successes,rate,mean_runtime_ms,skipped_reason";

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<PhaseCell>& cells) {
  os << kSweepCsvHeader << '\n';
  for (const auto& c : cells) {
    os << to_string(c.mode) << ',' << c.n << ',' << c.dim << ',' << c.N << ','
       << (c.threshold_met ? "true" : "false") << ',' << c.trials << ',' << c.successes << ','
       << format_real(c.rate) << ',' << format_real(c.mean_runtime_ms) << ',' << c.skipped_reason
       << '\n';
  }
}

}  // namespace bgpc
