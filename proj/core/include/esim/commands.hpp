#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "esim/config.hpp"
#include "esim/metrics.hpp"
#include "esim/types.hpp"

namespace esim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

/// Row order used by compare and sweep outputs.
inline constexpr std::array<PolicyKind, 4> kAllPolicies = {
    PolicyKind::RigidMin, PolicyKind::RigidMax, PolicyKind::Moldable,
    PolicyKind::Elastic};

enum class SweepVariable { SubmissionGap, RescaleGap };

struct SweepSpec {
  SweepVariable variable = SweepVariable::SubmissionGap;
  /// Values may include infinity for the rescale gap.
  std::vector<double> values;
};

struct SweepMeans {
  double total_time = 0.0;
  double utilization = 0.0;
  double weighted_mean_response = 0.0;
  double weighted_mean_completion = 0.0;
};

struct SweepRow {
  double value = 0.0;
  PolicyKind policy = PolicyKind::Elastic;
  SweepMeans means;
};

/// Runs every (value, repeat, policy) cell and averages the four metrics
/// over repeats. Repeat k uses seed base_seed + k; the four policies see
/// byte-identical workloads. Rows come back sorted by value then policy
/// order. `threads` caps the worker pool (0 picks a default); results do
/// not depend on it.
std::vector<SweepRow> sweep_means(const SimConfig& config,
                                  const SweepSpec& sweep, int repeats,
                                  std::uint64_t base_seed, int threads = 0);

struct RunOptions {
  std::string config_path;
  std::optional<PolicyKind> scheduler;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

struct CompareOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
};

struct SweepOptions {
  std::string config_path;
  SweepSpec sweep;
  /// 0 means take n_repeats from the config.
  int repeats = 0;
  std::uint64_t base_seed = 0;
  std::string out_dir = "out";
};

/// One simulation; writes workload.json, trace.csv, trace.json,
/// metrics.json, metrics.csv, and profile.csv into out_dir.
int cmd_run(const RunOptions& options);

/// All four policies on one workload; writes per-policy traces and
/// compare.csv, and prints a metrics table.
int cmd_compare(const CompareOptions& options);

/// Metric means across repeats for each swept value; writes sweep.csv.
/// Parallelism is capped by the ELASTIC_SIM_THREADS environment variable.
int cmd_sweep(const SweepOptions& options);

}  // namespace esim
