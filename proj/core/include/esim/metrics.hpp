#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "esim/engine.hpp"
#include "esim/types.hpp"

namespace esim {

enum class WeightMode { Priority, Uniform };

struct PerJobMetrics {
  JobId id = 0;
  int priority = 1;
  /// First placement minus submission.
  double response = 0.0;
  /// Completion minus submission.
  double completion = 0.0;
};

struct MetricsReport {
  /// Last completion minus first placement.
  double total_time = 0.0;
  /// Occupied slot-seconds over total_slots * total_time, in [0, 1].
  double utilization = 0.0;
  double weighted_mean_response = 0.0;
  double weighted_mean_completion = 0.0;
  /// Sorted by job id.
  std::vector<PerJobMetrics> per_job;
};

/// Aggregates a finished trace. Weights are job priorities by default
/// (Uniform gives plain means). Throws ConfigError if any submitted job
/// never completed, naming the offenders.
MetricsReport compute_metrics(const Trace& trace, const ClusterConfig& cluster,
                              WeightMode weights = WeightMode::Priority);

/// One step of the occupancy step function. Emitted whenever occupancy
/// changes; `breakdown` lists (job, slots) pairs sorted by job id, and the
/// final point of a finished trace has zero occupancy.
struct ProfilePoint {
  double time = 0.0;
  int occupied = 0;
  std::vector<std::pair<JobId, int>> breakdown;
};

/// Occupancy over time, reconstructed from the trace alone. Integrating it
/// over [first placement, last completion] reproduces the utilization
/// reported by compute_metrics.
std::vector<ProfilePoint> utilization_profile(const Trace& trace,
                                              const ClusterConfig& cluster);

void write_metrics_json(std::ostream& out, const std::string& label,
                        const MetricsReport& report);
/// One row per (label, report) pair under a fixed header.
void write_metrics_csv(
    std::ostream& out,
    const std::vector<std::pair<std::string, MetricsReport>>& rows);
void write_profile_csv(std::ostream& out,
                       const std::vector<ProfilePoint>& profile);

void save_metrics_json(const std::string& path, const std::string& label,
                       const MetricsReport& report);
void save_metrics_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, MetricsReport>>& rows);
void save_profile_csv(const std::string& path,
                      const std::vector<ProfilePoint>& profile);

}  // namespace esim
