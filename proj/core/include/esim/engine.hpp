#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "esim/perf.hpp"
#include "esim/policy.hpp"
#include "esim/types.hpp"
#include "esim/workload.hpp"

namespace esim {

enum class RecordKind {
  Submitted,
  Enqueued,
  Created,
  ShrinkStart,
  ShrinkDone,
  ExpandStart,
  ExpandDone,
  Completed,
};

std::string_view to_label(RecordKind kind);

/// One trace line. `from`/`to` are replica counts where they apply:
/// Created and Completed use `to` and `from` respectively for the active
/// size, rescale records carry both endpoints, Submitted and Enqueued
/// carry neither. `overhead` is nonzero only on rescale starts.
struct TraceRecord {
  double time = 0.0;
  RecordKind kind = RecordKind::Submitted;
  JobId job = 0;
  int from = 0;
  int to = 0;
  OverheadBreakdown overhead;

  bool operator==(const TraceRecord&) const = default;
};

/// Everything needed to replay or audit a run: the record sequence plus an
/// echo of the configuration it ran under. `jobs` holds the specs as
/// scheduled, i.e. after the policy variant transformation.
struct Trace {
  std::vector<TraceRecord> records;
  std::map<JobId, JobSpec> jobs;
  ClusterConfig cluster;
  SchedulerConfig scheduler;
  std::string policy_label;
  std::uint64_t workload_seed = 0;
  std::string workload_algorithm;
};

/// Runs the workload to completion and returns the trace.
///
/// Deterministic: simultaneous events are ordered completion first, then
/// submission, then rescale finish, with insertion order breaking the rest,
/// so equal inputs give bitwise-equal traces. Jobs make no progress while a
/// rescale is in flight. Throws ConfigError for workloads that reference
/// unknown classes or cannot fit (minimum footprint above cluster capacity
/// after the policy variant is applied), SimulationError if the run stalls
/// with unfinished jobs.
Trace simulate(const ClusterConfig& cluster, const SchedulerConfig& scheduler,
               const Workload& workload, const Calibration& calibration);

void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_json(std::ostream& out, const Trace& trace);
void save_trace_csv(const std::string& path, const Trace& trace);
void save_trace_json(const std::string& path, const Trace& trace);

}  // namespace esim
