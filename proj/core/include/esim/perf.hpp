#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "esim/types.hpp"

namespace esim {

/// One sample of a timing model: seconds measured at a replica count.
struct Knot {
  int replicas = 0;
  double seconds = 0.0;

  bool operator==(const Knot&) const = default;
};

using KnotList = std::vector<Knot>;

/// Per-component rescaling cost models, each sampled at a handful of
/// replica counts. Checkpoint and restore are evaluated at the old size,
/// restart and load balancing at the larger of old and new.
struct OverheadKnots {
  KnotList checkpoint;
  KnotList restart;
  KnotList restore;
  KnotList load_balance;

  bool operator==(const OverheadKnots&) const = default;
};

struct ClassPerf {
  /// Seconds per unit of work as a function of replica count.
  KnotList step_time_knots;
  OverheadKnots overhead_knots;

  bool operator==(const ClassPerf&) const = default;
};

/// A workload class: how much work a job of this class carries, how large
/// its state is, the default replica bounds jobs of this class request, and
/// its timing models.
struct JobClass {
  std::string name;
  std::int64_t work_units = 0;
  std::int64_t data_bytes = 0;
  int min_replicas = 1;
  int max_replicas = 1;
  ClassPerf perf;

  bool operator==(const JobClass&) const = default;
};

/// Cost of one rescaling operation, split by component. `total` is always
/// the sum of the four parts.
struct OverheadBreakdown {
  double checkpoint = 0.0;
  double restart = 0.0;
  double restore = 0.0;
  double load_balance = 0.0;
  double total = 0.0;

  bool operator==(const OverheadBreakdown&) const = default;
};

/// Piecewise-linear interpolation over knots ordered by replica count.
/// Clamps to the boundary values outside the sampled range; exact at knots.
/// Throws ConfigError on an empty list.
double interp(const KnotList& knots, int replicas);

/// Seconds per unit of work at the given replica count.
double step_time(const ClassPerf& perf, int replicas);

/// Uninterrupted runtime of a whole job at a fixed replica count:
/// work_units * step_time.
double job_runtime(const JobClass& cls, int replicas);

/// Cost of rescaling a job of class `cls` from `n_old` to `n_new` replicas.
/// Throws std::invalid_argument when the sizes are equal.
OverheadBreakdown rescale_overhead(const JobClass& cls, int n_old, int n_new);

/// Validates replica bounds, work volume, and knot lists (nonempty,
/// strictly increasing replica counts, positive step times, nonnegative
/// overheads). Throws ConfigError naming the class and field.
void validate_class(const JobClass& cls);

/// The class table a simulation runs against.
struct Calibration {
  std::vector<JobClass> classes;

  const JobClass* find(std::string_view name) const;
  /// Like find, but throws ConfigError for unknown names.
  const JobClass& at(std::string_view name) const;

  bool operator==(const Calibration&) const = default;
};

}  // namespace esim
