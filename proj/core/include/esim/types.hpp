#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace esim {

using JobId = std::uint32_t;

/// Invalid user input: malformed files, out-of-range values, unsatisfiable
/// job requirements. Messages name the offending field or job.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Filesystem trouble: unreadable input, unwritable output directory.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant (slot accounting drift, a run that cannot
/// drain its event queue). Indicates a bug, not bad input.
class SimulationError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

enum class Phase { Queued, Running, Rescaling, Finished };

enum class PolicyKind { RigidMin, RigidMax, Moldable, Elastic };

/// Canonical label used in output files: "min_replicas", "max_replicas",
/// "moldable", "elastic".
std::string_view to_label(PolicyKind kind);

/// Accepts the canonical labels plus the short aliases "min" and "max".
std::optional<PolicyKind> parse_policy(std::string_view text);

/// A job as submitted: replica bounds, priority, arrival time. The class id
/// refers to a JobClass supplying work volume and timing models.
struct JobSpec {
  JobId id = 0;
  std::string class_id;
  int min_replicas = 1;
  int max_replicas = 1;
  int priority = 1;
  double submit_time = 0.0;

  bool operator==(const JobSpec&) const = default;
};

/// Total order used everywhere jobs compete for slots: higher priority
/// first, then earlier submission, then lower id. Returns less when `a`
/// precedes `b`. Equality only for the same job.
std::strong_ordering effective_priority_cmp(const JobSpec& a, const JobSpec& b);

/// effective_priority_cmp(a, b) < 0, usable as a sort predicate. Sorting
/// with it puts the job served first at the front.
bool schedules_before(const JobSpec& a, const JobSpec& b);

struct ClusterConfig {
  int total_slots = 64;
  /// Extra slots a running job occupies beyond its replicas (one per-job
  /// launcher process by default).
  int launcher_slots = 1;
  /// Whether launcher slots count as useful occupancy in utilization.
  bool count_launcher_in_utilization = true;
};

struct SchedulerConfig {
  PolicyKind policy = PolicyKind::Elastic;
  /// Minimum seconds between consecutive scheduling actions on one job.
  /// May be infinity, which disables rescaling entirely.
  double rescale_gap = 180.0;
};

/// Mutable per-job record owned by the engine. `replicas` is the
/// slot-occupancy-relevant count: while a shrink is in flight it stays at
/// the old size, while an expansion is in flight it is already the new one.
struct JobState {
  JobSpec spec;
  Phase phase = Phase::Queued;
  int replicas = 0;
  double work_done = 0.0;
  /// Time of the last creation, shrink start, or expand start. Empty until
  /// the job is first placed.
  std::optional<double> last_action;
  std::optional<double> rescale_deadline;
  std::optional<int> pending_target;
  std::optional<double> start_time;
  std::optional<double> end_time;
};

}  // namespace esim
