#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "esim/types.hpp"

namespace esim {

/// A scheduling decision. Instances come from the factory functions below,
/// which enforce the per-kind invariants.
struct Action {
  enum class Kind { Create, Expand, Shrink, Enqueue };

  Kind kind = Kind::Enqueue;
  JobId job = 0;
  /// Target replica count; meaningful for Create, Expand, and Shrink.
  int replicas = 0;
  /// Shrink only: the job whose admission this shrink finances.
  std::optional<JobId> beneficiary;
  double issue_time = 0.0;

  bool operator==(const Action&) const = default;

  /// replicas must lie in [spec.min_replicas, spec.max_replicas].
  static Action create(const JobSpec& spec, int replicas, double now);
  /// replicas must exceed the job's current size and respect its maximum.
  static Action expand(const JobState& job, int replicas, double now);
  /// replicas must be below the job's current size and respect its minimum.
  static Action shrink(const JobState& job, int replicas, double now,
                       std::optional<JobId> beneficiary);
  static Action enqueue(const JobSpec& spec, double now);
};

/// Read-only view of the cluster the policy decides against. Both lists are
/// sorted so the job served first comes first (see schedules_before);
/// `running` includes jobs with a rescale in flight.
struct SchedulerState {
  std::vector<const JobState*> running;
  std::vector<const JobState*> queued;
  int free_slots = 0;
};

/// Whether a scheduling action may touch this job at time `now`: never
/// placed yet, or at least `rescale_gap` seconds since its last action.
bool rescale_eligible(const JobState& job, double now, double rescale_gap);

/// Decides the fate of a newly submitted job.
///
/// In order of preference: create it immediately from free slots (capped at
/// its maximum, counting the launcher); otherwise shrink lower-priority
/// running jobs to make room, but only if a dry scan proves their combined
/// headroom can cover the job's minimum footprint; otherwise enqueue.
///
/// The scan walks running jobs from the lowest effective priority upward,
/// skips jobs inside their rescale gap, and stops at the first job with a
/// strictly higher raw priority than the newcomer. Returned shrinks carry
/// the new job as beneficiary; its creation is deferred until they finish.
std::vector<Action> on_submit(const SchedulerState& state, const JobSpec& job,
                              double now, const ClusterConfig& cluster,
                              const SchedulerConfig& scheduler);

/// Redistributes capacity after `freed` slots were released. Walks running
/// and queued jobs together from the highest effective priority downward,
/// expanding running jobs toward their maximum and creating queued jobs
/// whose minimum fits, until the pool (previously free slots plus `freed`)
/// is exhausted. Jobs inside their rescale gap are skipped; whatever is not
/// handed out stays free.
std::vector<Action> on_slots_freed(const SchedulerState& state, double now,
                                   int freed, const ClusterConfig& cluster,
                                   const SchedulerConfig& scheduler);

/// The spec transformation of apply_policy_variant: rigid-min pins
/// max_replicas to the minimum, rigid-max pins min_replicas to the maximum,
/// the other policies leave the spec alone.
JobSpec variant_spec(const JobSpec& spec, PolicyKind policy);

/// The config transformation of apply_policy_variant: moldable disables
/// rescaling by setting an infinite gap.
SchedulerConfig variant_config(const SchedulerConfig& scheduler);

/// How the four policies share one mechanism: each is a transformation of
/// the job spec and scheduler config, after which the elastic rules above
/// apply unchanged.
std::pair<JobSpec, SchedulerConfig> apply_policy_variant(
    const JobSpec& spec, const SchedulerConfig& scheduler);

}  // namespace esim
