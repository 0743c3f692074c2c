#include "esim/policy.hpp"

#include <algorithm>
#include <limits>

namespace esim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw SimulationError(what);
}

}  // namespace

Action Action::create(const JobSpec& spec, int replicas, double now) {
  require(replicas >= spec.min_replicas && replicas <= spec.max_replicas,
          "Action::create: replicas outside the job's bounds");
  return {Kind::Create, spec.id, replicas, std::nullopt, now};
}

Action Action::expand(const JobState& job, int replicas, double now) {
  require(replicas > job.replicas, "Action::expand: target does not grow the job");
  require(replicas <= job.spec.max_replicas,
          "Action::expand: target above the job's maximum");
  return {Kind::Expand, job.spec.id, replicas, std::nullopt, now};
}

Action Action::shrink(const JobState& job, int replicas, double now,
                      std::optional<JobId> beneficiary) {
  require(replicas < job.replicas, "Action::shrink: target does not shrink the job");
  require(replicas >= job.spec.min_replicas,
          "Action::shrink: target below the job's minimum");
  return {Kind::Shrink, job.spec.id, replicas, beneficiary, now};
}

Action Action::enqueue(const JobSpec& spec, double now) {
  return {Kind::Enqueue, spec.id, 0, std::nullopt, now};
}

bool rescale_eligible(const JobState& job, double now, double rescale_gap) {
  return !job.last_action.has_value() || now - *job.last_action >= rescale_gap;
}

std::vector<Action> on_submit(const SchedulerState& state, const JobSpec& job,
                              double now, const ClusterConfig& cluster,
                              const SchedulerConfig& scheduler) {
  const int launcher = cluster.launcher_slots;

  int immediate = std::min(state.free_slots - launcher, job.max_replicas);
  if (immediate >= job.min_replicas)
    return {Action::create(job, immediate, now)};

  // Walk running jobs from the lowest effective priority upward. A donor
  // must be past its rescale gap and not mid-rescale; a job with strictly
  // higher raw priority than the newcomer shields itself and everything
  // above it.
  auto donor_scan = [&](auto&& visit) {
    for (auto it = state.running.rbegin(); it != state.running.rend(); ++it) {
      const JobState& candidate = **it;
      if (candidate.phase != Phase::Running) continue;
      if (!rescale_eligible(candidate, now, scheduler.rescale_gap)) continue;
      if (candidate.spec.priority > job.priority) break;
      if (!visit(candidate)) break;
    }
  };

  // Dry pass: admit only if shrinking every willing donor to its minimum
  // would cover the newcomer's minimum footprint.
  int num_to_free = job.min_replicas + launcher - state.free_slots;
  donor_scan([&](const JobState& candidate) {
    num_to_free -= std::max(0, candidate.replicas - candidate.spec.min_replicas);
    return num_to_free > 0;
  });
  if (num_to_free > 0) return {Action::enqueue(job, now)};

  // Real pass: take slots up to the newcomer's maximum footprint, shrinking
  // each donor no further than its minimum.
  std::vector<Action> shrinks;
  int max_to_free = job.max_replicas + launcher - state.free_slots;
  donor_scan([&](const JobState& candidate) {
    if (candidate.replicas > candidate.spec.min_replicas) {
      int target = std::max(candidate.spec.min_replicas,
                            candidate.replicas - max_to_free);
      shrinks.push_back(Action::shrink(candidate, target, now, job.id));
      max_to_free -= candidate.replicas - target;
    }
    return max_to_free > 0;
  });
  return shrinks;
}

std::vector<Action> on_slots_freed(const SchedulerState& state, double now,
                                   int freed, const ClusterConfig& cluster,
                                   const SchedulerConfig& scheduler) {
  const int launcher = cluster.launcher_slots;

  std::vector<const JobState*> candidates;
  candidates.reserve(state.running.size() + state.queued.size());
  std::merge(state.running.begin(), state.running.end(), state.queued.begin(),
             state.queued.end(), std::back_inserter(candidates),
             [](const JobState* a, const JobState* b) {
               return schedules_before(a->spec, b->spec);
             });

  std::vector<Action> actions;
  int available = state.free_slots + freed;
  for (const JobState* candidate : candidates) {
    if (available <= 0) break;
    if (!rescale_eligible(*candidate, now, scheduler.rescale_gap)) continue;
    if (candidate->phase == Phase::Queued) {
      int replicas = std::min(available - launcher, candidate->spec.max_replicas);
      if (replicas < candidate->spec.min_replicas) continue;
      actions.push_back(Action::create(candidate->spec, replicas, now));
      available -= replicas + launcher;
    } else if (candidate->phase == Phase::Running &&
               candidate->replicas < candidate->spec.max_replicas) {
      int grow = std::min(available, candidate->spec.max_replicas - candidate->replicas);
      actions.push_back(Action::expand(*candidate, candidate->replicas + grow, now));
      available -= grow;
    }
  }
  return actions;
}

JobSpec variant_spec(const JobSpec& spec, PolicyKind policy) {
  JobSpec out = spec;
  switch (policy) {
    case PolicyKind::RigidMin:
      out.max_replicas = out.min_replicas;
      break;
    case PolicyKind::RigidMax:
      out.min_replicas = out.max_replicas;
      break;
    case PolicyKind::Moldable:
    case PolicyKind::Elastic:
      break;
  }
  return out;
}

SchedulerConfig variant_config(const SchedulerConfig& scheduler) {
  SchedulerConfig out = scheduler;
  if (scheduler.policy == PolicyKind::Moldable)
    out.rescale_gap = std::numeric_limits<double>::infinity();
  return out;
}

std::pair<JobSpec, SchedulerConfig> apply_policy_variant(
    const JobSpec& spec, const SchedulerConfig& scheduler) {
  return {variant_spec(spec, scheduler.policy), variant_config(scheduler)};
}

}  // namespace esim
