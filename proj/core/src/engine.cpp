#include "esim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "text_util.hpp"

namespace esim {

std::string_view to_label(RecordKind kind) {
  switch (kind) {
    case RecordKind::Submitted:
      return "Submitted";
    case RecordKind::Enqueued:
      return "Enqueued";
    case RecordKind::Created:
      return "Created";
    case RecordKind::ShrinkStart:
      return "ShrinkStart";
    case RecordKind::ShrinkDone:
      return "ShrinkDone";
    case RecordKind::ExpandStart:
      return "ExpandStart";
    case RecordKind::ExpandDone:
      return "ExpandDone";
    case RecordKind::Completed:
      return "Completed";
  }
  throw SimulationError("unknown record kind");
}

namespace {

// Simultaneous events drain in this order so that freed slots are
// redistributed before new arrivals claim them, and arrivals are seen
// before rescales settle.
enum class EvKind : int { Complete = 0, Submit = 1, RescaleDone = 2 };

struct Event {
  double time = 0.0;
  EvKind kind = EvKind::Submit;
  std::uint64_t seq = 0;
  JobId job = 0;
  // Completions are invalidated by bumping the job's epoch instead of
  // removing them from the queue.
  std::uint64_t epoch = 0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return int(a.kind) > int(b.kind);
    return a.seq > b.seq;
  }
};

struct JobRt {
  JobState st;
  const JobClass* cls = nullptr;
  std::uint64_t epoch = 0;
  double last_progress = 0.0;
};

struct InFlight {
  int from = 0;
  int to = 0;
  std::optional<JobId> beneficiary;
};

class Simulation {
public:
  Simulation(const ClusterConfig& cluster, const SchedulerConfig& scheduler,
             const Workload& workload, const Calibration& calibration)
      : cluster_(cluster),
        scheduler_(variant_config(scheduler)),
        workload_(workload),
        calibration_(calibration),
        free_slots_(cluster.total_slots) {
    trace_.cluster = cluster_;
    trace_.scheduler = scheduler_;
    trace_.policy_label = std::string(to_label(scheduler.policy));
    trace_.workload_seed = workload.seed;
    trace_.workload_algorithm = workload.algorithm;
  }

  Trace run() {
    validate();
    for (const JobSpec& spec : workload_.jobs)
      push(spec.submit_time, EvKind::Submit, spec.id, 0);
    while (!events_.empty()) {
      Event ev = events_.top();
      events_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case EvKind::Submit:
          handle_submit(ev.job);
          break;
        case EvKind::Complete:
          handle_complete(ev.job, ev.epoch);
          break;
        case EvKind::RescaleDone:
          handle_rescale_done(ev.job);
          break;
      }
      check_conservation();
    }
    std::vector<JobId> unfinished;
    for (const auto& [id, rt] : jobs_)
      if (rt.st.phase != Phase::Finished) unfinished.push_back(id);
    if (!unfinished.empty() || jobs_.size() != workload_.jobs.size()) {
      std::ostringstream msg;
      msg << "simulation stalled with unfinished jobs:";
      for (JobId id : unfinished) msg << " " << id;
      throw SimulationError(msg.str());
    }
    return std::move(trace_);
  }

private:
  void validate() const {
    std::unordered_set<JobId> seen;
    for (const JobSpec& spec : workload_.jobs) {
      std::ostringstream where;
      where << "job " << spec.id;
      if (!seen.insert(spec.id).second)
        throw ConfigError(where.str() + ": duplicate job id");
      if (spec.min_replicas < 1)
        throw ConfigError(where.str() + ": min_replicas must be >= 1");
      if (spec.max_replicas < spec.min_replicas)
        throw ConfigError(where.str() + ": max_replicas must be >= min_replicas");
      if (spec.submit_time < 0.0)
        throw ConfigError(where.str() + ": submit_time must be >= 0");
      calibration_.at(spec.class_id);
      JobSpec effective = variant_spec(spec, scheduler_.policy);
      if (effective.min_replicas + cluster_.launcher_slots > cluster_.total_slots)
        throw ConfigError(
            where.str() +
            ": minimum footprint exceeds cluster capacity under policy " +
            std::string(to_label(scheduler_.policy)));
    }
  }

  void push(double time, EvKind kind, JobId job, std::uint64_t epoch) {
    events_.push({time, kind, next_seq_++, job, epoch});
  }

  void rec(RecordKind kind, JobId job, int from = 0, int to = 0,
           const OverheadBreakdown& overhead = {}) {
    trace_.records.push_back({now_, kind, job, from, to, overhead});
  }

  SchedulerState make_state() const {
    return {running_, queued_, free_slots_};
  }

  static bool ptr_order(const JobState* a, const JobState* b) {
    return schedules_before(a->spec, b->spec);
  }

  void sorted_insert(std::vector<const JobState*>& list, const JobState* job) {
    list.insert(std::upper_bound(list.begin(), list.end(), job, ptr_order), job);
  }

  JobRt& rt(JobId id) { return jobs_.at(id); }

  double current_step_time(const JobRt& job) const {
    return step_time(job.cls->perf, job.st.replicas);
  }

  void accrue(JobRt& job) {
    if (job.st.phase == Phase::Running && now_ > job.last_progress) {
      job.st.work_done += (now_ - job.last_progress) / current_step_time(job);
      job.last_progress = now_;
    }
  }

  void schedule_completion(JobRt& job) {
    double remaining = std::max(0.0, double(job.cls->work_units) - job.st.work_done);
    push(now_ + remaining * current_step_time(job), EvKind::Complete,
         job.st.spec.id, job.epoch);
  }

  void do_create(JobRt& job, int replicas) {
    free_slots_ -= replicas + cluster_.launcher_slots;
    if (free_slots_ < 0) throw SimulationError("free slot count went negative");
    job.st.phase = Phase::Running;
    job.st.replicas = replicas;
    job.st.last_action = now_;
    job.st.start_time = now_;
    job.last_progress = now_;
    sorted_insert(running_, &job.st);
    rec(RecordKind::Created, job.st.spec.id, 0, replicas);
    schedule_completion(job);
  }

  void do_enqueue(JobRt& job) {
    sorted_insert(queued_, &job.st);
    rec(RecordKind::Enqueued, job.st.spec.id);
  }

  void begin_rescale(JobRt& job, int from, int to,
                     std::optional<JobId> beneficiary) {
    accrue(job);
    ++job.epoch;  // cancel the scheduled completion
    OverheadBreakdown overhead = rescale_overhead(*job.cls, from, to);
    job.st.phase = Phase::Rescaling;
    job.st.pending_target = to;
    job.st.rescale_deadline = now_ + overhead.total;
    job.st.last_action = now_;
    in_flight_[job.st.spec.id] = {from, to, beneficiary};
    rec(to < from ? RecordKind::ShrinkStart : RecordKind::ExpandStart,
        job.st.spec.id, from, to, overhead);
    push(*job.st.rescale_deadline, EvKind::RescaleDone, job.st.spec.id, 0);
  }

  void do_shrink(JobRt& job, int target, std::optional<JobId> beneficiary) {
    if (beneficiary) pending_create_[*beneficiary].insert(job.st.spec.id);
    // Slots stay occupied until the shrink finishes.
    begin_rescale(job, job.st.replicas, target, beneficiary);
  }

  void do_expand(JobRt& job, int target) {
    accrue(job);  // progress up to now ran at the old size
    int from = job.st.replicas;
    free_slots_ -= target - from;
    if (free_slots_ < 0) throw SimulationError("free slot count went negative");
    job.st.replicas = target;  // occupies the new size immediately
    begin_rescale(job, from, target, std::nullopt);
  }

  void remove_from(std::vector<const JobState*>& list, const JobState* job) {
    list.erase(std::find(list.begin(), list.end(), job));
  }

  void apply(const std::vector<Action>& actions) {
    for (const Action& action : actions) {
      JobRt& target = rt(action.job);
      switch (action.kind) {
        case Action::Kind::Create:
          if (target.st.phase == Phase::Queued &&
              std::find(queued_.begin(), queued_.end(), &target.st) != queued_.end())
            remove_from(queued_, &target.st);
          do_create(target, action.replicas);
          break;
        case Action::Kind::Enqueue:
          do_enqueue(target);
          break;
        case Action::Kind::Shrink:
          do_shrink(target, action.replicas, action.beneficiary);
          break;
        case Action::Kind::Expand:
          do_expand(target, action.replicas);
          break;
      }
    }
  }

  void handle_submit(JobId id) {
    const JobSpec* raw = nullptr;
    for (const JobSpec& spec : workload_.jobs)
      if (spec.id == id) raw = &spec;
    JobRt job;
    job.st.spec = variant_spec(*raw, scheduler_.policy);
    job.cls = &calibration_.at(raw->class_id);
    JobRt& stored = jobs_.emplace(id, std::move(job)).first->second;
    trace_.jobs.emplace(id, stored.st.spec);
    rec(RecordKind::Submitted, id);
    apply(on_submit(make_state(), stored.st.spec, now_, cluster_, scheduler_));
  }

  void handle_complete(JobId id, std::uint64_t epoch) {
    JobRt& job = rt(id);
    if (epoch != job.epoch) return;  // superseded by a rescale
    accrue(job);
    double work = double(job.cls->work_units);
    if (std::abs(job.st.work_done - work) > 1e-6 * work)
      throw SimulationError("job finished with wrong work total");
    job.st.phase = Phase::Finished;
    job.st.end_time = now_;
    remove_from(running_, &job.st);
    int freed = job.st.replicas + cluster_.launcher_slots;
    rec(RecordKind::Completed, id, job.st.replicas, 0);
    // The policy sees the pool before the freed slots are credited and
    // decides how to spread free + freed over survivors and the queue.
    std::vector<Action> actions =
        on_slots_freed(make_state(), now_, freed, cluster_, scheduler_);
    free_slots_ += freed;
    apply(actions);
  }

  void handle_rescale_done(JobId id) {
    JobRt& job = rt(id);
    auto it = in_flight_.find(id);
    if (it == in_flight_.end())
      throw SimulationError("rescale finished for a job with none in flight");
    InFlight fl = it->second;
    in_flight_.erase(it);
    if (fl.to < fl.from) {
      job.st.replicas = fl.to;
      free_slots_ += fl.from - fl.to;
      rec(RecordKind::ShrinkDone, id, fl.from, fl.to);
    } else {
      rec(RecordKind::ExpandDone, id, fl.from, fl.to);
    }
    job.st.phase = Phase::Running;
    job.st.pending_target.reset();
    job.st.rescale_deadline.reset();
    job.last_progress = now_;
    schedule_completion(job);
    if (fl.beneficiary) settle_pending(*fl.beneficiary, id);
  }

  // Deferred admission: the beneficiary is created once all shrinks taken
  // out on its behalf have finished. If meanwhile other events consumed the
  // free pool below its minimum, it falls back to the queue; the donors are
  // still running, so their completions will pick it up again.
  void settle_pending(JobId beneficiary, JobId donor) {
    auto it = pending_create_.find(beneficiary);
    if (it == pending_create_.end()) return;
    it->second.erase(donor);
    if (!it->second.empty()) return;
    pending_create_.erase(it);
    JobRt& job = rt(beneficiary);
    int replicas =
        std::min(free_slots_ - cluster_.launcher_slots, job.st.spec.max_replicas);
    if (replicas >= job.st.spec.min_replicas)
      do_create(job, replicas);
    else
      do_enqueue(job);
  }

  void check_conservation() const {
    int occupied = 0;
    for (const auto& [id, job] : jobs_)
      if (job.st.phase == Phase::Running || job.st.phase == Phase::Rescaling)
        occupied += job.st.replicas + cluster_.launcher_slots;
    if (occupied + free_slots_ != cluster_.total_slots)
      throw SimulationError("slot accounting drifted");
  }

  ClusterConfig cluster_;
  SchedulerConfig scheduler_;
  const Workload& workload_;
  const Calibration& calibration_;
  Trace trace_;
  std::map<JobId, JobRt> jobs_;
  std::vector<const JobState*> running_;
  std::vector<const JobState*> queued_;
  std::unordered_map<JobId, InFlight> in_flight_;
  std::map<JobId, std::set<JobId>> pending_create_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
  std::uint64_t next_seq_ = 0;
  int free_slots_ = 0;
  double now_ = 0.0;
};

}  // namespace

Trace simulate(const ClusterConfig& cluster, const SchedulerConfig& scheduler,
               const Workload& workload, const Calibration& calibration) {
  return Simulation(cluster, scheduler, workload, calibration).run();
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  using detail::format_double;
  out << "time,event,job_id,replicas_from,replicas_to,overhead_total\n";
  for (const TraceRecord& record : trace.records) {
    out << format_double(record.time) << ',' << to_label(record.kind) << ','
        << record.job << ',' << record.from << ',' << record.to << ','
        << format_double(record.overhead.total) << '\n';
  }
}

namespace {

nlohmann::json overhead_json(const OverheadBreakdown& ov) {
  return {{"checkpoint", ov.checkpoint},
          {"restart", ov.restart},
          {"restore", ov.restore},
          {"load_balance", ov.load_balance},
          {"total", ov.total}};
}

nlohmann::json gap_json(double gap) {
  if (std::isinf(gap)) return "inf";
  return gap;
}

}  // namespace

void write_trace_json(std::ostream& out, const Trace& trace) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["cluster"] = {
      {"total_slots", trace.cluster.total_slots},
      {"launcher_slots", trace.cluster.launcher_slots},
      {"count_launcher_in_utilization", trace.cluster.count_launcher_in_utilization}};
  doc["scheduler"] = {{"policy", trace.policy_label},
                      {"rescale_gap", gap_json(trace.scheduler.rescale_gap)}};
  doc["workload"] = {{"seed", trace.workload_seed},
                     {"algorithm", trace.workload_algorithm}};
  nlohmann::json jobs = nlohmann::json::array();
  for (const auto& [id, spec] : trace.jobs)
    jobs.push_back({{"id", id},
                    {"class", spec.class_id},
                    {"min_replicas", spec.min_replicas},
                    {"max_replicas", spec.max_replicas},
                    {"priority", spec.priority},
                    {"submit_time", spec.submit_time}});
  doc["jobs"] = std::move(jobs);
  nlohmann::json records = nlohmann::json::array();
  for (const TraceRecord& record : trace.records) {
    nlohmann::json row = {{"time", record.time},
                          {"event", to_label(record.kind)},
                          {"job", record.job}};
    switch (record.kind) {
      case RecordKind::Created:
        row["replicas"] = record.to;
        break;
      case RecordKind::Completed:
        row["replicas"] = record.from;
        break;
      case RecordKind::ShrinkStart:
      case RecordKind::ExpandStart:
        row["from"] = record.from;
        row["to"] = record.to;
        row["overhead"] = overhead_json(record.overhead);
        break;
      case RecordKind::ShrinkDone:
      case RecordKind::ExpandDone:
        row["from"] = record.from;
        row["to"] = record.to;
        break;
      case RecordKind::Submitted:
      case RecordKind::Enqueued:
        break;
    }
    records.push_back(std::move(row));
  }
  doc["records"] = std::move(records);
  out << doc.dump(2) << '\n';
}

namespace {

template <typename WriteFn>
void save_with(const std::string& path, WriteFn&& write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

void save_trace_csv(const std::string& path, const Trace& trace) {
  save_with(path, [&](std::ostream& out) { write_trace_csv(out, trace); });
}

void save_trace_json(const std::string& path, const Trace& trace) {
  save_with(path, [&](std::ostream& out) { write_trace_json(out, trace); });
}

}  // namespace esim
