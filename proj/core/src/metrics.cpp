#include "esim/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "text_util.hpp"

namespace esim {

namespace {

struct JobTimes {
  std::optional<double> submitted;
  std::optional<double> created;
  std::optional<double> completed;
};

int job_slots(const TraceRecord& record, const ClusterConfig& cluster) {
  int launcher = cluster.count_launcher_in_utilization ? cluster.launcher_slots : 0;
  switch (record.kind) {
    case RecordKind::Created:
    case RecordKind::ShrinkDone:
    case RecordKind::ExpandStart:
      return record.to + launcher;
    default:
      return 0;
  }
}

bool occupancy_change(RecordKind kind) {
  // ShrinkStart and ExpandDone leave occupancy alone: a shrinking job holds
  // its old slots until the shrink finishes, an expanding one holds the new
  // count from the moment the expansion starts.
  switch (kind) {
    case RecordKind::Created:
    case RecordKind::ShrinkDone:
    case RecordKind::ExpandStart:
    case RecordKind::Completed:
      return true;
    default:
      return false;
  }
}

}  // namespace

MetricsReport compute_metrics(const Trace& trace, const ClusterConfig& cluster,
                              WeightMode weights) {
  std::map<JobId, JobTimes> times;
  double last_time = 0.0;
  for (const TraceRecord& record : trace.records) {
    if (record.time < last_time)
      throw ConfigError("trace times are not nondecreasing");
    last_time = record.time;
    JobTimes& t = times[record.job];
    switch (record.kind) {
      case RecordKind::Submitted:
        t.submitted = record.time;
        break;
      case RecordKind::Created:
        if (!t.created) t.created = record.time;
        break;
      case RecordKind::Completed:
        t.completed = record.time;
        break;
      default:
        break;
    }
  }

  std::vector<JobId> unfinished;
  for (const auto& [id, t] : times)
    if (t.submitted && !t.completed) unfinished.push_back(id);
  if (!unfinished.empty()) {
    std::ostringstream msg;
    msg << "metrics need a finished trace; unfinished jobs:";
    for (JobId id : unfinished) msg << " " << id;
    throw ConfigError(msg.str());
  }

  MetricsReport report;
  if (times.empty()) return report;

  double first_created = 0.0, last_completed = 0.0;
  bool first = true;
  double weight_sum = 0.0, response_sum = 0.0, completion_sum = 0.0;
  for (const auto& [id, t] : times) {
    if (!t.submitted || !t.created)
      throw ConfigError("trace is missing lifecycle records for a job");
    PerJobMetrics job;
    job.id = id;
    auto spec = trace.jobs.find(id);
    job.priority = spec != trace.jobs.end() ? spec->second.priority : 1;
    job.response = *t.created - *t.submitted;
    job.completion = *t.completed - *t.submitted;
    double w = weights == WeightMode::Priority ? double(job.priority) : 1.0;
    if (w <= 0.0) throw ConfigError("job priorities must be positive to act as weights");
    weight_sum += w;
    response_sum += w * job.response;
    completion_sum += w * job.completion;
    report.per_job.push_back(job);
    if (first || *t.created < first_created) first_created = *t.created;
    if (first || *t.completed > last_completed) last_completed = *t.completed;
    first = false;
  }

  report.total_time = last_completed - first_created;
  report.weighted_mean_response = response_sum / weight_sum;
  report.weighted_mean_completion = completion_sum / weight_sum;

  double area = 0.0;
  int occupied = 0;
  double prev = trace.records.empty() ? 0.0 : trace.records.front().time;
  std::map<JobId, int> held;
  for (const TraceRecord& record : trace.records) {
    area += double(occupied) * (record.time - prev);
    prev = record.time;
    if (!occupancy_change(record.kind)) continue;
    int before = held.count(record.job) ? held[record.job] : 0;
    int after = record.kind == RecordKind::Completed ? 0 : job_slots(record, cluster);
    occupied += after - before;
    if (after == 0)
      held.erase(record.job);
    else
      held[record.job] = after;
    if (occupied < 0 || occupied > cluster.total_slots)
      throw ConfigError("trace occupancy leaves [0, total_slots]");
  }
  if (report.total_time > 0.0)
    report.utilization = area / (double(cluster.total_slots) * report.total_time);
  return report;
}

std::vector<ProfilePoint> utilization_profile(const Trace& trace,
                                              const ClusterConfig& cluster) {
  std::vector<ProfilePoint> profile;
  std::map<JobId, int> held;
  int occupied = 0;
  size_t i = 0;
  const auto& records = trace.records;
  while (i < records.size()) {
    double t = records[i].time;
    bool changed = false;
    // Fold all records at one instant into a single step.
    for (; i < records.size() && records[i].time == t; ++i) {
      const TraceRecord& record = records[i];
      if (!occupancy_change(record.kind)) continue;
      changed = true;
      int before = held.count(record.job) ? held[record.job] : 0;
      int after = record.kind == RecordKind::Completed ? 0 : job_slots(record, cluster);
      occupied += after - before;
      if (after == 0)
        held.erase(record.job);
      else
        held[record.job] = after;
    }
    if (!changed) continue;
    ProfilePoint point;
    point.time = t;
    point.occupied = occupied;
    point.breakdown.assign(held.begin(), held.end());
    profile.push_back(std::move(point));
  }
  return profile;
}

void write_metrics_json(std::ostream& out, const std::string& label,
                        const MetricsReport& report) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["scheduler"] = label;
  doc["total_time"] = report.total_time;
  doc["utilization"] = report.utilization;
  doc["weighted_mean_response"] = report.weighted_mean_response;
  doc["weighted_mean_completion"] = report.weighted_mean_completion;
  nlohmann::json per_job = nlohmann::json::array();
  for (const PerJobMetrics& job : report.per_job)
    per_job.push_back({{"id", job.id},
                       {"priority", job.priority},
                       {"response", job.response},
                       {"completion", job.completion}});
  doc["per_job"] = std::move(per_job);
  out << doc.dump(2) << '\n';
}

void write_metrics_csv(
    std::ostream& out,
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  using detail::format_double;
  out << "scheduler,total_time,utilization,weighted_mean_response,"
         "weighted_mean_completion\n";
  for (const auto& [label, report] : rows) {
    out << label << ',' << format_double(report.total_time) << ','
        << format_double(report.utilization) << ','
        << format_double(report.weighted_mean_response) << ','
        << format_double(report.weighted_mean_completion) << '\n';
  }
}

void write_profile_csv(std::ostream& out,
                       const std::vector<ProfilePoint>& profile) {
  using detail::format_double;
  out << "time,occupied,job_id,job_slots\n";
  for (const ProfilePoint& point : profile) {
    if (point.breakdown.empty()) {
      out << format_double(point.time) << ',' << point.occupied << ",,\n";
      continue;
    }
    for (const auto& [job, slots] : point.breakdown)
      out << format_double(point.time) << ',' << point.occupied << ',' << job
          << ',' << slots << '\n';
  }
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

void save_metrics_json(const std::string& path, const std::string& label,
                       const MetricsReport& report) {
  save_with(path, [&](std::ostream& out) { write_metrics_json(out, label, report); });
}

void save_metrics_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  save_with(path, [&](std::ostream& out) { write_metrics_csv(out, rows); });
}

void save_profile_csv(const std::string& path,
                      const std::vector<ProfilePoint>& profile) {
  save_with(path, [&](std::ostream& out) { write_profile_csv(out, profile); });
}

}  // namespace esim
