// Acceptance gate: end-to-end checks of the simulator's contract, one
// pass/fail line per criterion. Returns nonzero if any criterion fails or
// overruns its time budget. Pass a criterion number to run a subset, e.g.
// `esim-acceptance 4 5`.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "esim/commands.hpp"
#include "esim/config.hpp"
#include "esim/engine.hpp"
#include "esim/metrics.hpp"
#include "support/trace_checker.hpp"

using namespace esim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void reject(const std::string& detail) {
  throw std::runtime_error(detail);
}

void expect(bool ok, const std::string& detail) {
  if (!ok) reject(detail);
}

bool close(double actual, double expected, double rel_tol) {
  double scale = std::max(1.0, std::abs(expected));
  return std::abs(actual - expected) <= rel_tol * scale;
}

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(12);
  out << value;
  return out.str();
}

// --- criterion 1: the hand-derived two-job trace ---------------------------

void golden_two_job_trace() {
  const double kTol = 1e-6;
  SimConfig config = load_config(ESIM_REPO_DIR "/configs/golden.json");
  Workload workload = generate(config.generator, 0, config.calibration);
  Trace trace =
      simulate(config.cluster, config.scheduler, workload, config.calibration);

  struct Expected {
    double time;
    RecordKind kind;
    JobId job;
    int from, to;
  };
  const double t1 = 550.0 / 3.0;  // second job's completion
  const std::vector<Expected> expected = {
      {0.0, RecordKind::Submitted, 0, 0, 0},
      {0.0, RecordKind::Created, 0, 0, 8},
      {50.0, RecordKind::Submitted, 1, 0, 0},
      {50.0, RecordKind::ShrinkStart, 0, 8, 2},
      {50.0, RecordKind::ShrinkDone, 0, 8, 2},
      {50.0, RecordKind::Created, 1, 0, 6},
      {t1, RecordKind::Completed, 1, 6, 0},
      {t1, RecordKind::ExpandStart, 0, 2, 8},
      {t1, RecordKind::ExpandDone, 0, 2, 8},
      {200.0, RecordKind::Completed, 0, 8, 0},
  };

  expect(trace.records.size() == expected.size(),
         "trace has " + std::to_string(trace.records.size()) +
             " records, expected " + std::to_string(expected.size()));
  for (size_t i = 0; i < expected.size(); ++i) {
    const TraceRecord& got = trace.records[i];
    const Expected& want = expected[i];
    std::string at = "record " + std::to_string(i);
    expect(got.kind == want.kind, at + ": wrong kind");
    expect(got.job == want.job, at + ": wrong job");
    expect(got.from == want.from && got.to == want.to, at + ": wrong sizes");
    expect(close(got.time, want.time, kTol),
           at + ": time " + fmt(got.time) + " != " + fmt(want.time));
  }

  MetricsReport report = compute_metrics(trace, config.cluster);
  expect(close(report.total_time, 200.0, kTol),
         "total_time " + fmt(report.total_time));
  expect(close(report.utilization, 1.0, kTol),
         "utilization " + fmt(report.utilization));
  expect(close(report.weighted_mean_response, 0.0, kTol),
         "weighted_mean_response " + fmt(report.weighted_mean_response));
  expect(close(report.weighted_mean_completion, 500.0 / 3.0, kTol),
         "weighted_mean_completion " + fmt(report.weighted_mean_completion));
}

// --- criterion 2: policy variants are transformations ----------------------

void variants_reduce_to_elastic() {
  SimConfig config = default_config();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Workload workload = generate(config.generator, seed, config.calibration);

    SchedulerConfig moldable = {PolicyKind::Moldable, config.scheduler.rescale_gap};
    SchedulerConfig frozen = {PolicyKind::Elastic, kInf};
    Trace a = simulate(config.cluster, moldable, workload, config.calibration);
    Trace b = simulate(config.cluster, frozen, workload, config.calibration);
    expect(a.records == b.records,
           "seed " + std::to_string(seed) +
               ": moldable and infinite-gap elastic traces differ");

    std::ostringstream csv_a, csv_b;
    write_trace_csv(csv_a, a);
    write_trace_csv(csv_b, b);
    expect(csv_a.str() == csv_b.str(),
           "seed " + std::to_string(seed) + ": serialized traces differ");

    for (PolicyKind rigid : {PolicyKind::RigidMin, PolicyKind::RigidMax}) {
      SchedulerConfig scheduler = {rigid, config.scheduler.rescale_gap};
      Trace trace =
          simulate(config.cluster, scheduler, workload, config.calibration);
      for (const TraceRecord& record : trace.records) {
        bool rescale = record.kind == RecordKind::ShrinkStart ||
                       record.kind == RecordKind::ShrinkDone ||
                       record.kind == RecordKind::ExpandStart ||
                       record.kind == RecordKind::ExpandDone;
        expect(!rescale, "seed " + std::to_string(seed) + ": " +
                             std::string(to_label(rigid)) +
                             " trace contains a rescale record");
      }
    }
  }
}

// --- criterion 3: trace invariants across the sweep grid -------------------

void invariants_across_grid() {
  const std::vector<double> submission_gaps = {0, 60, 120, 180, 240, 300};
  const std::vector<double> rescale_gaps = {0, 120, 300, 600, 1200, kInf};
  const std::vector<std::uint64_t> seeds = {1, 2, 3};

  std::vector<std::pair<double, double>> settings;  // (submission, rescale)
  for (double gap : submission_gaps) settings.push_back({gap, 180.0});
  for (double gap : rescale_gaps) settings.push_back({180.0, gap});

  int runs = 0;
  SimConfig base = default_config();
  for (const auto& [submission_gap, rescale_gap] : settings) {
    SimConfig config = base;
    config.generator.submission_gap = submission_gap;
    config.scheduler.rescale_gap = rescale_gap;
    for (PolicyKind policy : kAllPolicies) {
      SchedulerConfig scheduler = config.scheduler;
      scheduler.policy = policy;
      for (std::uint64_t seed : seeds) {
        Workload workload =
            generate(config.generator, seed, config.calibration);
        Trace trace =
            simulate(config.cluster, scheduler, workload, config.calibration);
        try {
          testing::check_trace(trace, config.calibration);
        } catch (const std::exception& err) {
          reject("submission_gap=" + fmt(submission_gap) +
                 " rescale_gap=" + fmt(rescale_gap) + " policy=" +
                 std::string(to_label(policy)) + " seed=" +
                 std::to_string(seed) + ": " + err.what());
        }
        Trace again =
            simulate(config.cluster, scheduler, workload, config.calibration);
        expect(trace.records == again.records,
               "repeat run diverged at seed " + std::to_string(seed));
        ++runs;
      }
    }
  }
  expect(runs >= 100, "grid only covered " + std::to_string(runs) + " runs");
}

// --- criteria 4 and 5: scheduler orderings on metric means -----------------

using MeansByPolicy = std::map<PolicyKind, SweepMeans>;

std::map<double, MeansByPolicy> collect(const std::vector<SweepRow>& rows) {
  std::map<double, MeansByPolicy> table;
  for (const SweepRow& row : rows) table[row.value][row.policy] = row.means;
  return table;
}

void submission_sweep_orderings() {
  SweepSpec spec{SweepVariable::SubmissionGap, {0, 60, 120, 180, 240, 300}};
  auto table = collect(sweep_means(default_config(), spec, 100, 1));

  for (const auto& [value, by_policy] : table) {
    const SweepMeans& rigid_min = by_policy.at(PolicyKind::RigidMin);
    const SweepMeans& rigid_max = by_policy.at(PolicyKind::RigidMax);
    const SweepMeans& moldable = by_policy.at(PolicyKind::Moldable);
    const SweepMeans& elastic = by_policy.at(PolicyKind::Elastic);
    std::string at = "submission gap " + fmt(value) + ": ";

    expect(elastic.utilization >= moldable.utilization,
           at + "elastic utilization " + fmt(elastic.utilization) +
               " below moldable " + fmt(moldable.utilization));

    const std::vector<std::pair<const SweepMeans*, const char*>> others = {
        {&rigid_max, "max_replicas"},
        {&moldable, "moldable"},
        {&elastic, "elastic"}};
    for (const auto& [other, label] : others) {
      expect(rigid_min.utilization <= other->utilization,
             at + "min_replicas utilization not the lowest (vs " +
                 std::string(label) + ")");
      expect(rigid_min.weighted_mean_response <= other->weighted_mean_response,
             at + "min_replicas response not the lowest (vs " +
                 std::string(label) + ")");
      expect(rigid_min.weighted_mean_completion >=
                 other->weighted_mean_completion,
             at + "min_replicas completion not the highest (vs " +
                 std::string(label) + ")");
    }
    for (const auto& [other, label] :
         std::vector<std::pair<const SweepMeans*, const char*>>{
             {&rigid_min, "min_replicas"},
             {&rigid_max, "max_replicas"},
             {&moldable, "moldable"}}) {
      expect(elastic.total_time <= other->total_time,
             at + "elastic total_time " + fmt(elastic.total_time) +
                 " above " + std::string(label) + " " +
                 fmt(other->total_time));
    }
  }
}

void rescale_sweep_monotone() {
  SimConfig config = default_config();
  config.generator.submission_gap = 180.0;
  SweepSpec spec{SweepVariable::RescaleGap, {0, 120, 300, 600, 1200, kInf}};
  auto table = collect(sweep_means(config, spec, 100, 1));

  double prev_util = 2.0, prev_total = -1.0, prev_value = -1.0;
  for (const auto& [value, by_policy] : table) {
    const SweepMeans& elastic = by_policy.at(PolicyKind::Elastic);
    std::string at = "rescale gap " + fmt(value) + ": ";
    expect(elastic.utilization <= prev_util,
           at + "elastic utilization rose from the gap-" + fmt(prev_value) +
               " value (" + fmt(prev_util) + " -> " +
               fmt(elastic.utilization) + ")");
    expect(elastic.total_time >= prev_total,
           at + "elastic total_time fell from the gap-" + fmt(prev_value) +
               " value (" + fmt(prev_total) + " -> " +
               fmt(elastic.total_time) + ")");
    prev_util = elastic.utilization;
    prev_total = elastic.total_time;
    prev_value = value;
  }

  const MeansByPolicy& frozen = table.at(kInf);
  const SweepMeans& elastic = frozen.at(PolicyKind::Elastic);
  const SweepMeans& moldable = frozen.at(PolicyKind::Moldable);
  auto same = [&](double a, double b, const char* what) {
    expect(std::abs(a - b) <= 1e-9, std::string("infinite gap: elastic ") +
                                        what + " " + fmt(a) +
                                        " differs from moldable " + fmt(b));
  };
  same(elastic.total_time, moldable.total_time, "total_time");
  same(elastic.utilization, moldable.utilization, "utilization");
  same(elastic.weighted_mean_response, moldable.weighted_mean_response,
       "weighted_mean_response");
  same(elastic.weighted_mean_completion, moldable.weighted_mean_completion,
       "weighted_mean_completion");
}

// --- criterion 6: the profile integrates to the utilization ---------------

void profile_integrates_to_utilization() {
  SimConfig base = default_config();
  int traces = 0;
  for (std::uint64_t seed = 1; seed <= 250; ++seed) {
    SimConfig config = base;
    config.generator.submission_gap = 60.0 * double(seed % 6);
    for (PolicyKind policy : kAllPolicies) {
      SchedulerConfig scheduler = config.scheduler;
      scheduler.policy = policy;
      Workload workload = generate(config.generator, seed, config.calibration);
      Trace trace =
          simulate(config.cluster, scheduler, workload, config.calibration);
      MetricsReport report = compute_metrics(trace, config.cluster);

      auto profile = utilization_profile(trace, config.cluster);
      expect(!profile.empty(), "empty profile");
      double area = 0.0;
      for (size_t i = 0; i + 1 < profile.size(); ++i)
        area += double(profile[i].occupied) *
                (profile[i + 1].time - profile[i].time);
      double span = profile.back().time - profile.front().time;
      double integral = area / (double(config.cluster.total_slots) * span);
      expect(std::abs(integral - report.utilization) <= 1e-9,
             "seed " + std::to_string(seed) + " policy " +
                 std::string(to_label(policy)) + ": integral " +
                 fmt(integral) + " vs utilization " +
                 fmt(report.utilization));
      ++traces;
    }
  }
  expect(traces == 1000, "covered " + std::to_string(traces) + " traces");
}

// --- harness ---------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "hand-derived two-job trace", 1.0, golden_two_job_trace},
      {2, "policy variants reduce to the elastic mechanism", 30.0,
       variants_reduce_to_elastic},
      {3, "trace invariants across the sweep grid", 120.0,
       invariants_across_grid},
      {4, "submission-gap sweep scheduler orderings", 300.0,
       submission_sweep_orderings},
      {5, "rescale-gap sweep monotonicity", 300.0, rescale_sweep_monotone},
      {6, "occupancy profile integrates to the utilization", 30.0,
       profile_integrates_to_utilization},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all_ok = true;
  for (const Criterion& criterion : criteria) {
    if (!selected.empty() && !selected.count(criterion.id)) continue;
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      criterion.run();
    } catch (const std::exception& err) {
      ok = false;
      detail = err.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (ok && elapsed > criterion.budget_seconds) {
      ok = false;
      detail = "over the " + fmt(criterion.budget_seconds) + "s budget";
    }
    std::ostringstream line;
    line.precision(2);
    line << (ok ? "PASS" : "FAIL") << "  criterion " << criterion.id << "  "
         << criterion.name << "  [" << std::fixed << elapsed << "s / "
         << criterion.budget_seconds << "s]";
    if (!ok) line << "  " << detail;
    std::cout << line.str() << std::endl;
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
