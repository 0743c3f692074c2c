#include <cmath>
#include <vector>

#include "doctest.h"
#include "esim/config.hpp"
#include "esim/metrics.hpp"

using namespace esim;

namespace {

// A hand-built trace on an eight-slot cluster: job 0 runs [0, 100] at four
// replicas, job 1 runs [20, 60] at two. Every metric is checkable on paper.
Trace handmade_trace() {
  Trace trace;
  trace.cluster = {8, 0, true};
  trace.scheduler = {PolicyKind::Elastic, 180.0};
  trace.policy_label = "elastic";

  JobSpec a;
  a.id = 0;
  a.class_id = "x";
  a.min_replicas = 2;
  a.max_replicas = 4;
  a.priority = 1;
  a.submit_time = 0.0;
  JobSpec b = a;
  b.id = 1;
  b.min_replicas = 2;
  b.max_replicas = 2;
  b.priority = 3;
  b.submit_time = 10.0;
  trace.jobs = {{0, a}, {1, b}};

  trace.records = {
      {0.0, RecordKind::Submitted, 0, 0, 0, {}},
      {0.0, RecordKind::Created, 0, 0, 4, {}},
      {10.0, RecordKind::Submitted, 1, 0, 0, {}},
      {20.0, RecordKind::Created, 1, 0, 2, {}},
      {60.0, RecordKind::Completed, 1, 2, 0, {}},
      {100.0, RecordKind::Completed, 0, 4, 0, {}},
  };
  return trace;
}

double integrate(const std::vector<ProfilePoint>& profile) {
  double area = 0.0;
  for (size_t i = 0; i + 1 < profile.size(); ++i)
    area += double(profile[i].occupied) *
            (profile[i + 1].time - profile[i].time);
  return area;
}

}  // namespace

TEST_CASE("metrics of a hand-built trace") {
  Trace trace = handmade_trace();
  MetricsReport report = compute_metrics(trace, trace.cluster);

  CHECK(report.total_time == doctest::Approx(100.0));
  // Slot-seconds: 4*100 + 2*40 = 480 of 800 possible.
  CHECK(report.utilization == doctest::Approx(0.6));

  REQUIRE(report.per_job.size() == 2);
  CHECK(report.per_job[0].id == 0);
  CHECK(report.per_job[0].response == doctest::Approx(0.0));
  CHECK(report.per_job[0].completion == doctest::Approx(100.0));
  CHECK(report.per_job[1].id == 1);
  CHECK(report.per_job[1].response == doctest::Approx(10.0));
  CHECK(report.per_job[1].completion == doctest::Approx(50.0));

  // Priority weights 1 and 3.
  CHECK(report.weighted_mean_response == doctest::Approx(7.5));
  CHECK(report.weighted_mean_completion == doctest::Approx(62.5));

  MetricsReport uniform =
      compute_metrics(trace, trace.cluster, WeightMode::Uniform);
  CHECK(uniform.weighted_mean_response == doctest::Approx(5.0));
  CHECK(uniform.weighted_mean_completion == doctest::Approx(75.0));
}

TEST_CASE("equal priorities make the weighted and uniform means agree") {
  Trace trace = handmade_trace();
  trace.jobs.at(1).priority = 1;
  MetricsReport weighted = compute_metrics(trace, trace.cluster);
  MetricsReport uniform =
      compute_metrics(trace, trace.cluster, WeightMode::Uniform);
  CHECK(weighted.weighted_mean_response ==
        doctest::Approx(uniform.weighted_mean_response));
  CHECK(weighted.weighted_mean_completion ==
        doctest::Approx(uniform.weighted_mean_completion));
}

TEST_CASE("the occupancy profile steps at every change and integrates to the "
          "utilization") {
  Trace trace = handmade_trace();
  auto profile = utilization_profile(trace, trace.cluster);

  REQUIRE(profile.size() == 4);
  CHECK(profile[0].time == doctest::Approx(0.0));
  CHECK(profile[0].occupied == 4);
  CHECK(profile[1].time == doctest::Approx(20.0));
  CHECK(profile[1].occupied == 6);
  REQUIRE(profile[1].breakdown.size() == 2);
  const std::pair<JobId, int> job0_share{0, 4};
  const std::pair<JobId, int> job1_share{1, 2};
  CHECK(profile[1].breakdown[0] == job0_share);
  CHECK(profile[1].breakdown[1] == job1_share);
  CHECK(profile[2].time == doctest::Approx(60.0));
  CHECK(profile[2].occupied == 4);
  CHECK(profile[3].time == doctest::Approx(100.0));
  CHECK(profile[3].occupied == 0);
  CHECK(profile[3].breakdown.empty());

  MetricsReport report = compute_metrics(trace, trace.cluster);
  double span = profile.back().time - profile.front().time;
  double integral =
      integrate(profile) / (double(trace.cluster.total_slots) * span);
  CHECK(std::abs(integral - report.utilization) <= 1e-9);
}

TEST_CASE("profile integration matches metrics on simulated traces") {
  SimConfig config = default_config();
  for (std::uint64_t seed : {4, 5}) {
    Workload workload = generate(config.generator, seed, config.calibration);
    Trace trace = simulate(config.cluster, config.scheduler, workload,
                           config.calibration);
    MetricsReport report = compute_metrics(trace, config.cluster);
    auto profile = utilization_profile(trace, config.cluster);
    double span = profile.back().time - profile.front().time;
    double integral =
        integrate(profile) / (double(config.cluster.total_slots) * span);
    CHECK(std::abs(integral - report.utilization) <= 1e-9);
  }
}

TEST_CASE("metrics reject unfinished and malformed traces") {
  Trace trace = handmade_trace();
  trace.records.pop_back();  // job 0 never completes
  CHECK_THROWS_WITH_AS(compute_metrics(trace, trace.cluster),
                       doctest::Contains("0"), ConfigError);

  Trace backwards = handmade_trace();
  std::swap(backwards.records[3], backwards.records[4]);
  CHECK_THROWS_AS(compute_metrics(backwards, backwards.cluster), ConfigError);

  Trace bad_weight = handmade_trace();
  bad_weight.jobs.at(0).priority = 0;
  CHECK_THROWS_AS(compute_metrics(bad_weight, bad_weight.cluster), ConfigError);
  CHECK_NOTHROW(
      compute_metrics(bad_weight, bad_weight.cluster, WeightMode::Uniform));
}
