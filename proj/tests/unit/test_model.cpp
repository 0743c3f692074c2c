#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "esim/types.hpp"

using namespace esim;

TEST_CASE("policy labels round-trip") {
  for (PolicyKind kind : {PolicyKind::RigidMin, PolicyKind::RigidMax,
                          PolicyKind::Moldable, PolicyKind::Elastic}) {
    auto parsed = parse_policy(to_label(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK(to_label(PolicyKind::RigidMin) == "min_replicas");
  CHECK(to_label(PolicyKind::RigidMax) == "max_replicas");
  CHECK(to_label(PolicyKind::Moldable) == "moldable");
  CHECK(to_label(PolicyKind::Elastic) == "elastic");
}

TEST_CASE("policy parser accepts short aliases and rejects junk") {
  CHECK(parse_policy("min") == PolicyKind::RigidMin);
  CHECK(parse_policy("max") == PolicyKind::RigidMax);
  CHECK_FALSE(parse_policy("rigid").has_value());
  CHECK_FALSE(parse_policy("").has_value());
  CHECK_FALSE(parse_policy("Elastic").has_value());
}

namespace {

JobSpec spec(JobId id, int priority, double submit) {
  JobSpec s;
  s.id = id;
  s.priority = priority;
  s.submit_time = submit;
  return s;
}

}  // namespace

TEST_CASE("effective priority orders by priority, then submission, then id") {
  JobSpec a = spec(0, 5, 10.0);  // highest priority wins
  JobSpec b = spec(1, 3, 0.0);   // then the earlier submission
  JobSpec c = spec(2, 3, 5.0);
  JobSpec d = spec(3, 3, 5.0);   // same priority and time: lower id first
  JobSpec e = spec(4, 1, 0.0);

  std::vector<JobSpec> expected = {a, b, c, d, e};
  std::vector<JobSpec> shuffled = expected;
  std::mt19937 rng(7);
  for (int round = 0; round < 10; ++round) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::sort(shuffled.begin(), shuffled.end(), schedules_before);
    for (size_t i = 0; i < expected.size(); ++i)
      CHECK(shuffled[i].id == expected[i].id);
  }
}

TEST_CASE("effective priority is a strict total order") {
  JobSpec a = spec(1, 3, 5.0);
  JobSpec b = spec(2, 3, 5.0);
  CHECK(effective_priority_cmp(a, a) == std::strong_ordering::equal);
  CHECK(effective_priority_cmp(a, b) == std::strong_ordering::less);
  CHECK(effective_priority_cmp(b, a) == std::strong_ordering::greater);
  CHECK(schedules_before(a, b));
  CHECK_FALSE(schedules_before(b, a));
  CHECK_FALSE(schedules_before(a, a));
}
