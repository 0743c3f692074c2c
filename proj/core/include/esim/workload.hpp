#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esim/perf.hpp"
#include "esim/types.hpp"

namespace esim {

/// Counter-based splitmix64; cheap to seed and reproducible across
/// languages, which keeps generated workloads portable.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1): top 53 bits of next().
  double next_unit();
  /// Uniform in [0, bound): multiply-shift reduction of next().
  std::uint64_t next_below(std::uint64_t bound);

private:
  std::uint64_t state_;
};

struct GeneratorParams {
  int n_jobs = 16;
  /// One weight per calibration class, summing to 1. Empty means uniform.
  std::vector<double> class_weights;
  int priority_min = 1;
  int priority_max = 5;
  /// Seconds between consecutive submissions.
  double submission_gap = 90.0;
  /// Default repeat count for sweeps.
  int n_repeats = 100;

  bool operator==(const GeneratorParams&) const = default;
};

struct Workload {
  std::vector<JobSpec> jobs;
  std::uint64_t seed = 0;
  GeneratorParams params;
  std::string algorithm = "splitmix64";

  bool operator==(const Workload&) const = default;
};

/// Draws `n_jobs` jobs: ids 0..n-1, submissions at id * submission_gap,
/// class picked by weight, priority uniform over the configured range,
/// replica bounds copied from the class. Two draws per job (class, then
/// priority), so workloads are stable under changes elsewhere.
Workload generate(const GeneratorParams& params, std::uint64_t seed,
                  const Calibration& calibration);

void save_workload(const std::string& path, const Workload& workload);

/// Inverse of save_workload; load(save(w)) == w. Rejects unknown fields.
Workload load_workload(const std::string& path);

}  // namespace esim
