#include "esim/perf.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace esim {

double interp(const KnotList& knots, int replicas) {
  if (knots.empty()) throw ConfigError("interp: empty knot list");
  if (replicas <= knots.front().replicas) return knots.front().seconds;
  if (replicas >= knots.back().replicas) return knots.back().seconds;
  auto hi = std::lower_bound(
      knots.begin(), knots.end(), replicas,
      [](const Knot& k, int n) { return k.replicas < n; });
  if (hi->replicas == replicas) return hi->seconds;
  auto lo = hi - 1;
  double t = double(replicas - lo->replicas) / double(hi->replicas - lo->replicas);
  return lo->seconds + t * (hi->seconds - lo->seconds);
}

double step_time(const ClassPerf& perf, int replicas) {
  return interp(perf.step_time_knots, replicas);
}

double job_runtime(const JobClass& cls, int replicas) {
  return double(cls.work_units) * step_time(cls.perf, replicas);
}

OverheadBreakdown rescale_overhead(const JobClass& cls, int n_old, int n_new) {
  if (n_old == n_new)
    throw std::invalid_argument("rescale_overhead: old and new replica counts are equal");
  const OverheadKnots& k = cls.perf.overhead_knots;
  int larger = std::max(n_old, n_new);
  OverheadBreakdown ov;
  ov.checkpoint = interp(k.checkpoint, n_old);
  ov.restore = interp(k.restore, n_old);
  ov.restart = interp(k.restart, larger);
  ov.load_balance = interp(k.load_balance, larger);
  ov.total = ov.checkpoint + ov.restart + ov.restore + ov.load_balance;
  return ov;
}

namespace {

void validate_knots(const KnotList& knots, bool positive_seconds,
                    const std::string& where) {
  if (knots.empty()) throw ConfigError(where + ": empty knot list");
  for (size_t i = 0; i < knots.size(); ++i) {
    std::ostringstream at;
    at << where << "[" << i << "]";
    if (knots[i].replicas < 1)
      throw ConfigError(at.str() + ": replica count must be >= 1");
    if (i > 0 && knots[i].replicas <= knots[i - 1].replicas)
      throw ConfigError(at.str() + ": replica counts must be strictly increasing");
    if (positive_seconds ? knots[i].seconds <= 0.0 : knots[i].seconds < 0.0)
      throw ConfigError(at.str() + (positive_seconds ? ": seconds must be > 0"
                                                     : ": seconds must be >= 0"));
  }
}

}  // namespace

void validate_class(const JobClass& cls) {
  const std::string where = "class '" + cls.name + "'";
  if (cls.name.empty()) throw ConfigError("class name must be nonempty");
  if (cls.work_units <= 0) throw ConfigError(where + ": work_units must be > 0");
  if (cls.data_bytes < 0) throw ConfigError(where + ": data_bytes must be >= 0");
  if (cls.min_replicas < 1) throw ConfigError(where + ": min_replicas must be >= 1");
  if (cls.max_replicas < cls.min_replicas)
    throw ConfigError(where + ": max_replicas must be >= min_replicas");
  validate_knots(cls.perf.step_time_knots, true, where + ".step_time_knots");
  validate_knots(cls.perf.overhead_knots.checkpoint, false, where + ".overhead.checkpoint");
  validate_knots(cls.perf.overhead_knots.restart, false, where + ".overhead.restart");
  validate_knots(cls.perf.overhead_knots.restore, false, where + ".overhead.restore");
  validate_knots(cls.perf.overhead_knots.load_balance, false, where + ".overhead.load_balance");
}

const JobClass* Calibration::find(std::string_view name) const {
  for (const JobClass& cls : classes)
    if (cls.name == name) return &cls;
  return nullptr;
}

const JobClass& Calibration::at(std::string_view name) const {
  const JobClass* cls = find(name);
  if (!cls) throw ConfigError("unknown job class '" + std::string(name) + "'");
  return *cls;
}

}  // namespace esim
