#pragma once

#include <string>

#include "esim/metrics.hpp"
#include "esim/perf.hpp"
#include "esim/types.hpp"
#include "esim/workload.hpp"

namespace esim {

struct SimConfig {
  ClusterConfig cluster;
  SchedulerConfig scheduler;
  GeneratorParams generator;
  Calibration calibration;
  WeightMode metrics_weight = WeightMode::Priority;
};

/// Parses a config document (see docs/file-formats.md). Strict: unknown
/// fields, wrong types, and inconsistent values are ConfigErrors naming the
/// field. `context` prefixes error messages, typically the file path.
SimConfig parse_config(const std::string& text, const std::string& context);

/// Reads and parses a config file. IoError if unreadable.
SimConfig load_config(const std::string& path);

/// The synthetic four-class calibration the repository ships with
/// (configs/default.json mirrors it): classes small through xlarge with
/// 1/n step-time scaling, size-proportional checkpoint and restore costs,
/// and restart costs growing with replica count.
SimConfig default_config();

}  // namespace esim
