#include "esim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace esim {

namespace {

using nlohmann::json;

void reject_unknown(const json& object, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (key == name) known = true;
    if (!known) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

const json& member(const json& object, const char* name, const std::string& where) {
  auto it = object.find(name);
  if (it == object.end()) throw ConfigError(where + ": missing field '" + name + "'");
  return *it;
}

template <typename T>
T get_or(const json& object, const char* name, T fallback, const std::string& where) {
  auto it = object.find(name);
  if (it == object.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + name + ": wrong type");
  }
}

KnotList parse_knots(const json& node, const std::string& where) {
  if (!node.is_array()) throw ConfigError(where + ": must be an array of [replicas, seconds]");
  KnotList knots;
  for (const json& pair : node) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number())
      throw ConfigError(where + ": each knot must be [replicas, seconds]");
    knots.push_back({pair[0].get<int>(), pair[1].get<double>()});
  }
  return knots;
}

double parse_gap(const json& node, const std::string& where) {
  if (node.is_string()) {
    if (node.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    throw ConfigError(where + ": must be a number of seconds or \"inf\"");
  }
  if (!node.is_number()) throw ConfigError(where + ": must be a number of seconds or \"inf\"");
  double gap = node.get<double>();
  if (gap < 0.0 || std::isnan(gap)) throw ConfigError(where + ": must be >= 0");
  return gap;
}

JobClass parse_class(const json& node, const std::string& where) {
  reject_unknown(node,
                 {"name", "work_units", "data_bytes", "min_replicas", "max_replicas",
                  "step_time_knots", "overhead_knots"},
                 where);
  JobClass cls;
  try {
    cls.name = member(node, "name", where).get<std::string>();
    cls.work_units = member(node, "work_units", where).get<std::int64_t>();
    cls.data_bytes = get_or<std::int64_t>(node, "data_bytes", 0, where);
    cls.min_replicas = member(node, "min_replicas", where).get<int>();
    cls.max_replicas = member(node, "max_replicas", where).get<int>();
  } catch (const json::exception& err) {
    throw ConfigError(where + ": " + err.what());
  }
  cls.perf.step_time_knots =
      parse_knots(member(node, "step_time_knots", where), where + ".step_time_knots");
  const json& overhead = member(node, "overhead_knots", where);
  const std::string ow = where + ".overhead_knots";
  reject_unknown(overhead, {"checkpoint", "restart", "restore", "load_balance"}, ow);
  cls.perf.overhead_knots.checkpoint =
      parse_knots(member(overhead, "checkpoint", ow), ow + ".checkpoint");
  cls.perf.overhead_knots.restart =
      parse_knots(member(overhead, "restart", ow), ow + ".restart");
  cls.perf.overhead_knots.restore =
      parse_knots(member(overhead, "restore", ow), ow + ".restore");
  cls.perf.overhead_knots.load_balance =
      parse_knots(member(overhead, "load_balance", ow), ow + ".load_balance");
  return cls;
}

void validate_config(const SimConfig& config) {
  if (config.cluster.total_slots < 1)
    throw ConfigError("cluster.total_slots must be >= 1");
  if (config.cluster.launcher_slots < 0)
    throw ConfigError("cluster.launcher_slots must be >= 0");
  if (config.cluster.total_slots < config.cluster.launcher_slots + 1)
    throw ConfigError("cluster.total_slots must exceed launcher_slots");
  if (config.generator.n_jobs < 0) throw ConfigError("generator.n_jobs must be >= 0");
  if (config.generator.submission_gap < 0.0)
    throw ConfigError("generator.submission_gap must be >= 0");
  if (config.generator.priority_min < 1)
    throw ConfigError("generator.priority_range: lower bound must be >= 1");
  if (config.generator.priority_max < config.generator.priority_min)
    throw ConfigError("generator.priority_range: upper bound below lower bound");
  if (config.generator.n_repeats < 1)
    throw ConfigError("generator.n_repeats must be >= 1");
  if (config.calibration.classes.empty())
    throw ConfigError("classes: at least one job class is required");
  std::set<std::string> names;
  for (const JobClass& cls : config.calibration.classes) {
    validate_class(cls);
    if (!names.insert(cls.name).second)
      throw ConfigError("classes: duplicate name '" + cls.name + "'");
    if (cls.min_replicas + config.cluster.launcher_slots > config.cluster.total_slots)
      throw ConfigError("class '" + cls.name +
                        "': minimum footprint exceeds cluster capacity");
  }
  if (!config.generator.class_weights.empty()) {
    if (config.generator.class_weights.size() != config.calibration.classes.size())
      throw ConfigError("generator.class_weights must have one entry per class");
    double sum = 0.0;
    for (double w : config.generator.class_weights) {
      if (w < 0.0) throw ConfigError("generator.class_weights entries must be >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("generator.class_weights must sum to 1");
  }
}

}  // namespace

SimConfig parse_config(const std::string& text, const std::string& context) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError(context + ": " + err.what());
  }
  if (!doc.is_object()) throw ConfigError(context + ": config must be a JSON object");
  reject_unknown(doc,
                 {"schema_version", "cluster", "scheduler", "generator", "metrics",
                  "classes"},
                 context);
  SimConfig config;
  try {
    if (member(doc, "schema_version", context).get<int>() != 1)
      throw ConfigError(context + ": unsupported schema_version");
    if (doc.contains("cluster")) {
      const json& cluster = doc["cluster"];
      const std::string where = context + ": cluster";
      reject_unknown(cluster,
                     {"total_slots", "launcher_slots", "count_launcher_in_utilization"},
                     where);
      config.cluster.total_slots = get_or(cluster, "total_slots", 64, where);
      config.cluster.launcher_slots = get_or(cluster, "launcher_slots", 1, where);
      config.cluster.count_launcher_in_utilization =
          get_or(cluster, "count_launcher_in_utilization", true, where);
    }
    if (doc.contains("scheduler")) {
      const json& scheduler = doc["scheduler"];
      const std::string where = context + ": scheduler";
      reject_unknown(scheduler, {"policy", "rescale_gap"}, where);
      if (scheduler.contains("policy")) {
        std::string label = scheduler["policy"].get<std::string>();
        auto policy = parse_policy(label);
        if (!policy) throw ConfigError(where + ".policy: unknown policy '" + label + "'");
        config.scheduler.policy = *policy;
      }
      if (scheduler.contains("rescale_gap"))
        config.scheduler.rescale_gap =
            parse_gap(scheduler["rescale_gap"], where + ".rescale_gap");
    }
    if (doc.contains("generator")) {
      const json& generator = doc["generator"];
      const std::string where = context + ": generator";
      reject_unknown(generator,
                     {"n_jobs", "class_weights", "priority_range", "submission_gap",
                      "n_repeats"},
                     where);
      config.generator.n_jobs = get_or(generator, "n_jobs", 16, where);
      config.generator.class_weights =
          get_or(generator, "class_weights", std::vector<double>{}, where);
      if (generator.contains("priority_range")) {
        const json& range = generator["priority_range"];
        if (!range.is_array() || range.size() != 2)
          throw ConfigError(where + ".priority_range must be [lo, hi]");
        config.generator.priority_min = range[0].get<int>();
        config.generator.priority_max = range[1].get<int>();
      }
      config.generator.submission_gap = get_or(generator, "submission_gap", 90.0, where);
      config.generator.n_repeats = get_or(generator, "n_repeats", 100, where);
    }
    if (doc.contains("metrics")) {
      const json& metrics = doc["metrics"];
      const std::string where = context + ": metrics";
      reject_unknown(metrics, {"weight"}, where);
      std::string mode = get_or<std::string>(metrics, "weight", "priority", where);
      if (mode == "priority")
        config.metrics_weight = WeightMode::Priority;
      else if (mode == "uniform")
        config.metrics_weight = WeightMode::Uniform;
      else
        throw ConfigError(where + ".weight: must be \"priority\" or \"uniform\"");
    }
    const json& classes = member(doc, "classes", context);
    if (!classes.is_array()) throw ConfigError(context + ": classes must be an array");
    for (size_t i = 0; i < classes.size(); ++i) {
      std::ostringstream where;
      where << context << ": classes[" << i << "]";
      config.calibration.classes.push_back(parse_class(classes[i], where.str()));
    }
  } catch (const json::exception& err) {
    throw ConfigError(context + ": " + err.what());
  }
  validate_config(config);
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return parse_config(text.str(), path);
}

namespace {

// 1/n strong scaling sampled at min, 2*min, 4*min (every class spans a 4x
// replica range). Checkpoint and restore move the whole dataset, restart
// cost grows with the instance count, load balancing is flat.
JobClass synthetic_class(const char* name, int grid, std::int64_t work_units,
                         int min_replicas, int max_replicas, double serial_s,
                         double scaled_s) {
  JobClass cls;
  cls.name = name;
  cls.work_units = work_units;
  cls.data_bytes = std::int64_t(grid) * grid * 8;
  cls.min_replicas = min_replicas;
  cls.max_replicas = max_replicas;
  double data_gb = double(cls.data_bytes) / double(1 << 30);
  for (int n = min_replicas; n <= max_replicas; n *= 2) {
    cls.perf.step_time_knots.push_back({n, serial_s + scaled_s / n});
    cls.perf.overhead_knots.checkpoint.push_back({n, 0.5 * data_gb / n});
    cls.perf.overhead_knots.restore.push_back({n, 0.5 * data_gb / n});
    cls.perf.overhead_knots.restart.push_back({n, 0.05 + 0.005 * n});
    cls.perf.overhead_knots.load_balance.push_back({n, 0.02 + 0.1 * data_gb});
  }
  return cls;
}

}  // namespace

SimConfig default_config() {
  SimConfig config;
  config.cluster.total_slots = 64;
  config.cluster.launcher_slots = 0;
  config.cluster.count_launcher_in_utilization = true;
  config.scheduler.policy = PolicyKind::Elastic;
  config.scheduler.rescale_gap = 180.0;
  config.generator = GeneratorParams{};
  config.calibration.classes = {
      synthetic_class("small", 512, 40000, 2, 8, 0.00114, 0.0684),
      synthetic_class("medium", 2048, 40000, 4, 16, 0.0019, 0.171),
      synthetic_class("large", 8192, 40000, 8, 32, 0.0038, 0.456),
      synthetic_class("xlarge", 16384, 10000, 16, 64, 0.0076, 2.736),
  };
  return config;
}

}  // namespace esim
