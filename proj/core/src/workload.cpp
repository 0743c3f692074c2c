#include "esim/workload.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace esim {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return double(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
  return std::uint64_t((unsigned __int128)(next()) * bound >> 64);
}

namespace {

void validate_params(const GeneratorParams& params, const Calibration& calibration) {
  if (calibration.classes.empty())
    throw ConfigError("generator needs at least one job class");
  if (params.n_jobs < 0) throw ConfigError("generator.n_jobs must be >= 0");
  if (params.submission_gap < 0.0)
    throw ConfigError("generator.submission_gap must be >= 0");
  if (params.priority_min < 1)
    throw ConfigError("generator.priority_range: lower bound must be >= 1");
  if (params.priority_max < params.priority_min)
    throw ConfigError("generator.priority_range: upper bound below lower bound");
  if (params.n_repeats < 1) throw ConfigError("generator.n_repeats must be >= 1");
  if (params.class_weights.empty()) return;
  if (params.class_weights.size() != calibration.classes.size())
    throw ConfigError("generator.class_weights must have one entry per class");
  double sum = 0.0;
  for (size_t i = 0; i < params.class_weights.size(); ++i) {
    if (params.class_weights[i] < 0.0) {
      std::ostringstream msg;
      msg << "generator.class_weights[" << i << "] must be >= 0";
      throw ConfigError(msg.str());
    }
    sum += params.class_weights[i];
  }
  if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9)
    throw ConfigError("generator.class_weights must sum to 1");
}

size_t pick_class(double unit, const std::vector<double>& weights, size_t n_classes) {
  double cumulative = 0.0;
  for (size_t i = 0; i + 1 < n_classes; ++i) {
    cumulative += weights.empty() ? 1.0 / double(n_classes) : weights[i];
    if (unit < cumulative) return i;
  }
  return n_classes - 1;
}

}  // namespace

Workload generate(const GeneratorParams& params, std::uint64_t seed,
                  const Calibration& calibration) {
  validate_params(params, calibration);
  Workload workload;
  workload.seed = seed;
  workload.params = params;
  SplitMix64 rng(seed);
  std::uint64_t priority_span =
      std::uint64_t(params.priority_max - params.priority_min) + 1;
  for (int i = 0; i < params.n_jobs; ++i) {
    double class_draw = rng.next_unit();
    std::uint64_t priority_draw = rng.next_below(priority_span);
    const JobClass& cls = calibration.classes[pick_class(
        class_draw, params.class_weights, calibration.classes.size())];
    JobSpec spec;
    spec.id = JobId(i);
    spec.class_id = cls.name;
    spec.min_replicas = cls.min_replicas;
    spec.max_replicas = cls.max_replicas;
    spec.priority = params.priority_min + int(priority_draw);
    spec.submit_time = double(i) * params.submission_gap;
    workload.jobs.push_back(std::move(spec));
  }
  return workload;
}

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

}  // namespace

void save_workload(const std::string& path, const Workload& workload) {
  json doc;
  doc["schema_version"] = 1;
  doc["seed"] = workload.seed;
  doc["algorithm"] = workload.algorithm;
  doc["generator"] = {
      {"n_jobs", workload.params.n_jobs},
      {"class_weights", workload.params.class_weights},
      {"priority_range",
       {workload.params.priority_min, workload.params.priority_max}},
      {"submission_gap", workload.params.submission_gap},
      {"n_repeats", workload.params.n_repeats}};
  json jobs = json::array();
  for (const JobSpec& spec : workload.jobs)
    jobs.push_back({{"id", spec.id},
                    {"class", spec.class_id},
                    {"min_replicas", spec.min_replicas},
                    {"max_replicas", spec.max_replicas},
                    {"priority", spec.priority},
                    {"submit_time", spec.submit_time}});
  doc["jobs"] = std::move(jobs);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

Workload load_workload(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(path + ": " + err.what());
  }
  try {
    reject_unknown(doc, {"schema_version", "seed", "algorithm", "generator", "jobs"},
                   path);
    if (doc.at("schema_version").get<int>() != 1)
      throw ConfigError(path + ": unsupported schema_version");
    Workload workload;
    workload.seed = doc.at("seed").get<std::uint64_t>();
    workload.algorithm = doc.at("algorithm").get<std::string>();
    const json& gen = doc.at("generator");
    reject_unknown(gen,
                   {"n_jobs", "class_weights", "priority_range", "submission_gap",
                    "n_repeats"},
                   path + ": generator");
    workload.params.n_jobs = gen.at("n_jobs").get<int>();
    workload.params.class_weights = gen.at("class_weights").get<std::vector<double>>();
    const json& range = gen.at("priority_range");
    if (!range.is_array() || range.size() != 2)
      throw ConfigError(path + ": generator.priority_range must be [lo, hi]");
    workload.params.priority_min = range[0].get<int>();
    workload.params.priority_max = range[1].get<int>();
    workload.params.submission_gap = gen.at("submission_gap").get<double>();
    workload.params.n_repeats = gen.at("n_repeats").get<int>();
    for (const json& row : doc.at("jobs")) {
      reject_unknown(
          row, {"id", "class", "min_replicas", "max_replicas", "priority", "submit_time"},
          path + ": job");
      JobSpec spec;
      spec.id = row.at("id").get<JobId>();
      spec.class_id = row.at("class").get<std::string>();
      spec.min_replicas = row.at("min_replicas").get<int>();
      spec.max_replicas = row.at("max_replicas").get<int>();
      spec.priority = row.at("priority").get<int>();
      spec.submit_time = row.at("submit_time").get<double>();
      workload.jobs.push_back(std::move(spec));
    }
    return workload;
  } catch (const json::exception& err) {
    throw ConfigError(path + ": " + err.what());
  }
}

}  // namespace esim
