#include "esim/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "esim/engine.hpp"
#include "esim/workload.hpp"
#include "text_util.hpp"

namespace esim {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory '" + path + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

int default_threads() {
  if (const char* env = std::getenv("ELASTIC_SIM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

SweepMeans to_means(const MetricsReport& report) {
  return {report.total_time, report.utilization, report.weighted_mean_response,
          report.weighted_mean_completion};
}

MetricsReport run_one(const SimConfig& config, PolicyKind policy,
                      const Workload& workload) {
  SchedulerConfig scheduler = config.scheduler;
  scheduler.policy = policy;
  Trace trace = simulate(config.cluster, scheduler, workload, config.calibration);
  return compute_metrics(trace, config.cluster, config.metrics_weight);
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return 1;
  }
}

void print_metrics_table(
    std::ostream& out,
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  out << std::left << std::setw(14) << "scheduler" << std::right << std::setw(14)
      << "total_time" << std::setw(13) << "utilization" << std::setw(14)
      << "mean_response" << std::setw(16) << "mean_completion" << '\n';
  for (const auto& [label, report] : rows) {
    out << std::left << std::setw(14) << label << std::right << std::fixed
        << std::setprecision(2) << std::setw(14) << report.total_time
        << std::setw(13) << std::setprecision(4) << report.utilization
        << std::setw(14) << std::setprecision(2) << report.weighted_mean_response
        << std::setw(16) << report.weighted_mean_completion << '\n';
  }
  out.unsetf(std::ios::fixed);
}

}  // namespace

std::vector<SweepRow> sweep_means(const SimConfig& config, const SweepSpec& sweep,
                                  int repeats, std::uint64_t base_seed,
                                  int threads) {
  if (sweep.values.empty()) throw ConfigError("sweep: no values given");
  for (double value : sweep.values) {
    if (std::isnan(value) || value < 0.0)
      throw ConfigError("sweep: values must be >= 0");
    if (sweep.variable == SweepVariable::SubmissionGap && std::isinf(value))
      throw ConfigError("sweep: submission-gap values must be finite");
  }
  if (repeats < 1) throw ConfigError("sweep: repeats must be >= 1");

  std::vector<double> values = sweep.values;
  std::sort(values.begin(), values.end());

  const size_t n_points = values.size();
  const size_t n_policies = kAllPolicies.size();
  // results[(point * repeats + repeat) * n_policies + policy]
  std::vector<SweepMeans> results(n_points * size_t(repeats) * n_policies);

  std::atomic<size_t> cursor{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const size_t n_tasks = n_points * size_t(repeats);

  auto worker = [&]() {
    for (;;) {
      size_t task = cursor.fetch_add(1);
      if (task >= n_tasks) return;
      if (first_error) return;
      try {
        size_t point = task / size_t(repeats);
        size_t repeat = task % size_t(repeats);
        SimConfig local = config;
        if (sweep.variable == SweepVariable::SubmissionGap)
          local.generator.submission_gap = values[point];
        else
          local.scheduler.rescale_gap = values[point];
        Workload workload =
            generate(local.generator, base_seed + repeat, local.calibration);
        for (size_t p = 0; p < n_policies; ++p)
          results[(point * size_t(repeats) + repeat) * n_policies + p] =
              to_means(run_one(local, kAllPolicies[p], workload));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int n_threads = threads >= 1 ? threads : default_threads();
  n_threads = int(std::min(size_t(n_threads), n_tasks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Fixed-order reduction keeps the means independent of thread count.
  std::vector<SweepRow> rows;
  for (size_t point = 0; point < n_points; ++point) {
    for (size_t p = 0; p < n_policies; ++p) {
      SweepMeans sum;
      for (size_t repeat = 0; repeat < size_t(repeats); ++repeat) {
        const SweepMeans& cell =
            results[(point * size_t(repeats) + repeat) * n_policies + p];
        sum.total_time += cell.total_time;
        sum.utilization += cell.utilization;
        sum.weighted_mean_response += cell.weighted_mean_response;
        sum.weighted_mean_completion += cell.weighted_mean_completion;
      }
      double n = double(repeats);
      rows.push_back({values[point], kAllPolicies[p],
                      {sum.total_time / n, sum.utilization / n,
                       sum.weighted_mean_response / n,
                       sum.weighted_mean_completion / n}});
    }
  }
  return rows;
}

namespace {

SimConfig resolve_config(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

}  // namespace

int cmd_run(const RunOptions& options) {
  return guarded([&]() {
    SimConfig config = resolve_config(options.config_path);
    if (options.scheduler) config.scheduler.policy = *options.scheduler;
    Workload workload =
        generate(config.generator, options.seed, config.calibration);
    Trace trace =
        simulate(config.cluster, config.scheduler, workload, config.calibration);
    MetricsReport report =
        compute_metrics(trace, config.cluster, config.metrics_weight);
    std::string label(to_label(config.scheduler.policy));

    ensure_dir(options.out_dir);
    save_workload(join(options.out_dir, "workload.json"), workload);
    save_trace_csv(join(options.out_dir, "trace.csv"), trace);
    save_trace_json(join(options.out_dir, "trace.json"), trace);
    save_metrics_json(join(options.out_dir, "metrics.json"), label, report);
    save_metrics_csv(join(options.out_dir, "metrics.csv"), {{label, report}});
    save_profile_csv(join(options.out_dir, "profile.csv"),
                     utilization_profile(trace, config.cluster));

    print_metrics_table(std::cout, {{label, report}});
    return kExitOk;
  });
}

int cmd_compare(const CompareOptions& options) {
  return guarded([&]() {
    SimConfig config = resolve_config(options.config_path);
    Workload workload =
        generate(config.generator, options.seed, config.calibration);
    ensure_dir(options.out_dir);

    std::vector<std::pair<std::string, MetricsReport>> rows;
    for (PolicyKind policy : kAllPolicies) {
      SchedulerConfig scheduler = config.scheduler;
      scheduler.policy = policy;
      Trace trace =
          simulate(config.cluster, scheduler, workload, config.calibration);
      std::string label(to_label(policy));
      save_trace_csv(join(options.out_dir, "trace_" + label + ".csv"), trace);
      rows.emplace_back(label,
                        compute_metrics(trace, config.cluster, config.metrics_weight));
    }
    save_metrics_csv(join(options.out_dir, "compare.csv"), rows);
    print_metrics_table(std::cout, rows);
    return kExitOk;
  });
}

int cmd_sweep(const SweepOptions& options) {
  return guarded([&]() {
    SimConfig config = resolve_config(options.config_path);
    int repeats = options.repeats > 0 ? options.repeats : config.generator.n_repeats;
    std::vector<SweepRow> rows =
        sweep_means(config, options.sweep, repeats, options.base_seed);
    ensure_dir(options.out_dir);

    std::ofstream out(join(options.out_dir, "sweep.csv"), std::ios::binary);
    if (!out) throw IoError("cannot open sweep.csv for writing");
    using detail::format_double;
    out << "value,scheduler,total_time,utilization,weighted_mean_response,"
           "weighted_mean_completion\n";
    for (const SweepRow& row : rows) {
      out << format_double(row.value) << ',' << to_label(row.policy) << ','
          << format_double(row.means.total_time) << ','
          << format_double(row.means.utilization) << ','
          << format_double(row.means.weighted_mean_response) << ','
          << format_double(row.means.weighted_mean_completion) << '\n';
    }
    out.flush();
    if (!out) throw IoError("failed writing sweep.csv");

    std::cout << rows.size() << " sweep rows (" << repeats
              << " repeats per value) written to "
              << join(options.out_dir, "sweep.csv") << '\n';
    return kExitOk;
  });
}

}  // namespace esim
