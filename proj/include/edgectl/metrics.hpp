#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace edgectl {

struct MetricsRecord {
  std::uint64_t seed = 0;
  std::string scenario;
  std::string controller;
  std::string phase;  // "train", "eval" or "run"
  int episode = 0;
  int steps = 0;  // control periods completed
  double cumulative_reward = 0.0;
  std::int64_t loops = 0;  // commands delivered
  double latency_mean_ms = 0.0;
  double latency_p50_ms = 0.0;
  double latency_p95_ms = 0.0;
  double latency_min_ms = 0.0;
  double latency_max_ms = 0.0;
  int failures = 0;
  int uninterrupted_steps = 0;
  double control_loss = 0.0;
  double action_accuracy = 0.0;
  double edge_utilization = 0.0;
  std::int64_t cloud_fallback_loops = 0;
  double epsilon = 0.0;
  double mean_td_loss = 0.0;
  std::int64_t train_steps = 0;

  bool operator==(const MetricsRecord&) const = default;
};

nlohmann::json to_json(const MetricsRecord& r);
MetricsRecord record_from_json(const nlohmann::json& j);

// Reads a JSON-lines metrics file; status lines (failed runs) are skipped.
std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path);
void write_metrics_line(const MetricsRecord& r, std::ostream& out);

class LengthMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fraction of positions where the two action sequences agree.
double action_accuracy(std::span<const int> agent, std::span<const int> oracle);

// Nearest-rank percentile of `values` (q in [0, 100]).
double percentile(std::vector<double> values, double q);

struct MetricComparison {
  std::string metric;
  bool higher_is_better = true;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double delta = 0.0;           // mean_a - mean_b
  double relative_delta = 0.0;  // delta / |mean_b|, 0 when both are 0
  std::string outcome;          // "win", "loss" or "tie" from a's side
};

struct ComparisonReport {
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  std::vector<MetricComparison> metrics;

  const MetricComparison& at(const std::string& metric) const;
};

ComparisonReport compare(std::span<const MetricsRecord> a, std::span<const MetricsRecord> b);
std::string format_table(const ComparisonReport& report);
nlohmann::json to_json(const ComparisonReport& report);

// Trailing mean over up to `window` most recent values.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

// CSV: episode,reward,reward_ma50,failures_cumulative.
void emit_plot_data(std::span<const MetricsRecord> metrics, const std::filesystem::path& path);
void write_plot_data(std::span<const MetricsRecord> metrics, std::ostream& out);

std::string format_number(double v);

}  // namespace edgectl
