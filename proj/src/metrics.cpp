#include "edgectl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace edgectl {

nlohmann::json to_json(const MetricsRecord& r) {
  return {
      {"seed", r.seed},
      {"scenario", r.scenario},
      {"controller", r.controller},
      {"phase", r.phase},
      {"episode", r.episode},
      {"steps", r.steps},
      {"cumulative_reward", r.cumulative_reward},
      {"loops", r.loops},
      {"latency_mean_ms", r.latency_mean_ms},
      {"latency_p50_ms", r.latency_p50_ms},
      {"latency_p95_ms", r.latency_p95_ms},
      {"latency_min_ms", r.latency_min_ms},
      {"latency_max_ms", r.latency_max_ms},
      {"failures", r.failures},
      {"uninterrupted_steps", r.uninterrupted_steps},
      {"control_loss", r.control_loss},
      {"action_accuracy", r.action_accuracy},
      {"edge_utilization", r.edge_utilization},
      {"cloud_fallback_loops", r.cloud_fallback_loops},
      {"epsilon", r.epsilon},
      {"mean_td_loss", r.mean_td_loss},
      {"train_steps", r.train_steps},
  };
}

MetricsRecord record_from_json(const nlohmann::json& j) {
  MetricsRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.scenario = j.at("scenario").get<std::string>();
  r.controller = j.at("controller").get<std::string>();
  r.phase = j.at("phase").get<std::string>();
  r.episode = j.at("episode").get<int>();
  r.steps = j.at("steps").get<int>();
  r.cumulative_reward = j.at("cumulative_reward").get<double>();
  r.loops = j.at("loops").get<std::int64_t>();
  r.latency_mean_ms = j.at("latency_mean_ms").get<double>();
  r.latency_p50_ms = j.at("latency_p50_ms").get<double>();
  r.latency_p95_ms = j.at("latency_p95_ms").get<double>();
  r.latency_min_ms = j.at("latency_min_ms").get<double>();
  r.latency_max_ms = j.at("latency_max_ms").get<double>();
  r.failures = j.at("failures").get<int>();
  r.uninterrupted_steps = j.at("uninterrupted_steps").get<int>();
  r.control_loss = j.at("control_loss").get<double>();
  r.action_accuracy = j.at("action_accuracy").get<double>();
  r.edge_utilization = j.at("edge_utilization").get<double>();
  r.cloud_fallback_loops = j.value("cloud_fallback_loops", std::int64_t{0});
  r.epsilon = j.value("epsilon", 0.0);
  r.mean_td_loss = j.value("mean_td_loss", 0.0);
  r.train_steps = j.value("train_steps", std::int64_t{0});
  return r;
}

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read metrics file " + path.string());
  std::vector<MetricsRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (j.contains("status")) continue;
    out.push_back(record_from_json(j));
  }
  return out;
}

void write_metrics_line(const MetricsRecord& r, std::ostream& out) { out << to_json(r).dump() << '\n'; }

double action_accuracy(std::span<const int> agent, std::span<const int> oracle) {
  if (agent.size() != oracle.size()) {
    throw LengthMismatchError("action sequences differ in length: " + std::to_string(agent.size()) +
                              " vs " + std::to_string(oracle.size()));
  }
  if (agent.empty()) return 0.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < agent.size(); ++i) same += agent[i] == oracle[i] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(agent.size());
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(q / 100.0 * static_cast<double>(values.size()));
  const auto idx = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(values.size())));
  return values[idx - 1];
}

const MetricComparison& ComparisonReport::at(const std::string& metric) const {
  for (const auto& m : metrics) {
    if (m.metric == metric) return m;
  }
  throw std::out_of_range("no metric " + metric);
}

namespace {

struct MetricDef {
  const char* name;
  bool higher_is_better;
  double (*get)(const MetricsRecord&);
};

const MetricDef kMetrics[] = {
    {"cumulative_reward", true, [](const MetricsRecord& r) { return r.cumulative_reward; }},
    {"latency_mean_ms", false, [](const MetricsRecord& r) { return r.latency_mean_ms; }},
    {"latency_p95_ms", false, [](const MetricsRecord& r) { return r.latency_p95_ms; }},
    {"failures", false, [](const MetricsRecord& r) { return static_cast<double>(r.failures); }},
    {"uninterrupted_steps", true,
     [](const MetricsRecord& r) { return static_cast<double>(r.uninterrupted_steps); }},
    {"control_loss", false, [](const MetricsRecord& r) { return r.control_loss; }},
    {"action_accuracy", true, [](const MetricsRecord& r) { return r.action_accuracy; }},
    {"edge_utilization", true, [](const MetricsRecord& r) { return r.edge_utilization; }},
};

double mean_of(std::span<const MetricsRecord> rs, double (*get)(const MetricsRecord&)) {
  double s = 0.0;
  for (const auto& r : rs) s += get(r);
  return s / static_cast<double>(rs.size());
}

}  // namespace

ComparisonReport compare(std::span<const MetricsRecord> a, std::span<const MetricsRecord> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("compare needs non-empty metric sets");
  ComparisonReport report;
  report.count_a = a.size();
  report.count_b = b.size();
  for (const auto& def : kMetrics) {
    MetricComparison m;
    m.metric = def.name;
    m.higher_is_better = def.higher_is_better;
    m.mean_a = mean_of(a, def.get);
    m.mean_b = mean_of(b, def.get);
    m.delta = m.mean_a - m.mean_b;
    if (m.mean_b != 0.0) {
      m.relative_delta = m.delta / std::abs(m.mean_b);
    } else if (m.delta == 0.0) {
      m.relative_delta = 0.0;
    } else {
      m.relative_delta = std::copysign(std::numeric_limits<double>::infinity(), m.delta);
    }
    if (m.delta == 0.0) {
      m.outcome = "tie";
    } else {
      m.outcome = ((m.delta > 0.0) == def.higher_is_better) ? "win" : "loss";
    }
    report.metrics.push_back(m);
  }
  return report;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_table(const ComparisonReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-20s %14s %14s %14s %10s  %s\n", "metric", "mean_a", "mean_b",
                "delta", "rel", "a");
  out << line;
  for (const auto& m : report.metrics) {
    char rel[32];
    if (std::isfinite(m.relative_delta)) {
      std::snprintf(rel, sizeof(rel), "%+.1f%%", 100.0 * m.relative_delta);
    } else {
      std::snprintf(rel, sizeof(rel), "n/a");
    }
    std::snprintf(line, sizeof(line), "%-20s %14.4f %14.4f %+14.4f %10s  %s\n", m.metric.c_str(),
                  m.mean_a, m.mean_b, m.delta, rel, m.outcome.c_str());
    out << line;
  }
  out << "records: a=" << report.count_a << " b=" << report.count_b << '\n';
  return out.str();
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["count_a"] = report.count_a;
  j["count_b"] = report.count_b;
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : report.metrics) {
    nlohmann::json e = {{"metric", m.metric},         {"higher_is_better", m.higher_is_better},
                        {"mean_a", m.mean_a},         {"mean_b", m.mean_b},
                        {"delta", m.delta},           {"outcome", m.outcome}};
    if (std::isfinite(m.relative_delta)) {
      e["relative_delta"] = m.relative_delta;
    } else {
      e["relative_delta"] = nullptr;
    }
    j["metrics"].push_back(e);
  }
  return j;
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw std::invalid_argument("moving-average window must be positive");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

void write_plot_data(std::span<const MetricsRecord> metrics, std::ostream& out) {
  if (metrics.empty()) throw std::invalid_argument("no metrics to plot");
  std::vector<double> rewards;
  rewards.reserve(metrics.size());
  for (const auto& r : metrics) rewards.push_back(r.cumulative_reward);
  const auto ma = moving_average(rewards, 50);
  out << "episode,reward,reward_ma50,failures_cumulative\n";
  long failures = 0;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    failures += metrics[i].failures;
    out << i << ',' << format_number(rewards[i]) << ',' << format_number(ma[i]) << ',' << failures
        << '\n';
  }
}

void emit_plot_data(std::span<const MetricsRecord> metrics, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot data to " + path.string());
  write_plot_data(metrics, out);
  if (!out) throw std::runtime_error("error writing plot data to " + path.string());
}

}  // namespace edgectl
