#include "edgectl/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace edgectl::trace {

const std::vector<std::string>& known_units() {
  static const std::vector<std::string> units{"degC", "pct", "%RH", "V", "A", "kPa", "bar", "frac", "rpm"};
  return units;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

SensorTrace parse_trace(std::istream& in) {
  SensorTrace rows;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::map<std::string, std::int64_t> last_time;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      if (split(line) != std::vector<std::string>{"timestamp", "sensor_id", "value", "unit"}) {
        throw TraceError(lineno, "expected header timestamp,sensor_id,value,unit");
      }
      header_seen = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != 4) throw TraceError(lineno, "expected 4 fields, got " + std::to_string(f.size()));
    TraceRow row;
    {
      const auto* b = f[0].data();
      const auto* e = b + f[0].size();
      auto [p, ec] = std::from_chars(b, e, row.timestamp);
      if (ec != std::errc() || p != e || row.timestamp < 0) {
        throw TraceError(lineno, "bad timestamp \"" + f[0] + "\"");
      }
    }
    if (f[1].empty()) throw TraceError(lineno, "empty sensor_id");
    row.sensor_id = f[1];
    try {
      std::size_t used = 0;
      row.value = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw TraceError(lineno, "bad value \"" + f[2] + "\"");
    }
    const auto& units = known_units();
    if (std::find(units.begin(), units.end(), f[3]) == units.end()) {
      throw TraceError(lineno, "unknown unit tag \"" + f[3] + "\"");
    }
    row.unit = f[3];

    auto it = last_time.find(row.sensor_id);
    if (it != last_time.end()) {
      if (row.timestamp == it->second) {
        throw TraceError(lineno, "duplicate timestamp for sensor " + row.sensor_id);
      }
      if (row.timestamp < it->second) {
        throw TraceError(lineno, "timestamps decrease for sensor " + row.sensor_id);
      }
    }
    last_time[row.sensor_id] = row.timestamp;
    rows.push_back(std::move(row));
  }
  return rows;
}

SensorTrace resample(const SensorTrace& rows, int source_period_s, int target_period_s) {
  if (target_period_s <= 0 || source_period_s <= 0) {
    throw std::invalid_argument("resampling periods must be positive");
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<const TraceRow*>> by_sensor;
  for (const auto& r : rows) {
    auto& list = by_sensor[r.sensor_id];
    if (list.empty()) order.push_back(r.sensor_id);
    list.push_back(&r);
  }

  struct Keyed {
    std::int64_t t;
    std::size_t sensor_rank;
    TraceRow row;
  };
  std::vector<Keyed> out;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const auto& list = by_sensor[order[rank]];
    for (std::size_t k = 0; k < list.size(); ++k) {
      const TraceRow& src = *list[k];
      const std::int64_t end =
          k + 1 < list.size() ? list[k + 1]->timestamp : src.timestamp + source_period_s;
      for (std::int64_t t = src.timestamp; t < end; t += target_period_s) {
        TraceRow r = src;
        r.timestamp = t;
        out.push_back({t, rank, std::move(r)});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Keyed& a, const Keyed& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.sensor_rank < b.sensor_rank;
  });
  SensorTrace result;
  result.reserve(out.size());
  for (auto& k : out) result.push_back(std::move(k.row));
  return result;
}

SensorTrace ingest_trace(const std::filesystem::path& path, int target_period_s,
                         int source_period_s) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trace file " + path.string());
  return resample(parse_trace(in), source_period_s, target_period_s);
}

void write_trace(const SensorTrace& rows, std::ostream& out) {
  out << "timestamp,sensor_id,value,unit\n";
  for (const auto& r : rows) {
    std::ostringstream v;
    v.precision(17);
    v << r.value;
    out << r.timestamp << ',' << r.sensor_id << ',' << v.str() << ',' << r.unit << '\n';
  }
}

std::vector<double> channel(const SensorTrace& rows, const std::string& sensor_id) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.sensor_id == sensor_id) out.push_back(r.value);
  }
  return out;
}

}  // namespace edgectl::trace
