#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgectl::trace {

// CSV schema: header `timestamp,sensor_id,value,unit`; timestamp in integer
// seconds; unit one of known_units().
struct TraceRow {
  std::int64_t timestamp = 0;
  std::string sensor_id;
  double value = 0.0;
  std::string unit;

  bool operator==(const TraceRow&) const = default;
};

using SensorTrace = std::vector<TraceRow>;

class TraceError : public std::runtime_error {
 public:
  TraceError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

const std::vector<std::string>& known_units();

// Line numbers count the header as line 1.
SensorTrace parse_trace(std::istream& in);

// Zero-order hold: every source sample is repeated at `target_period_s`
// spacing until the sensor's next sample, and for `source_period_s` after the
// last one. Output is ordered by timestamp, then by first appearance of the
// sensor.
SensorTrace resample(const SensorTrace& rows, int source_period_s = 60, int target_period_s = 5);

SensorTrace ingest_trace(const std::filesystem::path& path, int target_period_s = 5,
                         int source_period_s = 60);

void write_trace(const SensorTrace& rows, std::ostream& out);

std::vector<double> channel(const SensorTrace& rows, const std::string& sensor_id);

}  // namespace edgectl::trace
