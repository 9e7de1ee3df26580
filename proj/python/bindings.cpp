#include <sstream>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edgectl/allocator.hpp"
#include "edgectl/boiler.hpp"
#include "edgectl/config.hpp"
#include "edgectl/experiment.hpp"
#include "edgectl/metrics.hpp"
#include "edgectl/trace.hpp"

namespace py = pybind11;
using namespace edgectl;

namespace {

// Values cross the boundary as JSON so Python sees plain dicts and lists.
py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::handle& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

ExperimentConfig config_arg(const py::object& cfg) {
  return cfg.is_none() ? default_config() : config_from_json(from_py(cfg));
}

nlohmann::json state_json(const plant::BoilerState& s) {
  return {{"inlet_temp", s.inlet_temp}, {"outlet_temp", s.outlet_temp}, {"water_level", s.water_level},
          {"pressure", s.pressure},     {"pump_pos", s.pump_pos},       {"valve_pos", s.valve_pos},
          {"failed", s.failed}};
}

plant::BoilerState state_arg(const nlohmann::json& j, const plant::PlantConfig& pc) {
  auto s = plant::nominal_state(pc);
  s.inlet_temp = j.value("inlet_temp", s.inlet_temp);
  s.outlet_temp = j.value("outlet_temp", s.outlet_temp);
  s.water_level = j.value("water_level", s.water_level);
  s.pressure = j.value("pressure", s.pressure);
  s.pump_pos = j.value("pump_pos", s.pump_pos);
  s.valve_pos = j.value("valve_pos", s.valve_pos);
  s.failed = j.value("failed", s.failed);
  return s;
}

}  // namespace

PYBIND11_MODULE(_edgectl, m) {
  m.doc() = "Edge-cloud collaborative boiler control simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<trace::TraceError>(m, "TraceError", PyExc_ValueError);

  m.def("default_config", [] { return to_py(to_json(default_config())); });

  m.def("validate_config", [](const py::object& cfg) {
    const auto c = config_from_json(from_py(cfg));
    validate(c);
    return to_py(to_json(c));
  }, py::arg("config"));

  m.def("run", [](const py::object& cfg, int jobs) {
    const auto c = config_arg(cfg);
    std::vector<RunResult> results;
    {
      py::gil_scoped_release release;
      results = run_experiment(c, jobs);
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : results) {
      nlohmann::json records = nlohmann::json::array();
      for (const auto& rec : r.records) records.push_back(to_json(rec));
      out.push_back({{"seed", r.seed}, {"status", r.status}, {"message", r.message}, {"records", records}});
    }
    return to_py(out);
  }, py::arg("config") = py::none(), py::arg("jobs") = 1);

  m.def("solve", [](const py::object& instance) {
    const auto inst = alloc::instance_from_json(from_py(instance));
    const auto plan = inst.solver == "greedy"
                          ? alloc::solve_greedy(inst.modules, inst.resources, inst.weights)
                          : alloc::solve_exact(inst.modules, inst.resources, inst.weights);
    return to_py(alloc::to_json(plan));
  }, py::arg("instance"));

  m.def("plant_step", [](const py::object& state, int action, const py::object& cfg) {
    const auto c = config_arg(cfg);
    const auto r = plant::predict(c.plant, state_arg(from_py(state), c.plant), plant::command_from_action(action));
    auto j = state_json(r.state);
    return to_py({{"state", j}, {"reward", r.reward}, {"failed", r.failed}});
  }, py::arg("state"), py::arg("action"), py::arg("config") = py::none());

  m.def("nominal_state", [](const py::object& cfg) {
    return to_py(state_json(plant::nominal_state(config_arg(cfg).plant)));
  }, py::arg("config") = py::none());

  m.def("resample_trace", [](const std::string& csv, int source_period_s, int target_period_s) {
    std::istringstream in(csv);
    const auto rows = trace::resample(trace::parse_trace(in), source_period_s, target_period_s);
    py::list out;
    for (const auto& r : rows) {
      py::dict d;
      d["timestamp"] = r.timestamp;
      d["sensor_id"] = r.sensor_id;
      d["value"] = r.value;
      d["unit"] = r.unit;
      out.append(d);
    }
    return out;
  }, py::arg("csv"), py::arg("source_period_s") = 60, py::arg("target_period_s") = 5);
}
