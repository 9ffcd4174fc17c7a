#include "moorfd/config.hpp"

#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace moorfd::config {

namespace {

double parse_number(const std::string& v, const std::string& key) {
  try {
    return csv::to_double(v);
  } catch (const ConfigError&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& key) {
  const double d = parse_number(v, key);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(key + ": not an integer");
  return static_cast<int>(d);
}

std::uint64_t parse_seed(const std::string& v, const std::string& key) {
  const int s = parse_int(v, key);
  if (s < 0) throw ConfigError(key + ": seeds must be non-negative");
  return static_cast<std::uint64_t>(s);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false");
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& cell : csv::split(v)) out.push_back(parse_number(cell, key));
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

using Setter = std::function<void(const std::string&)>;

std::map<std::string, Setter> setters(RunConfig& c, const std::filesystem::path& base) {
  auto num = [](double& field, std::string key) {
    return Setter([&field, key](const std::string& v) { field = parse_number(v, key); });
  };
  auto integer = [](int& field, std::string key) {
    return Setter([&field, key](const std::string& v) { field = parse_int(v, key); });
  };
  auto seed = [](std::uint64_t& field, std::string key) {
    return Setter([&field, key](const std::string& v) { field = parse_seed(v, key); });
  };
  auto path = [base](std::filesystem::path& field) {
    return Setter([&field, base](const std::string& v) {
      std::filesystem::path p(v);
      field = p.is_relative() && !base.empty() ? base / p : p;
    });
  };
  std::map<std::string, Setter> s{
      {"wave.hs", num(c.wave.hs, "wave.hs")},
      {"wave.tp", num(c.wave.tp, "wave.tp")},
      {"wave.gamma", num(c.wave.gamma, "wave.gamma")},
      {"wave.omega_min", num(c.wave.omega_min, "wave.omega_min")},
      {"wave.omega_max", num(c.wave.omega_max, "wave.omega_max")},
      {"wave.n_omega", integer(c.wave.n_omega, "wave.n_omega")},
      {"wind.speed", num(c.v_wind, "wind.speed")},
      {"simulation.duration", num(c.duration, "simulation.duration")},
      {"simulation.dt", num(c.dt, "simulation.dt")},
      {"simulation.dt_in", num(c.dt_in, "simulation.dt_in")},
      {"noise.omega_rotor", num(c.noise.omega_rotor, "noise.omega_rotor")},
      {"noise.surge", num(c.noise.surge, "noise.surge")},
      {"noise.pitch", num(c.noise.pitch, "noise.pitch")},
      {"mooring.anchor_radius", num(c.mooring.anchor_radius, "mooring.anchor_radius")},
      {"mooring.anchor_depth", num(c.mooring.anchor_depth, "mooring.anchor_depth")},
      {"mooring.fairlead_radius", num(c.mooring.fairlead_radius, "mooring.fairlead_radius")},
      {"mooring.fairlead_height", num(c.mooring.fairlead_height, "mooring.fairlead_height")},
      {"mooring.length", num(c.mooring.length, "mooring.length")},
      {"mooring.mass_per_length", num(c.mooring.mass_per_length, "mooring.mass_per_length")},
      {"mooring.diameter", num(c.mooring.diameter, "mooring.diameter")},
      {"mooring.ea", num(c.mooring.ea, "mooring.ea")},
      {"mooring.angles",
       [&c](const std::string& v) { c.mooring.angles_deg = parse_list(v, "mooring.angles"); }},
      {"rotor.radius", num(c.rotor.radius, "rotor.radius")},
      {"rotor.hub_height", num(c.rotor.hub_height, "rotor.hub_height")},
      {"rotor.inertia_rotor", num(c.rotor.j_r, "rotor.inertia_rotor")},
      {"rotor.inertia_generator", num(c.rotor.j_g, "rotor.inertia_generator")},
      {"rotor.gearbox_ratio", num(c.rotor.tau, "rotor.gearbox_ratio")},
      {"rotor.rated_speed_rpm",
       [&c](const std::string& v) {
         const double rpm = parse_number(v, "rotor.rated_speed_rpm");
         c.rotor.rated_speed = rpm * 2.0 * std::numbers::pi / 60.0;
       }},
      {"rotor.rated_power", num(c.rotor.rated_power, "rotor.rated_power")},
      {"controller.kp", num(c.kp, "controller.kp")},
      {"controller.ki", num(c.ki, "controller.ki")},
      {"controller.pitch_rate_deg", num(c.pitch_rate_deg, "controller.pitch_rate_deg")},
      {"identify.rad_order", integer(c.ident.rad_order, "identify.rad_order")},
      {"identify.rad_order_out_of_plane",
       integer(c.ident.rad_order_out_of_plane, "identify.rad_order_out_of_plane")},
      {"identify.wave_order", integer(c.ident.wave_order, "identify.wave_order")},
      {"identify.t_d", num(c.ident.t_d, "identify.t_d")},
      {"identify.kernel_duration", num(c.ident.kernel_duration, "identify.kernel_duration")},
      {"identify.band_min", num(c.ident.band_min, "identify.band_min")},
      {"identify.band_max", num(c.ident.band_max, "identify.band_max")},
      {"identify.frd", path(c.ident.frd_csv)},
      {"identify.ainf", path(c.ident.ainf_csv)},
      {"detect.alpha", num(c.detect.alpha, "detect.alpha")},
      {"detect.hold", integer(c.detect.hold, "detect.hold")},
      {"detect.warmup", num(c.detect.warmup, "detect.warmup")},
      {"detect.window_start", num(c.detect.window_start, "detect.window_start")},
      {"detect.window_end", num(c.detect.window_end, "detect.window_end")},
      {"seeds.calibration_wave", seed(c.seeds.calibration_wave, "seeds.calibration_wave")},
      {"seeds.calibration_noise", seed(c.seeds.calibration_noise, "seeds.calibration_noise")},
      {"seeds.scenario_wave", seed(c.seeds.scenario_wave, "seeds.scenario_wave")},
      {"seeds.scenario_noise", seed(c.seeds.scenario_noise, "seeds.scenario_noise")},
      {"gates.max_delay", num(c.gates.max_delay, "gates.max_delay")},
      {"gates.max_far",
       [&c](const std::string& v) { c.gates.max_far = parse_number(v, "gates.max_far"); }},
      {"gates.require_detection",
       [&c](const std::string& v) {
         c.gates.require_detection = parse_bool(v, "gates.require_detection");
       }},
      {"output.dir", path(c.output_dir)},
  };
  return s;
}

}  // namespace

mooring::FaultEvent parse_fault(const std::string& text) {
  const auto cells = csv::split(text);
  if (cells.size() != 4) throw ConfigError("fault needs kind,line,time,theta_x: '" + text + "'");
  mooring::FaultEvent e;
  e.kind = mooring::parse_fault_kind(cells[0]);
  e.line_index = parse_int(cells[1], "fault line");
  e.time = parse_number(cells[2], "fault time");
  e.theta_x = parse_number(cells[3], "fault theta_x");
  return e;
}

void RunConfig::validate() const {
  wave.validate();
  require(v_wind > 0.0 && v_wind < 50.0, "wind.speed must be in (0, 50) m/s");
  require(dt > 0.0 && dt <= 1.0, "simulation.dt must be in (0, 1] s");
  require(dt_in > 0.0 && dt_in <= dt, "simulation.dt_in must be in (0, dt]");
  const double ratio = dt / dt_in;
  require(std::abs(ratio - std::round(ratio)) < 1e-9, "simulation.dt must be a multiple of dt_in");
  require(duration >= 10.0 * wave.tp, "simulation.duration must be at least 10 peak periods");
  require(noise.omega_rotor >= 0.0 && noise.surge >= 0.0 && noise.pitch >= 0.0,
          "noise levels must be non-negative");
  require(kp >= 0.0 && ki >= 0.0, "controller gains must be non-negative");
  require(pitch_rate_deg > 0.0, "controller.pitch_rate_deg must be positive");
  require(ident.rad_order >= 1 && ident.rad_order_out_of_plane >= 1 && ident.wave_order >= 1,
          "identification orders must be >= 1");
  require(ident.t_d >= 0.0 && ident.kernel_duration > 0.0, "t_d and kernel duration invalid");
  require(ident.band_min > 0.0 && ident.band_max > ident.band_min, "identify band invalid");
  require(ident.frd_csv.empty() == ident.ainf_csv.empty(),
          "identify.frd and identify.ainf must be given together");
  if (!ident.frd_csv.empty()) {
    require(std::filesystem::exists(ident.frd_csv), "missing file " + ident.frd_csv.string());
    require(std::filesystem::exists(ident.ainf_csv), "missing file " + ident.ainf_csv.string());
  }
  require(detect.alpha > 0.0, "detect.alpha must be positive");
  require(detect.hold >= 1, "detect.hold must be >= 1");
  require(detect.window_start >= 0.0 && detect.window_end > detect.window_start &&
              detect.window_end <= duration,
          "detect window must lie inside the run");
  require(detect.warmup >= 0.0 && detect.warmup < duration, "detect.warmup outside the run");
  require(gates.max_delay > 0.0, "gates.max_delay must be positive");
  const auto n_lines = static_cast<int>(mooring.angles_deg.size());
  for (const auto& [id, faults] : cases) {
    require(id >= 1, "case ids start at 1");
    for (const auto& f : faults) {
      require(f.line_index >= 1 && f.line_index <= n_lines,
              "case " + std::to_string(id) + ": fault line out of range");
      require(f.time >= 0.0 && f.time <= duration,
              "case " + std::to_string(id) + ": fault time outside the run");
      require(f.kind != mooring::FaultKind::AnchorSlip || f.theta_x > 0.0,
              "case " + std::to_string(id) + ": anchor slip needs a positive length");
    }
  }
}

plant::PlantParams RunConfig::plant_params() const {
  plant::PlantParams p = plant::make_plant_params(mooring::make_lines(mooring));
  p.rotor = rotor;
  p.controller.kp = kp;
  p.controller.ki = ki;
  p.controller.pitch_rate = pitch_rate_deg * std::numbers::pi / 180.0;
  p.validate();
  return p;
}

double RunConfig::far_gate() const {
  return gates.max_far.value_or(1.0 / (detect.alpha * detect.alpha));
}

RunConfig default_config() {
  RunConfig c;
  using mooring::FaultKind;
  c.cases[1] = {{FaultKind::FairleadRelease, 1, 1500.0, 0.0}};
  c.cases[2] = {{FaultKind::AnchorSlip, 1, 1500.0, 857.0}};
  c.cases[3] = {{FaultKind::FairleadRelease, 2, 1500.0, 0.0}};
  c.cases[4] = {{FaultKind::AnchorSlip, 2, 1500.0, 957.0}};
  return c;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig c = default_config();
  const auto table = setters(c, base_dir);
  std::set<std::string> seen;
  std::set<int> cases_in_file;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    std::string line = csv::trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = csv::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = csv::trim(line.substr(0, eq));
    std::string value = csv::trim(line.substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) {
      value = csv::trim(value.substr(0, hash));
    }
    if (section.rfind("case.", 0) == 0) {
      if (key != "fault") throw ConfigError(where + "case sections only hold fault entries");
      const int id = parse_int(section.substr(5), "case id");
      if (cases_in_file.insert(id).second) c.cases[id].clear();
      try {
        c.cases[id].push_back(parse_fault(value));
      } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
      }
      continue;
    }
    const std::string full = section + "." + key;
    const auto it = table.find(full);
    if (it == table.end()) throw ConfigError(where + "unknown setting '" + full + "'");
    if (!seen.insert(full).second) throw ConfigError(where + "duplicate setting '" + full + "'");
    try {
      it->second(value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace moorfd::config
