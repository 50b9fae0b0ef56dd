#include "mcg/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace mcg {
namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + ": expected a number, got '" + value + "'");
  }
  if (used != value.size()) {
    throw ConfigError("config: " + key + ": trailing characters in '" + value + "'");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + ": expected an integer, got '" + value +
                      "'");
  }
  if (used != value.size()) {
    throw ConfigError("config: " + key + ": trailing characters in '" + value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: " + key + ": expected a boolean, got '" + value + "'");
}

std::string starts_to_string(const std::vector<Vec3>& starts) {
  std::string out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (i) out += "; ";
    out += fmt_double(starts[i].x()) + "," + fmt_double(starts[i].y()) + "," +
           fmt_double(starts[i].z());
  }
  return out;
}

std::vector<Vec3> starts_from_string(const std::string& key,
                                     const std::string& value) {
  std::vector<Vec3> out;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ';')) {
    // trim
    const auto b = part.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = part.find_last_not_of(" \t");
    part = part.substr(b, e - b + 1);
    std::stringstream ps(part);
    std::string num;
    Vec3 p;
    int i = 0;
    while (std::getline(ps, num, ',')) {
      if (i >= 3) throw ConfigError("config: " + key + ": too many coordinates");
      p[i++] = to_double(key, num);
    }
    if (i != 3) throw ConfigError("config: " + key + ": expected x,y,z triples");
    out.push_back(p);
  }
  return out;
}

struct Binding {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

std::vector<Binding> make_bindings(RunConfig& c) {
  std::vector<Binding> b;
  auto add_dbl = [&b](const char* sec, const char* key, double& ref) {
    b.push_back({sec, key,
                 [&ref, k = std::string(key)](const std::string& v) {
                   ref = to_double(k, v);
                 },
                 [&ref] { return fmt_double(ref); }});
  };
  auto add_int = [&b](const char* sec, const char* key, int& ref) {
    b.push_back({sec, key,
                 [&ref, k = std::string(key)](const std::string& v) {
                   ref = static_cast<int>(to_int(k, v));
                 },
                 [&ref] { return std::to_string(ref); }});
  };
  auto add_u64 = [&b](const char* sec, const char* key, std::uint64_t& ref) {
    b.push_back({sec, key,
                 [&ref, k = std::string(key)](const std::string& v) {
                   ref = static_cast<std::uint64_t>(to_int(k, v));
                 },
                 [&ref] { return std::to_string(ref); }});
  };
  auto add_size = [&b](const char* sec, const char* key, std::size_t& ref) {
    b.push_back({sec, key,
                 [&ref, k = std::string(key)](const std::string& v) {
                   ref = static_cast<std::size_t>(to_int(k, v));
                 },
                 [&ref] { return std::to_string(ref); }});
  };
  auto add_bool = [&b](const char* sec, const char* key, bool& ref) {
    b.push_back({sec, key,
                 [&ref, k = std::string(key)](const std::string& v) {
                   ref = to_bool(k, v);
                 },
                 [&ref] { return std::string(ref ? "true" : "false"); }});
  };
  auto add_str = [&b](const char* sec, const char* key, std::string& ref) {
    b.push_back({sec, key, [&ref](const std::string& v) { ref = v; },
                 [&ref] { return ref; }});
  };

  TrialConfig& t = c.trial;

  b.push_back({"env", "kind",
               [&c](const std::string& v) {
                 if (v != "cave" && v != "mesh") {
                   throw ConfigError("config: env.kind must be cave or mesh");
                 }
                 c.env_kind = v;
               },
               [&c] { return c.env_kind; }});
  add_str("env", "mesh_path", c.mesh_path);
  b.push_back({"env", "starts",
               [&c](const std::string& v) {
                 c.mesh_starts = starts_from_string("starts", v);
               },
               [&c] { return starts_to_string(c.mesh_starts); }});
  add_dbl("env", "size_x", c.cave.size.x());
  add_dbl("env", "size_y", c.cave.size.y());
  add_dbl("env", "size_z", c.cave.size.z());
  add_dbl("env", "carve_res", c.cave.carve_res);
  add_int("env", "chambers", c.cave.chambers);
  add_int("env", "extra_tunnels", c.cave.extra_tunnels);
  add_int("env", "start_count", c.cave.start_count);
  add_dbl("env", "min_start_clearance", c.cave.min_start_clearance);
  add_u64("env", "seed", c.cave.seed);

  b.push_back({"sensor", "kind",
               [&t](const std::string& v) {
                 if (v == "lidar") {
                   t.sensor = SensorKind::lidar;
                 } else if (v == "depth") {
                   t.sensor = SensorKind::depth;
                 } else {
                   throw ConfigError("config: sensor.kind must be lidar or depth");
                 }
               },
               [&t] { return std::string(to_string(t.sensor)); }});
  add_dbl("sensor", "rate_hz", t.sensor_rate_hz);
  add_dbl("sensor", "noise_sigma", t.noise_sigma);
  add_dbl("sensor", "max_range", t.observation.max_range);

  add_int("observation", "occupied_components", t.observation.occupied_components);
  add_int("observation", "free_components_per_window",
          t.observation.free_components_per_window);
  add_int("observation", "window_rows", t.observation.window_rows);
  add_int("observation", "window_cols", t.observation.window_cols);

  add_dbl("em", "mahal_gate", t.observation.em.mahal_gate);
  add_dbl("em", "cov_floor", t.observation.em.cov_floor);
  add_dbl("em", "rel_tol", t.observation.em.rel_tol);
  add_int("em", "max_iter", t.observation.em.max_iter);
  add_dbl("em", "prune_weight", t.observation.em.prune_weight);

  b.push_back({"gate", "mode",
               [&t](const std::string& v) {
                 if (v == "auto") {
                   t.gate_auto = true;
                 } else if (v == "360") {
                   t.gate_auto = false;
                   t.gate.mode = GateConfig::Mode::full_360;
                 } else if (v == "fov") {
                   t.gate_auto = false;
                   t.gate.mode = GateConfig::Mode::limited_fov;
                 } else {
                   throw ConfigError("config: gate.mode must be auto, 360 or fov");
                 }
               },
               [&t]() -> std::string {
                 if (t.gate_auto) return "auto";
                 return t.gate.mode == GateConfig::Mode::full_360 ? "360" : "fov";
               }});
  b.push_back({"gate", "half_extent",
               [&t](const std::string& v) {
                 t.gate.half_extent.setConstant(to_double("half_extent", v));
               },
               [&t] { return fmt_double(t.gate.half_extent.x()); }});
  add_dbl("gate", "overlap_threshold", t.gate.overlap_threshold);

  add_dbl("grid", "local_res", t.local_res);
  add_int("grid", "local_nx", t.local_nx);
  add_int("grid", "local_ny", t.local_ny);
  add_int("grid", "local_nz", t.local_nz);
  add_dbl("grid", "clamp_min", t.local_ism.clamp_min);
  add_dbl("grid", "clamp_max", t.local_ism.clamp_max);
  add_dbl("grid", "referee_res", t.referee_res);
  add_dbl("grid", "frontier_delta", t.frontier_delta);

  add_size("recon", "max_samples_per_component",
           t.recon.max_samples_per_component);

  add_dbl("planner", "v_max_xy", t.planner.v_max_xy);
  add_dbl("planner", "v_max_z", t.planner.v_max_z);
  add_dbl("planner", "omega_max", t.planner.omega_max);
  add_dbl("planner", "tau", t.planner.tau);
  add_dbl("planner", "dt", t.planner.dt);
  add_int("planner", "n_omega", t.planner.n_omega);
  add_int("planner", "n_vz", t.planner.n_vz);
  add_int("planner", "csqmi_poses", t.planner.csqmi_poses);
  add_dbl("planner", "frontier_weight", t.planner.frontier_weight);
  add_dbl("planner", "r_coll", t.planner.r_coll);
  add_dbl("planner", "unknown_delta", t.planner.unknown_delta);
  add_dbl("planner", "watchdog_s", t.planner.watchdog_s);
  b.push_back({"planner", "beam_information",
               [&t](const std::string& v) {
                 if (v != "csqmi" && v != "unknown_count") {
                   throw ConfigError(
                       "config: planner.beam_information must be csqmi or "
                       "unknown_count");
                 }
                 t.beam_information = v;
               },
               [&t] { return t.beam_information; }});

  b.push_back({"sim", "mode",
               [&t](const std::string& v) {
                 if (v == "mcg") {
                   t.mode = MapMode::mcg;
                 } else if (v == "og") {
                   t.mode = MapMode::og;
                 } else {
                   throw ConfigError("config: sim.mode must be mcg or og");
                 }
               },
               [&t] { return std::string(to_string(t.mode)); }});
  add_u64("sim", "seed", t.seed);
  add_dbl("sim", "duration_s", t.duration_s);
  add_int("sim", "start_index", t.start_index);
  b.push_back({"sim", "direct_grid",
               [&c](const std::string& v) {
                 c.save_direct_grid = to_bool("direct_grid", v);
                 c.trial.build_direct_grid = c.save_direct_grid;
               },
               [&c] { return std::string(c.save_direct_grid ? "true" : "false"); }});

  add_str("out", "dir", c.out_dir);
  return b;
}

void finalize(RunConfig& c) {
  // The reconstruction reach always tracks the sensor reach.
  c.trial.recon.max_range = c.trial.observation.max_range;
}

std::string upper(const std::string& s) {
  std::string out = s;
  for (char& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  auto bindings = make_bindings(cfg);

  std::stringstream ss(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config: line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = line.substr(1, line.size() - 2);
      bool known = false;
      for (const Binding& bind : bindings) {
        if (bind.section == section) {
          known = true;
          break;
        }
      }
      if (!known) {
        throw ConfigError("config: line " + std::to_string(line_no) +
                          ": unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kb = key.find_first_not_of(" \t");
    const auto ke = key.find_last_not_of(" \t");
    key = kb == std::string::npos ? "" : key.substr(kb, ke - kb + 1);
    const auto vb = value.find_first_not_of(" \t");
    const auto ve = value.find_last_not_of(" \t");
    value = vb == std::string::npos ? "" : value.substr(vb, ve - vb + 1);
    if (section.empty()) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": key outside any section");
    }

    bool matched = false;
    for (Binding& bind : bindings) {
      if (bind.section == section && bind.key == key) {
        try {
          bind.set(value);
        } catch (const ConfigError& err) {
          throw ConfigError(std::string(err.what()) + " (line " +
                            std::to_string(line_no) + ")");
        }
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": unknown key " + section + "." + key);
    }
  }
  finalize(cfg);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_env_overrides(RunConfig& cfg) {
  auto bindings = make_bindings(cfg);
  for (Binding& bind : bindings) {
    const std::string name = "MCG_" + upper(bind.section) + "_" + upper(bind.key);
    if (const char* v = std::getenv(name.c_str())) {
      try {
        bind.set(v);
      } catch (const ConfigError& err) {
        throw ConfigError(std::string(err.what()) + " (from " + name + ")");
      }
    }
  }
  finalize(cfg);
}

std::string dump_config(const RunConfig& cfg) {
  RunConfig& mutable_cfg = const_cast<RunConfig&>(cfg);
  auto bindings = make_bindings(mutable_cfg);
  std::string out;
  std::string section;
  for (const Binding& bind : bindings) {
    if (bind.section != section) {
      if (!out.empty()) out += "\n";
      section = bind.section;
      out += "[" + section + "]\n";
    }
    out += bind.key + " = " + bind.get() + "\n";
  }
  return out;
}

Environment build_environment(const RunConfig& cfg) {
  if (cfg.env_kind == "cave") {
    return generate_cave(cfg.cave);
  }
  TriMesh mesh = load_mesh_off(cfg.mesh_path);
  return environment_from_mesh(std::move(mesh), cfg.mesh_starts);
}

}  // namespace mcg
