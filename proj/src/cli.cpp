#include "mcg/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "mcg/config.hpp"
#include "mcg/keyframe.hpp"
#include "mcg/reconstruct.hpp"
#include "mcg/trial.hpp"

namespace fs = std::filesystem;

namespace mcg {
namespace {

constexpr std::uint64_t kReconTag = 0x7265636eu;  // must match the trial loop

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string s = ss.str();
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

struct RunOverrides {
  std::string config_path;
  std::string mode;
  std::string sensor;
  std::string out_dir;
  std::int64_t seed = -1;
  double duration = -1.0;
  int start = -1;
};

RunConfig resolve_config(const RunOverrides& ov) {
  RunConfig rc =
      ov.config_path.empty() ? RunConfig{} : load_config_file(ov.config_path);
  apply_env_overrides(rc);
  if (!ov.mode.empty()) {
    if (ov.mode == "mcg") {
      rc.trial.mode = MapMode::mcg;
    } else if (ov.mode == "og") {
      rc.trial.mode = MapMode::og;
    } else {
      throw ConfigError("--mode must be mcg or og");
    }
  }
  if (!ov.sensor.empty()) {
    if (ov.sensor == "lidar") {
      rc.trial.sensor = SensorKind::lidar;
    } else if (ov.sensor == "depth") {
      rc.trial.sensor = SensorKind::depth;
    } else {
      throw ConfigError("--sensor must be lidar or depth");
    }
  }
  if (ov.seed >= 0) rc.trial.seed = static_cast<std::uint64_t>(ov.seed);
  if (ov.duration >= 0.0) rc.trial.duration_s = ov.duration;
  if (ov.start >= 0) rc.trial.start_index = ov.start;
  if (!ov.out_dir.empty()) rc.out_dir = ov.out_dir;
  return rc;
}

void write_trial_outputs(const fs::path& dir, const RunConfig& rc,
                         const TrialResult& res) {
  fs::create_directories(dir);
  write_text(dir / "metrics.csv", metrics_csv(res.metrics));
  write_text(dir / "config_effective.ini", dump_config(rc));
  if (rc.trial.mode == MapMode::mcg) {
    write_bytes(dir / "keyframes.bin", res.keyframe_stream);
  }
  if (res.has_direct_grid && rc.save_direct_grid) {
    save_grid(res.direct_grid, (dir / "direct.grid").string());
  }
}

std::string summary_line(const TrialMetrics& m) {
  char buf[256];
  const double final_entropy =
      m.rows.empty() ? 0.0 : m.rows.back().entropy_bits;
  std::snprintf(buf, sizeof(buf),
                "%s %s seed=%llu start=%d status=%s keyframes=%zu bytes=%llu "
                "final_entropy_bits=%.3f wall_s=%.1f",
                m.mode.c_str(), m.sensor.c_str(),
                static_cast<unsigned long long>(m.seed), m.start_index,
                m.status.c_str(), m.keyframe_count,
                static_cast<unsigned long long>(m.map_bytes), final_entropy,
                m.wall_time_s);
  return buf;
}

int cmd_run(const RunOverrides& ov) {
  RunConfig rc = resolve_config(ov);
  const Environment env = build_environment(rc);
  const TrialResult res = run_trial(env, rc.trial);
  write_trial_outputs(rc.out_dir, rc, res);
  std::cout << summary_line(res.metrics) << "\n";
  return 0;
}

int cmd_compare(const RunOverrides& ov, const std::string& modes_s,
                const std::string& sensors_s, const std::string& seeds_s,
                const std::string& starts_s, int jobs) {
  RunConfig rc = resolve_config(ov);
  std::vector<std::string> modes = split_list(modes_s);
  std::vector<std::string> sensors = split_list(sensors_s);
  std::vector<std::string> seeds = split_list(seeds_s);
  std::vector<std::string> starts = split_list(starts_s);
  if (modes.empty()) modes = {"mcg", "og"};
  if (sensors.empty()) sensors = {to_string(rc.trial.sensor)};
  if (seeds.empty()) seeds = {std::to_string(rc.trial.seed)};
  if (starts.empty()) starts = {std::to_string(rc.trial.start_index)};

  struct Job {
    RunConfig rc;
    std::string name;
  };
  std::vector<Job> job_list;
  for (const std::string& mode : modes) {
    for (const std::string& sensor : sensors) {
      for (const std::string& seed : seeds) {
        for (const std::string& start : starts) {
          RunOverrides jov = ov;
          jov.mode = mode;
          jov.sensor = sensor;
          jov.seed = std::stoll(seed);
          jov.start = std::stoi(start);
          Job job;
          job.rc = resolve_config(jov);
          job.name = mode + "_" + sensor + "_s" + seed + "_i" + start;
          job_list.push_back(std::move(job));
        }
      }
    }
  }

  const Environment env = build_environment(rc);
  const fs::path out_root = rc.out_dir;
  fs::create_directories(out_root);

  std::vector<TrialMetrics> results(job_list.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= job_list.size()) return;
      const Job& job = job_list[i];
      const TrialResult res = run_trial(env, job.rc.trial);
      write_trial_outputs(out_root / job.name, job.rc, res);
      results[i] = res.metrics;
      std::lock_guard<std::mutex> lock(io_mutex);
      std::cout << job.name << ": " << summary_line(res.metrics) << "\n";
    }
  };
  const int n_workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(job_list.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  std::string summary =
      "mode,sensor,seed,start_index,status,final_entropy_bits,bytes_total,"
      "keyframes,wall_s\n";
  char buf[256];
  for (const TrialMetrics& m : results) {
    const double final_entropy =
        m.rows.empty() ? 0.0 : m.rows.back().entropy_bits;
    std::snprintf(buf, sizeof(buf), "%s,%s,%llu,%d,%s,%.6f,%llu,%zu,%.3f\n",
                  m.mode.c_str(), m.sensor.c_str(),
                  static_cast<unsigned long long>(m.seed), m.start_index,
                  m.status.c_str(), final_entropy,
                  static_cast<unsigned long long>(m.map_bytes),
                  m.keyframe_count, m.wall_time_s);
    summary += buf;
  }
  write_text(out_root / "summary.csv", summary);
  return 0;
}

int cmd_reconstruct(const std::string& keyframes_path, const std::string& out_path,
                    const std::string& against_path, double res, double max_range,
                    std::int64_t seed, std::int64_t samples, double delta) {
  const std::vector<std::uint8_t> bytes = read_bytes(keyframes_path);
  GmmMap map;
  std::size_t offset = 0;
  std::uint32_t next_id = 0;
  while (offset < bytes.size()) {
    Keyframe kf = deserialize_keyframe(bytes, offset);
    kf.id = next_id++;
    map.insert(std::move(kf));
  }
  if (map.keyframes().empty()) {
    throw std::runtime_error("keyframe stream is empty");
  }

  LocalGrid grid;
  InverseSensorModel ism;  // sliding-window clamp, same as the live map
  if (!against_path.empty()) {
    const LocalGrid ref = load_grid(against_path);
    grid = LocalGrid(ref.origin(), ref.nx(), ref.ny(), ref.nz(),
                     ref.resolution(), ism);
  } else {
    Aabb bounds;
    bounds.min = Vec3::Constant(std::numeric_limits<double>::infinity());
    bounds.max = -bounds.min;
    for (const Keyframe& kf : map.keyframes()) {
      bounds.min = bounds.min.cwiseMin(kf.origin.t);
      bounds.max = bounds.max.cwiseMax(kf.origin.t);
    }
    const Vec3 margin = Vec3::Constant(max_range + 1.0);
    bounds.min -= margin;
    bounds.max += margin;
    grid = LocalGrid::covering(bounds, res, ism);
  }

  ReconstructionParams params;
  params.max_range = max_range;
  params.max_samples_per_component = static_cast<std::size_t>(samples);
  const std::uint64_t base =
      mix_seed(static_cast<std::uint64_t>(seed), kReconTag, 0);
  reconstruct_region(grid, grid.bounds(), map, params, base);

  std::size_t comps = 0;
  for (const Keyframe& kf : map.keyframes()) {
    comps += kf.occupied.components.size() + kf.free.components.size();
  }
  std::printf("keyframes=%zu components=%zu cells=%zu\n", map.keyframes().size(),
              comps, grid.size());

  if (!against_path.empty()) {
    const LocalGrid ref = load_grid(against_path);
    std::size_t observed = 0, agree = 0;
    for (std::uint32_t i = 0; i < ref.size(); ++i) {
      const int want = tri_state(ref.at(i), delta);
      if (want == 0) continue;
      ++observed;
      if (tri_state(grid.at(i), delta) == want) ++agree;
    }
    const double frac = observed ? static_cast<double>(agree) / observed : 1.0;
    std::printf("agreement=%.4f over %zu observed cells\n", frac, observed);
  }
  if (!out_path.empty()) save_grid(grid, out_path);
  return 0;
}

// --- report: small SVG line charts from metrics CSVs -----------------------

struct Series {
  std::string label;
  std::vector<double> t, entropy, bytes;
};

Series read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Series s;
  s.label = path.parent_path().filename().string();
  if (s.label.empty()) s.label = path.stem().string();
  std::string line;
  if (!std::getline(in, line) || line.rfind("t_sec,", 0) != 0) {
    throw std::runtime_error("not a metrics csv: " + path.string());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3) throw std::runtime_error("short row in " + path.string());
    s.t.push_back(std::stod(cells[0]));
    s.entropy.push_back(std::stod(cells[1]));
    s.bytes.push_back(std::stod(cells[2]));
  }
  return s;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};

void append_panel(std::string& svg, const std::vector<Series>& series,
                  bool use_bytes, double y_off, const std::string& title) {
  const double w = 760.0, h = 250.0, x0 = 70.0;
  double t_max = 1.0, v_max = 1.0;
  for (const Series& s : series) {
    for (double t : s.t) t_max = std::max(t_max, t);
    for (double v : use_bytes ? s.bytes : s.entropy) v_max = std::max(v_max, v);
  }
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "<rect x='%g' y='%g' width='%g' height='%g' fill='none' "
                "stroke='#444'/>\n<text x='%g' y='%g' font-size='14'>%s</text>\n",
                x0, y_off, w, h, x0, y_off - 8.0, title.c_str());
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x='%g' y='%g' font-size='11' text-anchor='end'>%.3g</text>\n"
                "<text x='%g' y='%g' font-size='11' text-anchor='end'>0</text>\n"
                "<text x='%g' y='%g' font-size='11'>%.0f s</text>\n",
                x0 - 6.0, y_off + 12.0, v_max, x0 - 6.0, y_off + h, x0 + w - 30.0,
                y_off + h + 16.0, t_max);
  svg += buf;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const std::vector<double>& v = use_bytes ? s.bytes : s.entropy;
    std::string pts;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x0 + w * s.t[i] / t_max,
                    y_off + h - h * v[i] / v_max);
      pts += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<polyline points='%s' fill='none' stroke='%s' "
                  "stroke-width='1.5'/>\n",
                  pts.c_str(), kPalette[k % 8]);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x='%g' y='%g' font-size='11' fill='%s'>%s</text>\n",
                  x0 + w - 150.0, y_off + 16.0 + 14.0 * k, kPalette[k % 8],
                  s.label.c_str());
    svg += buf;
  }
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<Series> series;
  for (const std::string& input : inputs) {
    fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.path().filename() == "metrics.csv") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      for (const fs::path& f : found) series.push_back(read_metrics(f));
    } else {
      series.push_back(read_metrics(p));
    }
  }
  if (series.empty()) throw std::runtime_error("report: no metrics files found");

  std::string svg =
      "<svg xmlns='http://www.w3.org/2000/svg' width='860' height='640' "
      "font-family='sans-serif'>\n<rect width='860' height='640' "
      "fill='white'/>\n";
  append_panel(svg, series, false, 40.0, "map entropy (bits) vs time");
  append_panel(svg, series, true, 360.0, "transmitted bytes vs time");
  svg += "</svg>\n";
  write_text(out, svg);
  std::printf("wrote %s (%zu series)\n", out.c_str(), series.size());
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Gaussian-mixture depth compression: exploration trials, "
               "baseline comparison, map reconstruction"};
  app.name("mcg");
  app.require_subcommand(1);

  RunOverrides ov;
  auto add_common = [&ov](CLI::App* cmd) {
    cmd->add_option("--config", ov.config_path, "INI configuration file");
    cmd->add_option("--mode", ov.mode, "map mode: mcg | og");
    cmd->add_option("--sensor", ov.sensor, "sensor kind: lidar | depth");
    cmd->add_option("--seed", ov.seed, "trial seed");
    cmd->add_option("--duration", ov.duration, "trial length, seconds");
    cmd->add_option("--start", ov.start, "start position index");
    cmd->add_option("--out", ov.out_dir, "output directory");
  };

  CLI::App* run = app.add_subcommand("run", "run one exploration trial");
  add_common(run);

  CLI::App* compare =
      app.add_subcommand("compare", "run a mode/sensor/seed/start matrix");
  add_common(compare);
  std::string modes_s, sensors_s, seeds_s, starts_s;
  int jobs = 1;
  compare->add_option("--modes", modes_s, "comma list (default mcg,og)");
  compare->add_option("--sensors", sensors_s, "comma list (default from config)");
  compare->add_option("--seeds", seeds_s, "comma list (default from config)");
  compare->add_option("--starts", starts_s, "comma list (default from config)");
  compare->add_option("--jobs", jobs, "parallel trials");

  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "rebuild an occupancy grid from a keyframe stream");
  std::string kf_path, out_grid, against;
  double res = 0.2, max_range = 5.0, delta = 0.1;
  std::int64_t rseed = 1, samples = 2000;
  reconstruct->add_option("--keyframes", kf_path, "keyframes.bin path")
      ->required();
  reconstruct->add_option("--out", out_grid, "write the rebuilt grid here");
  reconstruct->add_option("--against", against,
                          "reference grid: take extent from it and report "
                          "tri-state agreement");
  reconstruct->add_option("--res", res, "grid resolution when no reference");
  reconstruct->add_option("--max-range", max_range, "sensor reach");
  reconstruct->add_option("--seed", rseed, "trial seed the stream came from");
  reconstruct->add_option("--samples", samples, "per-component sample cap");
  reconstruct->add_option("--delta", delta, "unknown band half-width");

  CLI::App* report =
      app.add_subcommand("report", "render metrics CSVs as an SVG chart");
  std::vector<std::string> inputs;
  std::string report_out = "report.svg";
  report->add_option("--in", inputs, "metrics.csv files or directories")
      ->required();
  report->add_option("--out", report_out, "output SVG path");

  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("mcg");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (app.got_subcommand(run)) return cmd_run(ov);
    if (app.got_subcommand(compare)) {
      return cmd_compare(ov, modes_s, sensors_s, seeds_s, starts_s, jobs);
    }
    if (app.got_subcommand(reconstruct)) {
      return cmd_reconstruct(kf_path, out_grid, against, res, max_range, rseed,
                             samples, delta);
    }
    if (app.got_subcommand(report)) return cmd_report(inputs, report_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace mcg
