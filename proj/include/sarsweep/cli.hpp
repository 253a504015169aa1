#pragma once

// Command-line front end: validate | simulate | analyze | report.
// Exit codes: 0 success, 1 validation failure (config, arguments, artifact checksums),
// 2 runtime failure (I/O or anything unexpected).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sarsweep/analysis.hpp"
#include "sarsweep/config.hpp"
#include "sarsweep/io.hpp"
#include "sarsweep/pipeline.hpp"

namespace sarsweep::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* tool_version = "sarsweep 0.1.0";
inline constexpr const char* manifest_name = "manifest.json";
inline constexpr double default_iq_dump_s = 1e-3;

enum ExitCode : int { ok = 0, validation_failure = 1, runtime_failure = 2 };

// Thrown for bad user input that is not a config problem (e.g. a frequency off the grid).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline std::string extension(config::OutputFormat f) { return f == config::OutputFormat::json ? ".json" : ".csv"; }

inline std::optional<config::ScenarioConfig> load_valid(const std::string& path, Streams s) {
  const auto parsed = config::load_config(path);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) s.err << path << ": " << e << "\n";
    return std::nullopt;
  }
  const auto errs = config::validate(parsed.config);
  if (!errs.empty()) {
    for (const auto& e : errs) s.err << path << ": " << e << "\n";
    return std::nullopt;
  }
  return parsed.config;
}

inline int cmd_validate(const std::string& config_path, Streams s) {
  if (!load_valid(config_path, s)) return validation_failure;
  s.out << config_path << ": ok\n";
  return ok;
}

struct SimulateOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::vector<std::uint64_t> seeds;           // empty: use the config's
  std::optional<config::OutputFormat> format;
  std::optional<double> iq_dump_s;            // overrides outputs.iq_dump_s
};

// First `seconds` of the pass as seen by the antenna, before any receiver.
inline BasebandSignal iq_prefix(const config::ScenarioConfig& cfg, double seconds) {
  const auto source = pipeline::make_source(cfg);
  const auto n = std::min<std::int64_t>(source.size(), std::llround(seconds * source.sample_rate));
  BasebandSignal sig;
  sig.sample_rate = source.sample_rate;
  sig.start_time = source.start_time;
  sig.center_frequency = source.center_frequency;
  sig.samples.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) sig.samples.push_back(source.at(i));
  return sig;
}

inline json file_entry(const fs::path& root, const fs::path& path, const std::string& content) {
  return {{"path", fs::relative(path, root).generic_string()}, {"bytes", content.size()}, {"sha256", io::sha256_hex(content)}};
}

inline int cmd_simulate(const SimulateOptions& opt, Streams s) {
  auto loaded = load_valid(opt.config_path, s);
  if (!loaded) return validation_failure;
  auto cfg = *loaded;
  if (!opt.seeds.empty()) cfg.seeds = opt.seeds;
  if (opt.format) cfg.outputs.format = *opt.format;
  if (opt.iq_dump_s) cfg.outputs.iq_dump_s = *opt.iq_dump_s;
  if (cfg.outputs.iq_dump_s < 0.0 || cfg.outputs.iq_dump_s > cfg.pass.duration_s) {
    s.err << "--iq-dump: must be in [0, pass.duration_s]\n";
    return validation_failure;
  }
  const fs::path root = opt.out_dir ? fs::path(*opt.out_dir) : fs::path(cfg.outputs.directory);
  const std::string ext = extension(cfg.outputs.format);
  const bool as_json = cfg.outputs.format == config::OutputFormat::json;

  try {
    fs::create_directories(root);
    // A stale manifest would make a failed rerun look complete.
    fs::remove(root / manifest_name);
    const auto t_start = std::chrono::steady_clock::now();
    json files = json::array();
    json runs = json::array();
    json timings = json::object();

    auto emit = [&](const fs::path& path, const std::string& content) {
      io::write_atomic(path, content);
      files.push_back(file_entry(root, path, content));
    };
    auto grid_text = [&](const receiver::PowerGrid& g) {
      return as_json ? io::json_text(io::grid_to_json(g)) : io::grid_to_csv(g);
    };

    for (const auto seed : cfg.seeds) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto trial = pipeline::run_trial(cfg, seed);
      const fs::path dir = root / ("seed_" + std::to_string(seed));
      emit(dir / ("nsr_grid" + ext), grid_text(trial.nsr));
      emit(dir / ("sed_windows" + ext), grid_text(trial.sed));
      emit(dir / ("truth_grid" + ext), grid_text(trial.truth));
      emit(dir / ("spectrum" + ext),
           as_json ? io::json_text(io::spectrum_to_json(trial.spectrum)) : io::spectrum_to_csv(trial.spectrum));
      if (cfg.outputs.iq_dump_s > 0.0) emit(dir / "iq.bin", io::iq_to_binary(iq_prefix(cfg, cfg.outputs.iq_dump_s)));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      timings["seed_" + std::to_string(seed) + "_s"] = secs;
      runs.push_back({{"seed", seed},
                      {"rows", trial.nsr.rows()},
                      {"cols", trial.nsr.cols()},
                      {"spectrum_bandwidth_hz", trial.spectrum.bandwidth},
                      {"spectrum_center_hz", trial.spectrum.center_frequency},
                      {"empty_interior_bins", trial.spectrum.empty_interior_bins}});
      s.out << "seed " << seed << ": " << trial.nsr.rows() << " x " << trial.nsr.cols() << " grid, bandwidth "
            << trial.spectrum.bandwidth / 1e6 << " MHz -> " << dir.string() << "\n";
    }
    timings["total_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    const json manifest = {{"tool_version", tool_version},
                           {"config_path", opt.config_path},
                           {"config_sha256", io::sha256_hex(io::read_file(opt.config_path))},
                           {"seeds", cfg.seeds},
                           {"format", as_json ? "json" : "csv"},
                           {"runs", runs},
                           {"files", files},
                           {"timings", timings}};
    io::write_atomic(root / manifest_name, io::json_text(manifest));
    s.out << "manifest: " << (root / manifest_name).string() << "\n";
  } catch (const std::exception& e) {
    s.err << "simulate: " << e.what() << "\n";
    return runtime_failure;
  }
  return ok;
}

struct AnalyzeOptions {
  std::string grid_path;
  std::optional<std::string> config_path;
  std::vector<double> frequencies_mhz;
  std::optional<std::string> out_dir;
  config::OutputFormat format = config::OutputFormat::csv;
  bool compare = false;
  double prominence_db = 6.0;
};

inline std::string mhz_label(double mhz) { return io::format_double(mhz) + "MHz"; }

inline std::optional<fs::path> sibling(const fs::path& grid_path, const std::string& stem) {
  for (const char* ext : {".csv", ".json"}) {
    const fs::path p = grid_path.parent_path() / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

inline int cmd_analyze(const AnalyzeOptions& opt, Streams s) {
  if (opt.frequencies_mhz.empty()) {
    s.err << "analyze: at least one --freq is required\n";
    return validation_failure;
  }
  std::optional<config::ScenarioConfig> cfg;
  if (opt.config_path) {
    cfg = load_valid(*opt.config_path, s);
    if (!cfg) return validation_failure;
  }
  try {
    receiver::PowerGrid grid;
    try {
      grid = io::load_grid(opt.grid_path);
    } catch (const std::invalid_argument& e) {
      s.err << opt.grid_path << ": " << e.what() << "\n";
      return validation_failure;
    }
    for (double mhz : opt.frequencies_mhz) analysis::nearest_bin(grid, mhz * 1e6);  // span check up front

    const fs::path grid_path(opt.grid_path);
    const fs::path out = opt.out_dir ? fs::path(*opt.out_dir) : grid_path.parent_path() / "analysis";
    const bool as_json = opt.format == config::OutputFormat::json;
    const std::string ext = extension(opt.format);

    std::optional<receiver::PowerGrid> truth, sed;
    if (opt.compare) {
      const auto tp = sibling(grid_path, "truth_grid");
      const auto sp = sibling(grid_path, "sed_windows");
      if (!tp || !sp) throw UsageError("--compare needs truth_grid and sed_windows beside " + opt.grid_path);
      truth = io::load_grid(*tp);
      sed = io::load_grid(*sp);
    }

    json null_reports = json::array();
    json comparisons = json::array();
    std::vector<std::optional<double>> spacings;
    for (double mhz : opt.frequencies_mhz) {
      auto cut = analysis::extract_pattern(grid, mhz * 1e6);
      if (cfg) {
        const auto sc = cfg->scenario();
        cut = analysis::time_to_angle(cut, sc.ground_beam_speed, sc.range, sc.crossing_time());
      }
      const fs::path base = out / ("cut_" + mhz_label(mhz));
      io::write_atomic(base.string() + ext, as_json ? io::json_text(io::cut_to_json(cut)) : io::cut_to_csv(cut));
      io::write_atomic(base.string() + "_plot.csv", io::cut_to_plot(cut));

      const auto nulls = analysis::find_nulls(cut, opt.prominence_db);
      spacings.push_back(nulls.mean_spacing);
      json nr = io::null_report_to_json(nulls);
      nr["requested_mhz"] = mhz;
      nr["bin_frequency_hz"] = cut.frequency;
      null_reports.push_back(nr);

      if (opt.compare) {
        const auto rep = analysis::compare_receivers(cut, pipeline::sed_column(*sed, mhz * 1e6),
                                                     pipeline::truth_column(*truth, mhz * 1e6));
        json c = io::comparison_to_json(rep);
        c["requested_mhz"] = mhz;
        comparisons.push_back(c);
      }
      s.out << "cut " << mhz << " MHz (bin " << cut.frequency / 1e6 << " MHz): " << nulls.positions.size() << " nulls\n";
    }

    json report = {{"grid", opt.grid_path}, {"axis", cfg ? "angle_rad" : "time_s"}, {"cuts", null_reports}};
    if (opt.frequencies_mhz.size() >= 2) {
      const double f0 = opt.frequencies_mhz[0], f1 = opt.frequencies_mhz[1];
      json ratio = {{"frequencies_mhz", {f0, f1}}, {"expected_ratio", f1 / f0}};
      if (spacings[0] && spacings[1]) {
        ratio["measured_ratio"] = *spacings[0] / *spacings[1];
        s.out << "spacing ratio " << f0 << "/" << f1 << " MHz: measured " << *spacings[0] / *spacings[1]
              << ", wavelength ratio " << f1 / f0 << "\n";
      } else {
        ratio["measured_ratio"] = nullptr;
        s.out << "spacing ratio " << f0 << "/" << f1 << " MHz: not enough nulls\n";
      }
      report["spacing_ratio"] = ratio;
    }
    io::write_atomic(out / "nulls.json", io::json_text(report));
    if (opt.compare) io::write_atomic(out / "comparison.json", io::json_text(json{{"comparisons", comparisons}}));
    s.out << "analysis: " << out.string() << "\n";
  } catch (const std::invalid_argument& e) {
    s.err << "analyze: " << e.what() << "\n";
    return validation_failure;
  } catch (const std::exception& e) {
    s.err << "analyze: " << e.what() << "\n";
    return runtime_failure;
  }
  return ok;
}

// Verifies a simulate output directory against its manifest and summarises the runs.
inline int cmd_report(const std::string& out_dir, Streams s) {
  const fs::path root(out_dir);
  json manifest;
  try {
    manifest = json::parse(io::read_file(root / manifest_name));
  } catch (const std::exception& e) {
    s.err << "report: " << e.what() << "\n";
    return runtime_failure;
  }
  int bad = 0;
  try {
    s.out << manifest.at("tool_version").get<std::string>() << ", config sha256 "
          << manifest.at("config_sha256").get<std::string>() << "\n";
    for (const auto& f : manifest.at("files")) {
      const fs::path p = root / f.at("path").get<std::string>();
      std::string status = "ok";
      if (!fs::exists(p)) status = "missing";
      else if (io::sha256_hex(io::read_file(p)) != f.at("sha256").get<std::string>()) status = "checksum mismatch";
      if (status != "ok") ++bad;
      s.out << "  " << f.at("path").get<std::string>() << ": " << status << "\n";
    }
    for (const auto& r : manifest.at("runs"))
      s.out << "seed " << r.at("seed").get<std::uint64_t>() << ": " << r.at("rows").get<std::size_t>() << " x "
            << r.at("cols").get<std::size_t>() << " grid, spectrum bandwidth "
            << r.at("spectrum_bandwidth_hz").get<double>() / 1e6 << " MHz, centre "
            << r.at("spectrum_center_hz").get<double>() / 1e6 << " MHz, empty bins "
            << r.at("empty_interior_bins").get<int>() << "\n";
  } catch (const json::exception& e) {
    s.err << "report: malformed manifest: " << e.what() << "\n";
    return runtime_failure;
  }
  if (bad) {
    s.err << "report: " << bad << " file(s) failed verification\n";
    return validation_failure;
  }
  return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Streams s{out, err};
  CLI::App app{"Sweeping-receiver antenna pattern simulator", "sarsweep"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);

  const std::map<std::string, config::OutputFormat> formats{{"csv", config::OutputFormat::csv},
                                                              {"json", config::OutputFormat::json}};

  std::string config_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario configuration");
  validate->add_option("--config,config", config_path, "Scenario config (JSON)")->required();

  SimulateOptions sim;
  std::string sim_format;
  std::optional<double> iq;
  auto* simulate = app.add_subcommand("simulate", "Run the pass through both receivers");
  simulate->add_option("--config,config", sim.config_path, "Scenario config (JSON)")->required();
  simulate->add_option("--out", sim.out_dir, "Output directory (default outputs.directory)");
  simulate->add_option("--seed", sim.seeds, "Seeds, comma separated")->delimiter(',');
  simulate->add_option("--format", sim_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--iq-dump", iq, "Dump the first N seconds of antenna I/Q")
      ->expected(0, 1)
      ->default_str(io::format_double(default_iq_dump_s));

  AnalyzeOptions an;
  std::string an_config, an_format = "csv";
  auto* analyze = app.add_subcommand("analyze", "Extract pattern cuts and nulls from a grid");
  analyze->add_option("grid", an.grid_path, "Grid file from simulate")->required();
  analyze->add_option("--config", an_config, "Scenario config, enables the angle axis");
  analyze->add_option("--freq", an.frequencies_mhz, "Cut frequencies in MHz, comma separated")->delimiter(',');
  analyze->add_option("--out", an.out_dir, "Output directory (default <grid dir>/analysis)");
  analyze->add_option("--format", an_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  analyze->add_flag("--compare", an.compare, "Compare against the sibling truth and SED grids");
  analyze->add_option("--prominence-db", an.prominence_db, "Minimum null depth");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Verify and summarise a simulate output directory");
  report->add_option("dir", report_dir, "Directory holding manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion& e) {
    out << tool_version << "\n";
    return ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return validation_failure;
  }

  try {
    if (*validate) return cmd_validate(config_path, s);
    if (*simulate) {
      if (!sim_format.empty()) sim.format = formats.at(sim_format);
      if (simulate->count("--iq-dump")) sim.iq_dump_s = iq.value_or(default_iq_dump_s);
      return cmd_simulate(sim, s);
    }
    if (*analyze) {
      if (!an_config.empty()) an.config_path = an_config;
      an.format = formats.at(an_format);
      return cmd_analyze(an, s);
    }
    if (*report) return cmd_report(report_dir, s);
  } catch (const std::exception& e) {
    err << "sarsweep: " << e.what() << "\n";
    return runtime_failure;
  }
  return runtime_failure;
}

}  // namespace sarsweep::cli
