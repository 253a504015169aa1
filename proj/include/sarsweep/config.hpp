#pragma once

// Scenario configuration: JSON with unit-suffixed keys, parsed into the library's parameter
// structs. Parsing collects every problem instead of stopping at the first.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarsweep/antenna.hpp"
#include "sarsweep/receiver.hpp"
#include "sarsweep/waveform.hpp"

namespace sarsweep::config {

using nlohmann::json;

struct DlvaConfig {
  double slope_v_per_decade = 0.25;
  double dynamic_range_db = 70.0;
  std::optional<double> noise_floor_w;  // default: K T B of the receiver's filter
};

struct NsrConfig {
  double bpf_hz = 400e6;
  double nbpf_hz = 10e6;
  double ramp_period_s = 0.1;
  double start_frequency_hz = 9.4e9;
  double capture_s = 0.0;  // 0 = whole stop
  receiver::StopStatistic statistic = receiver::StopStatistic::peak;
  DlvaConfig dlva;
  receiver::AdcParams adc;
};

using receiver::WindowReduce;

struct SedConfig {
  double bpf_hz = 400e6;
  WindowReduce window_statistic = WindowReduce::peak;
  DlvaConfig dlva;
  receiver::AdcParams adc;
};

struct AntennaConfig {
  antenna::ArrayGeometry geometry{100, 1, 0.015, 0.015};
  double alpha_phase_rad = 0.0;
  double beta_phase_rad = 0.0;
  antenna::ElementFactor element = antenna::ElementFactor::isotropic();
};

struct PassConfig {
  double transmit_power_w = 2500.0;
  double tx_gain_boresight = 3162.2776601683795;
  double rx_gain = 1.0;
  double range_m = 550e3;
  double system_noise_temperature_k = 290.0;
  double ground_beam_speed_m_per_s = 8000.0;
  double duration_s = 7.0;
};

enum class OutputFormat { csv, json };

struct OutputConfig {
  std::string directory = "out";
  OutputFormat format = OutputFormat::csv;
  double iq_dump_s = 0.0;  // 0 disables the I/Q dump
};

struct ScenarioConfig {
  PulseTrainParams emitter{9.6e9, 160e6, 560e-6, 2.8e-3, 400e6};  // synthetic timing, 20% duty
  PassConfig pass;
  AntennaConfig antenna;
  NsrConfig nsr;
  SedConfig sed;
  bool noise_enabled = true;
  std::vector<std::uint64_t> seeds{1};
  OutputConfig outputs;

  receiver::SweepPlan sweep_plan() const {
    return receiver::make_sweep_plan(nsr.bpf_hz, nsr.nbpf_hz, nsr.ramp_period_s, nsr.start_frequency_hz);
  }

  antenna::PatternCutModel pattern_model() const {
    antenna::ExcitationPlan exc;
    exc.alpha_phase = antenna.alpha_phase_rad;
    exc.beta_phase = antenna.beta_phase_rad;
    return {antenna.element, antenna.geometry, exc};
  }

  PassScenario scenario() const {
    PassScenario s;
    s.transmit_power = pass.transmit_power_w;
    s.tx_gain_boresight = pass.tx_gain_boresight;
    s.rx_gain = pass.rx_gain;
    s.range = pass.range_m;
    s.system_noise_temperature = pass.system_noise_temperature_k;
    s.ground_beam_speed = pass.ground_beam_speed_m_per_s;
    s.pass_duration = pass.duration_s;
    s.antenna_cut = [model = pattern_model()](double theta, double f) { return model(theta, f); };
    return s;
  }

  double noise_density() const { return boltzmann * pass.system_noise_temperature_k; }

  receiver::DlvaParams dlva_for(const DlvaConfig& d, double bandwidth) const {
    return receiver::make_dlva(d.noise_floor_w.value_or(noise_density() * bandwidth), d.slope_v_per_decade,
                               d.dynamic_range_db);
  }
  receiver::DlvaParams nsr_dlva() const { return dlva_for(nsr.dlva, nsr.nbpf_hz); }
  receiver::DlvaParams sed_dlva() const { return dlva_for(sed.dlva, sed.bpf_hz); }
};

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Reads fields from one JSON object, recording type errors and unknown keys by path.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) errors_.push_back(path_ + ": expected an object");
  }
  ~Reader() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      // Keys starting with '_' are free-form notes.
      if (!key.starts_with('_') && std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        errors_.push_back(field(key) + ": unknown field");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.push_back(key);
    return obj_.is_object() && obj_.contains(key) && !obj_.at(key).is_null();
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_number()) {
      errors_.push_back(field(key) + ": expected a number");
      return;
    }
    out = v.get<double>();
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    out = v;
  }
  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) {
      errors_.push_back(field(key) + ": expected an integer");
      return;
    }
    out = v.get<int>();
  }
  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) {
      errors_.push_back(field(key) + ": expected true or false");
      return;
    }
    out = v.get<bool>();
  }
  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = obj_.at(key);
    if (!v.is_string()) {
      errors_.push_back(field(key) + ": expected a string");
      return;
    }
    out = v.get<std::string>();
  }
  template <class Fn>
  void object(const std::string& key, Fn&& fn) {
    if (!has(key)) return;
    Reader sub(obj_.at(key), field(key), errors_);
    fn(sub);
  }
  const json* raw(const std::string& key) { return has(key) ? &obj_.at(key) : nullptr; }
  std::vector<std::string>& errors() { return errors_; }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::vector<std::string> seen_;
};

inline void read_dlva(Reader& r, DlvaConfig& d) {
  r.number("slope_v_per_decade", d.slope_v_per_decade);
  r.number("dynamic_range_db", d.dynamic_range_db);
  r.number("noise_floor_w", d.noise_floor_w);
}

inline void read_adc(Reader& r, receiver::AdcParams& a) {
  r.integer("bits", a.bits);
  r.number("full_scale_v", a.full_scale);
  r.number("sample_rate_hz", a.sample_rate);
}

}  // namespace detail

struct ParseResult {
  ScenarioConfig config;
  std::vector<std::string> errors;  // syntax, type and unknown-field problems
  bool ok() const { return errors.empty(); }
};

// Defaults fill anything the document leaves out.
inline ParseResult parse_config(const std::string& text) {
  ParseResult res;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::string where = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    res.errors.push_back("parse error at " + where + ": " + (pos == std::string::npos ? what : what.substr(pos)));
    return res;
  }
  auto& c = res.config;
  {
  detail::Reader root(doc, "", res.errors);
  root.object("emitter", [&](detail::Reader& r) {
    r.number("center_frequency_hz", c.emitter.center_frequency);
    r.number("chirp_bandwidth_hz", c.emitter.chirp_bandwidth);
    r.number("pulse_width_s", c.emitter.pulse_width);
    r.number("pri_s", c.emitter.pri);
    r.number("sample_rate_hz", c.emitter.sample_rate);
    bool synthetic = true;
    r.boolean("synthetic_timing", synthetic);
  });
  root.object("pass", [&](detail::Reader& r) {
    r.number("transmit_power_w", c.pass.transmit_power_w);
    r.number("tx_gain_boresight", c.pass.tx_gain_boresight);
    r.number("rx_gain", c.pass.rx_gain);
    r.number("range_m", c.pass.range_m);
    r.number("system_noise_temperature_k", c.pass.system_noise_temperature_k);
    r.number("ground_beam_speed_m_per_s", c.pass.ground_beam_speed_m_per_s);
    r.number("duration_s", c.pass.duration_s);
  });
  root.object("antenna", [&](detail::Reader& r) {
    r.integer("m_count", c.antenna.geometry.m_count);
    r.integer("n_count", c.antenna.geometry.n_count);
    r.number("spacing_x_m", c.antenna.geometry.spacing_x);
    r.number("spacing_y_m", c.antenna.geometry.spacing_y);
    r.number("alpha_phase_rad", c.antenna.alpha_phase_rad);
    r.number("beta_phase_rad", c.antenna.beta_phase_rad);
    r.object("element", [&](detail::Reader& e) {
      std::string model = "isotropic";
      double exponent = 1.0;
      e.string("model", model);
      e.number("exponent", exponent);
      if (model == "isotropic") {
        c.antenna.element = antenna::ElementFactor::isotropic();
      } else if (model == "cosine_power") {
        c.antenna.element = {antenna::ElementFactor::Model::cosine_power, exponent};
      } else {
        e.errors().push_back(e.field("model") + ": expected \"isotropic\" or \"cosine_power\"");
      }
    });
  });
  root.object("nsr", [&](detail::Reader& r) {
    r.number("bpf_hz", c.nsr.bpf_hz);
    r.number("nbpf_hz", c.nsr.nbpf_hz);
    r.number("ramp_period_s", c.nsr.ramp_period_s);
    r.number("start_frequency_hz", c.nsr.start_frequency_hz);
    r.number("capture_s", c.nsr.capture_s);
    std::string stat = "peak";
    r.string("statistic", stat);
    if (stat == "peak") c.nsr.statistic = receiver::StopStatistic::peak;
    else if (stat == "sample") c.nsr.statistic = receiver::StopStatistic::sample;
    else r.errors().push_back(r.field("statistic") + ": expected \"peak\" or \"sample\"");
    r.object("dlva", [&](detail::Reader& d) { detail::read_dlva(d, c.nsr.dlva); });
    r.object("adc", [&](detail::Reader& a) { detail::read_adc(a, c.nsr.adc); });
  });
  root.object("sed", [&](detail::Reader& r) {
    r.number("bpf_hz", c.sed.bpf_hz);
    std::string stat = "peak";
    r.string("window_statistic", stat);
    if (stat == "peak") c.sed.window_statistic = WindowReduce::peak;
    else if (stat == "mean") c.sed.window_statistic = WindowReduce::mean;
    else if (stat == "centre") c.sed.window_statistic = WindowReduce::centre;
    else r.errors().push_back(r.field("window_statistic") + ": expected \"peak\", \"mean\" or \"centre\"");
    r.object("dlva", [&](detail::Reader& d) { detail::read_dlva(d, c.sed.dlva); });
    r.object("adc", [&](detail::Reader& a) { detail::read_adc(a, c.sed.adc); });
  });
  root.object("noise", [&](detail::Reader& r) { r.boolean("enabled", c.noise_enabled); });
  if (const json* seeds = root.raw("seeds")) {
    c.seeds.clear();
    if (!seeds->is_array()) {
      res.errors.push_back("seeds: expected an array of non-negative integers");
    } else {
      for (const auto& s : *seeds) {
        if (!s.is_number_unsigned()) {
          res.errors.push_back("seeds: expected an array of non-negative integers");
          break;
        }
        c.seeds.push_back(s.get<std::uint64_t>());
      }
    }
  }
  root.object("outputs", [&](detail::Reader& r) {
    r.string("directory", c.outputs.directory);
    std::string fmt = "csv";
    r.string("format", fmt);
    if (fmt == "csv") c.outputs.format = OutputFormat::csv;
    else if (fmt == "json") c.outputs.format = OutputFormat::json;
    else r.errors().push_back(r.field("format") + ": expected \"csv\" or \"json\"");
    r.number("iq_dump_s", c.outputs.iq_dump_s);
  });
  }  // root reports unknown top-level fields here
  return res;
}

inline ParseResult load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult r;
    r.errors.push_back("cannot open config file '" + path + "'");
    return r;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// Every violated invariant, each naming its field. Empty means the scenario can run.
inline std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> errs;
  auto positive = [&](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) errs.push_back(std::string(name) + ": must be > 0");
  };
  positive(c.emitter.center_frequency, "emitter.center_frequency_hz");
  if (!(c.emitter.chirp_bandwidth >= 0.0)) errs.push_back("emitter.chirp_bandwidth_hz: must be >= 0");
  positive(c.emitter.pulse_width, "emitter.pulse_width_s");
  positive(c.emitter.pri, "emitter.pri_s");
  positive(c.emitter.sample_rate, "emitter.sample_rate_hz");
  if (c.emitter.pulse_width > c.emitter.pri) errs.push_back("emitter.pulse_width_s: must not exceed emitter.pri_s");
  if (c.emitter.sample_rate < 2.5 * c.emitter.chirp_bandwidth)
    errs.push_back("emitter.sample_rate_hz: must be >= 2.5 x emitter.chirp_bandwidth_hz");

  positive(c.pass.transmit_power_w, "pass.transmit_power_w");
  positive(c.pass.tx_gain_boresight, "pass.tx_gain_boresight");
  positive(c.pass.rx_gain, "pass.rx_gain");
  positive(c.pass.range_m, "pass.range_m");
  positive(c.pass.system_noise_temperature_k, "pass.system_noise_temperature_k");
  positive(c.pass.ground_beam_speed_m_per_s, "pass.ground_beam_speed_m_per_s");
  positive(c.pass.duration_s, "pass.duration_s");

  if (c.antenna.geometry.m_count < 1) errs.push_back("antenna.m_count: must be >= 1");
  if (c.antenna.geometry.n_count < 1) errs.push_back("antenna.n_count: must be >= 1");
  positive(c.antenna.geometry.spacing_x, "antenna.spacing_x_m");
  positive(c.antenna.geometry.spacing_y, "antenna.spacing_y_m");
  if (c.antenna.element.model == antenna::ElementFactor::Model::cosine_power && !(c.antenna.element.exponent >= 0.0))
    errs.push_back("antenna.element.exponent: must be >= 0");

  positive(c.nsr.bpf_hz, "nsr.bpf_hz");
  positive(c.nsr.nbpf_hz, "nsr.nbpf_hz");
  positive(c.nsr.ramp_period_s, "nsr.ramp_period_s");
  if (c.nsr.nbpf_hz > c.nsr.bpf_hz) errs.push_back("nsr.nbpf_hz: must not exceed nsr.bpf_hz");
  if (c.nsr.capture_s < 0.0) errs.push_back("nsr.capture_s: must be >= 0");
  positive(c.sed.bpf_hz, "sed.bpf_hz");

  auto check_dlva = [&](const DlvaConfig& d, const std::string& where) {
    positive(d.slope_v_per_decade, (where + ".slope_v_per_decade").c_str());
    positive(d.dynamic_range_db, (where + ".dynamic_range_db").c_str());
    if (d.noise_floor_w) positive(*d.noise_floor_w, (where + ".noise_floor_w").c_str());
  };
  auto check_adc = [&](const receiver::AdcParams& a, const std::string& where) {
    if (a.bits < 4 || a.bits > 24) errs.push_back(where + ".bits: must be in [4, 24]");
    positive(a.full_scale, (where + ".full_scale_v").c_str());
    positive(a.sample_rate, (where + ".sample_rate_hz").c_str());
    if (a.sample_rate > c.emitter.sample_rate) errs.push_back(where + ".sample_rate_hz: must not exceed emitter.sample_rate_hz");
  };
  check_dlva(c.nsr.dlva, "nsr.dlva");
  check_dlva(c.sed.dlva, "sed.dlva");
  check_adc(c.nsr.adc, "nsr.adc");
  check_adc(c.sed.adc, "sed.adc");
  if (c.seeds.empty()) errs.push_back("seeds: at least one seed is required");
  if (c.outputs.directory.empty()) errs.push_back("outputs.directory: must not be empty");
  if (c.outputs.iq_dump_s < 0.0) errs.push_back("outputs.iq_dump_s: must be >= 0");
  if (!errs.empty()) return errs;

  // Cross-field checks that need a consistent base.
  const double band_lo = c.emitter.center_frequency - c.emitter.sample_rate / 2.0;
  const double band_hi = c.emitter.center_frequency + c.emitter.sample_rate / 2.0;
  try {
    const auto plan = c.sweep_plan();
    const auto v = receiver::validate_sweep_plan(plan, c.emitter.pri);
    if (!v.valid) errs.push_back("nsr: " + v.message + " (sweep validity requires T_stop < PRI)");
    const double tol = 1e-9 * c.emitter.sample_rate;
    if (plan.start_frequency < band_lo - tol || plan.stop_frequency() > band_hi + tol)
      errs.push_back("nsr.start_frequency_hz: sweep span exceeds the simulated band [" + std::to_string(band_lo) +
                     ", " + std::to_string(band_hi) + "] Hz");
    if (c.nsr.capture_s > plan.stop_duration)
      errs.push_back("nsr.capture_s: must not exceed the stop duration " + std::to_string(plan.stop_duration) + " s");
    if (c.pass.duration_s < plan.ramp_period * (1.0 - 1e-9))
      errs.push_back("pass.duration_s: must cover at least one nsr.ramp_period_s");
  } catch (const std::invalid_argument& e) {
    errs.push_back(std::string("nsr: ") + e.what());
  }
  if (c.sed.bpf_hz > c.emitter.sample_rate * (1.0 + 1e-9))
    errs.push_back("sed.bpf_hz: must not exceed the simulated band emitter.sample_rate_hz");
  if (c.outputs.iq_dump_s > c.pass.duration_s) errs.push_back("outputs.iq_dump_s: must not exceed pass.duration_s");
  return errs;
}

}  // namespace sarsweep::config
