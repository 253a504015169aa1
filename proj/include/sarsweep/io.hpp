#pragma once

// Serialisation: grids, spectra, cuts and reports as CSV/JSON, baseband I/Q as a small binary
// format, and temp-file-then-rename writes. Numbers use the shortest round-trip form, so equal
// values always print identically.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "sarsweep/analysis.hpp"
#include "sarsweep/receiver.hpp"
#include "sarsweep/waveform.hpp"

namespace sarsweep::io {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  if (b < e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw std::invalid_argument(what + ": not a number: '" + s + "'");
  return v;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes beside the target and renames over it, so readers never see a partial file.
inline void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

inline std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// Grid CSV: first row is "stop_duration_s" value then the frequency axis (Hz); each further
// row is a ramp start time (s) followed by that row's cells (dB).
inline std::string grid_to_csv(const receiver::PowerGrid& g) {
  std::string s = format_double(g.stop_duration);
  for (double f : g.frequencies) s += "," + format_double(f);
  s += "\n";
  for (std::size_t r = 0; r < g.rows(); ++r) {
    s += format_double(g.times[r]);
    for (std::size_t c = 0; c < g.cols(); ++c) s += "," + format_double(g.at(r, c));
    s += "\n";
  }
  return s;
}

inline receiver::PowerGrid grid_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  receiver::PowerGrid g;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    const std::string where = "grid csv line " + std::to_string(lineno);
    if (lineno == 1) {
      g.stop_duration = parse_double(cells[0], where);
      for (std::size_t i = 1; i < cells.size(); ++i) g.frequencies.push_back(parse_double(cells[i], where));
      continue;
    }
    if (cells.size() != g.cols() + 1) throw std::invalid_argument(where + ": expected " + std::to_string(g.cols() + 1) + " fields");
    g.times.push_back(parse_double(cells[0], where));
    for (std::size_t i = 1; i < cells.size(); ++i) g.power_db.push_back(parse_double(cells[i], where));
  }
  if (lineno == 0) throw std::invalid_argument("grid csv: empty document");
  g.validate();
  return g;
}

inline json grid_to_json(const receiver::PowerGrid& g) {
  return {{"stop_duration_s", g.stop_duration}, {"rows", g.rows()},         {"cols", g.cols()},
          {"times_s", g.times},                 {"frequencies_hz", g.frequencies}, {"power_db", g.power_db}};
}

inline receiver::PowerGrid grid_from_json(const json& j) {
  receiver::PowerGrid g;
  try {
    g.stop_duration = j.at("stop_duration_s").get<double>();
    g.times = j.at("times_s").get<std::vector<double>>();
    g.frequencies = j.at("frequencies_hz").get<std::vector<double>>();
    g.power_db = j.at("power_db").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("grid json: ") + e.what());
  }
  g.validate();
  return g;
}

// Dispatch on extension.
inline receiver::PowerGrid load_grid(const fs::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".json") {
    try {
      return grid_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("grid json: " + std::string(e.what()));
    }
  }
  return grid_from_csv(text);
}

inline std::string spectrum_to_csv(const receiver::SpectrumEstimate& s) {
  std::string out = "frequency_hz,power_db\n";
  for (std::size_t i = 0; i < s.frequencies.size(); ++i)
    out += format_double(s.frequencies[i]) + "," + format_double(s.power_db[i]) + "\n";
  return out;
}

inline json spectrum_to_json(const receiver::SpectrumEstimate& s) {
  return {{"frequencies_hz", s.frequencies},
          {"power_db", s.power_db},
          {"peak_db", s.peak_db},
          {"center_frequency_hz", s.center_frequency},
          {"lower_edge_hz", s.lower_edge},
          {"upper_edge_hz", s.upper_edge},
          {"bandwidth_hz", s.bandwidth},
          {"empty_interior_bins", s.empty_interior_bins}};
}

inline std::string cut_to_csv(const analysis::PatternCut& c) {
  std::string out = "time_s,angle_rad,angle_deg,power_db\n";
  for (const auto& p : c.points) {
    out += format_double(p.time) + ",";
    out += c.has_angle ? format_double(p.angle) + "," + format_double(rad_to_deg(p.angle)) : std::string(",");
    out += "," + format_double(p.power_db) + "\n";
  }
  return out;
}

// Two columns for plotting tools: angle in degrees (or time if no angle) and power.
inline std::string cut_to_plot(const analysis::PatternCut& c) {
  std::string out = c.has_angle ? "angle_deg,power_db\n" : "time_s,power_db\n";
  for (const auto& p : c.points)
    out += format_double(c.has_angle ? rad_to_deg(p.angle) : p.time) + "," + format_double(p.power_db) + "\n";
  return out;
}

inline json cut_to_json(const analysis::PatternCut& c) {
  json pts = json::array();
  for (const auto& p : c.points) {
    json e = {{"time_s", p.time}, {"power_db", p.power_db}};
    if (c.has_angle) e["angle_rad"] = p.angle;
    pts.push_back(e);
  }
  return {{"frequency_hz", c.frequency}, {"normalization_db", c.normalization_db}, {"dwell_s", c.dwell},
          {"has_angle", c.has_angle},    {"points", pts}};
}

inline json null_report_to_json(const analysis::NullReport& r) {
  json j = {{"axis", r.on_angle_axis ? "angle_rad" : "time_s"}, {"positions", r.positions}, {"spacings", r.spacings}};
  j["mean_spacing"] = r.mean_spacing ? json(*r.mean_spacing) : json(nullptr);
  return j;
}

inline json comparison_to_json(const analysis::ComparisonReport& r) {
  json j = {{"nsr_correlation", r.nsr_correlation},
            {"sed_correlation", r.sed_correlation},
            {"nsr_rms_error_db", r.nsr_rms_error_db},
            {"sed_rms_error_db", r.sed_rms_error_db}};
  j["measured_snr_gain_db"] = r.measured_snr_gain_db ? json(*r.measured_snr_gain_db) : json("not-applicable");
  return j;
}

inline std::string json_text(const json& j) { return j.dump(2) + "\n"; }

// I/Q file: 8-byte magic "SARSWIQ1", then little-endian float64 sample_rate, center_frequency,
// start_time, uint64 sample count, then interleaved float32 I, Q.
inline constexpr char iq_magic[8] = {'S', 'A', 'R', 'S', 'W', 'I', 'Q', '1'};

namespace detail {
template <class T>
void put_le(std::string& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}
template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::invalid_argument("iq file: truncated");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}
}  // namespace detail

inline std::string iq_to_binary(const BasebandSignal& s) {
  std::string out(iq_magic, iq_magic + 8);
  detail::put_le(out, s.sample_rate);
  detail::put_le(out, s.center_frequency);
  detail::put_le(out, s.start_time);
  detail::put_le(out, static_cast<std::uint64_t>(s.samples.size()));
  for (const auto& z : s.samples) {
    detail::put_le(out, static_cast<float>(z.real()));
    detail::put_le(out, static_cast<float>(z.imag()));
  }
  return out;
}

inline BasebandSignal iq_from_binary(const std::string& in) {
  if (in.size() < 8 || std::memcmp(in.data(), iq_magic, 8) != 0) throw std::invalid_argument("iq file: bad magic");
  std::size_t pos = 8;
  BasebandSignal s;
  s.sample_rate = detail::get_le<double>(in, pos);
  s.center_frequency = detail::get_le<double>(in, pos);
  s.start_time = detail::get_le<double>(in, pos);
  const auto n = detail::get_le<std::uint64_t>(in, pos);
  if (in.size() - pos != n * 8) throw std::invalid_argument("iq file: sample count does not match the payload");
  s.samples.resize(n);
  for (auto& z : s.samples) {
    const float re = detail::get_le<float>(in, pos);
    const float im = detail::get_le<float>(in, pos);
    z = {re, im};
  }
  return s;
}

inline std::string signal_to_csv(const BasebandSignal& s) {
  std::string out = "index,time_s,i,q\n";
  for (std::int64_t n = 0; n < s.size(); ++n) {
    const auto z = s.at(n);
    out += std::to_string(n) + "," + format_double(s.time_of(n)) + "," + format_double(z.real()) + "," +
           format_double(z.imag()) + "\n";
  }
  return out;
}

inline std::string sed_to_csv(const receiver::SedSeries& s) {
  std::string out = "time_s,power_db\n";
  for (std::size_t i = 0; i < s.size(); ++i) out += format_double(s.times[i]) + "," + format_double(s.power_db[i]) + "\n";
  return out;
}

}  // namespace sarsweep::io
