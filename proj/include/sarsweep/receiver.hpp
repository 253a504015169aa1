#pragma once

// Behavioural receiver chains: the narrowband sweeper (stepped LO, brick-wall NBPF, DLVA,
// ADC, per-stop statistic) and the wideband envelope detector (BPF, DLVA, ADC).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarsweep/constants.hpp"
#include "sarsweep/fft.hpp"
#include "sarsweep/waveform.hpp"

namespace sarsweep::receiver {

struct SweepPlan {
  double ramp_period = 0.0;      // T, s
  double stop_duration = 0.0;    // T_stop, s
  double nbpf_bandwidth = 0.0;   // Hz
  double bpf_bandwidth = 0.0;    // Hz, total swept span
  double start_frequency = 0.0;  // Hz, lower edge of the swept span
  int step_count = 0;

  double step_center(int i) const { return start_frequency + (i + 0.5) * nbpf_bandwidth; }
  double stop_frequency() const { return start_frequency + bpf_bandwidth; }

  void validate() const {
    if (!(nbpf_bandwidth > 0.0) || !(bpf_bandwidth >= nbpf_bandwidth))
      throw std::invalid_argument("SweepPlan: require 0 < nbpf <= bpf");
    if (!(stop_duration > 0.0) || !(ramp_period > 0.0))
      throw std::invalid_argument("SweepPlan: ramp_period and stop_duration must be > 0");
    if (step_count < 1) throw std::invalid_argument("SweepPlan: step_count must be >= 1");
  }
};

// T_stop = (NBPF / BPF) T. Steps tile the span edge to edge, so adjacent ideal filters meet
// at their half-power points.
inline SweepPlan make_sweep_plan(double bpf, double nbpf, double ramp_period,
                                 double start_frequency = 0.0) {
  if (!(nbpf > 0.0) || !std::isfinite(nbpf) || !std::isfinite(bpf))
    throw std::invalid_argument("make_sweep_plan: nbpf must be > 0");
  if (nbpf > bpf)
    throw std::invalid_argument("make_sweep_plan: nbpf must not exceed bpf");
  if (!(ramp_period > 0.0) || !std::isfinite(ramp_period))
    throw std::invalid_argument("make_sweep_plan: ramp_period must be > 0");
  const double ratio = bpf / nbpf;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * ratio)
    throw std::invalid_argument("make_sweep_plan: bpf must be an integer multiple of nbpf");
  SweepPlan plan;
  plan.ramp_period = ramp_period;
  plan.stop_duration = nbpf / bpf * ramp_period;
  plan.nbpf_bandwidth = nbpf;
  plan.bpf_bandwidth = bpf;
  plan.start_frequency = start_frequency;
  plan.step_count = static_cast<int>(steps);
  return plan;
}

struct SweepValidity {
  bool valid = false;
  double margin = 0.0;  // PRI - T_stop, s
  std::string message;
};

// Valid iff T_stop < PRI (strict).
inline SweepValidity validate_sweep_plan(const SweepPlan& plan, double pri) {
  if (!(pri > 0.0)) throw std::invalid_argument("validate_sweep_plan: pri must be > 0");
  SweepValidity v;
  v.margin = pri - plan.stop_duration;
  v.valid = plan.stop_duration < pri;
  v.message = v.valid ? "T_stop < PRI holds"
                      : "stop duration T_stop = (NBPF/BPF) x T = " + std::to_string(plan.stop_duration) +
                            " s must be < PRI = " + std::to_string(pri) + " s";
  return v;
}

struct DlvaParams {
  double slope = 0.25;            // V per decade of input power (25 mV/dB)
  double offset = 0.0;            // V
  double dynamic_range_db = 70.0;
  double noise_floor = 1e-13;     // W

  double floor_volts() const { return slope * std::log10(noise_floor) + offset; }
  double ceiling_volts() const { return floor_volts() + slope * dynamic_range_db / 10.0; }

  void validate() const {
    if (!(slope > 0.0)) throw std::invalid_argument("DlvaParams: slope must be > 0");
    if (!(dynamic_range_db > 0.0)) throw std::invalid_argument("DlvaParams: dynamic_range must be > 0");
    if (!(noise_floor > 0.0)) throw std::invalid_argument("DlvaParams: noise_floor must be > 0");
    if (!std::isfinite(offset)) throw std::invalid_argument("DlvaParams: offset must be finite");
  }
};

// Offset chosen so the DLVA's output span sits centred on 0 V.
inline DlvaParams make_dlva(double noise_floor, double slope = 0.25, double dynamic_range_db = 70.0) {
  DlvaParams d;
  d.slope = slope;
  d.dynamic_range_db = dynamic_range_db;
  d.noise_floor = noise_floor;
  d.offset = -slope * std::log10(noise_floor) - slope * dynamic_range_db / 20.0;
  d.validate();
  return d;
}

inline double dlva_detect(double power, const DlvaParams& p) {
  const double v = p.slope * std::log10(std::max(power, p.noise_floor)) + p.offset;
  return std::min(v, p.ceiling_volts());
}

// Inverse of the linear region: detected volts back to dBW.
inline double dlva_to_db(double volts, const DlvaParams& p) {
  return 10.0 * (volts - p.offset) / p.slope;
}

struct AdcParams {
  int bits = 12;
  double full_scale = 1.0;  // V, input range is [-full_scale, +full_scale]
  double sample_rate = 10e6;

  double lsb() const { return 2.0 * full_scale / std::ldexp(1.0, bits); }

  void validate() const {
    if (bits < 4 || bits > 24) throw std::invalid_argument("AdcParams: bits must be in [4, 24]");
    if (!(full_scale > 0.0)) throw std::invalid_argument("AdcParams: full_scale must be > 0");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("AdcParams: sample_rate must be > 0");
  }

  // Mid-rise: levels at (k + 1/2) LSB, clipped to +-(full_scale - LSB/2).
  double quantize(double v) const {
    const double q = lsb();
    const double top = std::ldexp(1.0, bits - 1);
    double k = std::floor(v / q);
    k = std::clamp(k, -top, top - 1.0);
    return (k + 0.5) * q;
  }
};

inline std::vector<double> adc_quantize(std::span<const double> samples, const AdcParams& params) {
  params.validate();
  std::vector<double> out(samples.size());
  std::transform(samples.begin(), samples.end(), out.begin(),
                 [&](double v) { return params.quantize(v); });
  return out;
}

// Detected log power, rows = ramps, columns = sweep steps.
struct PowerGrid {
  std::vector<double> times;        // ramp start times, s
  std::vector<double> frequencies;  // step centre frequencies, Hz
  double stop_duration = 0.0;       // s
  std::vector<double> power_db;     // row-major [times x frequencies]

  std::size_t rows() const { return times.size(); }
  std::size_t cols() const { return frequencies.size(); }
  double bin_width() const { return cols() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
  double& at(std::size_t r, std::size_t c) { return power_db[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return power_db[r * cols() + c]; }
  // Centre of the stop window that produced cell (r, c).
  double cell_time(std::size_t r, std::size_t c) const {
    return times[r] + (static_cast<double>(c) + 0.5) * stop_duration;
  }

  void validate() const {
    if (power_db.size() != rows() * cols())
      throw std::invalid_argument("PowerGrid: matrix size does not match axes");
    for (std::size_t i = 1; i < frequencies.size(); ++i)
      if (!(frequencies[i] > frequencies[i - 1]))
        throw std::invalid_argument("PowerGrid: frequencies must be ascending");
  }
};

enum class StopStatistic { peak, sample };

// Receiver-internal thermal noise. power is the total over the represented band (K T fs); each
// chain sees only what its filter passes.
struct ReceiverNoise {
  double power = 0.0;  // W
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t nsr_noise_stream = 1;
inline constexpr std::uint64_t sed_noise_stream = 2;

struct NsrOptions {
  double capture_duration = 0.0;  // s; 0 captures the whole stop, otherwise centred in it
  StopStatistic statistic = StopStatistic::peak;
  ReceiverNoise noise;
  std::vector<int> steps;  // steps to evaluate, empty for all; other cells are NaN
};

namespace detail {

inline std::vector<bool> step_mask(int step_count, const std::vector<int>& steps) {
  std::vector<bool> mask(static_cast<std::size_t>(step_count), steps.empty());
  for (int s : steps) {
    if (s < 0 || s >= step_count) throw std::invalid_argument("step index " + std::to_string(s) + " outside the sweep");
    mask[static_cast<std::size_t>(s)] = true;
  }
  return mask;
}

// Ideal filter amplitude: 1 in band, 1/sqrt2 on the band edge, 0 outside.
inline double brickwall_weight(double f, double center, double bandwidth, double bin_spacing) {
  const double d = std::abs(f - center) - bandwidth / 2.0;
  if (std::abs(d) <= 1e-6 * bin_spacing) return std::numbers::sqrt2 / 2.0;
  return d < 0.0 ? 1.0 : 0.0;
}

// Visits FFT bins (index, weight) of an n-point transform within the band.
template <class Fn>
void for_each_band_bin(std::size_t n, double sample_rate, double center, double bandwidth, Fn&& fn) {
  const double df = sample_rate / static_cast<double>(n);
  const auto lo = static_cast<std::int64_t>(std::ceil((center - bandwidth / 2.0) / df - 1e-6));
  const auto hi = static_cast<std::int64_t>(std::floor((center + bandwidth / 2.0) / df + 1e-6));
  const auto sn = static_cast<std::int64_t>(n);
  for (std::int64_t k = std::max(lo, -(sn / 2)); k <= std::min(hi, (sn - 1) / 2); ++k) {
    const double w = brickwall_weight(static_cast<double>(k) * df, center, bandwidth, df);
    if (w == 0.0) continue;
    fn(static_cast<std::size_t>(((k % sn) + sn) % sn), w);
  }
}

inline bool integral_ratio(double a, double b, std::int64_t& out) {
  const double r = a / b;
  const double rr = std::round(r);
  out = static_cast<std::int64_t>(rr);
  return rr >= 1.0 && std::abs(r - rr) < 1e-9 * r;
}

}  // namespace detail

// Swept narrowband receiver. Each stop window is captured, shifted by the step's LO offset
// (a bin selection in the window spectrum), filtered to NBPF, envelope detected at the ADC
// instants, passed through DLVA and ADC, and reduced to one cell.
template <SampleSource S>
PowerGrid nsr_process(const S& source, const SweepPlan& plan, const DlvaParams& dlva,
                      const AdcParams& adc, const NsrOptions& options = {}) {
  plan.validate();
  dlva.validate();
  adc.validate();
  const double fs = source.sample_rate;
  const double fc = source.center_frequency;
  const double tol = 1e-9 * fs;
  if (plan.start_frequency < fc - fs / 2.0 - tol || plan.stop_frequency() > fc + fs / 2.0 + tol)
    throw std::invalid_argument("nsr_process: sweep span exceeds the signal's represented band");
  const double duration = static_cast<double>(source.size()) / fs;
  if (duration < plan.ramp_period * (1.0 - 1e-9))
    throw std::invalid_argument("nsr_process: signal shorter than one ramp period");

  const auto rows = static_cast<std::size_t>(std::floor(duration / plan.ramp_period + 1e-9));
  const std::int64_t window = std::llround(plan.stop_duration * fs);
  std::int64_t capture = options.capture_duration > 0.0 ? std::llround(options.capture_duration * fs) : window;
  if (capture > window)
    throw std::invalid_argument("nsr_process: capture longer than the stop duration");
  std::int64_t decim = 0;
  const bool folded = detail::integral_ratio(fs, adc.sample_rate, decim);
  if (folded) capture = capture / decim * decim;
  if (capture < 1 || (folded && capture < decim))
    throw std::invalid_argument("nsr_process: capture shorter than one ADC sample");

  PowerGrid grid;
  grid.stop_duration = plan.stop_duration;
  grid.frequencies.resize(static_cast<std::size_t>(plan.step_count));
  for (int i = 0; i < plan.step_count; ++i) grid.frequencies[static_cast<std::size_t>(i)] = plan.step_center(i);
  grid.times.resize(rows);
  grid.power_db.resize(rows * grid.cols());

  const auto n = static_cast<std::size_t>(capture);
  const bool noisy = options.noise.power > 0.0;
  const std::uint64_t key = noise::stream_key(options.noise.seed, nsr_noise_stream);
  // White noise of variance P per sample has variance n P in every unnormalised DFT bin.
  const double bin_noise = options.noise.power * static_cast<double>(n);
  FftCache ffts;
  FftPlan& fwd = ffts.forward(n);
  const std::size_t out_len = folded ? n / static_cast<std::size_t>(decim) : n;
  FftPlan& inv = ffts.inverse(out_len);
  std::vector<double> powers;
  const auto mask = detail::step_mask(plan.step_count, options.steps);

  for (std::size_t r = 0; r < rows; ++r) {
    grid.times[r] = source.start_time + static_cast<double>(r) * plan.ramp_period;
    for (int i = 0; i < plan.step_count; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) {
        grid.at(r, static_cast<std::size_t>(i)) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const double wstart = static_cast<double>(r) * plan.ramp_period + i * plan.stop_duration;
      const std::int64_t c0 = std::llround(wstart * fs) + (window - capture) / 2;
      auto x = fwd.data();
      for (std::size_t k = 0; k < n; ++k) {
        const std::int64_t idx = c0 + static_cast<std::int64_t>(k);
        x[k] = idx < source.size() ? cplx(source.at(idx)) : cplx{0.0, 0.0};
      }
      fwd.execute();

      auto y = inv.data();
      std::fill(y.begin(), y.end(), cplx{0.0, 0.0});
      const double lo_offset = plan.step_center(i) - fc;
      const auto cell = static_cast<std::uint64_t>(r * grid.cols() + static_cast<std::size_t>(i));
      // Folding bins modulo out_len is the spectral image of keeping every decim-th sample.
      detail::for_each_band_bin(n, fs, lo_offset, plan.nbpf_bandwidth, [&](std::size_t k, double w) {
        cplx v = x[k];
        if (noisy) v += noise::sample(key, static_cast<std::int64_t>(cell * n + k), bin_noise);
        y[k % out_len] += w * v;
      });
      inv.execute();

      powers.clear();
      const double scale = 1.0 / static_cast<double>(n);
      if (folded) {
        for (std::size_t m = 0; m < out_len; ++m) powers.push_back(std::norm(y[m] * scale));
      } else {
        const double step = fs / adc.sample_rate;
        for (std::size_t j = 0;; ++j) {
          const auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(j) * step));
          if (idx >= n) break;
          powers.push_back(std::norm(y[idx] * scale));
        }
      }
      // DLVA and ADC are monotone, so the peak can be taken before them.
      double p = 0.0;
      if (options.statistic == StopStatistic::peak)
        p = *std::max_element(powers.begin(), powers.end());
      else
        p = powers[powers.size() / 2];
      grid.at(r, static_cast<std::size_t>(i)) = dlva_to_db(adc.quantize(dlva_detect(p, dlva)), dlva);
    }
  }
  return grid;
}

// Wideband envelope detector over source samples [begin, end). Calls visit(time, power_db) for
// each ADC instant in the range; ADC instants are on a global grid, so split ranges agree with
// one long scan. When the BPF covers the whole represented band the filter is the identity and
// only the ADC instants are evaluated; otherwise the range is brick-wall filtered in blocks.
template <SampleSource S, class Visitor>
void sed_scan_range(const S& source, double bpf, const DlvaParams& dlva, const AdcParams& adc,
                    std::int64_t begin, std::int64_t end, const ReceiverNoise& rx_noise, Visitor&& visit) {
  dlva.validate();
  adc.validate();
  const double fs = source.sample_rate;
  if (!(bpf > 0.0) || bpf > fs * (1.0 + 1e-9))
    throw std::invalid_argument("sed_process: bpf must be in (0, represented band]");
  if (adc.sample_rate > fs * (1.0 + 1e-9))
    throw std::invalid_argument("sed_process: ADC rate exceeds the signal sample rate");
  begin = std::max<std::int64_t>(begin, 0);
  end = std::min<std::int64_t>(end, source.size());
  if (begin >= end) return;
  const double step = fs / adc.sample_rate;
  const bool noisy = rx_noise.power > 0.0;
  const std::uint64_t key = noise::stream_key(rx_noise.seed, sed_noise_stream);
  auto input = [&](std::int64_t idx) {
    cplx v = source.at(idx);
    if (noisy) v += noise::sample(key, idx, rx_noise.power);
    return v;
  };
  auto emit = [&](std::int64_t idx, double power) {
    const double v = adc.quantize(dlva_detect(power, dlva));
    visit(source.start_time + static_cast<double>(idx) / fs, dlva_to_db(v, dlva));
  };
  auto instant = [&](std::int64_t j) { return std::llround(static_cast<double>(j) * step); };
  std::int64_t j = static_cast<std::int64_t>(std::floor(static_cast<double>(begin) / step));
  while (j > 0 && instant(j) >= begin) --j;
  while (instant(j) < begin) ++j;

  if (bpf >= fs * (1.0 - 1e-9)) {
    for (;; ++j) {
      const std::int64_t idx = instant(j);
      if (idx >= end) break;
      emit(idx, std::norm(input(idx)));
    }
    return;
  }

  const auto block = static_cast<std::size_t>(std::min<std::int64_t>(1 << 16, end - begin));
  FftCache ffts;
  FftPlan& fwd = ffts.forward(block);
  FftPlan& inv = ffts.inverse(block);
  for (std::int64_t b0 = begin; b0 < end; b0 += static_cast<std::int64_t>(block)) {
    auto x = fwd.data();
    for (std::size_t k = 0; k < block; ++k) {
      const std::int64_t idx = b0 + static_cast<std::int64_t>(k);
      x[k] = idx < end ? input(idx) : cplx{0.0, 0.0};
    }
    fwd.execute();
    auto y = inv.data();
    std::fill(y.begin(), y.end(), cplx{0.0, 0.0});
    detail::for_each_band_bin(block, fs, 0.0, bpf, [&](std::size_t k, double w) { y[k] = w * x[k]; });
    inv.execute();
    const double scale = 1.0 / static_cast<double>(block);
    for (;; ++j) {
      const std::int64_t idx = instant(j);
      if (idx >= end || idx >= b0 + static_cast<std::int64_t>(block)) break;
      emit(idx, std::norm(y[static_cast<std::size_t>(idx - b0)] * scale));
    }
  }
}

template <SampleSource S, class Visitor>
void sed_scan(const S& source, double bpf, const DlvaParams& dlva, const AdcParams& adc, Visitor&& visit,
              const ReceiverNoise& rx_noise = {}) {
  sed_scan_range(source, bpf, dlva, adc, 0, source.size(), rx_noise, std::forward<Visitor>(visit));
}

struct SedSeries {
  std::vector<double> times;
  std::vector<double> power_db;
  std::size_t size() const { return times.size(); }
};

template <SampleSource S>
SedSeries sed_process(const S& source, double bpf, const DlvaParams& dlva, const AdcParams& adc,
                      const ReceiverNoise& rx_noise = {}) {
  SedSeries out;
  sed_scan(
      source, bpf, dlva, adc,
      [&](double t, double db) {
        out.times.push_back(t);
        out.power_db.push_back(db);
      },
      rx_noise);
  return out;
}

// SED video restricted to the same capture gates the sweeper uses, one gate per stop window,
// in time order. A 7 s pass at the full video rate would not fit in memory; the comparison only
// ever looks inside the stop windows.
template <SampleSource S>
SedSeries sed_gated(const S& source, const SweepPlan& plan, double capture_duration, double bpf,
                    const DlvaParams& dlva, const AdcParams& adc, const ReceiverNoise& rx_noise = {}) {
  plan.validate();
  const double fs = source.sample_rate;
  const std::int64_t window = std::llround(plan.stop_duration * fs);
  const std::int64_t capture = capture_duration > 0.0 ? std::llround(capture_duration * fs) : window;
  if (capture > window) throw std::invalid_argument("sed_gated: capture longer than the stop duration");
  const double duration = static_cast<double>(source.size()) / fs;
  const auto rows = static_cast<std::size_t>(std::floor(duration / plan.ramp_period + 1e-9));
  SedSeries out;
  for (std::size_t r = 0; r < rows; ++r) {
    for (int i = 0; i < plan.step_count; ++i) {
      const double wstart = static_cast<double>(r) * plan.ramp_period + i * plan.stop_duration;
      const std::int64_t c0 = std::llround(wstart * fs) + (window - capture) / 2;
      sed_scan_range(source, bpf, dlva, adc, c0, c0 + capture, rx_noise, [&](double t, double db) {
        out.times.push_back(t);
        out.power_db.push_back(db);
      });
    }
  }
  return out;
}

enum class WindowReduce { peak, mean, centre };

// SED video reduced to one value per stop window (peak, mean of the dB video, or the sample
// nearest the window centre), laid out like the sweeper grid so cell (r, c) covers the same
// time span. Columns carry the step labels only; the SED has no frequency selectivity.
template <SampleSource S>
PowerGrid sed_window_grid(const S& source, const SweepPlan& plan, double capture_duration, double bpf,
                          const DlvaParams& dlva, const AdcParams& adc, const ReceiverNoise& rx_noise = {},
                          WindowReduce reduce = WindowReduce::peak, const std::vector<int>& steps = {}) {
  plan.validate();
  const auto mask = detail::step_mask(plan.step_count, steps);
  const double fs = source.sample_rate;
  const std::int64_t window = std::llround(plan.stop_duration * fs);
  const std::int64_t capture = capture_duration > 0.0 ? std::llround(capture_duration * fs) : window;
  if (capture > window) throw std::invalid_argument("sed_window_grid: capture longer than the stop duration");
  const double duration = static_cast<double>(source.size()) / fs;
  const auto rows = static_cast<std::size_t>(std::floor(duration / plan.ramp_period + 1e-9));
  PowerGrid grid;
  grid.stop_duration = plan.stop_duration;
  for (int i = 0; i < plan.step_count; ++i) grid.frequencies.push_back(plan.step_center(i));
  grid.times.resize(rows);
  grid.power_db.resize(rows * grid.cols());
  std::vector<double> t, v;
  for (std::size_t r = 0; r < rows; ++r) {
    grid.times[r] = source.start_time + static_cast<double>(r) * plan.ramp_period;
    for (std::size_t i = 0; i < grid.cols(); ++i) {
      if (!mask[i]) {
        grid.at(r, i) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const double wstart = static_cast<double>(r) * plan.ramp_period + static_cast<double>(i) * plan.stop_duration;
      const std::int64_t c0 = std::llround(wstart * fs) + (window - capture) / 2;
      t.clear();
      v.clear();
      sed_scan_range(source, bpf, dlva, adc, c0, c0 + capture, rx_noise, [&](double tt, double db) {
        t.push_back(tt);
        v.push_back(db);
      });
      if (v.empty()) throw std::invalid_argument("sed_window_grid: capture holds no ADC sample");
      double out = 0.0;
      if (reduce == WindowReduce::peak) {
        out = *std::max_element(v.begin(), v.end());
      } else if (reduce == WindowReduce::mean) {
        out = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      } else {
        const double centre = grid.cell_time(r, i);
        std::size_t best = 0;
        for (std::size_t k = 1; k < t.size(); ++k)
          if (std::abs(t[k] - centre) < std::abs(t[best] - centre)) best = k;
        out = v[best];
      }
      grid.at(r, i) = out;
    }
  }
  return grid;
}

struct SpectrumEstimate {
  std::vector<double> frequencies;
  std::vector<double> power_db;  // max over ramps
  double peak_db = 0.0;
  double center_frequency = 0.0;  // power-weighted centroid of bins within 20 dB of peak
  double lower_edge = 0.0;        // -3 dB extent, bin edges
  double upper_edge = 0.0;
  double bandwidth = 0.0;
  int empty_interior_bins = 0;    // bins below peak - empty_threshold between occupied bins
};

inline SpectrumEstimate reconstruct_spectrum(const PowerGrid& grid, double empty_threshold_db = 10.0) {
  grid.validate();
  if (grid.rows() == 0 || grid.cols() == 0)
    throw std::invalid_argument("reconstruct_spectrum: empty grid");
  SpectrumEstimate s;
  s.frequencies = grid.frequencies;
  s.power_db.assign(grid.cols(), -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < grid.rows(); ++r)
    for (std::size_t c = 0; c < grid.cols(); ++c) s.power_db[c] = std::max(s.power_db[c], grid.at(r, c));

  s.peak_db = *std::max_element(s.power_db.begin(), s.power_db.end());
  const double bin = grid.cols() > 1 ? grid.bin_width() : 0.0;
  std::size_t first = grid.cols(), last = 0;
  for (std::size_t c = 0; c < grid.cols(); ++c) {
    if (s.power_db[c] >= s.peak_db - 3.0) {
      first = std::min(first, c);
      last = c;
    }
  }
  s.lower_edge = s.frequencies[first] - bin / 2.0;
  s.upper_edge = s.frequencies[last] + bin / 2.0;
  s.bandwidth = s.upper_edge - s.lower_edge;

  double wsum = 0.0, fsum = 0.0;
  for (std::size_t c = 0; c < grid.cols(); ++c) {
    if (s.power_db[c] < s.peak_db - 20.0) continue;
    const double w = db_to_power(s.power_db[c] - s.peak_db);
    wsum += w;
    fsum += w * s.frequencies[c];
  }
  s.center_frequency = fsum / wsum;

  std::size_t occ_first = grid.cols(), occ_last = 0;
  for (std::size_t c = 0; c < grid.cols(); ++c) {
    if (s.power_db[c] >= s.peak_db - empty_threshold_db) {
      occ_first = std::min(occ_first, c);
      occ_last = c;
    }
  }
  for (std::size_t c = occ_first; c < occ_last; ++c)
    if (s.power_db[c] < s.peak_db - empty_threshold_db) ++s.empty_interior_bins;
  return s;
}

}  // namespace sarsweep::receiver
