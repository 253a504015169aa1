#pragma once

// Pulsed LFM emission at complex baseband, pass-dependent antenna gain, link budget and
// additive noise. Signals are either materialised (BasebandSignal) or lazy sources that
// compute any sample on demand; every source exposes the same SampleSource interface so
// the receivers can work on a 7 s pass without holding it in memory.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sarsweep/constants.hpp"

namespace sarsweep {

struct PulseTrainParams {
  double center_frequency = 9.6e9;  // Hz, RF frequency at baseband 0 Hz
  double chirp_bandwidth = 0.0;     // Hz
  double pulse_width = 0.0;         // s
  double pri = 0.0;                 // s
  double sample_rate = 1.0e9;       // Hz

  double duty_cycle() const { return pulse_width / pri; }
  double chirp_rate() const { return pulse_width > 0.0 ? chirp_bandwidth / pulse_width : 0.0; }

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(center_frequency))
      throw std::invalid_argument("PulseTrainParams: center_frequency must be > 0");
    if (!(chirp_bandwidth >= 0.0) || !std::isfinite(chirp_bandwidth))
      throw std::invalid_argument("PulseTrainParams: chirp_bandwidth must be >= 0");
    if (!positive(pulse_width) || !positive(pri) || pulse_width > pri)
      throw std::invalid_argument("PulseTrainParams: require 0 < pulse_width <= pri");
    if (!positive(sample_rate))
      throw std::invalid_argument("PulseTrainParams: sample_rate must be > 0");
    if (sample_rate < 2.5 * chirp_bandwidth)
      throw std::invalid_argument("PulseTrainParams: sample_rate must be >= 2.5 x chirp_bandwidth");
  }
};

// A materialised complex baseband record. Samples are in sqrt(W): |x|^2 is power.
struct BasebandSignal {
  std::vector<cplx> samples;
  double sample_rate = 1.0;
  double start_time = 0.0;
  double center_frequency = 0.0;

  std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
  cplx at(std::int64_t n) const { return samples[static_cast<std::size_t>(n)]; }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  double time_of(std::int64_t n) const { return start_time + static_cast<double>(n) / sample_rate; }
};

template <class S>
concept SampleSource = requires(const S& s, std::int64_t n) {
  { s.at(n) } -> std::convertible_to<cplx>;
  { s.size() } -> std::convertible_to<std::int64_t>;
  { s.sample_rate } -> std::convertible_to<double>;
  { s.start_time } -> std::convertible_to<double>;
  { s.center_frequency } -> std::convertible_to<double>;
};

// Sources that know their instantaneous baseband frequency analytically.
template <class S>
concept FrequencyAwareSource = SampleSource<S> && requires(const S& s, std::int64_t n) {
  { s.instantaneous_frequency(n) } -> std::convertible_to<double>;
};

// Non-owning SampleSource over a BasebandSignal.
struct SignalView {
  explicit SignalView(const BasebandSignal& s)
      : signal(&s), sample_rate(s.sample_rate), start_time(s.start_time),
        center_frequency(s.center_frequency) {}
  const BasebandSignal* signal;
  double sample_rate;
  double start_time;
  double center_frequency;
  std::int64_t size() const { return signal->size(); }
  cplx at(std::int64_t n) const { return signal->at(n); }
};

template <SampleSource S>
BasebandSignal materialize(const S& source) {
  BasebandSignal out;
  out.sample_rate = source.sample_rate;
  out.start_time = source.start_time;
  out.center_frequency = source.center_frequency;
  out.samples.resize(static_cast<std::size_t>(source.size()));
  for (std::int64_t n = 0; n < source.size(); ++n) out.samples[static_cast<std::size_t>(n)] = source.at(n);
  return out;
}

// Pulses occupy [k PRI, k PRI + pulse_width) in absolute time; inside a pulse the frequency
// sweeps linearly from -BW/2 to +BW/2 with unit amplitude.
class LfmSource {
 public:
  LfmSource(PulseTrainParams params, double duration, double start = 0.0)
      : params_(params) {
    params_.validate();
    if (!(duration > 0.0) || !std::isfinite(duration))
      throw std::invalid_argument("lfm_pulse_train: duration must be > 0");
    sample_rate = params_.sample_rate;
    start_time = start;
    center_frequency = params_.center_frequency;
    count_ = std::llround(duration * sample_rate);
    first_ = std::llround(start * sample_rate);
    const double spp = params_.pri * sample_rate;
    const double spw = params_.pulse_width * sample_rate;
    integral_ = std::abs(spp - std::round(spp)) < 1e-9 && std::abs(spw - std::round(spw)) < 1e-9 &&
                std::abs(start * sample_rate - static_cast<double>(first_)) < 1e-6;
    pri_samples_ = std::llround(spp);
    pw_samples_ = std::llround(spw);
  }

  double sample_rate = 0.0;
  double start_time = 0.0;
  double center_frequency = 0.0;

  std::int64_t size() const { return count_; }
  const PulseTrainParams& params() const { return params_; }

  // Time since the leading edge of the current pulse, or a negative value between pulses.
  double pulse_time(std::int64_t n) const {
    if (integral_) {
      std::int64_t g = first_ + n;
      std::int64_t r = g % pri_samples_;
      if (r < 0) r += pri_samples_;
      return r < pw_samples_ ? static_cast<double>(r) / sample_rate : -1.0;
    }
    const double t = start_time + static_cast<double>(n) / sample_rate;
    const double tau = t - std::floor(t / params_.pri) * params_.pri;
    return tau < params_.pulse_width ? tau : -1.0;
  }

  cplx at(std::int64_t n) const {
    const double tau = pulse_time(n);
    if (tau < 0.0) return {0.0, 0.0};
    const double bw = params_.chirp_bandwidth;
    const double phase = two_pi * (-0.5 * bw * tau + 0.5 * params_.chirp_rate() * tau * tau);
    return std::polar(1.0, phase);
  }

  double instantaneous_frequency(std::int64_t n) const {
    const double tau = pulse_time(n);
    if (tau < 0.0) return 0.0;
    return -0.5 * params_.chirp_bandwidth + params_.chirp_rate() * tau;
  }

 private:
  PulseTrainParams params_;
  std::int64_t count_ = 0;
  std::int64_t first_ = 0;
  bool integral_ = false;
  std::int64_t pri_samples_ = 1;
  std::int64_t pw_samples_ = 0;
};

inline BasebandSignal lfm_pulse_train(const PulseTrainParams& params, double duration) {
  return materialize(LfmSource(params, duration));
}

// c / (2 BW sin(incidence)).
inline double range_resolution(double chirp_bandwidth, double incidence_angle) {
  if (!(chirp_bandwidth > 0.0) || !std::isfinite(chirp_bandwidth))
    throw std::invalid_argument("range_resolution: chirp_bandwidth must be > 0");
  if (!(incidence_angle > 0.0) || incidence_angle > pi / 2.0 + 1e-15)
    throw std::invalid_argument("range_resolution: incidence angle must be in (0, 90 deg]");
  return speed_of_light / (2.0 * chirp_bandwidth * std::sin(incidence_angle));
}

// Normalised antenna gain magnitude as a function of (angle rad, RF frequency Hz).
using AntennaCut = std::function<double(double, double)>;

struct PassScenario {
  double transmit_power = 1.0;             // W
  double tx_gain_boresight = 1.0;          // linear
  double rx_gain = 1.0;                    // linear
  double range = 1.0;                      // m, slant range at closest approach
  double system_noise_temperature = 290.0; // K
  double boltzmann = sarsweep::boltzmann;  // J/K
  double ground_beam_speed = 1.0;          // m/s
  double pass_duration = 1.0;              // s
  double pattern_domain = pi / 2.0;        // max |angle| the cut is defined on
  AntennaCut antenna_cut = [](double, double) { return 1.0; };

  double crossing_time() const { return pass_duration / 2.0; }

  double angle_at(double t) const {
    return std::atan(ground_beam_speed * (t - crossing_time()) / range);
  }

  // Received power at boresight, before any pattern weighting.
  double received_power(double frequency) const {
    const double lambda = wavelength(frequency);
    const double spread = 4.0 * pi * range;
    return transmit_power * tx_gain_boresight * rx_gain * lambda * lambda / (spread * spread);
  }

  double noise_power(double bandwidth) const {
    return boltzmann * system_noise_temperature * bandwidth;
  }

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    const std::pair<const char*, double> fields[] = {
        {"transmit_power", transmit_power}, {"tx_gain_boresight", tx_gain_boresight},
        {"rx_gain", rx_gain}, {"range", range},
        {"system_noise_temperature", system_noise_temperature}, {"boltzmann", boltzmann},
        {"ground_beam_speed", ground_beam_speed}, {"pass_duration", pass_duration},
        {"pattern_domain", pattern_domain}};
    for (const auto& [name, value] : fields)
      if (!positive(value)) throw std::invalid_argument(std::string("PassScenario: ") + name + " must be > 0");
    if (!antenna_cut) throw std::invalid_argument("PassScenario: antenna_cut is not set");
  }
};

// P_t G_t G_r lambda^2 / ((4 pi R)^2 K T BW)
inline double link_budget_snr(const PassScenario& scenario, double frequency,
                              double receiver_bandwidth) {
  if (!(receiver_bandwidth > 0.0) || !std::isfinite(receiver_bandwidth))
    throw std::invalid_argument("link_budget_snr: receiver_bandwidth must be > 0");
  if (!(frequency > 0.0) || !std::isfinite(frequency))
    throw std::invalid_argument("link_budget_snr: frequency must be > 0");
  return scenario.received_power(frequency) / scenario.noise_power(receiver_bandwidth);
}

// Transmit power that yields the requested boresight SNR in the given bandwidth.
inline double transmit_power_for_snr(const PassScenario& scenario, double frequency,
                                     double bandwidth, double snr_linear) {
  PassScenario unit = scenario;
  unit.transmit_power = 1.0;
  return snr_linear / link_budget_snr(unit, frequency, bandwidth);
}

// Scales the inner source by sqrt(P_r) * |pattern(angle(t), f_rf(t))|. Sources that know
// their instantaneous frequency use it directly; others are estimated from the phase step
// between adjacent samples.
template <SampleSource S>
class GainedSource {
 public:
  GainedSource(S inner, const PassScenario& scenario)
      : inner_(std::move(inner)), scenario_(scenario) {
    scenario_.validate();
    sample_rate = inner_.sample_rate;
    start_time = inner_.start_time;
    center_frequency = inner_.center_frequency;
    amplitude_ = std::sqrt(scenario_.received_power(center_frequency));
    if (inner_.size() > 0) {
      const double a0 = std::abs(scenario_.angle_at(time_of(0)));
      const double a1 = std::abs(scenario_.angle_at(time_of(inner_.size() - 1)));
      if (std::max(a0, a1) > scenario_.pattern_domain)
        throw std::invalid_argument("apply_pass_gain: pass angles exceed the antenna pattern domain");
    }
  }

  double sample_rate = 0.0;
  double start_time = 0.0;
  double center_frequency = 0.0;

  std::int64_t size() const { return inner_.size(); }
  double time_of(std::int64_t n) const { return start_time + static_cast<double>(n) / sample_rate; }

  double baseband_frequency(std::int64_t n) const {
    if constexpr (FrequencyAwareSource<S>) {
      return inner_.instantaneous_frequency(n);
    } else {
      const std::int64_t a = n + 1 < inner_.size() ? n : n - 1;
      if (a < 0) return 0.0;
      const cplx step = inner_.at(a + 1) * std::conj(inner_.at(a));
      if (step == cplx{0.0, 0.0}) return 0.0;
      return std::arg(step) * sample_rate / two_pi;
    }
  }

  double gain(std::int64_t n) const {
    const double theta = scenario_.angle_at(time_of(n));
    return amplitude_ * scenario_.antenna_cut(theta, center_frequency + baseband_frequency(n));
  }

  cplx at(std::int64_t n) const {
    const cplx x = inner_.at(n);
    if (x == cplx{0.0, 0.0}) return x;
    return x * gain(n);
  }

  double instantaneous_frequency(std::int64_t n) const { return baseband_frequency(n); }

  const PassScenario& scenario() const { return scenario_; }

 private:
  S inner_;
  PassScenario scenario_;
  double amplitude_ = 1.0;
};

inline BasebandSignal apply_pass_gain(const BasebandSignal& signal, const PassScenario& scenario) {
  return materialize(GainedSource<SignalView>(SignalView(signal), scenario));
}

// Counter-based complex Gaussian noise: sample n depends only on (seed, n), so lazily
// rendered chunks and materialised records agree bit for bit.
namespace noise {

inline std::uint64_t splitmix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Distinct streams for the same seed (e.g. one per receiver) are decorrelated by the index.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream = 0) {
  return splitmix(seed, 0x5A5A5A5AULL + stream);
}

// Circularly-symmetric, E|z|^2 = power.
inline cplx sample(std::uint64_t key, std::int64_t n, double power) {
  const auto i = static_cast<std::uint64_t>(n) * 2;
  constexpr double scale = 0x1.0p-53;
  const double u1 = static_cast<double>((splitmix(key, i) >> 11) + 1) * scale;
  const double u2 = static_cast<double>(splitmix(key, i + 1) >> 11) * scale;
  return std::polar(std::sqrt(-std::log(u1) * power), two_pi * u2);
}

}  // namespace noise

template <SampleSource S>
class NoisySource {
 public:
  NoisySource(S inner, double noise_power, std::uint64_t seed)
      : inner_(std::move(inner)), power_(noise_power), key_(noise::stream_key(seed)) {
    if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
      throw std::invalid_argument("add_awgn: noise power must be >= 0");
    sample_rate = inner_.sample_rate;
    start_time = inner_.start_time;
    center_frequency = inner_.center_frequency;
  }

  double sample_rate = 0.0;
  double start_time = 0.0;
  double center_frequency = 0.0;

  std::int64_t size() const { return inner_.size(); }

  cplx at(std::int64_t n) const {
    if (power_ == 0.0) return inner_.at(n);
    return inner_.at(n) + noise::sample(key_, n, power_);
  }

 private:
  S inner_;
  double power_;
  std::uint64_t key_;
};

inline BasebandSignal add_awgn(const BasebandSignal& signal, double noise_power, std::uint64_t seed) {
  return materialize(NoisySource<SignalView>(SignalView(signal), noise_power, seed));
}

}  // namespace sarsweep
