#pragma once

// One simulated pass: emitter -> pass gain -> both receivers, plus the injected truth on the
// sweeper's time-frequency grid.

#include <cmath>
#include <cstdint>
#include <vector>

#include "sarsweep/analysis.hpp"
#include "sarsweep/config.hpp"
#include "sarsweep/receiver.hpp"
#include "sarsweep/waveform.hpp"

namespace sarsweep::pipeline {

using PassSource = GainedSource<LfmSource>;

struct TrialOptions {
  bool noise = true;       // overrides to false when the config disables noise
  std::vector<int> steps;  // sweep steps to evaluate, empty for all; the spectrum needs all
};

struct Trial {
  std::uint64_t seed = 0;
  receiver::PowerGrid nsr;
  receiver::PowerGrid sed;    // per-window SED video
  receiver::PowerGrid truth;  // received pattern power at each cell, dBW
  receiver::SpectrumEstimate spectrum;
};

inline PassSource make_source(const config::ScenarioConfig& cfg) {
  return PassSource(LfmSource(cfg.emitter, cfg.pass.duration_s), cfg.scenario());
}

// K T fs: the receivers' own noise over the simulated band.
inline receiver::ReceiverNoise receiver_noise(const config::ScenarioConfig& cfg, std::uint64_t seed, bool on) {
  return {on && cfg.noise_enabled ? cfg.noise_density() * cfg.emitter.sample_rate : 0.0, seed};
}

// Pattern power the pass injects at each cell, evaluated at the cell's centre time and step
// frequency.
inline receiver::PowerGrid truth_grid(const config::ScenarioConfig& cfg, const receiver::PowerGrid& like) {
  const auto scenario = cfg.scenario();
  receiver::PowerGrid g = like;
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      const double f = g.frequencies[c];
      const double gain = scenario.antenna_cut(scenario.angle_at(g.cell_time(r, c)), f);
      g.at(r, c) = power_to_db(scenario.received_power(cfg.emitter.center_frequency) * gain * gain);
    }
  }
  return g;
}

inline Trial run_trial(const config::ScenarioConfig& cfg, std::uint64_t seed, const TrialOptions& opt = {}) {
  const auto source = make_source(cfg);
  const auto plan = cfg.sweep_plan();
  const auto rx = receiver_noise(cfg, seed, opt.noise);
  Trial t;
  t.seed = seed;
  receiver::NsrOptions nsr_opt{cfg.nsr.capture_s, cfg.nsr.statistic, rx, opt.steps};
  t.nsr = receiver::nsr_process(source, plan, cfg.nsr_dlva(), cfg.nsr.adc, nsr_opt);
  t.sed = receiver::sed_window_grid(source, plan, cfg.nsr.capture_s, cfg.sed.bpf_hz, cfg.sed_dlva(), cfg.sed.adc, rx,
                                    cfg.sed.window_statistic, opt.steps);
  t.truth = truth_grid(cfg, t.nsr);
  if (opt.steps.empty()) t.spectrum = receiver::reconstruct_spectrum(t.nsr);
  return t;
}

// The per-window SED grid column as a series on the cell-centre time base.
inline receiver::SedSeries sed_column(const receiver::PowerGrid& sed, double frequency) {
  const std::size_t c = analysis::nearest_bin(sed, frequency);
  receiver::SedSeries s;
  for (std::size_t r = 0; r < sed.rows(); ++r) {
    s.times.push_back(sed.cell_time(r, c));
    s.power_db.push_back(sed.at(r, c));
  }
  return s;
}

// Same for a truth grid, as a normalised cut.
inline analysis::PatternCut truth_column(const receiver::PowerGrid& truth, double frequency) {
  return analysis::extract_pattern(truth, frequency);
}

}  // namespace sarsweep::pipeline
