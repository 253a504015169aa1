// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarsweep/analysis.hpp"
#include "sarsweep/antenna.hpp"
#include "sarsweep/config.hpp"
#include "sarsweep/io.hpp"
#include "sarsweep/pipeline.hpp"
#include "sarsweep/receiver.hpp"
#include "sarsweep/waveform.hpp"

using namespace sarsweep;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Closed form against the element-by-element summation.
Outcome closed_form_equivalence() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> mdist(1, 200);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr double tol = 1e-9;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const antenna::ArrayGeometry g{mdist(rng), 1, 0.005 + 0.03 * u(rng), 0.015};
    antenna::ExcitationPlan exc;
    exc.alpha_phase = 2.0 * (u(rng) - 0.5);
    const double f = 8e9 + 4e9 * u(rng);
    const double theta = (u(rng) - 0.5) * pi;
    const double closed = antenna::normalized_pattern(g, exc.alpha_phase, f, theta);
    const double sum = std::abs(antenna::array_factor(g, exc, f, theta, 0.0)) / g.m_count;
    // Relative to the value, floored at the summation's own rounding level.
    worst = std::max(worst, std::abs(closed - sum) / std::max(sum, 1e-4));
  }
  return {worst < tol, "max relative error " + fmt("%.3g", worst) + " over 1000 cases (< 1e-9)"};
}

// Dense noiseless cut of the demo array, on the angle axis.
analysis::PatternCut model_cut(const antenna::PatternCutModel& model, double f) {
  analysis::PatternCut cut;
  cut.frequency = f;
  cut.has_angle = true;
  const int n = 8001;
  for (int i = 0; i < n; ++i) {
    const double th = -0.1 + 0.2 * i / (n - 1);
    const double g = model(th, f);
    cut.points.push_back({0.0, th, antenna::magnitude_to_db(g * g)});
  }
  return cut;
}

// 2. Null spacing scales with wavelength.
Outcome null_wavelength_scaling() {
  const config::ScenarioConfig cfg;
  const auto model = cfg.pattern_model();
  auto spacing = [&](double f) {
    const auto rep = analysis::find_nulls(model_cut(model, f));
    if (!rep.mean_spacing) throw std::runtime_error("no nulls found");
    return *rep.mean_spacing;
  };
  const double measured = spacing(9551e6) / spacing(9614.5e6);
  const double expected = 9614.5 / 9551.0;  // wavelength ratio
  const double ratio_err = std::abs(measured / expected - 1.0);

  std::vector<double> x, y;
  for (double f : {9.45e9, 9.5e9, 9.6e9, 9.7e9, 9.75e9}) {
    x.push_back(speed_of_light / f);
    y.push_back(spacing(f));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  return {ratio_err < 0.01 && r2 >= 0.99, "spacing ratio " + fmt("%.6f", measured) + " vs wavelength ratio " +
                                              fmt("%.6f", expected) + " (err " + fmt("%.2g", ratio_err) +
                                              ", < 1%), R^2 " + fmt("%.6f", r2) + " (>= 0.99)"};
}

// 3. Spectrum reconstruction for short and long stops, 20% duty LFM.
Outcome spectrum_validity() {
  PulseTrainParams p;
  p.chirp_bandwidth = 16e6;
  p.pulse_width = 40e-6;
  p.pri = 200e-6;
  p.sample_rate = 40e6;
  const receiver::AdcParams adc{12, 1.0, 1e6};
  const auto dlva = receiver::make_dlva(1e-6);

  const auto short_plan = receiver::make_sweep_plan(40e6, 1e6, 40 * 0.9 * p.pri, p.center_frequency - 20e6);
  const auto s = receiver::reconstruct_spectrum(
      receiver::nsr_process(LfmSource(p, 6 * short_plan.ramp_period), short_plan, dlva, adc));
  const bool bw_ok = std::abs(s.bandwidth - p.chirp_bandwidth) <= 2 * short_plan.nbpf_bandwidth;

  // Long stops over several train phases; each run should leave at least one hole.
  const auto long_plan = receiver::make_sweep_plan(40e6, 1e6, 40 * 2.0 * p.pri, p.center_frequency - 20e6);
  int min_empty = 1 << 30;
  std::string counts;
  for (double phase : {0.0, 0.25, 0.5, 0.75}) {
    const LfmSource src(p, 2 * long_plan.ramp_period, phase * p.pri);
    const auto l = receiver::reconstruct_spectrum(receiver::nsr_process(src, long_plan, dlva, adc));
    min_empty = std::min(min_empty, l.empty_interior_bins);
    counts += (counts.empty() ? "" : ",") + std::to_string(l.empty_interior_bins);
  }
  const bool holes_ok = min_empty >= 1;
  return {bw_ok && holes_ok, "T_stop=0.9 PRI: bandwidth " + fmt("%.3g", s.bandwidth / 1e6) + " MHz vs " +
                                 fmt("%.3g", p.chirp_bandwidth / 1e6) + " +- 2 MHz (" + (bw_ok ? "ok" : "bad") +
                                 "); T_stop=2 PRI: empty interior bins per phase " + counts + " (need >= 1, " +
                                 (holes_ok ? "ok" : "bad") + ")"};
}

// Unmodulated carrier at a fixed baseband offset.
struct Tone {
  double f = 0.0;
  double sample_rate = 400e6;
  double start_time = 0.0;
  double center_frequency = 9.6e9;
  std::int64_t count = 0;
  std::int64_t size() const { return count; }
  cplx at(std::int64_t n) const { return std::polar(1.0, two_pi * f * static_cast<double>(n) / sample_rate); }
  double instantaneous_frequency(std::int64_t) const { return f; }
};

// 4. Bandwidth SNR advantage: analytic ratio and Monte-Carlo residual variance ratio.
// A CW carrier at the centre of one step is received with a flat gain, so the truth cut is
// flat and each receiver's residual is pure noise. Both sample one instant per window (the
// centre) so the detector statistics match; SNR_SED is 20 dB at boresight.
Outcome snr_advantage() {
  const double ratio = analysis::snr_ratio(400e6, 10e6);
  PassScenario sc;
  sc.range = 550e3;
  sc.ground_beam_speed = 8000.0;
  sc.pass_duration = 7.0;
  sc.tx_gain_boresight = 1.0;
  sc.transmit_power = transmit_power_for_snr(sc, 9.6e9, 400e6, 100.0);
  Tone tone;
  tone.f = 5e6;  // centre of the 9600-9610 MHz step
  tone.count = std::llround(7.0 * tone.sample_rate);
  const GainedSource<Tone> src(tone, sc);
  const auto plan = receiver::make_sweep_plan(400e6, 10e6, 0.1, 9.4e9);
  const receiver::AdcParams adc{12, 1.0, 10e6};
  const double kt = boltzmann * 290.0;
  const auto nsr_dlva = receiver::make_dlva(kt * 10e6);
  const auto sed_dlva = receiver::make_dlva(kt * 400e6);
  const double gate = 4e-6;
  const double f = 9.605e9;

  constexpr int trials = 50;
  double sum = 0.0;
  for (int s = 1; s <= trials; ++s) {
    const receiver::ReceiverNoise rx{kt * 400e6, static_cast<std::uint64_t>(s)};
    const auto nsr = receiver::nsr_process(src, plan, nsr_dlva, adc, {gate, receiver::StopStatistic::sample, rx});
    const auto sed =
        receiver::sed_window_grid(src, plan, gate, 400e6, sed_dlva, adc, rx, receiver::WindowReduce::centre);
    auto truth = analysis::extract_pattern(nsr, f);
    for (auto& pt : truth.points) pt.power_db = 0.0;
    const auto rep = analysis::compare_receivers(analysis::extract_pattern(nsr, f), pipeline::sed_column(sed, f),
                                                 truth, {analysis::SedResample::nearest, -30.0});
    if (!rep.measured_snr_gain_db) return {false, "trial " + std::to_string(s) + ": gain not applicable"};
    sum += *rep.measured_snr_gain_db;
  }
  const double mean = sum / trials;
  const bool ok = ratio == 40.0 && std::abs(mean - 16.0) <= 1.0;
  return {ok, "analytic ratio " + fmt("%.17g", ratio) + " (== 40), measured gain " + fmt("%.3f", mean) +
                  " dB over 50 trials (16 +- 1)"};
}

// Demo pass with the emitter at a SAR-like 300 us PRI (T_stop well above the PRI) and a
// one-PRI-plus-pulse capture gate per stop.
config::ScenarioConfig pass_config() {
  config::ScenarioConfig cfg;
  cfg.emitter.pri = 300e-6;
  cfg.emitter.pulse_width = 60e-6;
  cfg.nsr.capture_s = 360e-6;
  return cfg;
}

// 5. Pattern extraction fidelity at 20 dB, NSR against SED at 0 dB.
Outcome pattern_fidelity() {
  auto cfg = pass_config();
  const double snr_db = 10.0 * std::log10(link_budget_snr(cfg.scenario(), cfg.emitter.center_frequency, cfg.sed.bpf_hz));
  const auto trial = pipeline::run_trial(cfg, 1);
  const bool shape = trial.nsr.rows() == 70 && trial.nsr.cols() == 40;
  double worst = 1.0;
  for (double f : {9551e6, 9614.5e6}) {
    const auto rep = analysis::compare_receivers(analysis::extract_pattern(trial.nsr, f),
                                                 pipeline::sed_column(trial.sed, f), pipeline::truth_column(trial.truth, f));
    worst = std::min(worst, rep.nsr_correlation);
  }

  cfg.pass.transmit_power_w /= 100.0;
  const double low_db = 10.0 * std::log10(link_budget_snr(cfg.scenario(), cfg.emitter.center_frequency, cfg.sed.bpf_hz));
  const double f = 9551e6;
  pipeline::TrialOptions opt;
  opt.steps = {static_cast<int>(std::floor((f - cfg.nsr.start_frequency_hz) / cfg.nsr.nbpf_hz))};
  int wins = 0;
  for (int s = 1; s <= 50; ++s) {
    const auto t = pipeline::run_trial(cfg, 1000 + s, opt);
    const auto rep = analysis::compare_receivers(analysis::extract_pattern(t.nsr, f), pipeline::sed_column(t.sed, f),
                                                 pipeline::truth_column(t.truth, f));
    wins += rep.nsr_correlation > rep.sed_correlation;
  }
  const bool ok = shape && worst >= 0.99 && wins >= 45;
  return {ok, "grid " + std::to_string(trial.nsr.rows()) + "x" + std::to_string(trial.nsr.cols()) + " (70x40); at " +
                  fmt("%.1f", snr_db) + " dB NSR correlation " + fmt("%.5f", worst) + " (>= 0.99); at " +
                  fmt("%.1f", low_db) + " dB NSR > SED in " + std::to_string(wins) + "/50 (>= 45)"};
}

// 6. Range resolution at 400 MHz, 90 degrees.
Outcome range_resolution_check() {
  const double r = range_resolution(400e6, pi / 2.0);
  const bool ok = r == speed_of_light / 8e8 && std::abs(r - 0.375) < 5e-4;
  return {ok, "c/(2 BW) = " + fmt("%.10f", r) + " m (0.375 to 3 decimals)"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + SARSWEEP_CLI_PATH + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 7. Two simulate runs of the same config and seeds are byte-identical.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "sarsweep_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cfg = nlohmann::json::parse(io::read_file(fs::path(SARSWEEP_CONFIG_DIR) / "cosmo_demo.json"));
  cfg["pass"]["duration_s"] = 0.3;  // three ramps keep the double run short
  cfg["seeds"] = {1, 2};
  const fs::path cfg_path = dir / "demo_short.json";
  io::write_atomic(cfg_path, cfg.dump(2));
  for (const char* run : {"a", "b"}) {
    const int code = run_cli("simulate --config '" + cfg_path.string() + "' --out '" + (dir / run).string() + "'");
    if (code != 0) return {false, std::string("simulate run ") + run + " exited " + std::to_string(code)};
  }
  const auto manifest = nlohmann::json::parse(io::read_file(dir / "a" / "manifest.json"));
  int same = 0, total = 0;
  for (const auto& f : manifest["files"]) {
    const auto rel = f["path"].get<std::string>();
    ++total;
    same += io::read_file(dir / "a" / rel) == io::read_file(dir / "b" / rel);
  }
  auto ma = manifest, mb = nlohmann::json::parse(io::read_file(dir / "b" / "manifest.json"));
  ma.erase("timings");
  mb.erase("timings");
  const bool ok = total > 0 && same == total && ma == mb;
  return {ok, std::to_string(same) + "/" + std::to_string(total) + " data files identical, manifests " +
                  (ma == mb ? "identical" : "differ") + " apart from timings"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "closed-form equivalence", 10.0, closed_form_equivalence},
      {2, "null-wavelength scaling", 30.0, null_wavelength_scaling},
      {3, "spectrum reconstruction validity", 60.0, spectrum_validity},
      {4, "SNR advantage", 300.0, snr_advantage},
      {5, "pattern-extraction fidelity", 300.0, pattern_fidelity},
      {6, "range resolution", 0.0, range_resolution_check},
      {7, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %d %s: %s  %s; %.1f s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                c.limit_s > 0.0 ? (std::string(" (limit ") + fmt("%.0f", c.limit_s) + " s)").c_str() : "");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
