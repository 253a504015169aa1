#pragma once

// Planar phased-array pattern models: summation and closed-form array factor,
// null prediction, element factors and the full beam sum with an error matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarsweep/constants.hpp"

namespace sarsweep::antenna {

struct ArrayGeometry {
  int m_count = 1;         // elements along x
  int n_count = 1;         // elements along y
  double spacing_x = 0.0;  // m
  double spacing_y = 0.0;  // m

  void validate() const {
    if (m_count < 1) throw std::invalid_argument("ArrayGeometry: m_count must be >= 1");
    if (n_count < 1) throw std::invalid_argument("ArrayGeometry: n_count must be >= 1");
    if (!(spacing_x > 0.0) || !std::isfinite(spacing_x))
      throw std::invalid_argument("ArrayGeometry: spacing_x must be > 0");
    if (!(spacing_y > 0.0) || !std::isfinite(spacing_y))
      throw std::invalid_argument("ArrayGeometry: spacing_y must be > 0");
  }
};

// Row-major m_count x n_count complex coefficients. Empty means "all ones".
class CoefficientMatrix {
 public:
  CoefficientMatrix() = default;
  CoefficientMatrix(int rows, int cols, cplx fill = {1.0, 0.0})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  bool empty() const { return data_.empty(); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cplx operator()(int m, int n) const {
    return data_.empty() ? cplx{1.0, 0.0} : data_[static_cast<std::size_t>(m) * cols_ + n];
  }
  cplx& at(int m, int n) { return data_.at(static_cast<std::size_t>(m) * cols_ + n); }

  bool all_ones() const {
    return std::all_of(data_.begin(), data_.end(), [](cplx v) { return v == cplx{1.0, 0.0}; });
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> data_;
};

struct ExcitationPlan {
  double alpha_phase = 0.0;  // rad, progressive phase along x
  double beta_phase = 0.0;   // rad, progressive phase along y
  CoefficientMatrix amplitudes;
  CoefficientMatrix error_matrix;

  void validate(const ArrayGeometry& geom) const {
    auto check = [&](const CoefficientMatrix& c, const char* name) {
      if (!c.empty() && (c.rows() != geom.m_count || c.cols() != geom.n_count))
        throw std::invalid_argument(std::string("ExcitationPlan: ") + name +
                                    " dimensions do not match the array geometry");
    };
    check(amplitudes, "amplitudes");
    check(error_matrix, "error_matrix");
    if (!std::isfinite(alpha_phase) || !std::isfinite(beta_phase))
      throw std::invalid_argument("ExcitationPlan: non-finite phase gradient");
  }

  bool uniform() const { return amplitudes.all_ones() && error_matrix.all_ones(); }

  // Per-element weight including the progressive steering phase (0-based indices).
  cplx weight(int m, int n) const {
    return amplitudes(m, n) * error_matrix(m, n) *
           std::polar(1.0, m * alpha_phase + n * beta_phase);
  }
};

struct ElementFactor {
  enum class Model { isotropic, cosine_power };
  Model model = Model::isotropic;
  double exponent = 0.0;

  static ElementFactor isotropic() { return {}; }
  static ElementFactor cosine_power(double exponent) {
    if (!(exponent >= 0.0)) throw std::invalid_argument("ElementFactor: exponent must be >= 0");
    return {Model::cosine_power, exponent};
  }

  // theta is the off-boresight angle; the models here are rotationally symmetric.
  double operator()(double theta, double /*phi*/ = 0.0) const {
    if (model == Model::isotropic) return 1.0;
    const double c = std::cos(theta);
    if (std::abs(theta) > pi / 2.0 || c <= 0.0) return 0.0;
    return std::pow(c, exponent);
  }
};

struct PatternSample {
  double angle = 0.0;
  double magnitude = 0.0;
  double magnitude_db = 0.0;
};

inline constexpr double magnitude_floor_db = -200.0;

inline double magnitude_to_db(double magnitude, double floor_db = magnitude_floor_db) {
  if (!(magnitude > 0.0)) return floor_db;
  return std::max(20.0 * std::log10(magnitude), floor_db);
}

namespace detail {
inline void require_finite(std::initializer_list<double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}
inline double wavenumber(double frequency) {
  if (!(frequency > 0.0)) throw std::invalid_argument("frequency must be > 0");
  return two_pi * frequency / speed_of_light;
}
}  // namespace detail

// Double sum of I_mn * exp(j k0 r_hat . r_mn) over the planar grid.
inline cplx array_factor(const ArrayGeometry& geom, const ExcitationPlan& exc, double frequency,
                         double theta, double phi) {
  detail::require_finite({frequency, theta, phi}, "array_factor");
  geom.validate();
  exc.validate(geom);
  const double k0 = detail::wavenumber(frequency);
  const double ux = k0 * geom.spacing_x * std::sin(theta) * std::cos(phi);
  const double uy = k0 * geom.spacing_y * std::sin(theta) * std::sin(phi);
  cplx sum{0.0, 0.0};
  for (int m = 0; m < geom.m_count; ++m)
    for (int n = 0; n < geom.n_count; ++n)
      sum += exc.weight(m, n) * std::polar(1.0, m * ux + n * uy);
  return sum;
}

// Dirichlet kernel |sin(M psi/2) / (M sin(psi/2))|, 1 at the removable singularity.
inline double dirichlet(int count, double psi) {
  const double den = std::sin(psi / 2.0);
  if (std::abs(den) < 1e-12) return 1.0;
  const double v = std::abs(std::sin(count * psi / 2.0) / (count * den));
  return std::min(v, 1.0);
}

// Closed-form phi = 0 cut of a uniform linear array along x.
inline double normalized_pattern(const ArrayGeometry& geom, double alpha_phase, double frequency,
                                 double theta) {
  detail::require_finite({alpha_phase, frequency, theta}, "normalized_pattern");
  if (geom.m_count < 1) throw std::invalid_argument("normalized_pattern: m_count must be >= 1");
  const double k0 = detail::wavenumber(frequency);
  const double psi = k0 * geom.spacing_x * std::sin(theta) + alpha_phase;
  return dirichlet(geom.m_count, psi);
}

// theta_k = asin(lambda (k - alpha') / (M a)) with alpha' = M alpha / 2pi. Values of k that land
// on a main or grating lobe (k multiple of M) are skipped, as are |argument| > 1.
inline std::vector<double> null_angles(const ArrayGeometry& geom, double alpha_phase,
                                       double frequency, int k_min, int k_max) {
  detail::require_finite({alpha_phase, frequency}, "null_angles");
  geom.validate();
  if (!(frequency > 0.0)) throw std::invalid_argument("null_angles: frequency must be > 0");
  const double lambda = wavelength(frequency);
  const double m = geom.m_count;
  const double alpha_norm = m * alpha_phase / two_pi;
  std::vector<double> out;
  for (int k = k_min; k <= k_max; ++k) {
    if (k % geom.m_count == 0) continue;
    const double arg = lambda * (k - alpha_norm) / (m * geom.spacing_x);
    if (std::abs(arg) > 1.0) continue;
    out.push_back(std::asin(arg));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// |EF| * |AF|; with normalize set, divided by the same product at theta = 0.
inline double combined_pattern(const ElementFactor& ef, const ArrayGeometry& geom,
                               const ExcitationPlan& exc, double frequency, double theta,
                               double phi, bool normalize = false) {
  const double value = std::abs(ef(theta, phi)) * std::abs(array_factor(geom, exc, frequency, theta, phi));
  if (!normalize) return value;
  const double ref = std::abs(ef(0.0, 0.0)) * std::abs(array_factor(geom, exc, frequency, 0.0, 0.0));
  if (!(ref > 0.0))
    throw std::invalid_argument("combined_pattern: boresight value is zero, cannot normalize");
  return value / ref;
}

// Beam sum over elements with centred positions:
//   C(eps, az) * a_mn * E_mn * exp(j(m alpha + n beta))
//   * exp(j k0 sin(eps) cos(az) (n - (N-1)/2) dy) * exp(j k0 cos(eps) sin(az) (m - (M-1)/2) dx)
// The element factor is evaluated at the off-boresight angle acos(cos(eps) cos(az)).
inline cplx sar_beam_pattern(const ArrayGeometry& geom, const ExcitationPlan& exc,
                             const ElementFactor& ef, double frequency, double epsilon,
                             double azimuth) {
  detail::require_finite({frequency, epsilon, azimuth}, "sar_beam_pattern");
  geom.validate();
  exc.validate(geom);
  const double k0 = detail::wavenumber(frequency);
  const double ky = k0 * std::sin(epsilon) * std::cos(azimuth) * geom.spacing_y;
  const double kx = k0 * std::cos(epsilon) * std::sin(azimuth) * geom.spacing_x;
  const double off_boresight = std::acos(std::clamp(std::cos(epsilon) * std::cos(azimuth), -1.0, 1.0));
  const double element = ef(off_boresight);
  const double mc = (geom.m_count - 1) / 2.0;
  const double nc = (geom.n_count - 1) / 2.0;
  cplx sum{0.0, 0.0};
  for (int m = 0; m < geom.m_count; ++m)
    for (int n = 0; n < geom.n_count; ++n)
      sum += exc.weight(m, n) * std::polar(1.0, ky * (n - nc) + kx * (m - mc));
  return element * sum;
}

// Fast normalized phi = 0 cut for pass simulation. Uniform excitations use the closed form,
// anything else falls back to the summation.
class PatternCutModel {
 public:
  PatternCutModel(ElementFactor ef, ArrayGeometry geom, ExcitationPlan exc)
      : ef_(ef), geom_(geom), exc_(std::move(exc)) {
    geom_.validate();
    exc_.validate(geom_);
    uniform_ = exc_.uniform();
    if (uniform_) {
      y_ = dirichlet(geom_.n_count, exc_.beta_phase);
      boresight_ = dirichlet(geom_.m_count, exc_.alpha_phase) * y_ * ef_(0.0);
    }
  }

  double operator()(double theta, double frequency) const {
    if (uniform_) {
      const double k0 = two_pi * frequency / speed_of_light;
      const double psi = k0 * geom_.spacing_x * std::sin(theta) + exc_.alpha_phase;
      if (!(boresight_ > 0.0))
        throw std::invalid_argument("PatternCutModel: boresight value is zero, cannot normalize");
      return ef_(theta) * dirichlet(geom_.m_count, psi) * y_ / boresight_;
    }
    return combined_pattern(ef_, geom_, exc_, frequency, theta, 0.0, true);
  }

  const ArrayGeometry& geometry() const { return geom_; }
  const ExcitationPlan& excitation() const { return exc_; }

 private:
  ElementFactor ef_;
  ArrayGeometry geom_;
  ExcitationPlan exc_;
  bool uniform_ = true;
  double y_ = 1.0;
  double boresight_ = 1.0;
};

inline std::vector<PatternSample> sample_cut(const PatternCutModel& model, double frequency,
                                             const std::vector<double>& angles) {
  std::vector<PatternSample> out;
  out.reserve(angles.size());
  for (double a : angles) {
    const double mag = model(a, frequency);
    out.push_back({a, mag, magnitude_to_db(mag)});
  }
  return out;
}

}  // namespace sarsweep::antenna
