#ifndef TWINFOCUS_MODULATION_HPP
#define TWINFOCUS_MODULATION_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "twinfocus/quartic.hpp"
#include "twinfocus/rng.hpp"
#include "twinfocus/system.hpp"

namespace twinfocus {

// Split of the input modes into an active set (phase-shifted together) and
// the complementary reference set.
struct Partition {
  std::vector<int> active;  // sorted mode indices
  int n_modes = 0;

  void validate() const {
    if (active.empty() || static_cast<int>(active.size()) >= n_modes)
      throw std::invalid_argument("Partition: active set must be a non-empty proper subset");
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (active[i] < 0 || active[i] >= n_modes)
        throw std::invalid_argument("Partition: mode index out of range");
      if (i > 0 && active[i] <= active[i - 1])
        throw std::invalid_argument("Partition: active set must be strictly increasing");
    }
  }

  std::vector<bool> active_flags() const {
    std::vector<bool> flags(n_modes, false);
    for (int m : active) flags[m] = true;
    return flags;
  }
};

inline Partition random_partition(int n_modes, double fraction, Rng& rng) {
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw std::invalid_argument("random_partition: fraction must lie in (0, 1)");
  int n_active = static_cast<int>(std::ceil(fraction * n_modes));
  n_active = std::min(n_active, n_modes - 1);
  n_active = std::max(n_active, 1);
  // partial Fisher-Yates over the mode indices
  std::vector<int> order(n_modes);
  for (int i = 0; i < n_modes; ++i) order[i] = i;
  for (int i = 0; i < n_active; ++i) {
    const int j = i + static_cast<int>(rng.below(n_modes - i));
    std::swap(order[i], order[j]);
  }
  Partition p;
  p.n_modes = n_modes;
  p.active.assign(order.begin(), order.begin() + n_active);
  std::sort(p.active.begin(), p.active.end());
  return p;
}

// Two-term cosine response of a coincidence target to a common phase offset
// theta on the active modes:
//   value(theta) = A cos(2 theta + theta_A) + B cos(theta + theta_B) + C.
struct ModulationModel {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double theta_A = 0.0;
  double theta_B = 0.0;
  double r_squared = 1.0;

  double value(double theta) const {
    return A * std::cos(2.0 * theta + theta_A) + B * std::cos(theta + theta_B) + C;
  }
};

// Builds the model from the full phasors A e^{i theta_A} and B e^{i theta_B}.
inline ModulationModel model_from_phasors(Complex phasor_a, Complex phasor_b, double constant) {
  ModulationModel model;
  model.A = std::abs(phasor_a);
  model.theta_A = model.A > 0.0 ? wrap_phase(std::arg(phasor_a)) : 0.0;
  model.B = std::abs(phasor_b);
  model.theta_B = model.B > 0.0 ? wrap_phase(std::arg(phasor_b)) : 0.0;
  model.C = constant;
  return model;
}

// Predicted modulation law for a two-photon source. Per contributing pixel
// pair the output amplitude splits by how many active modes a term touches:
//   amp(theta) = e^{2 i theta} S_MM + e^{i theta} S_MN + S_NN,
// with S_MM the sum over mode pairs fully inside the active set, S_NN fully
// inside the reference set, and S_MN the mixed terms. Expanding the squared
// modulus and summing phasors over the pairs gives A, B, C directly.
inline ModulationModel predict_modulation(const TwoPhotonState& state, const PhaseMask& mask,
                                          const ScatteringMatrix& medium, const Partition& partition,
                                          const TargetSpec& target) {
  if (!target.is_coincidence())
    throw std::invalid_argument("predict_modulation: target must be a coincidence kind");
  partition.validate();
  if (partition.n_modes != state.grid.modes())
    throw std::invalid_argument("predict_modulation: partition size mismatch");

  const CVector phase = detail::mask_phasors(mask);
  const CMatrix masked = phase.asDiagonal() * state.psi * phase.asDiagonal();
  const int n_modes = partition.n_modes;
  const std::vector<bool> is_active = partition.active_flags();

  // column split of the medium rows: t_k restricted to active / reference
  const auto pairs = coincidence_pairs(target, medium.out_shape);

  Complex z_a(0.0, 0.0), z_b(0.0, 0.0);
  double constant = 0.0;
  CVector tk_active(n_modes), tk_ref(n_modes);
  for (const auto& [k, l] : pairs) {
    Complex s_mm(0.0, 0.0), s_nn(0.0, 0.0), s_mn(0.0, 0.0);
    for (int m = 0; m < n_modes; ++m) {
      const Complex tkm = medium.t(k, m);
      for (int n = 0; n < n_modes; ++n) {
        const Complex term = tkm * medium.t(l, n) * masked(m, n);
        const int touches = (is_active[m] ? 1 : 0) + (is_active[n] ? 1 : 0);
        if (touches == 2)
          s_mm += term;
        else if (touches == 1)
          s_mn += term;
        else
          s_nn += term;
      }
    }
    z_a += s_mm * std::conj(s_nn);
    z_b += s_mm * std::conj(s_mn) + s_mn * std::conj(s_nn);
    constant += std::norm(s_mm) + std::norm(s_nn) + std::norm(s_mn);
  }
  return model_from_phasors(2.0 * z_a, 2.0 * z_b, constant);
}

struct PhaseSample {
  double phase = 0.0;
  double value = 0.0;
};

// The six phases of the closed-form extraction.
inline std::array<double, 6> canonical_six_phases() {
  using std::numbers::pi;
  return {0.0, pi / 4.0, pi / 2.0, pi, 3.0 * pi / 2.0, 5.0 * pi / 4.0};
}

inline PhaseMask mask_with_offset(const PhaseMask& mask, const Partition& partition, double offset) {
  PhaseMask shifted = mask;
  for (int m : partition.active) shifted.theta[m] = wrap_phase(shifted.theta[m] + offset);
  return shifted;
}

// Measures the target with the active set offset by each phase. Evaluation
// is exact; the configured noise hook multiplies each sample by (1 + eps),
// eps ~ N(0, sigma_rel), clipped at zero.
inline std::vector<PhaseSample> scan_target(const OpticalSystem& system, const PhaseMask& mask,
                                            const Partition& partition, const std::vector<double>& phases,
                                            const TargetSpec& target, Rng* noise_rng = nullptr) {
  if (phases.empty()) throw std::invalid_argument("scan_target: need at least one phase");
  partition.validate();
  std::vector<PhaseSample> samples;
  samples.reserve(phases.size());
  for (double phase : phases) {
    double value = evaluate_target(system, mask_with_offset(mask, partition, phase), target);
    if (target.noise.kind == NoiseHook::Kind::Gaussian) {
      if (!noise_rng) throw std::invalid_argument("scan_target: noise hook requires an rng");
      value = std::max(0.0, value * (1.0 + target.noise.sigma_rel * noise_rng->gaussian()));
    }
    samples.push_back({phase, value});
  }
  return samples;
}

// Closed-form recovery of the model from samples at the six canonical
// phases. The imaginary part of the A phasor enters with a minus sign; the
// opposite choice fails the synthesize-extract round trip against
// predict_modulation, which fixes the convention.
inline ModulationModel extract_6pt(const std::vector<PhaseSample>& samples) {
  const auto phases = canonical_six_phases();
  if (samples.size() != 6) throw std::invalid_argument("extract_6pt: need exactly six samples");
  for (int i = 0; i < 6; ++i)
    if (std::abs(wrap_phase(samples[i].phase) - wrap_phase(phases[i])) > 1e-12)
      throw std::invalid_argument("extract_6pt: samples must use the six canonical phases");
  const double g0 = samples[0].value;   // 0
  const double gq = samples[1].value;   // pi/4
  const double gh = samples[2].value;   // pi/2
  const double gp = samples[3].value;   // pi
  const double g3h = samples[4].value;  // 3pi/2
  const double g5q = samples[5].value;  // 5pi/4

  const Complex z_b(0.5 * (g0 - gp), 0.5 * (g3h - gh));
  const double c = 0.25 * (g0 + gp + g3h + gh);
  const Complex z_a(0.5 * (g0 + gp - 2.0 * c), -0.5 * (gq + g5q - 2.0 * c));
  return model_from_phasors(z_a, z_b, c);
}

// Least-squares fit of the model on the basis {cos 2t, sin 2t, cos t, sin t, 1}.
inline ModulationModel fit_model(const std::vector<PhaseSample>& samples) {
  if (samples.size() < 5) throw std::invalid_argument("fit_model: need at least 5 samples");
  std::vector<double> distinct;
  for (const auto& s : samples) {
    const double w = wrap_phase(s.phase);
    bool found = false;
    for (double d : distinct)
      if (std::abs(d - w) < 1e-9 || std::abs(std::abs(d - w) - 2.0 * std::numbers::pi) < 1e-9) found = true;
    if (!found) distinct.push_back(w);
  }
  if (distinct.size() < 5) throw std::invalid_argument("fit_model: rank-deficient design (need 5 distinct phases)");

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, 5);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = samples[i].phase;
    design(i, 0) = std::cos(2.0 * t);
    design(i, 1) = std::sin(2.0 * t);
    design(i, 2) = std::cos(t);
    design(i, 3) = std::sin(t);
    design(i, 4) = 1.0;
    rhs[i] = samples[i].value;
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);

  // A cos(2t + tA) = A cos tA cos 2t - A sin tA sin 2t
  ModulationModel model;
  model.A = std::hypot(coef[0], coef[1]);
  model.theta_A = model.A > 0.0 ? wrap_phase(std::atan2(-coef[1], coef[0])) : 0.0;
  model.B = std::hypot(coef[2], coef[3]);
  model.theta_B = model.B > 0.0 ? wrap_phase(std::atan2(-coef[3], coef[2])) : 0.0;
  model.C = coef[4];

  const double mean = rhs.mean();
  const double ss_tot = (rhs.array() - mean).square().sum();
  const double ss_res = (design * coef - rhs).squaredNorm();
  model.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return model;
}

// Reduction of the stationarity condition to the quartic in Y = sin x,
// x = theta + theta_A / 2:  Y^4 + 2e Y^3 + (f^2 - 1 + e^2) Y^2 - 2e Y - e^2 = 0,
// with D = B/(4A), phi = theta_B - theta_A/2, e = D sin phi, f = D cos phi.
struct QuarticReduction {
  double D = 0.0;
  double phi = 0.0;
  double e_coef = 0.0;
  double f_coef = 0.0;
  std::vector<double> roots;  // real roots in [-1, 1]

  double residual(double y) const {
    const double e = e_coef, f = f_coef;
    return (((y + 2.0 * e) * y + (f * f - 1.0 + e * e)) * y - 2.0 * e) * y - e * e;
  }
};

inline QuarticReduction reduce_to_quartic(const ModulationModel& model) {
  QuarticReduction red;
  red.D = model.B / (4.0 * model.A);
  red.phi = model.theta_B - 0.5 * model.theta_A;
  red.e_coef = red.D * std::sin(red.phi);
  red.f_coef = red.D * std::cos(red.phi);
  double roots[4];
  const double e = red.e_coef, f = red.f_coef;
  const int count = solve_quartic(2.0 * e, f * f - 1.0 + e * e, -2.0 * e, -e * e, roots);
  for (int i = 0; i < count; ++i)
    if (roots[i] >= -1.0 - 1e-12 && roots[i] <= 1.0 + 1e-12)
      red.roots.push_back(std::clamp(roots[i], -1.0, 1.0));
  return red;
}

namespace detail {

inline double model_derivative(const ModulationModel& m, double theta) {
  return -2.0 * m.A * std::sin(2.0 * theta + m.theta_A) - m.B * std::sin(theta + m.theta_B);
}

inline double model_second_derivative(const ModulationModel& m, double theta) {
  return -4.0 * m.A * std::cos(2.0 * theta + m.theta_A) - m.B * std::cos(theta + m.theta_B);
}

inline double polish_stationary(const ModulationModel& m, double theta) {
  for (int it = 0; it < 24; ++it) {
    const double d1 = model_derivative(m, theta);
    const double d2 = model_second_derivative(m, theta);
    if (d2 == 0.0) break;
    const double step = d1 / d2;
    theta -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return theta;
}

}  // namespace detail

// Argmax of the modulation model over [0, 2 pi). Degenerate parameter
// combinations use the closed forms; the general case solves the quartic,
// maps each root back through both arcsine branches, Newton-polishes, and
// keeps the candidate with the largest model value (smallest angle on ties).
inline double optimal_phase(const ModulationModel& model) {
  if (!std::isfinite(model.A) || !std::isfinite(model.B) || !std::isfinite(model.theta_A) ||
      !std::isfinite(model.theta_B) || !std::isfinite(model.C))
    throw std::invalid_argument("optimal_phase: non-finite model");

  const double two_pi = 2.0 * std::numbers::pi;
  if (model.A == 0.0 && model.B == 0.0) return 0.0;
  if (model.A == 0.0) return wrap_phase(-model.theta_B);
  if (model.B == 0.0) {
    const double c1 = wrap_phase(-0.5 * model.theta_A);
    const double c2 = wrap_phase(-0.5 * model.theta_A + std::numbers::pi);
    if (model.value(c1) > model.value(c2) + 1e-15 * std::abs(model.value(c1))) return c1;
    if (model.value(c2) > model.value(c1) + 1e-15 * std::abs(model.value(c2))) return c2;
    return std::min(c1, c2);
  }
  const double phase_gap = wrap_phase(model.theta_A - 2.0 * model.theta_B);
  if (phase_gap < 1e-12 || two_pi - phase_gap < 1e-12) return wrap_phase(-model.theta_B);
  const double pi_gap = std::abs(phase_gap - std::numbers::pi);
  if (pi_gap < 1e-12) return wrap_phase(-model.theta_B + 0.5 * std::numbers::pi);

  std::vector<double> candidates;
  const QuarticReduction red = reduce_to_quartic(model);
  for (double y : red.roots) {
    const double asin_y = std::asin(y);
    candidates.push_back(wrap_phase(asin_y - 0.5 * model.theta_A));
    candidates.push_back(wrap_phase(std::numbers::pi - asin_y - 0.5 * model.theta_A));
  }
  // guards for the trivial branches and the pathological Y = -e case
  candidates.push_back(wrap_phase(-model.theta_B));
  candidates.push_back(wrap_phase(-model.theta_B + std::numbers::pi));
  candidates.push_back(wrap_phase(-model.theta_B + 0.5 * std::numbers::pi));
  candidates.push_back(wrap_phase(-model.theta_B - 0.5 * std::numbers::pi));
  candidates.push_back(wrap_phase(-0.5 * model.theta_A));
  candidates.push_back(wrap_phase(-0.5 * model.theta_A + std::numbers::pi));

  const double tie_tol = 1e-12 * (model.A + model.B + std::abs(model.C));
  double best_theta = 0.0;
  double best_value = 0.0;
  bool have_best = false;
  for (double raw : candidates) {
    const double theta = wrap_phase(detail::polish_stationary(model, raw));
    const double value = model.value(theta);
    if (!have_best || value > best_value + tie_tol ||
        (std::abs(value - best_value) <= tie_tol && theta < best_theta)) {
      best_value = value;
      best_theta = theta;
      have_best = true;
    }
  }
  return best_theta;
}

}  // namespace twinfocus

#endif  // TWINFOCUS_MODULATION_HPP
