#ifndef TWINFOCUS_STATE_HPP
#define TWINFOCUS_STATE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "twinfocus/grid.hpp"

namespace twinfocus {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline double wrap_phase(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  return t;
}

// Correlation widths of the double-Gaussian model; sigma_r in meters,
// sigma_k in inverse meters.
struct GaussianStateParams {
  double sigma_r = 2.9e-5;
  double sigma_k = 8.0e2;

  void validate() const {
    if (!(sigma_r > 0.0) || !(sigma_k > 0.0))
      throw std::invalid_argument("GaussianStateParams: widths must be positive");
  }
};

// Schmidt number of the double-Gaussian state,
// K = (sigma_r*sigma_k + 1/(sigma_r*sigma_k))^2 / 4.
inline double schmidt_number(const GaussianStateParams& params) {
  params.validate();
  const double x = params.sigma_r * params.sigma_k;
  const double s = x + 1.0 / x;
  return 0.25 * s * s;
}

// Discretized two-photon amplitude psi_mn over the input modes.
// Unit Frobenius norm; constructors in this module produce symmetric psi.
struct TwoPhotonState {
  ModeGrid grid = ModeGrid::square(1, 1.0);
  CMatrix psi;
  std::string label;
};

// Phase values theta_n in [0, 2*pi) applied by the SLM, one per mode.
struct PhaseMask {
  ModeGrid grid = ModeGrid::square(1, 1.0);
  RVector theta;

  static PhaseMask flat(const ModeGrid& grid) {
    PhaseMask m{grid, RVector::Zero(grid.modes())};
    return m;
  }

  void wrap() {
    for (Eigen::Index n = 0; n < theta.size(); ++n) theta[n] = wrap_phase(theta[n]);
  }
};

struct SeparableComponent {
  double weight = 1.0;
  CVector phi;
  CVector chi;
};

// Mixture of factorizable two-photon states: rho = sum_j p_j |phi_j chi_j>.
struct SeparableEnsemble {
  ModeGrid grid = ModeGrid::square(1, 1.0);
  std::vector<SeparableComponent> components;
  std::string label;
};

// Coherent probe field E_l e^{i alpha_l} on the SLM plane, unit norm.
struct ClassicalField {
  ModeGrid grid = ModeGrid::square(1, 1.0);
  CVector amplitudes;

  static ClassicalField flat(const ModeGrid& grid) {
    const int n = grid.modes();
    ClassicalField f{grid, CVector::Constant(n, Complex(1.0 / std::sqrt(double(n)), 0.0))};
    return f;
  }
};

namespace detail {

inline void normalize_frobenius(CMatrix& m) {
  const double norm = m.norm();
  if (!(norm > 0.0)) throw std::runtime_error("state normalization: zero amplitude");
  m /= norm;
}

inline void normalize(CVector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw std::runtime_error("vector normalization: zero amplitude");
  v /= norm;
}

}  // namespace detail

// Double-Gaussian two-photon state sampled at macropixel centers:
// psi_mn ~ exp(-|r_m - r_n|^2 / (4 sigma_r^2)) * exp(-|r_m + r_n|^2 sigma_k^2 / 4).
inline TwoPhotonState build_double_gaussian(const ModeGrid& grid, const GaussianStateParams& params) {
  params.validate();
  const int n_modes = grid.modes();
  CMatrix psi(n_modes, n_modes);
  const double inv_4sr2 = 1.0 / (4.0 * params.sigma_r * params.sigma_r);
  const double sk2_over_4 = 0.25 * params.sigma_k * params.sigma_k;
  for (int m = 0; m < n_modes; ++m) {
    const auto rm = grid.position(m);
    for (int n = m; n < n_modes; ++n) {
      const auto rn = grid.position(n);
      const double dx = rm[0] - rn[0], dy = rm[1] - rn[1];
      const double sx = rm[0] + rn[0], sy = rm[1] + rn[1];
      const double value = std::exp(-(dx * dx + dy * dy) * inv_4sr2 - (sx * sx + sy * sy) * sk2_over_4);
      psi(m, n) = value;
      psi(n, m) = value;
    }
  }
  detail::normalize_frobenius(psi);
  return TwoPhotonState{grid, std::move(psi), "double-gaussian"};
}

// Pure separable state with phi = chi ~ exp(-|r|^2 sigma_k^2 / 8); reproduces
// the entangled state's sum-coordinate projection without a medium.
inline SeparableEnsemble build_pure_separable(const ModeGrid& grid, double sigma_k) {
  if (!(sigma_k > 0.0)) throw std::invalid_argument("build_pure_separable: sigma_k must be positive");
  const int n_modes = grid.modes();
  CVector phi(n_modes);
  for (int n = 0; n < n_modes; ++n) {
    const auto r = grid.position(n);
    phi[n] = std::exp(-(r[0] * r[0] + r[1] * r[1]) * sigma_k * sigma_k / 8.0);
  }
  detail::normalize(phi);
  SeparableEnsemble ens{grid, {}, "pure-separable"};
  ens.components.push_back(SeparableComponent{1.0, phi, phi});
  return ens;
}

inline constexpr int kMaxEnsembleComponents = 4096;

// Mixed separable state: n_q^2 plane-wave components on a uniform q-grid over
// [-pi/pitch, pi/pitch]^2 (midpoint rule), uniform weights p_q = 1/n_q^2,
// phi_q ~ exp(-|r|^2 sigma_k^2 / (4 (1 + sigma_r^2 sigma_k^2))) e^{-i q r},
// chi_q ~ e^{-i q r}.
inline SeparableEnsemble build_mixed_separable(const ModeGrid& grid, const GaussianStateParams& params,
                                               int n_q) {
  params.validate();
  if (n_q < 1) throw std::invalid_argument("build_mixed_separable: n_q must be >= 1");
  if (n_q * n_q > kMaxEnsembleComponents)
    throw std::invalid_argument("build_mixed_separable: component cap exceeded");

  const int n_modes = grid.modes();
  const double srk = params.sigma_r * params.sigma_k;
  const double envelope_coef = params.sigma_k * params.sigma_k / (4.0 * (1.0 + srk * srk));
  const double q_max = std::numbers::pi / grid.pitch();
  const double q_step = 2.0 * q_max / n_q;

  RVector envelope(n_modes);
  for (int n = 0; n < n_modes; ++n) {
    const auto r = grid.position(n);
    envelope[n] = std::exp(-(r[0] * r[0] + r[1] * r[1]) * envelope_coef);
  }

  SeparableEnsemble ens{grid, {}, "mixed-separable"};
  ens.components.reserve(static_cast<std::size_t>(n_q) * n_q);
  const double weight = 1.0 / (double(n_q) * double(n_q));
  for (int a = 0; a < n_q; ++a) {
    const double qx = -q_max + (a + 0.5) * q_step;
    for (int b = 0; b < n_q; ++b) {
      const double qy = -q_max + (b + 0.5) * q_step;
      CVector phi(n_modes), chi(n_modes);
      for (int n = 0; n < n_modes; ++n) {
        const auto r = grid.position(n);
        // opposite plane-wave signs keep the photons anti-correlated in the
        // far field, which is what reproduces the entangled state's
        // sum-coordinate projection
        const Complex wave = std::polar(1.0, -(qx * r[0] + qy * r[1]));
        phi[n] = envelope[n] * std::conj(wave);
        chi[n] = wave;
      }
      detail::normalize(phi);
      detail::normalize(chi);
      ens.components.push_back(SeparableComponent{weight, std::move(phi), std::move(chi)});
    }
  }
  return ens;
}

enum class NeighborTopology { Chain1d, Grid2d };

// Near-diagonal approximation of the input state: identity plus coupling
// alpha between directly neighboring modes. Chain topology couples modes
// n and n+1 in flat index order; grid topology couples the 4-neighborhood
// and keeps diagonal-neighbor coupling at zero.
inline TwoPhotonState near_diagonal_state(const ModeGrid& grid, double alpha, NeighborTopology topology) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("near_diagonal_state: alpha must lie in [0, 1]");
  const int n_modes = grid.modes();
  CMatrix psi = CMatrix::Identity(n_modes, n_modes);
  if (topology == NeighborTopology::Chain1d) {
    for (int n = 0; n + 1 < n_modes; ++n) {
      psi(n, n + 1) = alpha;
      psi(n + 1, n) = alpha;
    }
  } else {
    for (int m = 0; m < n_modes; ++m) {
      const auto [i, j] = grid.coords(m);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int ni = i + di[d], nj = j + dj[d];
        if (ni < 0 || ni >= grid.rows() || nj < 0 || nj >= grid.cols()) continue;
        psi(m, grid.index(ni, nj)) = alpha;
      }
    }
  }
  detail::normalize_frobenius(psi);
  return TwoPhotonState{grid, std::move(psi),
                        topology == NeighborTopology::Chain1d ? "near-diagonal-chain" : "near-diagonal-grid"};
}

// psi'_mn = psi_mn e^{i theta_m} e^{i theta_n}; norm preserved.
inline TwoPhotonState apply_mask(const TwoPhotonState& state, const PhaseMask& mask) {
  if (!(state.grid == mask.grid)) throw std::invalid_argument("apply_mask: grid mismatch");
  const int n_modes = state.grid.modes();
  CVector phase(n_modes);
  for (int n = 0; n < n_modes; ++n) phase[n] = std::polar(1.0, mask.theta[n]);
  TwoPhotonState out{state.grid, phase.asDiagonal() * state.psi * phase.asDiagonal(), state.label};
  return out;
}

}  // namespace twinfocus

#endif  // TWINFOCUS_STATE_HPP
