#ifndef TWINFOCUS_ISING_HPP
#define TWINFOCUS_ISING_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twinfocus/optimize.hpp"
#include "twinfocus/system.hpp"

namespace twinfocus {

// Binary spin configuration; sigma_n = +1 maps to SLM phase 0 and
// sigma_n = -1 to pi/2, so eps_n = e^{i theta_n} in {1, i} with eps_n^2 = sigma_n.
struct SpinConfig {
  std::vector<int> sigma;

  static SpinConfig all_up(int n) { return SpinConfig{std::vector<int>(n, +1)}; }

  void validate() const {
    for (int s : sigma)
      if (s != 1 && s != -1) throw std::invalid_argument("SpinConfig: values must be +1 or -1");
  }

  Complex epsilon(int n) const { return sigma[n] > 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0); }

  PhaseMask to_mask(const ModeGrid& grid) const {
    PhaseMask mask{grid, RVector::Zero(static_cast<Eigen::Index>(sigma.size()))};
    for (std::size_t n = 0; n < sigma.size(); ++n)
      mask.theta[n] = sigma[n] > 0 ? 0.0 : 0.5 * std::numbers::pi;
    return mask;
  }
};

// Multi-spin Hamiltonian induced by the medium and the near-diagonal state:
//   H(sigma) = -1/2 [ sum K_n s_n + sum_{n<m} J_nm s_n s_m
//                     + sum Lambda s s s + sum Q s s s s ],
// each unordered index set counted once. const_term is the spin-independent
// part of the target, so H(sigma) = const_term - Gamma(sigma) exactly.
struct SpinGlassModel {
  struct Tri {
    int n, m, l;
    double value;
  };
  struct Quad {
    int n, m, l, p;
    double value;
  };

  int n_spins = 0;
  double alpha = 0.0;
  double const_term = 0.0;
  RVector K;
  RMatrix J;  // symmetric, zero diagonal
  std::vector<Tri> lambda;
  std::vector<Quad> quad;
  TargetSpec target;
};

inline double energy(const SpinGlassModel& model, const SpinConfig& config) {
  if (static_cast<int>(config.sigma.size()) != model.n_spins)
    throw std::invalid_argument("energy: spin count mismatch");
  const auto& s = config.sigma;
  double acc = 0.0;
  for (int n = 0; n < model.n_spins; ++n) acc += model.K[n] * s[n];
  for (int n = 0; n < model.n_spins; ++n)
    for (int m = n + 1; m < model.n_spins; ++m) acc += model.J(n, m) * s[n] * s[m];
  for (const auto& t : model.lambda) acc += t.value * s[t.n] * s[t.m] * s[t.l];
  for (const auto& q : model.quad) acc += q.value * s[q.n] * s[q.m] * s[q.l] * s[q.p];
  return -0.5 * acc;
}

namespace detail {

// Multilinear polynomial over spin monomials; the key is the bitmask of the
// participating spins and sigma^2 = 1 turns products into XOR.
using SpinPoly = std::unordered_map<std::uint64_t, Complex>;

inline void poly_add(SpinPoly& poly, std::uint64_t mask, Complex coeff) {
  auto [it, inserted] = poly.emplace(mask, coeff);
  if (!inserted) it->second += coeff;
}

inline void accumulate_abs_squared(SpinPoly& total, const SpinPoly& f) {
  for (const auto& [ma, ca] : f)
    for (const auto& [mb, cb] : f) poly_add(total, ma ^ mb, ca * std::conj(cb));
}

}  // namespace detail

// Assembles the constant, 1-, 2-, 3- and 4-spin coefficient tensors of the
// target value as a function of the binary-encoded mask, for the chain
// near-diagonal state psi = diag + alpha on the first off-diagonals. The
// per-pair amplitude is expanded exactly in spin monomials:
//   eps_n^2 = sigma_n,
//   eps_n eps_{n+1} = (sigma_n + sigma_{n+1})/2 + i (1 - sigma_n sigma_{n+1})/2,
// so no sign convention is left free; the decomposition matches the direct
// oracle by construction, up to const_term.
inline SpinGlassModel build_spin_glass(const ScatteringMatrix& medium, double alpha,
                                       const TargetSpec& target,
                                       NeighborTopology topology = NeighborTopology::Chain1d) {
  if (topology != NeighborTopology::Chain1d)
    throw std::invalid_argument("build_spin_glass: only the chain topology is supported");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("build_spin_glass: alpha must lie in [0, 1]");
  if (!target.is_coincidence())
    throw std::invalid_argument("build_spin_glass: target must be a coincidence kind");
  const int n_spins = medium.in_modes();
  if (n_spins > 64) throw std::invalid_argument("build_spin_glass: at most 64 spins");

  // normalized near-diagonal amplitudes, identical to the oracle state
  const TwoPhotonState state = near_diagonal_state(medium.in_grid, alpha, NeighborTopology::Chain1d);
  const double diag_amp = state.psi(0, 0).real();
  const double off_amp = n_spins > 1 ? state.psi(0, 1).real() : 0.0;

  const auto pairs = coincidence_pairs(target, medium.out_shape);
  detail::SpinPoly total;
  for (const auto& [k, l] : pairs) {
    detail::SpinPoly f;
    for (int n = 0; n < n_spins; ++n) {
      const Complex u = medium.t(k, n) * medium.t(l, n) * diag_amp;
      detail::poly_add(f, std::uint64_t(1) << n, u);
    }
    if (off_amp != 0.0) {
      for (int n = 0; n + 1 < n_spins; ++n) {
        const Complex v =
            (medium.t(k, n) * medium.t(l, n + 1) + medium.t(k, n + 1) * medium.t(l, n)) * off_amp;
        const std::uint64_t bn = std::uint64_t(1) << n;
        const std::uint64_t bn1 = std::uint64_t(1) << (n + 1);
        detail::poly_add(f, bn, 0.5 * v);
        detail::poly_add(f, bn1, 0.5 * v);
        detail::poly_add(f, 0, Complex(0.0, 0.5) * v);
        detail::poly_add(f, bn | bn1, Complex(0.0, -0.5) * v);
      }
    }
    detail::accumulate_abs_squared(total, f);
  }

  SpinGlassModel model;
  model.n_spins = n_spins;
  model.alpha = alpha;
  model.target = target;
  model.K = RVector::Zero(n_spins);
  model.J = RMatrix::Zero(n_spins, n_spins);

  double scale = 0.0;
  for (const auto& [mask, coeff] : total) scale = std::max(scale, std::abs(coeff));
  for (const auto& [mask, coeff] : total) {
    if (std::abs(coeff.imag()) > 1e-9 * std::max(scale, 1.0))
      throw std::logic_error("build_spin_glass: non-real polynomial coefficient");
    const double value = coeff.real();
    std::array<int, 4> idx{};
    int count = 0;
    for (int n = 0; n < n_spins; ++n)
      if (mask & (std::uint64_t(1) << n)) {
        if (count == 4) throw std::logic_error("build_spin_glass: monomial degree above four");
        idx[count++] = n;
      }
    switch (count) {
      case 0:
        model.const_term += value;
        break;
      case 1:
        model.K[idx[0]] += 2.0 * value;
        break;
      case 2:
        model.J(idx[0], idx[1]) += 2.0 * value;
        model.J(idx[1], idx[0]) += 2.0 * value;
        break;
      case 3:
        model.lambda.push_back({idx[0], idx[1], idx[2], 2.0 * value});
        break;
      default:
        model.quad.push_back({idx[0], idx[1], idx[2], idx[3], 2.0 * value});
        break;
    }
  }
  return model;
}

// Ground truth: encodes the spins as SLM phases {0, pi/2}, propagates the
// near-diagonal state through the medium, and returns -Gamma at the target.
// For every configuration, energy(model, sigma) - model.const_term equals
// this value up to rounding.
inline double direct_energy_oracle(const ScatteringMatrix& medium, double alpha, const TargetSpec& target,
                                   const SpinConfig& config,
                                   NeighborTopology topology = NeighborTopology::Chain1d) {
  config.validate();
  if (static_cast<int>(config.sigma.size()) != medium.in_modes())
    throw std::invalid_argument("direct_energy_oracle: spin count mismatch");
  const TwoPhotonState state = near_diagonal_state(medium.in_grid, alpha, topology);
  const OpticalSystem system{state, medium};
  return -evaluate_target(system, config.to_mask(medium.in_grid), target);
}

struct GroundStateResult {
  SpinConfig spins;
  double energy = 0.0;
  OptimizationTrace trace;  // of the best restart
};

// Restarted binary-spin descent on an arbitrary energy function.
inline GroundStateResult ground_state_search(const std::function<double(const SpinConfig&)>& energy_fn,
                                             int n_spins, int restarts, int steps, std::uint64_t seed,
                                             double flip_fraction = 0.25) {
  if (restarts < 1) throw std::invalid_argument("ground_state_search: restarts must be >= 1");
  GroundStateResult best;
  best.energy = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t restart_seed = derive_seed(seed, "restart-" + std::to_string(r));
    Rng init_rng(restart_seed, "spin-init");
    std::vector<int> initial(n_spins);
    for (int n = 0; n < n_spins; ++n) initial[n] = init_rng.uniform() < 0.5 ? +1 : -1;

    auto target_fn = [&](const std::vector<int>& spins) {
      return -energy_fn(SpinConfig{spins});
    };
    OptimizationTrace trace =
        optimize_binary_spins(target_fn, n_spins, steps, flip_fraction, restart_seed, &initial);
    if (trace.final_value < best.energy) {
      best.energy = trace.final_value;
      best.trace = trace;
      best.spins.sigma.resize(n_spins);
      for (int n = 0; n < n_spins; ++n)
        best.spins.sigma[n] = trace.final_mask.theta[n] < 0.25 * std::numbers::pi ? +1 : -1;
    }
  }
  return best;
}

inline GroundStateResult ground_state_search(const SpinGlassModel& model, int restarts, int steps,
                                             std::uint64_t seed, double flip_fraction = 0.25) {
  return ground_state_search([&](const SpinConfig& s) { return energy(model, s); }, model.n_spins,
                             restarts, steps, seed, flip_fraction);
}

// Exhaustive minimum for small systems.
inline std::pair<SpinConfig, double> exhaustive_minimum(
    const std::function<double(const SpinConfig&)>& energy_fn, int n_spins) {
  if (n_spins > 24) throw std::invalid_argument("exhaustive_minimum: too many spins");
  SpinConfig best = SpinConfig::all_up(n_spins);
  double best_energy = std::numeric_limits<double>::infinity();
  SpinConfig probe = best;
  for (std::uint32_t bits = 0; bits < (1u << n_spins); ++bits) {
    for (int n = 0; n < n_spins; ++n) probe.sigma[n] = (bits >> n) & 1 ? -1 : +1;
    const double e = energy_fn(probe);
    if (e < best_energy) {
      best_energy = e;
      best = probe;
    }
  }
  return {best, best_energy};
}

}  // namespace twinfocus

#endif  // TWINFOCUS_ISING_HPP
