#ifndef TWINFOCUS_SYSTEM_HPP
#define TWINFOCUS_SYSTEM_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "twinfocus/measure.hpp"

namespace twinfocus {

struct NoiseHook {
  enum class Kind { None, Gaussian };
  Kind kind = Kind::None;
  double sigma_rel = 0.0;

  static NoiseHook none() { return {}; }
  static NoiseHook gaussian(double sigma_rel) { return {Kind::Gaussian, sigma_rel}; }
};

// Optimization target: a pixel of the sum-coordinate projection, a single
// coincidence pair, or the classical intensity at one output pixel.
struct TargetSpec {
  enum class Kind { SumCoordinate, PixelPair, ClassicalIntensity };
  Kind kind = Kind::SumCoordinate;
  int sum_y = 0, sum_x = 0;  // SumCoordinate
  int pair_k = 0, pair_l = 0;  // PixelPair
  int pixel = 0;               // ClassicalIntensity
  NoiseHook noise;

  static TargetSpec sum_coordinate(int sy, int sx, NoiseHook hook = {}) {
    TargetSpec t;
    t.kind = Kind::SumCoordinate;
    t.sum_y = sy;
    t.sum_x = sx;
    t.noise = hook;
    return t;
  }
  static TargetSpec pixel_pair(int k, int l, NoiseHook hook = {}) {
    TargetSpec t;
    t.kind = Kind::PixelPair;
    t.pair_k = k;
    t.pair_l = l;
    t.noise = hook;
    return t;
  }
  static TargetSpec classical_intensity(int pixel, NoiseHook hook = {}) {
    TargetSpec t;
    t.kind = Kind::ClassicalIntensity;
    t.pixel = pixel;
    t.noise = hook;
    return t;
  }

  bool is_coincidence() const { return kind != Kind::ClassicalIntensity; }

  void validate(const OutShape& out) const {
    switch (kind) {
      case Kind::SumCoordinate:
        if (sum_y < 0 || sum_y > 2 * out.h - 2 || sum_x < 0 || sum_x > 2 * out.w - 2)
          throw std::out_of_range("TargetSpec: sum coordinate outside the raster");
        break;
      case Kind::PixelPair:
        if (pair_k < 0 || pair_k >= out.pixels() || pair_l < 0 || pair_l >= out.pixels())
          throw std::out_of_range("TargetSpec: pixel pair outside the raster");
        break;
      case Kind::ClassicalIntensity:
        if (pixel < 0 || pixel >= out.pixels())
          throw std::out_of_range("TargetSpec: pixel outside the raster");
        break;
    }
  }
};

// Ordered output pixel pairs contributing to a coincidence target. For a
// sum-coordinate target these are all (k, l) with coords(k) + coords(l)
// equal to the target coordinate, same-pixel pairs included.
inline std::vector<std::pair<int, int>> coincidence_pairs(const TargetSpec& target, const OutShape& out) {
  target.validate(out);
  std::vector<std::pair<int, int>> pairs;
  switch (target.kind) {
    case TargetSpec::Kind::PixelPair:
      pairs.emplace_back(target.pair_k, target.pair_l);
      break;
    case TargetSpec::Kind::SumCoordinate:
      for (int ky = 0; ky < out.h; ++ky) {
        const int ly = target.sum_y - ky;
        if (ly < 0 || ly >= out.h) continue;
        for (int kx = 0; kx < out.w; ++kx) {
          const int lx = target.sum_x - kx;
          if (lx < 0 || lx >= out.w) continue;
          pairs.emplace_back(out.index(ky, kx), out.index(ly, lx));
        }
      }
      break;
    case TargetSpec::Kind::ClassicalIntensity:
      throw std::invalid_argument("coincidence_pairs: classical target has no pixel pairs");
  }
  return pairs;
}

// A shapeable source in front of a fixed scattering medium.
struct OpticalSystem {
  std::variant<TwoPhotonState, SeparableEnsemble, ClassicalField> source;
  ScatteringMatrix medium;

  const ModeGrid& grid() const {
    return std::visit([](const auto& s) -> const ModeGrid& { return s.grid; }, source);
  }
  int n_modes() const { return grid().modes(); }
  bool is_two_photon() const { return std::holds_alternative<TwoPhotonState>(source); }
  bool is_ensemble() const { return std::holds_alternative<SeparableEnsemble>(source); }
  bool is_classical() const { return std::holds_alternative<ClassicalField>(source); }
};

// Exact target evaluation (no noise, no detector model).
inline double evaluate_target(const OpticalSystem& system, const PhaseMask& mask, const TargetSpec& target) {
  target.validate(system.medium.out_shape);
  if (target.kind == TargetSpec::Kind::ClassicalIntensity) {
    const auto* field = std::get_if<ClassicalField>(&system.source);
    if (!field) throw std::invalid_argument("evaluate_target: intensity target needs a classical field");
    const auto intensity = classical_intensity(*field, mask, system.medium);
    const auto [y, x] = system.medium.out_shape.coords(target.pixel);
    return intensity.image(y, x);
  }

  const auto pairs = coincidence_pairs(target, system.medium.out_shape);
  if (const auto* state = std::get_if<TwoPhotonState>(&system.source)) {
    const CVector phase = detail::mask_phasors(mask);
    const CMatrix masked = phase.asDiagonal() * state->psi * phase.asDiagonal();
    const CMatrix g = system.medium.t * masked;  // M x N
    double value = 0.0;
    for (const auto& [k, l] : pairs) {
      const Complex amp = g.row(k).cwiseProduct(system.medium.t.row(l)).sum();
      value += std::norm(amp);
    }
    return value;
  }
  if (const auto* ens = std::get_if<SeparableEnsemble>(&system.source)) {
    const CVector phase = detail::mask_phasors(mask);
    double value = 0.0;
    for (const auto& c : ens->components) {
      const RVector ia = (system.medium.t * phase.cwiseProduct(c.phi).matrix()).cwiseAbs2();
      const RVector ib = (system.medium.t * phase.cwiseProduct(c.chi).matrix()).cwiseAbs2();
      double acc = 0.0;
      for (const auto& [k, l] : pairs) acc += ia[k] * ib[l];
      value += c.weight * acc;
    }
    return value;
  }
  throw std::invalid_argument("evaluate_target: coincidence target needs a two-photon source");
}

// Full observable behind the target kind, for images and diagnostics.
inline CorrelationMap system_correlation_map(const OpticalSystem& system, const PhaseMask& mask) {
  if (const auto* state = std::get_if<TwoPhotonState>(&system.source))
    return coincidence_map(*state, mask, system.medium);
  if (const auto* ens = std::get_if<SeparableEnsemble>(&system.source))
    return separable_coincidence_map(*ens, mask, system.medium);
  throw std::invalid_argument("system_correlation_map: classical source has no coincidence map");
}

}  // namespace twinfocus

#endif  // TWINFOCUS_SYSTEM_HPP
