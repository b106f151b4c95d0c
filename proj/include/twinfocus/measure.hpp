#ifndef TWINFOCUS_MEASURE_HPP
#define TWINFOCUS_MEASURE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "twinfocus/medium.hpp"
#include "twinfocus/state.hpp"

namespace twinfocus {

// Coincidence rates Gamma_kl over flattened output pixel pairs.
struct CorrelationMap {
  RMatrix gamma;
  OutShape out_shape;
  bool diagonal_zeroed = false;

  double total() const { return gamma.sum(); }
};

// Sum-coordinate projection of Gamma on the (2h-1) x (2w-1) raster; bin s
// collects all pixel pairs whose zero-based coordinates add to s.
struct SumProjection {
  RMatrix image;
  OutShape out_shape;
  bool diagonal_excluded = false;

  int rows() const { return 2 * out_shape.h - 1; }
  int cols() const { return 2 * out_shape.w - 1; }
  double total() const { return image.sum(); }

  // Number of pixel pairs contributing to each sum bin (diagonal included).
  int multiplicity(int sy, int sx) const {
    return (out_shape.h - std::abs(sy - (out_shape.h - 1))) *
           (out_shape.w - std::abs(sx - (out_shape.w - 1)));
  }

  // Mean coincidence per contributing pair over the central window
  // |s - center| <= half size per axis. Removes the multiplicity pyramid and
  // the periodic alias copies of the discrete Fourier kernel, both artifacts
  // of the finite raster.
  RMatrix per_pair_central(int half_y, int half_x) const {
    const int cy = out_shape.h - 1, cx = out_shape.w - 1;
    RMatrix central(2 * half_y + 1, 2 * half_x + 1);
    for (int dy = -half_y; dy <= half_y; ++dy)
      for (int dx = -half_x; dx <= half_x; ++dx) {
        const int sy = cy + dy, sx = cx + dx;
        const int mult = multiplicity(sy, sx) - (diagonal_excluded && sy % 2 == 0 && sx % 2 == 0 ? 1 : 0);
        central(dy + half_y, dx + half_x) = mult > 0 ? image(sy, sx) / mult : 0.0;
      }
    return central;
  }
};

struct OutputIntensity {
  RMatrix image;  // h x w
};

namespace detail {

inline CVector mask_phasors(const PhaseMask& mask) {
  CVector phase(mask.theta.size());
  for (Eigen::Index n = 0; n < mask.theta.size(); ++n) phase[n] = std::polar(1.0, mask.theta[n]);
  return phase;
}

inline void check_dims(const ModeGrid& grid, const ScatteringMatrix& medium) {
  if (!(grid == medium.in_grid) || medium.t.cols() != grid.modes())
    throw std::invalid_argument("propagation: input grid does not match the medium");
}

}  // namespace detail

// Two-photon output amplitude T (psi o mask) T^t; Gamma is its squared modulus.
inline CMatrix propagate_two_photon(const TwoPhotonState& state, const PhaseMask& mask,
                                    const ScatteringMatrix& medium) {
  detail::check_dims(state.grid, medium);
  if (!(state.grid == mask.grid)) throw std::invalid_argument("propagation: mask grid mismatch");
  const CVector phase = detail::mask_phasors(mask);
  const CMatrix masked = phase.asDiagonal() * state.psi * phase.asDiagonal();
  return medium.t * masked * medium.t.transpose();
}

inline CorrelationMap coincidence_map(const TwoPhotonState& state, const PhaseMask& mask,
                                      const ScatteringMatrix& medium) {
  const CMatrix amplitude = propagate_two_photon(state, mask, medium);
  CorrelationMap map;
  map.gamma = amplitude.cwiseAbs2();
  map.out_shape = medium.out_shape;
  return map;
}

// Gamma_kl = sum_j p_j |T phi_j|_k^2 |T chi_j|_l^2 for a separable mixture.
inline CorrelationMap separable_coincidence_map(const SeparableEnsemble& ens, const PhaseMask& mask,
                                                const ScatteringMatrix& medium) {
  detail::check_dims(ens.grid, medium);
  if (!(ens.grid == mask.grid)) throw std::invalid_argument("propagation: mask grid mismatch");
  const CVector phase = detail::mask_phasors(mask);
  const int m_pixels = medium.out_pixels();
  RMatrix gamma = RMatrix::Zero(m_pixels, m_pixels);
  for (const auto& c : ens.components) {
    const RVector ik = (medium.t * phase.cwiseProduct(c.phi).matrix()).cwiseAbs2();
    const RVector il = (medium.t * phase.cwiseProduct(c.chi).matrix()).cwiseAbs2();
    gamma.noalias() += c.weight * (ik * il.transpose());
  }
  return CorrelationMap{std::move(gamma), medium.out_shape, false};
}

inline OutputIntensity classical_intensity(const ClassicalField& field, const PhaseMask& mask,
                                           const ScatteringMatrix& medium) {
  detail::check_dims(field.grid, medium);
  if (!(field.grid == mask.grid)) throw std::invalid_argument("propagation: mask grid mismatch");
  const CVector phase = detail::mask_phasors(mask);
  const RVector intensity = (medium.t * phase.cwiseProduct(field.amplitudes).matrix()).cwiseAbs2();
  OutputIntensity out;
  out.image.resize(medium.out_shape.h, medium.out_shape.w);
  for (int k = 0; k < medium.out_pixels(); ++k) {
    const auto [y, x] = medium.out_shape.coords(k);
    out.image(y, x) = intensity[k];
  }
  return out;
}

inline SumProjection sum_projection(const CorrelationMap& map, bool zero_diagonal) {
  const OutShape out = map.out_shape;
  SumProjection proj;
  proj.out_shape = out;
  proj.diagonal_excluded = zero_diagonal;
  proj.image = RMatrix::Zero(2 * out.h - 1, 2 * out.w - 1);
  const int m_pixels = out.pixels();
  for (int k = 0; k < m_pixels; ++k) {
    const auto [ky, kx] = out.coords(k);
    for (int l = 0; l < m_pixels; ++l) {
      if (zero_diagonal && k == l) continue;
      const auto [ly, lx] = out.coords(l);
      proj.image(ky + ly, kx + lx) += map.gamma(k, l);
    }
  }
  return proj;
}

// Value of the sum-coordinate projection at coordinate (sy, sx).
inline double target_value(const SumProjection& proj, int sy, int sx) {
  if (sy < 0 || sy >= proj.rows() || sx < 0 || sx >= proj.cols())
    throw std::out_of_range("target_value: coordinate outside the sum raster");
  return proj.image(sy, sx);
}

// Slice Gamma_{.,l} reshaped to the output raster.
inline RMatrix conditional_image(const CorrelationMap& map, int l) {
  if (l < 0 || l >= map.out_shape.pixels())
    throw std::out_of_range("conditional_image: pixel outside the raster");
  RMatrix image(map.out_shape.h, map.out_shape.w);
  for (int k = 0; k < map.out_shape.pixels(); ++k) {
    const auto [y, x] = map.out_shape.coords(k);
    image(y, x) = map.gamma(k, l);
  }
  return image;
}

// 2-D Pearson correlation of two equally shaped images.
inline double similarity(const RMatrix& a, const RMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("similarity: shape mismatch");
  const double mean_a = a.mean(), mean_b = b.mean();
  const RMatrix da = a.array() - mean_a;
  const RMatrix db = b.array() - mean_b;
  const double var_a = da.squaredNorm(), var_b = db.squaredNorm();
  if (!(var_a > 0.0) || !(var_b > 0.0))
    throw std::invalid_argument("similarity: zero variance image");
  return da.cwiseProduct(db).sum() / std::sqrt(var_a * var_b);
}

// Enhancement at sum coordinate T: value over the mean of the surrounding
// speckle. The background is taken inside the central half-multiplicity
// window of the sum raster (the outer frame of a sum-coordinate image is
// depleted simply because fewer pixel pairs contribute there) excluding a
// Chebyshev ball of exclusion_radius around T.
inline double enhancement(const SumProjection& proj, int ty, int tx, int exclusion_radius = 1) {
  const double peak = target_value(proj, ty, tx);
  const int cy = proj.out_shape.h - 1, cx = proj.out_shape.w - 1;
  const int half_y = proj.out_shape.h / 2, half_x = proj.out_shape.w / 2;
  double sum = 0.0;
  int count = 0;
  for (int sy = cy - half_y; sy <= cy + half_y; ++sy) {
    for (int sx = cx - half_x; sx <= cx + half_x; ++sx) {
      if (std::max(std::abs(sy - ty), std::abs(sx - tx)) <= exclusion_radius) continue;
      sum += proj.image(sy, sx);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("enhancement: empty background region");
  const double mean = sum / count;
  if (!(mean > 0.0)) throw std::invalid_argument("enhancement: zero background mean");
  return peak / mean;
}

// Radial width sqrt(2 * Var) of the median-subtracted, zero-clipped image,
// with Var the mean of the two marginal variances. For a Gaussian intensity
// profile exp(-2 r^2 / w^2) this returns the 1/e radius w / sqrt(2).
inline double gaussian_width(const RMatrix& image) {
  std::vector<double> values(image.data(), image.data() + image.size());
  std::nth_element(values.begin(), values.begin() + values.size() / 2, values.end());
  const double background = values[values.size() / 2];

  double mass = 0.0, mx = 0.0, my = 0.0;
  for (int y = 0; y < image.rows(); ++y)
    for (int x = 0; x < image.cols(); ++x) {
      const double v = std::max(image(y, x) - background, 0.0);
      mass += v;
      mx += v * x;
      my += v * y;
    }
  if (!(mass > 0.0)) throw std::invalid_argument("gaussian_width: no mass after background subtraction");
  mx /= mass;
  my /= mass;
  double var_x = 0.0, var_y = 0.0;
  for (int y = 0; y < image.rows(); ++y)
    for (int x = 0; x < image.cols(); ++x) {
      const double v = std::max(image(y, x) - background, 0.0);
      var_x += v * (x - mx) * (x - mx);
      var_y += v * (y - my) * (y - my);
    }
  var_x /= mass;
  var_y /= mass;
  return std::sqrt(var_x + var_y);
}

// Focus detector: mean over a (2r+1)^2 window around pixel (y0, x0), divided
// by the full-image mean. The window tolerates half-pixel focus positions.
inline double peak_to_mean(const RMatrix& image, int y0, int x0, int window = 1) {
  if (y0 < 0 || y0 >= image.rows() || x0 < 0 || x0 >= image.cols())
    throw std::out_of_range("peak_to_mean: pixel outside the image");
  const double mean = image.mean();
  if (!(mean > 0.0)) throw std::invalid_argument("peak_to_mean: zero mean image");
  double sum = 0.0;
  int count = 0;
  for (int y = std::max(0, y0 - window); y <= std::min<int>(image.rows() - 1, y0 + window); ++y)
    for (int x = std::max(0, x0 - window); x <= std::min<int>(image.cols() - 1, x0 + window); ++x) {
      sum += image(y, x);
      ++count;
    }
  return sum / count / mean;
}

// Modulus of the mean phasor overlap between two masks; 1 means identical up
// to a global phase.
inline double mask_phasor_similarity(const PhaseMask& a, const PhaseMask& b) {
  if (a.theta.size() != b.theta.size())
    throw std::invalid_argument("mask_phasor_similarity: size mismatch");
  Complex acc(0.0, 0.0);
  for (Eigen::Index n = 0; n < a.theta.size(); ++n)
    acc += std::polar(1.0, a.theta[n] - b.theta[n]);
  return std::abs(acc) / double(a.theta.size());
}

}  // namespace twinfocus

#endif  // TWINFOCUS_MEASURE_HPP
