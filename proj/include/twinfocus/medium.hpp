#ifndef TWINFOCUS_MEDIUM_HPP
#define TWINFOCUS_MEDIUM_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "twinfocus/grid.hpp"
#include "twinfocus/rng.hpp"
#include "twinfocus/state.hpp"

namespace twinfocus {

// Wavelength and effective focal length of the Fourier transform linking the
// SLM plane to the camera plane. The output pixel pitch follows from them.
struct PhysicalScale {
  double lambda = 810e-9;
  double focal = 150e-3;
};

enum class MediumKind { IidComplex, PhaseScreenFourier, Dft, File };

inline std::string to_string(MediumKind kind) {
  switch (kind) {
    case MediumKind::IidComplex: return "iid-complex";
    case MediumKind::PhaseScreenFourier: return "phase-screen-fourier";
    case MediumKind::Dft: return "dft";
    case MediumKind::File: return "file";
  }
  throw std::logic_error("unknown MediumKind");
}

inline MediumKind medium_kind_from_string(const std::string& s) {
  if (s == "iid-complex") return MediumKind::IidComplex;
  if (s == "phase-screen-fourier") return MediumKind::PhaseScreenFourier;
  if (s == "dft") return MediumKind::Dft;
  if (s == "file") return MediumKind::File;
  throw std::invalid_argument("unknown medium kind: " + s);
}

struct MediumSpec {
  MediumKind kind = MediumKind::PhaseScreenFourier;
  std::uint64_t seed = 0;
  int thickness_proxy = 1;  // independent phase-screen + Fourier stages
  std::string path;         // for kind == File

  void validate() const {
    if (thickness_proxy < 1) throw std::invalid_argument("MediumSpec: thickness_proxy must be >= 1");
  }
};

// Complex transmission matrix t_kn mapping input modes to output pixels.
struct ScatteringMatrix {
  CMatrix t;
  OutShape out_shape;
  ModeGrid in_grid = ModeGrid::square(1, 1.0);
  std::optional<PhysicalScale> scale;
  std::string kind = "iid-complex";
  std::uint64_t seed = 0;
  int thickness = 1;

  int out_pixels() const { return out_shape.pixels(); }
  int in_modes() const { return in_grid.modes(); }

  // Camera pixel pitch implied by the discrete Fourier kernel (meters).
  // The kernel is identified with exp(i 2 r'.r / (lambda f)), which is the
  // bookkeeping under which the no-medium sum-coordinate projection of the
  // double-Gaussian state is Gaussian with 1/e radius lambda*f*sigma_k/sqrt(2).
  double out_pitch_y() const {
    return std::numbers::pi * require_scale().lambda * require_scale().focal / (out_shape.h * in_grid.pitch());
  }
  double out_pitch_x() const {
    return std::numbers::pi * require_scale().lambda * require_scale().focal / (out_shape.w * in_grid.pitch());
  }

 private:
  const PhysicalScale& require_scale() const {
    if (!scale) throw std::logic_error("ScatteringMatrix: no physical scale attached");
    return *scale;
  }
};

inline constexpr int kMaxMatrixElements = 1 << 26;

namespace detail {

// Unitary centered 2-D DFT restricted to the embedded input modes. Row k is
// the output pixel (y', x'), column n the input mode (i, j); the kernel phase
// equals -2*pi*r'.r/(lambda*f) for centered physical coordinates.
inline CMatrix dft_kernel(const OutShape& out, const ModeGrid& grid) {
  if (grid.rows() > out.h || grid.cols() > out.w)
    throw std::invalid_argument("dft kernel: input grid exceeds output raster");
  const int m_pixels = out.pixels();
  const int n_modes = grid.modes();
  const double cy_out = 0.5 * (out.h - 1), cx_out = 0.5 * (out.w - 1);
  const double cy_in = 0.5 * (grid.rows() - 1), cx_in = 0.5 * (grid.cols() - 1);
  const double norm = 1.0 / std::sqrt(double(m_pixels));
  CMatrix t(m_pixels, n_modes);
  for (int k = 0; k < m_pixels; ++k) {
    const auto [y, x] = out.coords(k);
    for (int n = 0; n < n_modes; ++n) {
      const auto [i, j] = grid.coords(n);
      const double phase = -2.0 * std::numbers::pi *
                           ((y - cy_out) * (i - cy_in) / out.h + (x - cx_out) * (j - cx_in) / out.w);
      t(k, n) = std::polar(norm, phase);
    }
  }
  return t;
}

// Unitary centered 2-D DFT over the full h x w raster.
inline CMatrix dft_full(const OutShape& out) {
  const int m_pixels = out.pixels();
  const double cy = 0.5 * (out.h - 1), cx = 0.5 * (out.w - 1);
  const double norm = 1.0 / std::sqrt(double(m_pixels));
  CMatrix f(m_pixels, m_pixels);
  for (int k = 0; k < m_pixels; ++k) {
    const auto [y, x] = out.coords(k);
    for (int n = 0; n < m_pixels; ++n) {
      const auto [i, j] = out.coords(n);
      const double phase =
          -2.0 * std::numbers::pi * ((y - cy) * (i - cy) / out.h + (x - cx) * (j - cx) / out.w);
      f(k, n) = std::polar(norm, phase);
    }
  }
  return f;
}

}  // namespace detail

// Deterministic medium generator. iid-complex draws amplitude ~ U(0,1) and
// phase ~ U(0,2pi) per entry; phase-screen-fourier multiplies thickness_proxy
// stages of (random phase screen, then 2-D DFT); dft is the bare Fourier
// transform (the no-medium propagation).
inline ScatteringMatrix make_medium(const MediumSpec& spec, const OutShape& out, const ModeGrid& grid,
                                    std::optional<PhysicalScale> scale = PhysicalScale{}) {
  spec.validate();
  const int m_pixels = out.pixels();
  const int n_modes = grid.modes();
  if (static_cast<long long>(m_pixels) * n_modes > kMaxMatrixElements)
    throw std::invalid_argument("make_medium: dimensions exceed configured cap");

  ScatteringMatrix medium;
  medium.out_shape = out;
  medium.in_grid = grid;
  medium.scale = scale;
  medium.kind = to_string(spec.kind);
  medium.seed = spec.seed;
  medium.thickness = spec.thickness_proxy;

  switch (spec.kind) {
    case MediumKind::IidComplex: {
      Rng rng(spec.seed, "medium/iid");
      medium.t.resize(m_pixels, n_modes);
      for (int k = 0; k < m_pixels; ++k)
        for (int n = 0; n < n_modes; ++n) {
          const double amp = rng.uniform();
          const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
          medium.t(k, n) = std::polar(amp, phase);
        }
      break;
    }
    case MediumKind::Dft: {
      medium.t = detail::dft_kernel(out, grid);
      medium.thickness = 0;
      break;
    }
    case MediumKind::PhaseScreenFourier: {
      // Each stage applies a random phase screen at the current plane and
      // propagates with the 2-D DFT. The first screen acts on the input-plane
      // modes; later stages work on the full output raster.
      Rng rng(spec.seed, "medium/screen");
      CVector in_screen(n_modes);
      for (int n = 0; n < n_modes; ++n)
        in_screen[n] = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
      CMatrix t = detail::dft_kernel(out, grid) * in_screen.asDiagonal();
      for (int stage = 1; stage < spec.thickness_proxy; ++stage) {
        CVector screen(m_pixels);
        for (int k = 0; k < m_pixels; ++k)
          screen[k] = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
        t = detail::dft_full(out) * (screen.asDiagonal() * t);
      }
      medium.t = std::move(t);
      break;
    }
    case MediumKind::File:
      throw std::invalid_argument("make_medium: kind 'file' is loaded via load_matrix");
  }
  return medium;
}

// Simulated phase-stepping co-reference holography. Every input mode n is
// stepped against the fixed reference mode 0 with n_phase_steps equally
// spaced phases; the first harmonic of the output intensity retrieves
// t_kn * conj(t_k0). Rows are rescaled by |t_k0| so the estimate carries the
// true modulus and one unknown phase per output row.
inline ScatteringMatrix measure_tm(const ScatteringMatrix& medium, int n_phase_steps) {
  if (n_phase_steps < 3) throw std::invalid_argument("measure_tm: need at least 3 phase steps");
  const int m_pixels = medium.out_pixels();
  const int n_modes = medium.in_modes();
  const int reference = 0;

  CMatrix estimate(m_pixels, n_modes);
  for (int n = 0; n < n_modes; ++n) {
    CVector harmonic = CVector::Zero(m_pixels);
    for (int s = 0; s < n_phase_steps; ++s) {
      const double phase = 2.0 * std::numbers::pi * s / n_phase_steps;
      const CVector out_field =
          medium.t.col(reference) + std::polar(1.0, phase) * medium.t.col(n);
      harmonic += std::polar(1.0, -phase) * out_field.cwiseAbs2().cast<Complex>();
    }
    estimate.col(n) = harmonic / double(n_phase_steps);
  }
  for (int k = 0; k < m_pixels; ++k) {
    const double ref_mag = std::sqrt(std::abs(estimate(k, reference)));
    if (ref_mag > 0.0) estimate.row(k) /= ref_mag;
  }

  ScatteringMatrix measured = medium;
  measured.t = std::move(estimate);
  measured.kind = "measured";
  return measured;
}

}  // namespace twinfocus

#endif  // TWINFOCUS_MEDIUM_HPP
