#ifndef TWINFOCUS_FRAMES_HPP
#define TWINFOCUS_FRAMES_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "twinfocus/io.hpp"
#include "twinfocus/measure.hpp"
#include "twinfocus/rng.hpp"

namespace twinfocus {

struct ExposureMeta {
  double pair_rate = 5.0;      // mean photon pairs per frame
  double singles_rate = 0.0;   // mean uncorrelated single photons per frame
  double dark_prob = 0.0;      // per-pixel dark count probability per frame
  double efficiency = 1.0;     // per-photon detection probability
};

// Binary single-photon frame stack (P+1 frames of h x w pixels).
struct FrameStack {
  FrameStackData data;
  ExposureMeta meta;
  std::uint64_t seed = 0;
};

namespace detail {

// Cumulative distribution over matrix entries in row-major order.
inline std::vector<double> cumulative(const RMatrix& weights) {
  std::vector<double> cdf;
  cdf.reserve(static_cast<std::size_t>(weights.size()));
  double acc = 0.0;
  for (Eigen::Index r = 0; r < weights.rows(); ++r)
    for (Eigen::Index c = 0; c < weights.cols(); ++c) {
      acc += std::max(weights(r, c), 0.0);
      cdf.push_back(acc);
    }
  return cdf;
}

inline std::size_t sample_cdf(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform() * cdf.back();
  return static_cast<std::size_t>(
      std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

}  // namespace detail

// Forward model of the SPAD acquisition: Poisson-distributed photon pairs
// land on pixel pairs with probability Gamma_kl / sum(Gamma), uncorrelated
// singles follow the singles image, every photon survives with the detector
// efficiency, dark counts fire independently per pixel, and the binary frame
// is the logical OR of all detections.
inline FrameStack simulate_frames(const CorrelationMap& map, const OutputIntensity& singles, int P,
                                  const ExposureMeta& meta, std::uint64_t seed) {
  if (P < 1) throw std::invalid_argument("simulate_frames: P must be >= 1");
  if (meta.pair_rate < 0.0 || meta.singles_rate < 0.0 || meta.dark_prob < 0.0 ||
      meta.efficiency < 0.0 || meta.efficiency > 1.0)
    throw std::invalid_argument("simulate_frames: invalid rates");
  const OutShape out = map.out_shape;
  const double gamma_total = map.total();
  if (meta.pair_rate > 0.0 && !(gamma_total > 0.0))
    throw std::invalid_argument("simulate_frames: empty correlation map with nonzero pair rate");
  const double singles_total = singles.image.sum();
  if (meta.singles_rate > 0.0 && !(singles_total > 0.0))
    throw std::invalid_argument("simulate_frames: empty singles image with nonzero singles rate");

  const std::vector<double> pair_cdf =
      meta.pair_rate > 0.0 ? detail::cumulative(map.gamma) : std::vector<double>{};
  const std::vector<double> singles_cdf =
      meta.singles_rate > 0.0 ? detail::cumulative(singles.image) : std::vector<double>{};

  FrameStack stack;
  stack.meta = meta;
  stack.seed = seed;
  stack.data.h = out.h;
  stack.data.w = out.w;
  stack.data.frames.assign(std::size_t(P + 1) * out.pixels(), 0);

  Rng rng(seed, "frames");
  const int m_pixels = out.pixels();
  for (int p = 0; p < P + 1; ++p) {
    std::uint8_t* frame = stack.data.frames.data() + std::size_t(p) * m_pixels;
    const std::uint64_t n_pairs = rng.poisson(meta.pair_rate);
    for (std::uint64_t i = 0; i < n_pairs; ++i) {
      const std::size_t flat = detail::sample_cdf(pair_cdf, rng);
      const int k = static_cast<int>(flat / m_pixels);
      const int l = static_cast<int>(flat % m_pixels);
      if (rng.uniform() < meta.efficiency) frame[k] = 1;
      if (rng.uniform() < meta.efficiency) frame[l] = 1;
    }
    const std::uint64_t n_singles = rng.poisson(meta.singles_rate);
    for (std::uint64_t i = 0; i < n_singles; ++i) {
      const std::size_t k = detail::sample_cdf(singles_cdf, rng);
      if (rng.uniform() < meta.efficiency) frame[k] = 1;
    }
    if (meta.dark_prob > 0.0)
      for (int k = 0; k < m_pixels; ++k)
        if (rng.uniform() < meta.dark_prob) frame[k] = 1;
  }
  return stack;
}

// Accidental-subtraction estimator over P+1 binary frames:
// Gamma_kl = (1/P) sum_p [ I_k^p I_l^p - I_k^p I_l^{p+1} ], with the
// same-pixel coefficients zeroed (a binary camera cannot resolve them).
// zero_neighbors additionally masks Chebyshev-adjacent pixel pairs.
inline CorrelationMap estimate_gamma(const FrameStack& stack, bool zero_neighbors = false) {
  const int m_pixels = stack.data.h * stack.data.w;
  const int n_frames = stack.data.n_frames();
  if (n_frames < 2) throw std::invalid_argument("estimate_gamma: need at least 2 frames");
  const int P = n_frames - 1;

  // frames are sparse; accumulate outer products over lit pixels only
  std::vector<std::vector<int>> lit(n_frames);
  for (int p = 0; p < n_frames; ++p) {
    const std::uint8_t* frame = stack.data.frames.data() + std::size_t(p) * m_pixels;
    for (int k = 0; k < m_pixels; ++k)
      if (frame[k]) lit[p].push_back(k);
  }

  RMatrix gamma = RMatrix::Zero(m_pixels, m_pixels);
  for (int p = 0; p < P; ++p) {
    for (int k : lit[p]) {
      for (int l : lit[p]) gamma(k, l) += 1.0;
      for (int l : lit[p + 1]) gamma(k, l) -= 1.0;
    }
  }
  gamma /= double(P);

  const OutShape out{stack.data.h, stack.data.w};
  for (int k = 0; k < m_pixels; ++k) gamma(k, k) = 0.0;
  if (zero_neighbors) {
    for (int k = 0; k < m_pixels; ++k) {
      const auto [ky, kx] = out.coords(k);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int ly = ky + dy, lx = kx + dx;
          if (out.contains(ly, lx)) gamma(k, out.index(ly, lx)) = 0.0;
        }
    }
  }
  return CorrelationMap{std::move(gamma), out, true};
}

}  // namespace twinfocus

#endif  // TWINFOCUS_FRAMES_HPP
