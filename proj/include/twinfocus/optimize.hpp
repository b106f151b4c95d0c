#ifndef TWINFOCUS_OPTIMIZE_HPP
#define TWINFOCUS_OPTIMIZE_HPP

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "twinfocus/modulation.hpp"
#include "twinfocus/system.hpp"

namespace twinfocus {

struct PhaseScheme {
  enum class Kind { SixPoint, Fit };
  Kind kind = Kind::Fit;
  int n_phases = 10;  // Fit only, >= 5

  static PhaseScheme six_point() { return {Kind::SixPoint, 6}; }
  static PhaseScheme fit(int n) {
    if (n < 5) throw std::invalid_argument("PhaseScheme: fit needs at least 5 phases");
    return {Kind::Fit, n};
  }

  std::vector<double> phases() const {
    if (kind == Kind::SixPoint) {
      const auto c = canonical_six_phases();
      return {c.begin(), c.end()};
    }
    std::vector<double> out(n_phases);
    for (int i = 0; i < n_phases; ++i) out[i] = 2.0 * std::numbers::pi * i / n_phases;
    return out;
  }
};

struct StepRecord {
  int index = 0;
  double applied_phase = 0.0;
  double value_before = 0.0;
  double value_after = 0.0;
  bool accepted = true;
};

struct OptimizationTrace {
  std::vector<StepRecord> steps;
  PhaseMask final_mask;
  double final_value = 0.0;
  double wall_ms = 0.0;
  std::uint64_t config_hash = 0;
};

struct OptimizerConfig {
  int steps = 200;
  double fraction = 0.5;  // active-set fraction per step
  PhaseScheme scheme = PhaseScheme::fit(10);
  bool reject_on_decrease = false;
  bool early_stop = false;
  double early_stop_rel = 1e-4;
  int early_stop_window = 20;
  std::uint64_t seed = 0;
};

// Random partition optimizer. Each step phase-shifts a random subset of the
// modes, samples the target at the scheme's phases, recovers the two-term
// cosine model, and applies its optimal phase to the active set. With exact
// scans the applied phase is a true per-step argmax, so the noiseless target
// sequence is non-decreasing even without the rejection policy.
inline OptimizationTrace optimize_iterative(const OpticalSystem& system, const TargetSpec& target,
                                            const OptimizerConfig& cfg,
                                            std::optional<PhaseMask> initial_mask = std::nullopt) {
  if (cfg.steps < 1) throw std::invalid_argument("optimize: steps must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const int n_modes = system.n_modes();
  PhaseMask mask = initial_mask ? *initial_mask : PhaseMask::flat(system.grid());
  if (mask.theta.size() != n_modes) throw std::invalid_argument("optimize: initial mask size mismatch");

  Rng partition_rng(cfg.seed, "optimizer/partition");
  Rng noise_rng(cfg.seed, "optimizer/noise");
  const std::vector<double> phases = cfg.scheme.phases();

  OptimizationTrace trace;
  trace.steps.reserve(cfg.steps);
  double current = evaluate_target(system, mask, target);

  for (int step = 0; step < cfg.steps; ++step) {
    const Partition partition = random_partition(n_modes, cfg.fraction, partition_rng);
    const auto samples = scan_target(system, mask, partition, phases, target, &noise_rng);
    const ModulationModel model =
        cfg.scheme.kind == PhaseScheme::Kind::SixPoint ? extract_6pt(samples) : fit_model(samples);
    const double applied = optimal_phase(model);

    const PhaseMask candidate = mask_with_offset(mask, partition, applied);
    const double after = evaluate_target(system, candidate, target);

    StepRecord record{step, applied, current, after, true};
    if (cfg.reject_on_decrease && after < current) {
      record.accepted = false;
      record.value_after = current;
    } else {
      mask = candidate;
      current = after;
    }
    trace.steps.push_back(record);

    if (cfg.early_stop && step >= cfg.early_stop_window) {
      const double past = trace.steps[step - cfg.early_stop_window].value_after;
      if (past > 0.0 && (current - past) / past < cfg.early_stop_rel) break;
    }
  }

  trace.final_mask = mask;
  trace.final_value = current;
  trace.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

// Non-classical optimization of a coincidence target for a two-photon state
// or separable ensemble.
inline OptimizationTrace optimize_nonclassical(const OpticalSystem& system, const TargetSpec& target,
                                               const OptimizerConfig& cfg,
                                               std::optional<PhaseMask> initial_mask = std::nullopt) {
  if (!target.is_coincidence())
    throw std::invalid_argument("optimize_nonclassical: target must be a coincidence kind");
  if (system.is_classical())
    throw std::invalid_argument("optimize_nonclassical: source must be a photon-pair state");
  return optimize_iterative(system, target, cfg, std::move(initial_mask));
}

// Classical focusing: same loop with the output intensity at one pixel as
// the target.
inline OptimizationTrace optimize_classical(const OpticalSystem& system, const TargetSpec& target,
                                            const OptimizerConfig& cfg,
                                            std::optional<PhaseMask> initial_mask = std::nullopt) {
  if (target.kind != TargetSpec::Kind::ClassicalIntensity)
    throw std::invalid_argument("optimize_classical: target must be a classical intensity");
  if (!system.is_classical())
    throw std::invalid_argument("optimize_classical: source must be a classical field");
  return optimize_iterative(system, target, cfg, std::move(initial_mask));
}

// Binary-spin search: mask entries restricted to {0, pi/2}. Each step flips
// a random fraction of the spins and keeps the flip only if the target
// increases (the energy -target decreases). The trace records energies.
inline OptimizationTrace optimize_binary_spins(
    const std::function<double(const std::vector<int>&)>& target_of_spins, int n_spins, int steps,
    double flip_fraction, std::uint64_t seed, const std::vector<int>* initial_spins = nullptr) {
  if (steps < 1) throw std::invalid_argument("optimize_binary_spins: steps must be >= 1");
  if (n_spins < 1) throw std::invalid_argument("optimize_binary_spins: need at least one spin");
  if (!(flip_fraction > 0.0) || flip_fraction > 1.0)
    throw std::invalid_argument("optimize_binary_spins: flip fraction must lie in (0, 1]");

  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed, "optimizer/spins");
  std::vector<int> spins(n_spins, +1);
  if (initial_spins) {
    if (static_cast<int>(initial_spins->size()) != n_spins)
      throw std::invalid_argument("optimize_binary_spins: initial spin count mismatch");
    spins = *initial_spins;
  }

  const int n_flip = std::max(1, static_cast<int>(std::ceil(flip_fraction * n_spins)));
  double current = target_of_spins(spins);

  OptimizationTrace trace;
  trace.steps.reserve(steps);
  std::vector<int> order(n_spins);
  for (int i = 0; i < n_spins; ++i) order[i] = i;

  for (int step = 0; step < steps; ++step) {
    for (int i = 0; i < n_flip; ++i) {
      const int j = i + static_cast<int>(rng.below(n_spins - i));
      std::swap(order[i], order[j]);
    }
    for (int i = 0; i < n_flip; ++i) spins[order[i]] = -spins[order[i]];
    const double flipped = target_of_spins(spins);

    StepRecord record{step, 0.0, -current, -flipped, true};  // energies
    if (flipped > current) {
      current = flipped;
    } else {
      record.accepted = false;
      record.value_after = -current;
      for (int i = 0; i < n_flip; ++i) spins[order[i]] = -spins[order[i]];
    }
    trace.steps.push_back(record);
  }

  PhaseMask mask;
  mask.grid = ModeGrid::line(n_spins, 1.0);
  mask.theta = RVector::Zero(n_spins);
  for (int i = 0; i < n_spins; ++i) mask.theta[i] = spins[i] > 0 ? 0.0 : 0.5 * std::numbers::pi;
  trace.final_mask = std::move(mask);
  trace.final_value = -current;
  trace.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

// Spin-constrained search over a full optical system (mask values {0, pi/2}).
inline OptimizationTrace optimize_binary_spins_system(const OpticalSystem& system, const TargetSpec& target,
                                                      int steps, double flip_fraction, std::uint64_t seed) {
  const int n_modes = system.n_modes();
  PhaseMask mask = PhaseMask::flat(system.grid());
  auto target_fn = [&](const std::vector<int>& spins) {
    for (int i = 0; i < n_modes; ++i)
      mask.theta[i] = spins[i] > 0 ? 0.0 : 0.5 * std::numbers::pi;
    return evaluate_target(system, mask, target);
  };
  OptimizationTrace trace = optimize_binary_spins(target_fn, n_modes, steps, flip_fraction, seed);
  trace.final_mask.grid = system.grid();
  return trace;
}

struct LandscapeScan {
  RMatrix values;  // R x R over the torus [0, 2 pi)^2
  int local_maxima = 0;
};

// Evaluates the target over a 2-D torus grid of the two free mode phases
// (other modes fixed by the base mask) and counts strict local maxima under
// the 8-neighbor comparison with wraparound.
inline LandscapeScan landscape_scan(const OpticalSystem& system, int mode_1, int mode_2, int resolution,
                                    const TargetSpec& target,
                                    std::optional<PhaseMask> base_mask = std::nullopt) {
  if (system.n_modes() < 3)
    throw std::invalid_argument("landscape_scan: need at least 3 modes (one reference)");
  if (resolution < 16) throw std::invalid_argument("landscape_scan: resolution must be >= 16");
  if (mode_1 == mode_2 || mode_1 < 0 || mode_2 < 0 || mode_1 >= system.n_modes() ||
      mode_2 >= system.n_modes())
    throw std::invalid_argument("landscape_scan: invalid free mode indices");

  PhaseMask mask = base_mask ? *base_mask : PhaseMask::flat(system.grid());
  LandscapeScan scan;
  scan.values.resize(resolution, resolution);
  for (int i = 0; i < resolution; ++i) {
    mask.theta[mode_1] = 2.0 * std::numbers::pi * i / resolution;
    for (int j = 0; j < resolution; ++j) {
      mask.theta[mode_2] = 2.0 * std::numbers::pi * j / resolution;
      scan.values(i, j) = evaluate_target(system, mask, target);
    }
  }

  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      const double v = scan.values(i, j);
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di)
        for (int dj = -1; dj <= 1 && strict; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ni = (i + di + resolution) % resolution;
          const int nj = (j + dj + resolution) % resolution;
          if (scan.values(ni, nj) >= v) strict = false;
        }
      if (strict) ++scan.local_maxima;
    }
  return scan;
}

}  // namespace twinfocus

#endif  // TWINFOCUS_OPTIMIZE_HPP
