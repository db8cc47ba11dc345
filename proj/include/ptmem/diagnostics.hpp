/**
 * Observables of a trajectory: long-time amplification rate, time-averaged
 * dissipation, phase labels, plus the Floquet-resonance predictor and the
 * reference initial states.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptmem/circuit.hpp"
#include "ptmem/dynamics.hpp"
#include "ptmem/errors.hpp"

namespace ptmem {

enum class PhaseKind { PTSymmetric, PTBroken };

inline std::string to_string(PhaseKind k) { return k == PhaseKind::PTSymmetric ? "PTSymmetric" : "PTBroken"; }

struct PhaseLabel {
  PhaseKind label = PhaseKind::PTSymmetric;
  double lambda_amp = 0.0;
  double tau_used = 0.0;
};

inline constexpr double kDefaultPhaseThreshold = 1e-3;

namespace detail {

inline void check_series(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidParameter("series lengths differ");
  if (a == 0) throw InsufficientData("empty series");
}

// Windows are closed; the slack absorbs k*dt rounding at the window edge.
inline double window_slack(std::span<const double> times) {
  return 1e-9 * std::max(1.0, std::abs(times.back()));
}

}  // namespace detail

/**
 * Lambda = (1/tau) ln[max E(0..2 tau) / max E(0..tau)] evaluated on ln E so
 * that growth beyond the double range stays representable.
 */
inline double amplification_factor_log(std::span<const double> log_energy, std::span<const double> times,
                                       double tau) {
  detail::check_series(log_energy.size(), times.size());
  if (!(tau > 0.0)) throw InvalidParameter("tau must be positive");
  const double slack = detail::window_slack(times);
  if (times.back() < 2.0 * tau - slack)
    throw InsufficientData("trajectory ends at t = " + format_double(times.back()) + ", need 2 tau = " +
                           format_double(2.0 * tau));
  constexpr double lowest = -std::numeric_limits<double>::infinity();
  double first = lowest, both = lowest;
  for (std::size_t k = 0; k < times.size() && times[k] <= 2.0 * tau + slack; ++k) {
    both = std::max(both, log_energy[k]);
    if (times[k] <= tau + slack) first = std::max(first, log_energy[k]);
  }
  if (first == lowest) return 0.0;  // identically zero energy
  return (both - first) / tau;
}

inline double amplification_factor(std::span<const double> energy, std::span<const double> times, double tau) {
  std::vector<double> log_e(energy.size());
  std::transform(energy.begin(), energy.end(), log_e.begin(), [](double e) { return std::log(e); });
  return amplification_factor_log(log_e, times, tau);
}

/// Running trapezoidal mean (1/t) int_0^t gamma dt'; the t = 0 entry is gamma(0).
inline std::vector<double> average_gamma(std::span<const double> gamma_inst, std::span<const double> times) {
  detail::check_series(gamma_inst.size(), times.size());
  std::vector<double> out(gamma_inst.size());
  out[0] = gamma_inst[0];
  double integral = 0.0;
  for (std::size_t k = 1; k < gamma_inst.size(); ++k) {
    integral += 0.5 * (times[k] - times[k - 1]) * (gamma_inst[k] + gamma_inst[k - 1]);
    const double span = times[k] - times[0];
    out[k] = span > 0.0 ? integral / span : gamma_inst[k];
  }
  return out;
}

/**
 * Labels a trajectory by thresholding Lambda. A run stopped at the divergence
 * cutoff before 2 tau is evaluated on the window it reached (tau_used =
 * t_last / 2).
 */
inline PhaseLabel classify_phase(const Trajectory& tr, double tau, double threshold = kDefaultPhaseThreshold) {
  if (tr.size() == 0) throw InsufficientData("empty trajectory");
  double tau_used = tau;
  if (tr.diverged && tr.times.back() < 2.0 * tau) tau_used = 0.5 * tr.times.back();
  PhaseLabel out;
  out.tau_used = tau_used;
  if (!(tau_used > 0.0)) throw InsufficientData("trajectory diverged before its first sample interval");
  out.lambda_amp = amplification_factor_log(tr.log_energy, tr.times, tau_used);
  out.label = out.lambda_amp > threshold ? PhaseKind::PTBroken : PhaseKind::PTSymmetric;
  return out;
}

// ---------------------------------------------------------------------------
// Floquet resonances

struct ResonanceEntry {
  int n = 0;
  double mu_n = 0.0;
};

struct ResonanceTable {
  std::vector<ResonanceEntry> entries;
};

/// Couplings where the drive frequency omega0 is the (2n+1)-th sub-harmonic
/// of the Hermitian gap sqrt(1 + 2 mu^2) - 1.
inline ResonanceTable floquet_resonant_couplings(int n_max) {
  if (n_max < 0) throw InvalidParameter("n_max must be non-negative");
  ResonanceTable t;
  for (int n = 0; n <= n_max; ++n) {
    const double a = 2.0 * n + 1.0;
    t.entries.push_back({n, std::sqrt(a * (a + 2.0) / 2.0)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Initial states

enum class InitialKind { Psi1, Psi2, Psi3, Psi4, Chi1, Custom };

/**
 * Reference states in phi-space. Psi1 puts `amplitude` (in v0) on the lossy
 * capacitor, Psi3 the same amount of current on the lossy inductor; Psi2 and
 * Psi4 are their parity images. Chi1 drives the coupling inductor with
 * `amplitude` i0.
 */
inline PhiState make_initial_state(InitialKind kind, double amplitude,
                                   const std::optional<PhiState>& custom = std::nullopt) {
  if (!std::isfinite(amplitude)) throw InvalidParameter("amplitude must be finite");
  switch (kind) {
    case InitialKind::Psi1: return {amplitude, 0.0, 0.0, 0.0, 0.0};
    case InitialKind::Psi2: return parity({amplitude, 0.0, 0.0, 0.0, 0.0});
    case InitialKind::Psi3: return {0.0, 0.0, amplitude, 0.0, 0.0};
    case InitialKind::Psi4: return parity({0.0, 0.0, amplitude, 0.0, 0.0});
    case InitialKind::Chi1: return {0.0, 0.0, 0.0, 0.0, amplitude};
    case InitialKind::Custom:
      if (!custom) throw InvalidParameter("custom initial state requires explicit components");
      return *custom;
  }
  throw InvalidParameter("unknown initial-state kind");
}

}  // namespace ptmem
