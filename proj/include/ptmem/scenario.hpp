/**
 * Turns a ScenarioConfig into a runnable system and runs it to a phase label.
 */
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ptmem/circuit.hpp"
#include "ptmem/config.hpp"
#include "ptmem/diagnostics.hpp"
#include "ptmem/dynamics.hpp"
#include "ptmem/memory.hpp"

namespace ptmem {

struct Scenario {
  SystemVariant system;
  PhiState phi0;
  std::optional<double> mem0;
  IntegrationOptions options;
  double tau = 100.0 * kTwoPi;  // absolute time
  double threshold = kDefaultPhaseThreshold;
};

inline SystemVariant build_system(const ScenarioConfig& cfg) {
  switch (cfg.variant) {
    case VariantKind::Static:
      return StaticSystem{CircuitParams::make(cfg.mu, cfg.resolved_gamma())};
    case VariantKind::Memristive: {
      const CircuitParams c = CircuitParams::make(cfg.mu, 0.0);
      const double g = gamma_pt(cfg.mu, c.omega0);
      return MemristiveSystem{
          c, Memristor::from_gamma_bounds(cfg.gamma_on_rel * g, cfg.gamma_off_rel * g, c.C, cfg.eta, cfg.p)};
    }
    case VariantKind::Meminductive: {
      const double Gamma = cfg.resolved_gamma();
      const double m_pt = mu_pt(Gamma);
      const CircuitParams base = CircuitParams::make(1.0, Gamma);
      const Meminductor md = Meminductor::from_coupling_bounds(
          cfg.mu_less_rel * m_pt, cfg.resolved_mu_greater_rel() * m_pt, base.L, cfg.eta, cfg.p);
      // Circuit carries the coupling at y0; the integrator replaces Lc by Lc(y).
      const CircuitParams c = CircuitParams::make(std::sqrt(base.L / md.inductance(cfg.y0)), Gamma);
      return MeminductiveSystem{c, md};
    }
  }
  throw ConfigError("unknown variant");
}

inline IntegrationOptions build_options(const ScenarioConfig& cfg) {
  IntegrationOptions o;
  o.dt = cfg.dt * kTwoPi;
  o.t_end = cfg.resolved_t_end() * kTwoPi;
  o.decimation = cfg.decimation;
  o.clamp_epsilon = cfg.clamp_epsilon;
  o.divergence_cutoff = cfg.divergence_cutoff;
  return o;
}

inline Scenario build_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Scenario s;
  try {
    s.system = build_system(cfg);
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  s.phi0 = make_initial_state(cfg.initial_kind(), cfg.initial_amplitude(), cfg.custom);
  if (cfg.variant == VariantKind::Memristive) s.mem0 = cfg.x0;
  if (cfg.variant == VariantKind::Meminductive) s.mem0 = cfg.y0;
  s.options = build_options(cfg);
  s.tau = cfg.tau * kTwoPi;
  s.threshold = cfg.threshold;
  return s;
}

struct ScenarioOutcome {
  Trajectory trajectory;
  PhaseLabel phase;
  bool overflow = false;  // integration hit a non-finite state
};

/**
 * Integrates and classifies. A non-finite state is treated as a broken run:
 * the partial trajectory is classified on the window it reached.
 */
inline ScenarioOutcome run_scenario(const Scenario& s) {
  ScenarioOutcome out;
  try {
    out.trajectory = integrate(s.system, s.phi0, s.mem0, s.options);
  } catch (const IntegrationDiverged& e) {
    out.trajectory = e.partial();
    out.trajectory.diverged = true;
    out.overflow = true;
  }
  try {
    out.phase = classify_phase(out.trajectory, s.tau, s.threshold);
  } catch (const InsufficientData&) {
    if (!out.trajectory.diverged) throw;
    out.phase = {PhaseKind::PTBroken, std::numeric_limits<double>::infinity(), 0.0};
  }
  return out;
}

inline ScenarioOutcome run_scenario(const ScenarioConfig& cfg) { return run_scenario(build_scenario(cfg)); }

}  // namespace ptmem
