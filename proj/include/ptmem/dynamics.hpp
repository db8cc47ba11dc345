/**
 * Time integration of the static, memristive and meminductive dimers.
 *
 * The primary path integrates the physical Kirchhoff variables phi; the
 * energy-density path (psi = A^{1/2} phi driven by H_eff or the gauge-corrected
 * Hbar_eff) exists to cross-check it. Both use fixed-step classical RK4.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ptmem/circuit.hpp"
#include "ptmem/errors.hpp"
#include "ptmem/format.hpp"
#include "ptmem/memory.hpp"

namespace ptmem {

// ---------------------------------------------------------------------------
// System variants

struct StaticSystem {
  CircuitParams circuit;  // gain-loss strength is circuit.Gamma
};

struct MemristiveSystem {
  CircuitParams circuit;  // circuit.Gamma unused; gamma follows the memristor
  Memristor memristor;
};

struct MeminductiveSystem {
  CircuitParams circuit;  // circuit.Gamma fixed; circuit.Lc replaced by L_c(y)
  Meminductor meminductor;
};

using SystemVariant = std::variant<StaticSystem, MemristiveSystem, MeminductiveSystem>;

inline bool has_memory(const SystemVariant& v) { return !std::holds_alternative<StaticSystem>(v); }

// ---------------------------------------------------------------------------
// Right-hand sides

namespace detail {

inline PhiState kirchhoff_rate(const PhiState& s, double gamma, double C, double L, double Lc) {
  return {-gamma * s.v1 - s.i1 / C - s.ic / C,
          gamma * s.v2 - s.i2 / C + s.ic / C,
          s.v1 / L,
          s.v2 / L,
          (s.v1 - s.v2) / Lc};
}

inline double unit_clamp(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace detail

/// Kirchhoff rate of the memory-less dimer. Negative Gamma moves the loss to circuit 2.
inline PhiState derivative_static(const PhiState& phi, const CircuitParams& p, double Gamma) {
  return detail::kirchhoff_rate(phi, Gamma * p.omega0, p.C, p.L, p.Lc);
}

/// Memristive dimer with a gain resistor matched to the instantaneous R(x).
inline std::pair<PhiState, double> derivative_memristive(const PhiState& phi, double x,
                                                         const Memristor& m, const CircuitParams& p) {
  const double gamma = gamma_of_x(x, m, p.C);
  return {detail::kirchhoff_rate(phi, gamma, p.C, p.L, p.Lc),
          p.omega0 * memristor_rate(x, phi.v1, m)};
}

/**
 * Meminductive coupling: flux L_c(y) Ic obeys d(flux)/dt = V1 - V2, so the
 * coupling current picks up the back-action term -(dL/L_c) (dy/dt) Ic.
 */
inline std::pair<PhiState, double> derivative_meminductive(const PhiState& phi, double y,
                                                           const Meminductor& md,
                                                           const CircuitParams& p, double Gamma) {
  const double lc = md.inductance(y);
  const double dydt = p.omega0 * meminductor_rate(y, phi.ic, md);
  PhiState r = detail::kirchhoff_rate(phi, Gamma * p.omega0, p.C, p.L, lc);
  r.ic -= (md.delta_l() / lc) * dydt * phi.ic;
  return {r, dydt};
}

/// Hbar_eff = H_eff(mu(y)) - (i/2) d/dt ln A(y); only the coupling slot varies with time.
inline Matrix5c build_hbar_eff(const CircuitParams& p, const Meminductor& md, double y, double dydt) {
  detail::check_unit_interval(y, "meminductor state y");
  const double lc = md.inductance(y);
  Matrix5c h = build_heff(p.omega0, std::sqrt(p.L / lc), p.Gamma);
  h(4, 4) += complex(0.0, -0.5 * md.delta_l() * dydt / lc);
  return h;
}

// ---------------------------------------------------------------------------
// Integrator

using State6 = std::array<double, 6>;  // phi components then the memory variable

template <class Rhs>
State6 rk4_step(Rhs&& rhs, const State6& s, double h) {
  const State6 k1 = rhs(s);
  State6 tmp;
  for (std::size_t i = 0; i < 6; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
  const State6 k2 = rhs(tmp);
  for (std::size_t i = 0; i < 6; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
  const State6 k3 = rhs(tmp);
  for (std::size_t i = 0; i < 6; ++i) tmp[i] = s[i] + h * k3[i];
  const State6 k4 = rhs(tmp);
  State6 out;
  for (std::size_t i = 0; i < 6; ++i) out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

struct IntegrationOptions {
  double dt = kTwoPi / 500.0;
  double t_end = 100.0 * kTwoPi;
  std::size_t decimation = 10;
  double clamp_epsilon = 1e-6;
  double divergence_cutoff = 1e12;  // on E(t)/E(0); memory variants only
  int max_halvings = 4;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be positive");
    if (!(t_end >= dt)) throw InvalidParameter("t_end must be at least dt");
    if (decimation < 1) throw InvalidParameter("decimation must be >= 1");
    if (!(clamp_epsilon > 0.0 && clamp_epsilon <= 1e-3))
      throw InvalidParameter("clamp epsilon must lie in (0, 1e-3]");
    if (!(divergence_cutoff > 1.0)) throw InvalidParameter("divergence cutoff must exceed 1");
    if (max_halvings < 0) throw InvalidParameter("max_halvings must be non-negative");
  }

  /// Number of steps, rounded up so the last step lands on a recorded sample.
  std::size_t step_count() const {
    auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    if (n % decimation != 0) n += decimation - n % decimation;
    return n;
  }
};

/**
 * Recorded samples of one run. The physical state at sample k is
 * exp(log_scale[k]) * states[k]; log_scale is nonzero only for the static
 * variant, whose linear dynamics are renormalized before they overflow.
 * memory and gamma_* are empty for the static variant.
 */
struct Trajectory {
  std::vector<double> times;
  std::vector<PhiState> states;
  std::vector<double> log_scale;
  std::vector<double> memory;
  std::vector<double> energy;
  std::vector<double> log_energy;
  std::vector<double> gamma_inst;
  std::vector<double> gamma_avg;

  double dt = 0.0;
  std::size_t decimation = 1;
  std::size_t steps = 0;
  bool diverged = false;  // stopped at the divergence cutoff

  std::size_t size() const { return times.size(); }
  bool has_memory() const { return !memory.empty(); }

  PhiState physical_state(std::size_t k) const { return std::exp(log_scale[k]) * states[k]; }
};

/// Non-finite state encountered; carries everything recorded up to that point.
class IntegrationDiverged : public std::runtime_error {
 public:
  IntegrationDiverged(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

namespace detail {

inline State6 pack(const PhiState& p, double m) { return {p.v1, p.v2, p.i1, p.i2, p.ic, m}; }
inline PhiState unpack(const State6& s) { return {s[0], s[1], s[2], s[3], s[4]}; }

struct NoProjection {
  void operator()(State6&, double) const {}
};

/// RK4 step with boundary handling for the memory variable: overshooting
/// the closed interval by more than 10 eps retries the step as two halves.
/// `project(state, unclamped)` runs after the clamp so coordinates that
/// depend on the memory state can follow it.
template <class Rhs, class Project = NoProjection>
State6 advance(Rhs& rhs, const State6& s, double h, bool memory, double eps, int halvings_left,
               const Project& project = {}) {
  State6 c = rk4_step(rhs, s, h);
  if (!memory) return c;
  const bool overshoot = c[5] < -10.0 * eps || c[5] > 1.0 + 10.0 * eps;
  if (overshoot && halvings_left > 0) {
    const State6 mid = advance(rhs, s, 0.5 * h, memory, eps, halvings_left - 1, project);
    return advance(rhs, mid, 0.5 * h, memory, eps, halvings_left - 1, project);
  }
  const double raw = c[5];
  c[5] = clamp_state(c[5], eps);
  if (c[5] != raw) project(c, raw);
  return c;
}

struct StaticModel {
  CircuitParams p;
  EnergyForm a;
  State6 operator()(const State6& s) const {
    const PhiState r = derivative_static(unpack(s), p, p.Gamma);
    return pack(r, 0.0);
  }
  double energy(const State6& s) const { return circuit_energy(unpack(s), a); }
  double gamma(const State6&) const { return p.gamma(); }
};

struct MemristiveModel {
  CircuitParams p;
  Memristor m;
  EnergyForm a;
  State6 operator()(const State6& s) const {
    const auto [r, dx] = derivative_memristive(unpack(s), unit_clamp(s[5]), m, p);
    return pack(r, dx);
  }
  double energy(const State6& s) const { return circuit_energy(unpack(s), a); }
  double gamma(const State6& s) const { return gamma_of_x(s[5], m, p.C); }
};

struct MeminductiveModel {
  CircuitParams p;
  Meminductor md;
  State6 operator()(const State6& s) const {
    const auto [r, dy] = derivative_meminductive(unpack(s), unit_clamp(s[5]), md, p, p.Gamma);
    return pack(r, dy);
  }
  double energy(const State6& s) const {
    const PhiState phi = unpack(s);
    return 0.5 * (p.C * (phi.v1 * phi.v1 + phi.v2 * phi.v2) + p.L * (phi.i1 * phi.i1 + phi.i2 * phi.i2) +
                  md.inductance(s[5]) * phi.ic * phi.ic);
  }
  double gamma(const State6&) const { return p.gamma(); }
};

template <class Model>
Trajectory run(const Model& model, const PhiState& phi0, double mem0, bool memory, bool linear,
               const IntegrationOptions& opt) {
  const std::size_t n_steps = opt.step_count();
  const std::size_t n_samples = n_steps / opt.decimation + 1;

  Trajectory tr;
  tr.dt = opt.dt;
  tr.decimation = opt.decimation;
  tr.times.reserve(n_samples);
  tr.states.reserve(n_samples);
  tr.log_scale.reserve(n_samples);
  tr.energy.reserve(n_samples);
  tr.log_energy.reserve(n_samples);
  if (memory) {
    tr.memory.reserve(n_samples);
    tr.gamma_inst.reserve(n_samples);
    tr.gamma_avg.reserve(n_samples);
  }

  State6 s = pack(phi0, mem0);
  double log_scale = 0.0;
  const double e0 = model.energy(s);
  double g_prev = model.gamma(s);
  double g_integral = 0.0;

  auto record = [&](std::size_t step, double e, double g) {
    const double t = static_cast<double>(step) * opt.dt;
    tr.times.push_back(t);
    tr.states.push_back(unpack(s));
    tr.log_scale.push_back(log_scale);
    const double le = std::log(e) + 2.0 * log_scale;
    tr.log_energy.push_back(le);
    tr.energy.push_back(std::exp(le));
    if (memory) {
      tr.memory.push_back(s[5]);
      tr.gamma_inst.push_back(g);
      tr.gamma_avg.push_back(step == 0 ? g : g_integral / t);
    }
  };
  record(0, e0, g_prev);

  Model rhs = model;
  for (std::size_t step = 1; step <= n_steps; ++step) {
    s = advance(rhs, s, opt.dt, memory, opt.clamp_epsilon, opt.max_halvings);
    tr.steps = step;
    double e = model.energy(s);
    bool finite = std::isfinite(e);
    for (double c : s) finite = finite && std::isfinite(c);
    if (!finite)
      throw IntegrationDiverged("non-finite state at t = " + format_double(step * opt.dt), std::move(tr));

    if (linear && e > 1e150) {
      // Exact power-of-two renormalization; the dynamics are homogeneous.
      const int k = static_cast<int>(std::floor(0.5 * std::log2(e)));
      for (std::size_t i = 0; i < 5; ++i) s[i] = std::ldexp(s[i], -k);
      log_scale += k * std::log(2.0);
      e = model.energy(s);
    }

    const double g = model.gamma(s);
    g_integral += 0.5 * opt.dt * (g_prev + g);
    g_prev = g;

    const bool cutoff = !linear && e0 > 0.0 && e / e0 > opt.divergence_cutoff;
    if (step % opt.decimation == 0 || cutoff) record(step, e, g);
    if (cutoff) {
      tr.diverged = true;
      break;
    }
  }
  return tr;
}

}  // namespace detail

/**
 * Integrates a dimer from phi0 (and memory state mem0 for memory variants)
 * with fixed-step RK4. Samples every `decimation` steps; the step count is
 * rounded up to a whole number of samples.
 */
inline Trajectory integrate(const SystemVariant& variant, const PhiState& phi0,
                            std::optional<double> mem0, const IntegrationOptions& opt) {
  opt.validate();
  if (!phi0.finite()) throw InvalidParameter("initial state must be finite");
  if (has_memory(variant)) {
    if (!mem0) throw InvalidParameter("memory variant requires an initial memory state");
    if (!(*mem0 > 0.0 && *mem0 < 1.0)) throw InvalidParameter("initial memory state must lie in (0, 1)");
  }
  return std::visit(
      [&](const auto& sys) -> Trajectory {
        using T = std::decay_t<decltype(sys)>;
        sys.circuit.validate();
        if constexpr (std::is_same_v<T, StaticSystem>) {
          return detail::run(detail::StaticModel{sys.circuit, EnergyForm::of(sys.circuit)}, phi0, 0.0,
                             false, true, opt);
        } else if constexpr (std::is_same_v<T, MemristiveSystem>) {
          sys.memristor.validate();
          return detail::run(
              detail::MemristiveModel{sys.circuit, sys.memristor, EnergyForm::of(sys.circuit)}, phi0,
              *mem0, true, false, opt);
        } else {
          sys.meminductor.validate();
          return detail::run(detail::MeminductiveModel{sys.circuit, sys.meminductor}, phi0, *mem0, true,
                             false, opt);
        }
      },
      variant);
}

// ---------------------------------------------------------------------------
// Energy-density (psi) path

struct PsiTrajectory {
  std::vector<double> times;
  std::vector<double> energy;  // <psi|psi>
  std::vector<double> memory;
};

namespace detail {

inline State6 apply_generator(const Matrix5c& h, const State6& s) {
  // d/dt psi = -i H psi; H is purely imaginary so the generator is real.
  const Matrix5c g = complex(0.0, -1.0) * h;
  State6 out{};
  for (int r = 0; r < 5; ++r) {
    double acc = 0.0;
    for (int c = 0; c < 5; ++c) acc += g(r, c).real() * s[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

}  // namespace detail

/// Integrates i d/dt psi = H psi with the state-dependent H_eff / Hbar_eff.
inline PsiTrajectory integrate_psi(const SystemVariant& variant, const PhiState& phi0,
                                   std::optional<double> mem0, const IntegrationOptions& opt) {
  opt.validate();
  const bool memory = has_memory(variant);
  if (memory && !(mem0 && *mem0 > 0.0 && *mem0 < 1.0))
    throw InvalidParameter("initial memory state must lie in (0, 1)");
  const double m0 = memory ? *mem0 : 0.0;

  auto rhs = [&](const State6& s) -> State6 {
    return std::visit(
        [&](const auto& sys) -> State6 {
          using T = std::decay_t<decltype(sys)>;
          const auto& p = sys.circuit;
          if constexpr (std::is_same_v<T, StaticSystem>) {
            return detail::apply_generator(build_heff(p.omega0, p.mu, p.Gamma), s);
          } else if constexpr (std::is_same_v<T, MemristiveSystem>) {
            const double x = detail::unit_clamp(s[5]);
            const double Gamma = gamma_of_x(x, sys.memristor, p.C) / p.omega0;
            State6 d = detail::apply_generator(build_heff(p.omega0, p.mu, Gamma), s);
            const double v1 = s[0] * std::sqrt(2.0 / p.C);
            d[5] = p.omega0 * memristor_rate(x, v1, sys.memristor);
            return d;
          } else {
            const double y = detail::unit_clamp(s[5]);
            const double lc = sys.meminductor.inductance(y);
            const double ic = s[4] * std::sqrt(2.0 / lc);
            const double dydt = p.omega0 * meminductor_rate(y, ic, sys.meminductor);
            State6 d = detail::apply_generator(build_hbar_eff(p, sys.meminductor, y, dydt), s);
            d[5] = dydt;
            return d;
          }
        },
        variant);
  };

  const EnergyForm a0 = std::visit(
      [&](const auto& sys) {
        using T = std::decay_t<decltype(sys)>;
        if constexpr (std::is_same_v<T, MeminductiveSystem>)
          return EnergyForm::with_coupling(sys.circuit, sys.meminductor.inductance(m0));
        else
          return EnergyForm::of(sys.circuit);
      },
      variant);
  const Vector5d psi0 = to_psi(phi0, a0);
  State6 s{psi0[0], psi0[1], psi0[2], psi0[3], psi0[4], m0};

  PsiTrajectory out;
  auto record = [&](std::size_t step) {
    double e = 0.0;
    for (std::size_t i = 0; i < 5; ++i) e += s[i] * s[i];
    out.times.push_back(static_cast<double>(step) * opt.dt);
    out.energy.push_back(e);
    if (memory) out.memory.push_back(s[5]);
  };
  // Clamping y leaves the physical current untouched, so psi_c = sqrt(Lc / 2) Ic
  // is rescaled to the clamped inductance (Lc is affine in y, extended past [0, 1]).
  const Meminductor* md = nullptr;
  if (const auto* sys = std::get_if<MeminductiveSystem>(&variant)) md = &sys->meminductor;
  auto project = [md](State6& c, double raw) {
    if (!md) return;
    const double before = md->l_large * raw + md->l_small * (1.0 - raw);
    if (before > 0.0) c[4] *= std::sqrt(md->inductance(c[5]) / before);
  };

  record(0);
  const std::size_t n = opt.step_count();
  for (std::size_t step = 1; step <= n; ++step) {
    s = detail::advance(rhs, s, opt.dt, memory, opt.clamp_epsilon, opt.max_halvings, project);
    if (step % opt.decimation == 0) record(step);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

/// CSV: t, V1, V2, I1, I2, Ic, mem, E, gamma_inst, gamma_avg. Lines in
/// `preamble` are emitted first, each prefixed with "# ".
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr,
                                 const std::vector<std::string>& preamble = {}) {
  for (const auto& line : preamble) os << "# " << line << '\n';
  os << "t,V1,V2,I1,I2,Ic,mem,E,gamma_inst,gamma_avg\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const PhiState phi = tr.physical_state(k);
    os << format_double(tr.times[k]) << ',' << format_double(phi.v1) << ',' << format_double(phi.v2) << ','
       << format_double(phi.i1) << ',' << format_double(phi.i2) << ',' << format_double(phi.ic) << ',';
    if (tr.has_memory()) os << format_double(tr.memory[k]);
    os << ',' << format_double(tr.energy[k]) << ',';
    if (tr.has_memory()) os << format_double(tr.gamma_inst[k]) << ',' << format_double(tr.gamma_avg[k]);
    else os << ',';
    os << '\n';
  }
}

}  // namespace ptmem
