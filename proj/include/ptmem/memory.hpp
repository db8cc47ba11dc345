/**
 * Memristor and meminductor constitutive laws in working units.
 *
 * Time is measured in 1/omega0, memristor voltages in v0 and meminductor
 * currents in i0. The device constants (film thickness, dopant mobility)
 * enter only through these composite scales.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "ptmem/circuit.hpp"
#include "ptmem/errors.hpp"

namespace ptmem {

namespace detail {

inline void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
}

inline void check_polarity(int eta) {
  if (eta != 1 && eta != -1) throw InvalidParameter("polarity eta must be +1 or -1");
}

inline void check_window_exponent(int p) {
  if (p < 1) throw InvalidParameter("window exponent p must be a positive integer");
}

}  // namespace detail

/// Window F_p(x) = 1 - (2x - 1)^{2p}; zero at both fixed points x = 0, 1.
inline double window(double x, int p) {
  const double d = 2.0 * x - 1.0;
  const double d2 = d * d;
  double pw = d2;
  for (int k = 1; k < p; ++k) pw *= d2;
  return 1.0 - pw;
}

/// R(x) = x r_on + (1 - x) r_off.
inline double memristance(double x, double r_on, double r_off) {
  detail::check_unit_interval(x, "memristor state x");
  return x * r_on + (1.0 - x) * r_off;
}

/// L_c(y) = y L_> + (1 - y) L_<.
inline double meminductance(double y, double l_small, double l_large) {
  detail::check_unit_interval(y, "meminductor state y");
  return y * l_large + (1.0 - y) * l_small;
}

struct Memristor {
  double r_on = 1.0;
  double r_off = 100.0;
  int eta = 1;
  int p = 1;
  double v0 = 1.0;  // voltage unit; fixes the drift time scale to one LC period
  double q0 = 1.0;  // informational, eliminated by the choice of v0

  /// Chooses r_on, r_off so that gamma(x) spans [gamma_off, gamma_on].
  static Memristor from_gamma_bounds(double gamma_on, double gamma_off, double C, int eta = 1,
                                     int p = 1) {
    if (!(gamma_off > 0.0) || !(gamma_on > gamma_off))
      throw InvalidParameter("need 0 < gamma_off < gamma_on");
    if (!(C > 0.0)) throw InvalidParameter("capacitance must be positive");
    Memristor m;
    m.r_on = 1.0 / (gamma_on * C);
    m.r_off = 1.0 / (gamma_off * C);
    m.eta = eta;
    m.p = p;
    m.validate();
    return m;
  }

  void validate() const {
    if (!(r_on > 0.0) || !(r_on < r_off) || !std::isfinite(r_off))
      throw InvalidParameter("memristor requires 0 < r_on < r_off");
    if (!(v0 > 0.0)) throw InvalidParameter("memristor voltage scale v0 must be positive");
    detail::check_polarity(eta);
    detail::check_window_exponent(p);
  }

  double resistance(double x) const { return x * r_on + (1.0 - x) * r_off; }
};

struct Meminductor {
  double l_small = 0.5;  // L_<, strongest coupling
  double l_large = 1.0;  // L_>, weakest coupling
  int eta = 1;
  int p = 1;
  double i0 = 1.0;  // current unit omega0 * Q_c

  /// Builds from the coupling bounds mu_< > mu_> at inductance L.
  static Meminductor from_coupling_bounds(double mu_less, double mu_greater, double L,
                                          int eta = 1, int p = 1) {
    if (!(mu_greater > 0.0) || !(mu_less > mu_greater))
      throw InvalidParameter("need 0 < mu_greater < mu_less (L_< < L_>)");
    if (!(L > 0.0)) throw InvalidParameter("inductance must be positive");
    Meminductor md;
    md.l_small = L / (mu_less * mu_less);
    md.l_large = L / (mu_greater * mu_greater);
    md.eta = eta;
    md.p = p;
    md.validate();
    return md;
  }

  void validate() const {
    if (!(l_small > 0.0) || !(l_small < l_large) || !std::isfinite(l_large))
      throw InvalidParameter("meminductor requires 0 < l_small < l_large");
    if (!(i0 > 0.0)) throw InvalidParameter("meminductor current scale i0 must be positive");
    detail::check_polarity(eta);
    detail::check_window_exponent(p);
  }

  double delta_l() const { return l_large - l_small; }
  double inductance(double y) const { return y * l_large + (1.0 - y) * l_small; }
};

/**
 * dx/d(omega0 t) = eta F_p(x) (r_on / R(x)) (v1 / v0) / (2 pi).
 *
 * A drive of one v0 across a fully doped device sweeps the whole film in one
 * LC period T0 = 2 pi / omega0.
 */
inline double memristor_rate(double x, double v1, const Memristor& m) {
  return m.eta * window(x, m.p) * (m.r_on / m.resistance(x)) * (v1 / m.v0) / kTwoPi;
}

/// gamma(x) = 1 / (R(x) C), in units of omega0.
inline double gamma_of_x(double x, const Memristor& m, double C) { return 1.0 / (m.resistance(x) * C); }

/// dy/d(omega0 t) = eta F_p(y) ic / i0.
inline double meminductor_rate(double y, double ic, const Meminductor& md) {
  return md.eta * window(y, md.p) * (ic / md.i0);
}

/// Keeps a memory state strictly inside (0, 1).
inline double clamp_state(double x, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) throw InvalidParameter("clamp epsilon must lie in (0, 1e-3]");
  return std::min(std::max(x, epsilon), 1.0 - epsilon);
}

}  // namespace ptmem
