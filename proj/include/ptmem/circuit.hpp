/**
 * Memory-less PT-symmetric LC dimer: Kirchhoff matrix, energy-density
 * Hamiltonian, symmetry operators and the closed-form spectrum.
 *
 * State ordering everywhere is [V1, V2, I1, I2, Ic]. Circuit 1 carries the
 * loss, circuit 2 the gain. Equations of motion read i d/dt phi = M phi.
 */
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "ptmem/errors.hpp"

namespace ptmem {

using complex = std::complex<double>;
using Matrix5c = Eigen::Matrix<complex, 5, 5>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Vector5d = Eigen::Matrix<double, 5, 1>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Physical circuit state |phi> = [V1, V2, I1, I2, Ic].
struct PhiState {
  double v1 = 0.0;
  double v2 = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double ic = 0.0;

  static PhiState from_array(const std::array<double, 5>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }
  std::array<double, 5> to_array() const { return {v1, v2, i1, i2, ic}; }
  Vector5d to_vector() const { return Vector5d(v1, v2, i1, i2, ic); }

  bool finite() const {
    return std::isfinite(v1) && std::isfinite(v2) && std::isfinite(i1) &&
           std::isfinite(i2) && std::isfinite(ic);
  }

  friend bool operator==(const PhiState&, const PhiState&) = default;
};

inline PhiState operator*(double s, const PhiState& p) {
  return {s * p.v1, s * p.v2, s * p.i1, s * p.i2, s * p.ic};
}

/// Parity image: swaps the two LC circuits and reverses the coupling current.
inline PhiState parity(const PhiState& p) { return {p.v2, p.v1, p.i2, p.i1, -p.ic}; }

/**
 * Dimensionless dimer description. omega0 = 1/sqrt(L C), mu = sqrt(L/Lc),
 * Gamma = gamma/omega0 with gamma = 1/(R C).
 */
struct CircuitParams {
  double omega0 = 1.0;
  double mu = 1.0;
  double Gamma = 0.0;
  double C = 1.0;
  double L = 1.0;
  double Lc = 1.0;

  /// Builds element values from (omega0, mu, Gamma) at capacitance C.
  static CircuitParams make(double mu, double Gamma, double omega0 = 1.0, double C = 1.0) {
    if (!(omega0 > 0.0) || !(C > 0.0) || !std::isfinite(omega0) || !std::isfinite(C))
      throw InvalidParameter("omega0 and C must be positive and finite");
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw InvalidParameter("coupling mu must be positive (Lc = L/mu^2 must be finite)");
    if (!(Gamma >= 0.0) || !std::isfinite(Gamma))
      throw InvalidParameter("gain-loss strength Gamma must be non-negative");
    CircuitParams p;
    p.omega0 = omega0;
    p.mu = mu;
    p.Gamma = Gamma;
    p.C = C;
    p.L = 1.0 / (omega0 * omega0 * C);
    p.Lc = p.L / (mu * mu);
    return p;
  }

  /// Builds from raw element values; R <= 0 or infinite means no gain-loss.
  static CircuitParams from_elements(double C, double L, double Lc, double R) {
    if (!(C > 0.0) || !(L > 0.0) || !(Lc > 0.0))
      throw InvalidParameter("element values C, L, Lc must be strictly positive");
    CircuitParams p;
    p.C = C;
    p.L = L;
    p.Lc = Lc;
    p.omega0 = 1.0 / std::sqrt(L * C);
    p.mu = std::sqrt(L / Lc);
    p.Gamma = (R > 0.0 && std::isfinite(R)) ? 1.0 / (R * C * p.omega0) : 0.0;
    return p;
  }

  double gamma() const { return Gamma * omega0; }
  double period() const { return kTwoPi / omega0; }

  void validate() const {
    if (!(C > 0.0) || !(L > 0.0) || !(Lc > 0.0) || !(omega0 > 0.0))
      throw InvalidParameter("element values must be strictly positive");
    if (!(mu >= 0.0) || !(Gamma >= 0.0))
      throw InvalidParameter("mu and Gamma must be non-negative");
  }
};

/// Diagonal energy weights A = diag(C, C, L, L, Lc)/2.
struct EnergyForm {
  std::array<double, 5> diag{};

  static EnergyForm of(const CircuitParams& p) { return with_coupling(p, p.Lc); }

  /// Weights with a state-dependent coupling inductance.
  static EnergyForm with_coupling(const CircuitParams& p, double lc) {
    EnergyForm a{{p.C / 2, p.C / 2, p.L / 2, p.L / 2, lc / 2}};
    for (double w : a.diag)
      if (!(w > 0.0)) throw InvalidParameter("energy weights must be strictly positive");
    return a;
  }

  Vector5d sqrt_diag() const {
    return Vector5d(std::sqrt(diag[0]), std::sqrt(diag[1]), std::sqrt(diag[2]),
                    std::sqrt(diag[3]), std::sqrt(diag[4]));
  }
};

/// Circuit energy <phi|A|phi>.
inline double circuit_energy(const PhiState& phi, const EnergyForm& a) {
  const auto x = phi.to_array();
  double e = 0.0;
  for (std::size_t k = 0; k < 5; ++k) e += a.diag[k] * x[k] * x[k];
  return e;
}

/// Energy-density vector |psi> = A^{1/2} |phi>.
inline Vector5d to_psi(const PhiState& phi, const EnergyForm& a) {
  return a.sqrt_diag().cwiseProduct(phi.to_vector());
}

inline PhiState from_psi(const Vector5d& psi, const EnergyForm& a) {
  const Vector5d phi = psi.cwiseQuotient(a.sqrt_diag());
  return {phi[0], phi[1], phi[2], phi[3], phi[4]};
}

/**
 * Kirchhoff matrix M with i d/dt phi = M phi. The two gain-loss rates are
 * passed separately so the instantaneously balanced memristive case can reuse
 * it with gamma_loss == gamma_gain.
 */
inline Matrix5c build_kirchhoff_matrix(const CircuitParams& p, double gamma_loss, double gamma_gain) {
  p.validate();
  if (!(gamma_loss >= 0.0) || !(gamma_gain >= 0.0))
    throw InvalidParameter("gain and loss rates must be non-negative");
  const complex i{0.0, 1.0};
  Matrix5c m = Matrix5c::Zero();
  m(0, 0) = -gamma_loss;
  m(0, 2) = -1.0 / p.C;
  m(0, 4) = -1.0 / p.C;
  m(1, 1) = gamma_gain;
  m(1, 3) = -1.0 / p.C;
  m(1, 4) = 1.0 / p.C;
  m(2, 0) = 1.0 / p.L;
  m(3, 1) = 1.0 / p.L;
  m(4, 0) = 1.0 / p.Lc;
  m(4, 1) = -1.0 / p.Lc;
  return i * m;
}

/// H_eff = A^{1/2} M A^{-1/2} for explicit (omega0, mu, Gamma).
inline Matrix5c build_heff(double omega0, double mu, double Gamma) {
  const complex iw{0.0, omega0};
  Matrix5d k = Matrix5d::Zero();
  k(0, 0) = -Gamma;
  k(0, 2) = -1.0;
  k(0, 4) = -mu;
  k(1, 1) = Gamma;
  k(1, 3) = -1.0;
  k(1, 4) = mu;
  k(2, 0) = 1.0;
  k(3, 1) = 1.0;
  k(4, 0) = mu;
  k(4, 1) = -mu;
  return iw * k.cast<complex>();
}

inline Matrix5c build_heff(const CircuitParams& p, double Gamma) {
  p.validate();
  if (!(Gamma >= 0.0)) throw InvalidParameter("Gamma must be non-negative");
  return build_heff(p.omega0, p.mu, Gamma);
}

// ---------------------------------------------------------------------------
// Thresholds

inline double gamma_pt(double mu, double omega0 = 1.0) {
  if (!(mu >= 0.0)) throw InvalidParameter("mu must be non-negative");
  return omega0 * (std::sqrt(1.0 + 2.0 * mu * mu) - 1.0);
}

inline double gamma_c(double mu, double omega0 = 1.0) {
  if (!(mu >= 0.0)) throw InvalidParameter("mu must be non-negative");
  return omega0 * (std::sqrt(1.0 + 2.0 * mu * mu) + 1.0);
}

/// Coupling at which a dimer with fixed Gamma leaves the broken phase.
inline double mu_pt(double Gamma) {
  if (!(Gamma >= 0.0)) throw InvalidParameter("Gamma must be non-negative");
  return std::sqrt(Gamma * (Gamma + 2.0) / 2.0);
}

// ---------------------------------------------------------------------------
// Spectrum

enum class PtPhase { Symmetric, Broken, OverdampedBroken };

inline std::string to_string(PtPhase p) {
  switch (p) {
    case PtPhase::Symmetric: return "Symmetric";
    case PtPhase::Broken: return "Broken";
    case PtPhase::OverdampedBroken: return "OverdampedBroken";
  }
  return "?";
}

/**
 * eigenvalues[0..3] are the branches (+s_plus, +s_minus, -s_plus, -s_minus);
 * eigenvalues[4] is the exact zero mode of the rank-4 matrix.
 */
struct SpectrumResult {
  std::array<complex, 5> eigenvalues{};
  PtPhase pt_phase = PtPhase::Symmetric;

  double max_imag() const {
    double m = 0.0;
    for (const auto& e : eigenvalues) m = std::max(m, e.imag());
    return m;
  }
};

inline constexpr double kThresholdGuard = 1e-12;

inline SpectrumResult eigenvalues_closed_form(double mu, double Gamma, double omega0 = 1.0) {
  if (!(mu >= 0.0) || !(Gamma >= 0.0)) throw InvalidParameter("mu and Gamma must be non-negative");
  if (!(omega0 > 0.0)) throw InvalidParameter("omega0 must be positive");
  const double m2 = 2.0 * mu * mu;
  const double g2 = Gamma * Gamma;
  const double disc = (m2 - g2) * (m2 - g2) - 4.0 * g2;
  const complex root = std::sqrt(complex(disc, 0.0));
  const complex base(2.0 + m2 - g2, 0.0);
  const double scale = omega0 / std::sqrt(2.0);
  const complex s_plus = scale * std::sqrt(base + root);
  const complex s_minus = scale * std::sqrt(base - root);

  SpectrumResult r;
  r.eigenvalues = {s_plus, s_minus, -s_plus, -s_minus, complex(0.0, 0.0)};

  const double g_pt = std::sqrt(1.0 + m2) - 1.0;
  const double g_c = std::sqrt(1.0 + m2) + 1.0;
  if (Gamma <= g_pt * (1.0 + kThresholdGuard))
    r.pt_phase = PtPhase::Symmetric;
  else if (Gamma <= g_c * (1.0 + kThresholdGuard))
    r.pt_phase = PtPhase::Broken;
  else
    r.pt_phase = PtPhase::OverdampedBroken;
  return r;
}

// ---------------------------------------------------------------------------
// Symmetry operators

struct SymmetryOps {
  Matrix5d parity;
  Matrix5d time_unitary;
  Matrix5d chiral;

  static SymmetryOps make() {
    SymmetryOps s;
    s.parity = Matrix5d::Zero();
    s.parity(0, 1) = s.parity(1, 0) = 1.0;
    s.parity(2, 3) = s.parity(3, 2) = 1.0;
    s.parity(4, 4) = -1.0;
    s.time_unitary = Vector5d(1.0, 1.0, -1.0, -1.0, -1.0).asDiagonal();
    s.chiral = s.parity * s.time_unitary;
    return s;
  }
};

/// PT check: (P U) conj(H) (P U)^{-1} == H within a relative tolerance.
inline bool check_pt_symmetry(const Matrix5c& h, double tol = 1e-12) {
  const auto ops = SymmetryOps::make();
  const Matrix5c pi = ops.chiral.cast<complex>();
  const Matrix5c pi_inv = (ops.time_unitary * ops.parity).cast<complex>();
  const Matrix5c image = pi * h.conjugate() * pi_inv;
  return (image - h).norm() <= tol * std::max(1.0, h.norm());
}

/// Chiral check: Pi H == -H Pi.
inline bool check_chiral(const Matrix5c& h, double tol = 1e-12) {
  const Matrix5c pi = SymmetryOps::make().chiral.cast<complex>();
  return (pi * h + h * pi).norm() <= tol * std::max(1.0, h.norm());
}

}  // namespace ptmem
