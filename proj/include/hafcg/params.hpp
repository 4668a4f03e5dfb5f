#pragma once

// Material, fatigue and hydrogen parameter records plus the pointwise
// constitutive laws shared by every solver.
//
// Unit convention used throughout: length mm, force N, stress MPa, time s,
// concentration wppm, toughness N/mm (1 kJ/m^2 = 1 N/mm). Under this system
// the drift group V_H*sigma_h/(Rg*T) is dimensionless and the concentration
// unit cancels out of the transport equation, so no conversion factors
// appear anywhere in the assembly code.

#include <cmath>
#include <optional>
#include <stdexcept>

namespace hafcg {

namespace units {
// 1 MPa*sqrt(m) expressed in MPa*sqrt(mm).
inline constexpr double mpa_sqrt_m = 31.6227766016837933; // sqrt(1000)
// Gas constant in N*mm/(mol*K).
inline constexpr double gas_constant = 8314.0;
} // namespace units

/// Quadratic stiffness degradation g(phi) = (1-phi)^2.
inline double degradation_g(double phi) {
  if (phi < -1e-12 || phi > 1.0 + 1e-12)
    throw std::domain_error("degradation_g: phi outside [0,1]");
  const double o = 1.0 - phi;
  return o * o;
}

/// dg/dphi = -2(1-phi).
inline double degradation_g_prime(double phi) {
  if (phi < -1e-12 || phi > 1.0 + 1e-12)
    throw std::domain_error("degradation_g_prime: phi outside [0,1]");
  return -2.0 * (1.0 - phi);
}

/// Strength implied by (E, Gc, ell): sigma_c = (9/16) sqrt(E*Gc/(3*ell)).
inline double critical_strength(double E, double Gc, double ell) {
  if (E <= 0 || Gc <= 0 || ell <= 0)
    throw std::domain_error("critical_strength: inputs must be positive");
  return (9.0 / 16.0) * std::sqrt(E * Gc / (3.0 * ell));
}

/// Length scale implied by (E, Gc, sigma_c); inverse of critical_strength.
inline double derive_length_scale(double E, double Gc, double sigma_c) {
  if (E <= 0 || Gc <= 0 || sigma_c <= 0)
    throw std::domain_error("derive_length_scale: inputs must be positive");
  return (81.0 / 256.0) * E * Gc / (3.0 * sigma_c * sigma_c);
}

/// Strain at the homogeneous stress peak: eps_c = sqrt(Gc/(3*ell*E)).
inline double critical_strain(double E, double Gc, double ell) {
  if (E <= 0 || Gc <= 0 || ell <= 0)
    throw std::domain_error("critical_strain: inputs must be positive");
  return std::sqrt(Gc / (3.0 * ell * E));
}

/// Toughness [N/mm] from fracture toughness K_Ic [MPa*sqrt(m)], plane strain.
inline double toughness_from_KIc(double K_Ic, double E, double nu) {
  if (K_Ic < 0 || E <= 0 || nu <= -1.0 || nu >= 0.5)
    throw std::domain_error("toughness_from_KIc: invalid inputs");
  const double K_mm = K_Ic * units::mpa_sqrt_m; // MPa*sqrt(mm)
  return (1.0 - nu * nu) * K_mm * K_mm / E;
}

/// Inverse of toughness_from_KIc; returns K_Ic in MPa*sqrt(m).
inline double KIc_from_toughness(double Gc, double E, double nu) {
  if (Gc < 0 || E <= 0 || nu <= -1.0 || nu >= 0.5)
    throw std::domain_error("KIc_from_toughness: invalid inputs");
  return std::sqrt(Gc * E / (1.0 - nu * nu)) / units::mpa_sqrt_m;
}

/// Fatigue exponent from a Paris-law slope, n = 0.49 m - 0.61.
inline double fatigue_exponent_from_paris(double m) {
  const double n = 0.49 * m - 0.61;
  if (n <= 0)
    throw std::domain_error("fatigue_exponent_from_paris: resulting n <= 0");
  return n;
}

/// Paris-law slope from the fatigue exponent, m = (n + 0.61)/0.49.
inline double paris_slope_from_exponent(double n) {
  if (n <= 0)
    throw std::domain_error("paris_slope_from_exponent: n must be positive");
  return (n + 0.61) / 0.49;
}

/// Elastic + fracture constants. The (ell, sigma_c, eps_c) triple is always
/// kept consistent with the homogeneous strength relation, so construct via
/// from_strength() or from_length_scale() rather than filling fields by hand.
struct MaterialParams {
  double E = 210000.0;  // Young's modulus [MPa]
  double nu = 0.3;      // Poisson ratio [-]
  double Gc0 = 100.0;   // toughness in inert environment [N/mm]
  double ell = 0.0;     // phase field length scale [mm]
  double sigma_c = 0.0; // critical strength [MPa]
  double eps_c = 0.0;   // critical strain [-]

  static MaterialParams from_strength(double E, double nu, double Gc0,
                                      double sigma_c) {
    MaterialParams p;
    p.E = E;
    p.nu = nu;
    p.Gc0 = Gc0;
    p.sigma_c = sigma_c;
    p.ell = derive_length_scale(E, Gc0, sigma_c);
    p.eps_c = critical_strain(E, Gc0, p.ell);
    p.validate();
    return p;
  }

  static MaterialParams from_length_scale(double E, double nu, double Gc0,
                                          double ell) {
    MaterialParams p;
    p.E = E;
    p.nu = nu;
    p.Gc0 = Gc0;
    p.ell = ell;
    p.sigma_c = critical_strength(E, Gc0, ell);
    p.eps_c = critical_strain(E, Gc0, ell);
    p.validate();
    return p;
  }

  /// Normalisation energy density sigma_c*eps_c/2 [N/mm^2].
  double alpha_n() const { return 0.5 * sigma_c * eps_c; }

  void validate() const {
    if (E <= 0) throw std::invalid_argument("MaterialParams: E must be > 0");
    if (nu <= 0 || nu >= 0.5)
      throw std::invalid_argument("MaterialParams: nu must be in (0, 0.5)");
    if (Gc0 <= 0) throw std::invalid_argument("MaterialParams: Gc0 must be > 0");
    if (ell <= 0) throw std::invalid_argument("MaterialParams: ell must be > 0");
    const double sc = critical_strength(E, Gc0, ell);
    const double ec = critical_strain(E, Gc0, ell);
    if (std::abs(sigma_c - sc) > 1e-10 * sc ||
        std::abs(eps_c - ec) > 1e-10 * ec)
      throw std::invalid_argument(
          "MaterialParams: (ell, sigma_c, eps_c) inconsistent with (E, Gc0)");
  }
};

/// Cyclic damage law constants.
struct FatigueParams {
  double n = 1.25;          // fatigue exponent [-]
  double kappa = 0.78;      // mean-stress sensitivity [-]
  double alpha_bar_0 = 8.0; // toughness degradation rate parameter [N/mm^2]
  double alpha_e = 0.05;    // fatigue threshold [N/mm^2]
  double alpha_n = 0.0;     // normalisation parameter sigma_c*eps_c/2 [N/mm^2]
  std::optional<double> n_hydrogen_override; // exponent when p_H2 > 0

  /// Exponent in effect for the given environment.
  double effective_n(bool hydrogen_env) const {
    return (hydrogen_env && n_hydrogen_override) ? *n_hydrogen_override : n;
  }

  void validate() const {
    if (n <= 0) throw std::invalid_argument("FatigueParams: n must be > 0");
    if (kappa < 0) throw std::invalid_argument("FatigueParams: kappa must be >= 0");
    if (alpha_bar_0 <= 0)
      throw std::invalid_argument("FatigueParams: alpha_bar_0 must be > 0");
    if (alpha_e < 0)
      throw std::invalid_argument("FatigueParams: alpha_e must be >= 0");
    if (alpha_n <= 0)
      throw std::invalid_argument("FatigueParams: alpha_n must be > 0");
    if (n_hydrogen_override && *n_hydrogen_override <= 0)
      throw std::invalid_argument("FatigueParams: n_hydrogen_override must be > 0");
  }
};

/// Transport and toughness degradation constants.
struct HydrogenParams {
  double D = 2e-4;    // apparent diffusivity [mm^2/s]
  double V_H = 2000.0; // partial molar volume [mm^3/mol]
  double T = 300.0;   // absolute temperature [K]
  double Rg = units::gas_constant; // [N*mm/(mol*K)], fixed
  double S = 0.077;   // solubility [wppm/sqrt(MPa)]
  double xi = 0.12;   // residual toughness fraction [-]
  double eta = 7.0;   // degradation rate [wppm^-b]
  double b = 2.0;     // degradation exponent [-]

  void validate() const {
    if (D <= 0) throw std::invalid_argument("HydrogenParams: D must be > 0");
    if (V_H <= 0) throw std::invalid_argument("HydrogenParams: V_H must be > 0");
    if (T <= 0) throw std::invalid_argument("HydrogenParams: T must be > 0");
    if (xi < 0 || xi > 1)
      throw std::invalid_argument("HydrogenParams: xi must be in [0,1]");
    if (eta < 0) throw std::invalid_argument("HydrogenParams: eta must be >= 0");
    if (b <= 0) throw std::invalid_argument("HydrogenParams: b must be > 0");
    if (S < 0) throw std::invalid_argument("HydrogenParams: S must be >= 0");
  }
};

/// Hydrogen toughness degradation f_H(C) = xi + (1-xi) exp(-eta C^b).
inline double hydrogen_degradation(double C, const HydrogenParams& p) {
  if (C < 0) throw std::domain_error("hydrogen_degradation: C must be >= 0");
  return p.xi + (1.0 - p.xi) * std::exp(-p.eta * std::pow(C, p.b));
}

/// Fatigue toughness degradation f_F(ab) = (1 - ab/(ab + ab0))^2.
inline double fatigue_degradation(double alpha_bar, const FatigueParams& p) {
  if (alpha_bar < 0)
    throw std::domain_error("fatigue_degradation: alpha_bar must be >= 0");
  const double r = p.alpha_bar_0 / (alpha_bar + p.alpha_bar_0);
  return r * r;
}

/// Lattice concentration in equilibrium with H2 gas, C = S sqrt(p).
inline double sieverts_concentration(double p_H2, double S) {
  if (p_H2 < 0)
    throw std::domain_error("sieverts_concentration: pressure must be >= 0");
  return S * std::sqrt(p_H2);
}

} // namespace hafcg
