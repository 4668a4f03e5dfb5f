#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hafcg/params.hpp"

using namespace hafcg;

TEST(Degradation, QuadraticValues) {
  EXPECT_DOUBLE_EQ(degradation_g(0.0), 1.0);
  EXPECT_DOUBLE_EQ(degradation_g(1.0), 0.0);
  EXPECT_DOUBLE_EQ(degradation_g(0.5), 0.25);
  EXPECT_THROW(degradation_g(-0.1), std::domain_error);
  EXPECT_THROW(degradation_g(1.1), std::domain_error);
}

TEST(Degradation, DerivativeMatchesFiniteDifference) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(0.01, 0.99);
  const double h = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const double phi = dist(rng);
    const double fd = (degradation_g(phi + h) - degradation_g(phi - h)) / (2 * h);
    EXPECT_NEAR(degradation_g_prime(phi), fd, 1e-6 * std::abs(fd) + 1e-12);
  }
}

TEST(HydrogenDegradation, ReferenceValues) {
  HydrogenParams p; // xi=0.12, eta=7, b=2
  EXPECT_DOUBLE_EQ(hydrogen_degradation(0.0, p), 1.0);
  EXPECT_NEAR(hydrogen_degradation(100.0, p), 0.12, 1e-12); // saturation
  // C for 106 MPa via Sievert, S=0.077
  EXPECT_NEAR(hydrogen_degradation(0.7927635208559991, p), 0.1308114299962,
              1e-10);
  EXPECT_THROW(hydrogen_degradation(-1e-3, p), std::domain_error);
}

TEST(HydrogenDegradation, MonotoneAndBounded) {
  HydrogenParams p;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    double a = dist(rng), b = dist(rng);
    if (a > b) std::swap(a, b);
    const double fa = hydrogen_degradation(a, p);
    const double fb = hydrogen_degradation(b, p);
    EXPECT_GE(fa, fb);
    EXPECT_GT(fa, p.xi - 1e-15);
    EXPECT_LE(fa, 1.0);
  }
}

TEST(FatigueDegradation, ReferenceValues) {
  FatigueParams p;
  p.alpha_n = 1.0; // irrelevant here
  EXPECT_DOUBLE_EQ(fatigue_degradation(0.0, p), 1.0);
  EXPECT_DOUBLE_EQ(fatigue_degradation(p.alpha_bar_0, p), 0.25);
  EXPECT_DOUBLE_EQ(fatigue_degradation(3.0 * p.alpha_bar_0, p), 0.0625);
  EXPECT_THROW(fatigue_degradation(-1.0, p), std::domain_error);
}

TEST(FatigueDegradation, MonotoneAndBounded) {
  FatigueParams p;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  for (int i = 0; i < 500; ++i) {
    double a = dist(rng), b = dist(rng);
    if (a > b) std::swap(a, b);
    EXPECT_GE(fatigue_degradation(a, p), fatigue_degradation(b, p));
    EXPECT_GT(fatigue_degradation(b, p), 0.0);
    EXPECT_LE(fatigue_degradation(a, p), 1.0);
  }
}

TEST(Sievert, ReferenceValues) {
  EXPECT_DOUBLE_EQ(sieverts_concentration(0.0, 0.077), 0.0);
  EXPECT_NEAR(sieverts_concentration(106.0, 0.077), 0.7927635208559991, 1e-12);
  EXPECT_NEAR(sieverts_concentration(55.0, 0.077), 0.571047283506366, 1e-12);
  EXPECT_THROW(sieverts_concentration(-1.0, 0.077), std::domain_error);
}

TEST(LengthScale, ReferenceMaterial) {
  // E = 210 GPa, Gc = 100 N/mm, sigma_c = 4*715 MPa
  const double ell = derive_length_scale(210000.0, 100.0, 2860.0);
  EXPECT_NEAR(ell, 0.27077653552740966, 1e-12);
  EXPECT_NEAR(ell, 0.27, 0.02 * 0.27); // the quoted rounded value
  const double eps_c = critical_strain(210000.0, 100.0, ell);
  EXPECT_NEAR(eps_c, 0.024211640211640212, 1e-12);
  const double alpha_n = 0.5 * 2860.0 * eps_c;
  EXPECT_NEAR(alpha_n, 34.622645502645504, 1e-9);
  EXPECT_THROW(derive_length_scale(0.0, 100.0, 2860.0), std::domain_error);
}

TEST(LengthScale, StrengthRoundTrip) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> Es(1e4, 5e5), Gs(1.0, 500.0),
      Ss(100.0, 5000.0);
  for (int i = 0; i < 200; ++i) {
    const double E = Es(rng), Gc = Gs(rng), sc = Ss(rng);
    const double ell = derive_length_scale(E, Gc, sc);
    EXPECT_NEAR(critical_strength(E, Gc, ell), sc, 1e-10 * sc);
  }
}

TEST(LengthScale, VanishingToughnessLimit) {
  // ell -> 0 with Gc -> 0 at fixed strength; strength -> 0 at fixed ell
  EXPECT_LT(derive_length_scale(210000.0, 1e-9, 2860.0), 1e-9);
  EXPECT_LT(critical_strength(210000.0, 1e-12, 0.27), 1e-3);
}

TEST(Toughness, KIcConversion) {
  EXPECT_DOUBLE_EQ(toughness_from_KIc(0.0, 210000.0, 0.3), 0.0);
  // Gc = 100 N/mm corresponds to K_Ic = 151.91 MPa sqrt(m)
  EXPECT_NEAR(KIc_from_toughness(100.0, 210000.0, 0.3), 151.91090506254997,
              1e-9);
  EXPECT_NEAR(toughness_from_KIc(151.91090506254997, 210000.0, 0.3), 100.0,
              1e-9);
  // quadratic form: doubling K quadruples Gc
  const double g1 = toughness_from_KIc(50.0, 210000.0, 0.3);
  const double g2 = toughness_from_KIc(100.0, 210000.0, 0.3);
  EXPECT_NEAR(g2, 4.0 * g1, 1e-9 * g2);
}

TEST(ParisRelation, ExponentSlopeMap) {
  EXPECT_NEAR(paris_slope_from_exponent(1.25), 3.7959183673469385, 1e-12);
  EXPECT_NEAR(paris_slope_from_exponent(1.9), 5.122448979591836, 1e-12);
  EXPECT_NEAR(fatigue_exponent_from_paris(3.7959183673469385), 1.25, 1e-12);
  // the relation crosses n = 0 at m = 0.61/0.49
  EXPECT_THROW(fatigue_exponent_from_paris(0.61 / 0.49), std::domain_error);
  EXPECT_THROW(paris_slope_from_exponent(0.0), std::domain_error);
}

TEST(MaterialParams, ConstructionAndInvariants) {
  const auto p = MaterialParams::from_strength(210000.0, 0.3, 100.0, 2860.0);
  EXPECT_NEAR(p.ell, 0.2708, 1e-4);
  EXPECT_NO_THROW(p.validate());
  const auto q = MaterialParams::from_length_scale(210000.0, 0.3, 100.0, 0.27);
  EXPECT_NEAR(q.sigma_c, 2864.1, 0.1);

  MaterialParams bad = p;
  bad.sigma_c *= 1.001; // breaks the strength relation
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(MaterialParams::from_strength(-1.0, 0.3, 100.0, 2860.0),
               std::domain_error);
}

TEST(FatigueParams, EnduranceThresholdEstimate) {
  // alpha_e = 0.05 N/mm^2 sits within 10% of sigma_e^2/(2E) for the quoted
  // endurance stress of 150 MPa
  const double est = 150.0 * 150.0 / (2.0 * 210000.0);
  EXPECT_NEAR(est, 0.05357142857142857, 1e-15);
  EXPECT_LT(std::abs(est - 0.05) / 0.05, 0.10);
}

TEST(FatigueParams, HydrogenOverride) {
  FatigueParams p;
  p.alpha_n = 34.6;
  EXPECT_DOUBLE_EQ(p.effective_n(true), p.n);
  p.n_hydrogen_override = 1.9;
  EXPECT_DOUBLE_EQ(p.effective_n(false), 1.25);
  EXPECT_DOUBLE_EQ(p.effective_n(true), 1.9);
  EXPECT_NO_THROW(p.validate());
  p.kappa = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(HydrogenParams, Validation) {
  HydrogenParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.Rg, 8314.0);
  p.xi = 1.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
