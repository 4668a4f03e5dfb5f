#pragma once

// 8-node serendipity quadrilateral shape functions and the 3x3 Gauss rule
// used for every field. Node ordering follows the VTK quadratic quad: four
// corners counter-clockwise, then the four mid-edge nodes.

#include <array>
#include <cmath>

namespace hafcg {

struct QuadPoint {
  double xi;
  double eta;
  double w;
};

/// 3x3 Gauss-Legendre rule on [-1,1]^2; weights sum to 4.
inline const std::array<QuadPoint, 9>& gauss9() {
  static const std::array<QuadPoint, 9> pts = [] {
    const double g = std::sqrt(3.0 / 5.0);
    const double c[3] = {-g, 0.0, g};
    const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    std::array<QuadPoint, 9> out{};
    int k = 0;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        out[k++] = {c[i], c[j], w[i] * w[j]};
    return out;
  }();
  return pts;
}

struct ShapeQ8 {
  std::array<double, 8> N;
  std::array<double, 8> dNdxi;
  std::array<double, 8> dNdeta;
};

/// Serendipity shape functions and parent-space derivatives at (xi, eta).
inline ShapeQ8 shape_q8(double xi, double eta) {
  ShapeQ8 s{};
  // corner signs, VTK order: (-1,-1), (1,-1), (1,1), (-1,1)
  static constexpr double cx[4] = {-1.0, 1.0, 1.0, -1.0};
  static constexpr double cy[4] = {-1.0, -1.0, 1.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    const double xp = 1.0 + cx[i] * xi;
    const double yp = 1.0 + cy[i] * eta;
    s.N[i] = 0.25 * xp * yp * (cx[i] * xi + cy[i] * eta - 1.0);
    s.dNdxi[i] = 0.25 * cx[i] * yp * (2.0 * cx[i] * xi + cy[i] * eta);
    s.dNdeta[i] = 0.25 * cy[i] * xp * (cx[i] * xi + 2.0 * cy[i] * eta);
  }
  // mid-edge nodes: 4 bottom, 5 right, 6 top, 7 left
  const double xi2 = 1.0 - xi * xi;
  const double eta2 = 1.0 - eta * eta;
  s.N[4] = 0.5 * xi2 * (1.0 - eta);
  s.N[5] = 0.5 * (1.0 + xi) * eta2;
  s.N[6] = 0.5 * xi2 * (1.0 + eta);
  s.N[7] = 0.5 * (1.0 - xi) * eta2;
  s.dNdxi[4] = -xi * (1.0 - eta);
  s.dNdxi[5] = 0.5 * eta2;
  s.dNdxi[6] = -xi * (1.0 + eta);
  s.dNdxi[7] = -0.5 * eta2;
  s.dNdeta[4] = -0.5 * xi2;
  s.dNdeta[5] = -(1.0 + xi) * eta;
  s.dNdeta[6] = 0.5 * xi2;
  s.dNdeta[7] = -(1.0 - xi) * eta;
  return s;
}

} // namespace hafcg
