#pragma once

// Structured, block-graded meshes of 8-node serendipity quadrilaterals:
// a half Compact Tension specimen (modelled above the symmetry plane, the
// machined notch represented as the unconstrained part of the y=0 edge) and
// plain rectangles for verification problems.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hafcg/errors.hpp"
#include "hafcg/quadrature.hpp"

namespace hafcg {

struct Mesh {
  std::vector<std::array<double, 2>> nodes; // [mm]
  std::vector<std::array<int, 8>> elements; // VTK quadratic quad ordering
  std::map<std::string, std::vector<int>> node_sets;
  std::vector<double> elem_size;  // max side length per element [mm]
  std::vector<char> elem_in_band; // crack-path refinement band membership

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }

  const std::vector<int>& node_set(const std::string& name) const {
    auto it = node_sets.find(name);
    if (it == node_sets.end())
      throw ConfigError("mesh: unknown node set '" + name + "'");
    return it->second;
  }
};

/// Half Compact Tension planform. x is measured from the load line, the
/// symmetry (crack) plane is y=0. Defaults follow a standard 1T geometry.
struct CTGeometry {
  double W = 50.8;            // effective width, load line to back face [mm]
  double B = 25.4;            // thickness, used only in the dK formula [mm]
  double a0 = 10.16;          // initial notch length from load line [mm]
  double front_offset = 12.7; // load line to front face [mm]
  double half_height = 30.48; // half specimen height [mm]
  double pin_x = 0.0;         // pin (load application) position [mm]
  double pin_y = 13.97;       // 0.275*W, ASTM offset [mm]
  double band_halfheight = -1.0; // refinement band height; negative = auto

  void validate() const {
    if (W <= 0 || B <= 0 || front_offset < 0 || half_height <= 0)
      throw ConfigError("CTGeometry: non-positive dimension");
    if (a0 <= 0 || a0 >= W)
      throw ConfigError("CTGeometry: a0 must satisfy 0 < a0 < W");
    if (pin_x < -front_offset || pin_x > W || pin_y < 0 || pin_y > half_height)
      throw ConfigError("CTGeometry: pin outside the domain");
    if (band_halfheight == 0.0)
      throw ConfigError("CTGeometry: degenerate refinement band");
  }
};

/// Mesh grading knobs. Zero means "derive from ell and the geometry".
struct MeshControls {
  double h_band = 0.0;       // element size in the band; auto = ell/6
  int band_rows = 4;         // fine rows when band_halfheight is auto
  double grading_ratio = 1.5;
  double coarse_h_max = 0.0; // auto = W/10
  double band_lead = 0.0;    // fine zone ahead of the notch tip; auto = 2*ell
};

namespace detail {

inline std::vector<double> levels_uniform(double a, double b, double h) {
  const int n = std::max(1, static_cast<int>(std::lround((b - a) / h)));
  std::vector<double> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = a + (b - a) * i / n;
  return out;
}

// uniform levels with spacing guaranteed <= h
inline std::vector<double> levels_uniform_max(double a, double b, double h) {
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
  std::vector<double> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = a + (b - a) * i / n;
  return out;
}

// Geometrically growing element sizes away from the fine end, capped at
// hmax, scaled to fill [a,b] exactly. fine_at_right puts h0 at the b end.
inline std::vector<double> levels_graded(double a, double b, double h0,
                                         double ratio, double hmax,
                                         bool fine_at_right) {
  const double span = b - a;
  std::vector<double> sizes;
  double acc = 0.0, h = h0;
  while (acc < span) {
    sizes.push_back(h);
    acc += h;
    h = std::min(h * ratio, hmax);
  }
  const double scale = span / acc;
  for (double& s : sizes) s *= scale;
  std::vector<double> out;
  out.reserve(sizes.size() + 1);
  if (fine_at_right) {
    out.push_back(b);
    double x = b;
    for (double s : sizes) out.push_back(x -= s);
    std::reverse(out.begin(), out.end());
    out.front() = a;
  } else {
    out.push_back(a);
    double x = a;
    for (double s : sizes) out.push_back(x += s);
    out.back() = b;
  }
  return out;
}

// Move the interior level closest to x onto x, keeping levels monotone.
inline void snap_level(std::vector<double>& levels, double x) {
  if (levels.size() < 3) return;
  if (x <= levels.front() || x >= levels.back()) return;
  std::size_t best = 1;
  double dist = std::abs(levels[1] - x);
  for (std::size_t i = 2; i + 1 < levels.size(); ++i) {
    const double d = std::abs(levels[i] - x);
    if (d < dist) { dist = d; best = i; }
  }
  if (x > levels[best - 1] && x < levels[best + 1]) levels[best] = x;
}

// Tensor-product Q8 grid from sorted coordinate levels.
inline Mesh grid_from_levels(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  if (nx < 1 || ny < 1) throw ConfigError("mesh: empty level set");
  Mesh m;
  const int n_corner = (nx + 1) * (ny + 1);
  const int n_xmid = nx * (ny + 1);
  m.nodes.resize(n_corner + n_xmid + (nx + 1) * ny);
  auto corner = [&](int i, int j) { return j * (nx + 1) + i; };
  auto xmid = [&](int i, int j) { return n_corner + j * nx + i; };
  auto ymid = [&](int i, int j) { return n_corner + n_xmid + j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.nodes[corner(i, j)] = {xs[i], ys[j]};
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.nodes[xmid(i, j)] = {0.5 * (xs[i] + xs[i + 1]), ys[j]};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes[ymid(i, j)] = {xs[i], 0.5 * (ys[j] + ys[j + 1])};
  m.elements.reserve(nx * ny);
  m.elem_size.reserve(nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.elements.push_back({corner(i, j), corner(i + 1, j), corner(i + 1, j + 1),
                            corner(i, j + 1), xmid(i, j), ymid(i + 1, j),
                            xmid(i, j + 1), ymid(i, j)});
      m.elem_size.push_back(std::max(xs[i + 1] - xs[i], ys[j + 1] - ys[j]));
    }
  m.elem_in_band.assign(m.elements.size(), 0);
  return m;
}

} // namespace detail

/// Smallest Jacobian determinant over all elements and quadrature points.
inline double mesh_min_jacobian(const Mesh& m) {
  double min_det = std::numeric_limits<double>::max();
  for (const auto& conn : m.elements) {
    for (const auto& qp : gauss9()) {
      const ShapeQ8 s = shape_q8(qp.xi, qp.eta);
      double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
      for (int a = 0; a < 8; ++a) {
        const auto& X = m.nodes[conn[a]];
        j00 += s.dNdxi[a] * X[0];
        j01 += s.dNdxi[a] * X[1];
        j10 += s.dNdeta[a] * X[0];
        j11 += s.dNdeta[a] * X[1];
      }
      min_det = std::min(min_det, j00 * j11 - j01 * j10);
    }
  }
  return min_det;
}

/// Domain area by quadrature.
inline double mesh_area(const Mesh& m) {
  double area = 0.0;
  for (const auto& conn : m.elements) {
    for (const auto& qp : gauss9()) {
      const ShapeQ8 s = shape_q8(qp.xi, qp.eta);
      double j00 = 0, j01 = 0, j10 = 0, j11 = 0;
      for (int a = 0; a < 8; ++a) {
        const auto& X = m.nodes[conn[a]];
        j00 += s.dNdxi[a] * X[0];
        j01 += s.dNdxi[a] * X[1];
        j10 += s.dNdeta[a] * X[0];
        j11 += s.dNdeta[a] * X[1];
      }
      area += (j00 * j11 - j01 * j10) * qp.w;
    }
  }
  return area;
}

/// Uniform nx-by-ny rectangle [0,Lx]x[0,Ly] with LEFT/RIGHT/BOTTOM/TOP sets.
inline Mesh generate_rect_mesh(double Lx, double Ly, int nx, int ny) {
  if (Lx <= 0 || Ly <= 0 || nx < 1 || ny < 1)
    throw ConfigError("generate_rect_mesh: invalid dimensions");
  Mesh m = detail::grid_from_levels(detail::levels_uniform(0, Lx, Lx / nx),
                                    detail::levels_uniform(0, Ly, Ly / ny));
  const double tol = 1e-9 * std::max(Lx, Ly);
  std::vector<int> left, right, bottom, top;
  for (int n = 0; n < m.n_nodes(); ++n) {
    const auto& X = m.nodes[n];
    if (std::abs(X[0]) < tol) left.push_back(n);
    if (std::abs(X[0] - Lx) < tol) right.push_back(n);
    if (std::abs(X[1]) < tol) bottom.push_back(n);
    if (std::abs(X[1] - Ly) < tol) top.push_back(n);
  }
  m.node_sets["LEFT"] = left;
  m.node_sets["RIGHT"] = right;
  m.node_sets["BOTTOM"] = bottom;
  m.node_sets["TOP"] = top;
  return m;
}

/// Half CT specimen mesh. Named sets:
///   SYMMETRY    ligament nodes (y=0, x >= a0), u_y is constrained here
///   NOTCH_FACES crack-free notch flank (y=0, x < a0), exposed to gas
///   OUTER       exterior boundary exposed to gas
///   PIN         single node closest to the pin position
/// Elements in the crack-path band satisfy h <= ell/6.
inline Mesh generate_ct_half_mesh(const CTGeometry& geom, double ell,
                                  const MeshControls& ctrl = {}) {
  geom.validate();
  if (ell <= 0) throw ConfigError("generate_ct_half_mesh: ell must be > 0");

  const double h_band = ctrl.h_band > 0 ? ctrl.h_band : ell / 6.0;
  if (h_band > ell / 6.0 + 1e-12)
    throw ConfigError("generate_ct_half_mesh: band element size exceeds ell/6");
  const double band_h = geom.band_halfheight > 0 ? geom.band_halfheight
                                                 : ctrl.band_rows * h_band;
  if (band_h < h_band)
    throw ConfigError(
        "generate_ct_half_mesh: refinement band too small for the ell/6 rule");
  if (band_h >= geom.half_height)
    throw ConfigError("generate_ct_half_mesh: band taller than the specimen");
  const double h_coarse = ctrl.coarse_h_max > 0 ? ctrl.coarse_h_max : geom.W / 10.0;
  const double lead = std::min(ctrl.band_lead > 0 ? ctrl.band_lead : 2.0 * ell,
                               0.8 * (geom.a0 + geom.front_offset));
  const double x0 = -geom.front_offset;
  const double xb = geom.a0 - lead; // start of the fine column block

  // x levels: graded coarse block, then uniform fine blocks meeting exactly
  // at the notch tip so it sits on a grid line
  std::vector<double> xs = detail::levels_graded(x0, xb, h_band,
                                                 ctrl.grading_ratio, h_coarse,
                                                 /*fine_at_right=*/true);
  detail::snap_level(xs, geom.pin_x);
  std::vector<double> fine = detail::levels_uniform_max(xb, geom.a0, h_band);
  xs.insert(xs.end(), fine.begin() + 1, fine.end());
  fine = detail::levels_uniform_max(geom.a0, geom.W, h_band);
  xs.insert(xs.end(), fine.begin() + 1, fine.end());

  // y levels: uniform fine rows in the band, graded above
  std::vector<double> ys = detail::levels_uniform_max(0.0, band_h, h_band);
  std::vector<double> upper = detail::levels_graded(
      band_h, geom.half_height, h_band * ctrl.grading_ratio,
      ctrl.grading_ratio, h_coarse, /*fine_at_right=*/false);
  detail::snap_level(upper, geom.pin_y);
  ys.insert(ys.end(), upper.begin() + 1, upper.end());

  Mesh m = detail::grid_from_levels(xs, ys);

  // band flag and h rule: ligament columns within the fine rows
  for (int e = 0; e < m.n_elements(); ++e) {
    double cx = 0, cy = 0;
    for (int a = 0; a < 4; ++a) {
      cx += 0.25 * m.nodes[m.elements[e][a]][0];
      cy += 0.25 * m.nodes[m.elements[e][a]][1];
    }
    m.elem_in_band[e] = (cx > xb && cy < band_h) ? 1 : 0;
    if (m.elem_in_band[e] && m.elem_size[e] > ell / 6.0 + 1e-9)
      throw ConfigError("generate_ct_half_mesh: band element violates ell/6");
  }

  const double tol = 1e-9 * geom.W;
  std::vector<int> symmetry, notch, outer;
  int pin_node = 0;
  double pin_dist = std::numeric_limits<double>::max();
  for (int n = 0; n < m.n_nodes(); ++n) {
    const auto& X = m.nodes[n];
    const bool on_bottom = std::abs(X[1]) < tol;
    if (on_bottom) {
      if (X[0] >= geom.a0 - tol)
        symmetry.push_back(n);
      else
        notch.push_back(n);
    }
    if (std::abs(X[0] - x0) < tol || std::abs(X[0] - geom.W) < tol ||
        std::abs(X[1] - geom.half_height) < tol)
      outer.push_back(n);
    const double d = std::hypot(X[0] - geom.pin_x, X[1] - geom.pin_y);
    if (d < pin_dist) { pin_dist = d; pin_node = n; }
  }
  m.node_sets["SYMMETRY"] = symmetry;
  m.node_sets["NOTCH_FACES"] = notch;
  m.node_sets["OUTER"] = outer;
  m.node_sets["PIN"] = {pin_node};
  return m;
}

} // namespace hafcg
