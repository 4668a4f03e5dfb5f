#pragma once

// Virtual Compact Tension experiment bookkeeping: crack length measurement
// from the damage field, the CT stress intensity polynomial, ASTM-style
// secant da/dN extraction over fixed crack increments, and Paris-law fits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hafcg/mesh.hpp"
#include "hafcg/params.hpp"

namespace hafcg {

/// CT geometry-factor polynomial family. `astm` uses the E647 coefficient
/// 4.64 on the linear term; `paper_as_written` uses 4.46.
enum class CoeffSet { astm, paper_as_written };

inline const char* coeff_set_name(CoeffSet s) {
  return s == CoeffSet::astm ? "astm" : "paper_as_written";
}

/// f(a/W) such that dK = f * dP / (B sqrt(W)).
inline double ct_geometry_factor(double a_over_W, CoeffSet set = CoeffSet::astm) {
  const double x = a_over_W;
  const double c1 = set == CoeffSet::astm ? 4.64 : 4.46;
  const double poly =
      0.886 + c1 * x - 13.32 * x * x + 14.72 * x * x * x - 5.6 * x * x * x * x;
  return (2.0 + x) * poly / std::pow(1.0 - x, 1.5);
}

/// Stress intensity factor range [MPa sqrt(m)] for a CT specimen.
/// dP in N, a/W/B in mm. The validity window is 0.2 <= a/W <= 0.8; callers
/// flag values outside it on the output record.
inline double compute_delta_K(double dP, double a, double W, double B,
                              CoeffSet set = CoeffSet::astm) {
  if (W <= 0 || B <= 0) throw ConfigError("compute_delta_K: W, B must be > 0");
  if (a < 0 || a >= W) throw ConfigError("compute_delta_K: need 0 <= a < W");
  const double k_mpa_sqrt_mm = ct_geometry_factor(a / W, set) * dP / (B * std::sqrt(W));
  return k_mpa_sqrt_mm / units::mpa_sqrt_m;
}

inline bool delta_K_in_validity_range(double a_over_W) {
  return a_over_W >= 0.2 && a_over_W <= 0.8;
}

/// Crack length from the load line: the farthest phi = 0.5 crossing on the
/// symmetry ligament, linearly interpolated between nodes. Falls back to a0
/// when no node has reached 0.5. Sets *noncontiguous when damaged segments
/// are separated by intact material ahead of the notch.
inline double measure_crack_length(const Mesh& mesh, const Eigen::VectorXd& phi,
                                   double a0, bool* noncontiguous = nullptr) {
  const auto& sym = mesh.node_set("SYMMETRY");
  std::vector<std::pair<double, int>> line;
  line.reserve(sym.size());
  for (int n : sym) line.emplace_back(mesh.nodes[n][0], n);
  std::sort(line.begin(), line.end());
  if (noncontiguous) *noncontiguous = false;

  int last = -1; // farthest node index in `line` with phi >= 0.5
  for (int i = 0; i < static_cast<int>(line.size()); ++i)
    if (phi[line[i].second] >= 0.5) last = i;
  if (last < 0) return a0;

  if (noncontiguous)
    for (int i = 0; i < last; ++i)
      if (phi[line[i].second] < 0.5) {
        *noncontiguous = true;
        break;
      }

  if (last + 1 >= static_cast<int>(line.size())) return line.back().first;
  const double x0 = line[last].first, x1 = line[last + 1].first;
  const double p0 = phi[line[last].second], p1 = phi[line[last + 1].second];
  const double xc = x0 + (p0 - 0.5) / (p0 - p1) * (x1 - x0);
  return std::max(a0, xc);
}

/// Linear interpolation of a nodal field along the symmetry line.
inline double interpolate_on_symmetry(const Mesh& mesh,
                                      const Eigen::VectorXd& field, double x) {
  const auto& sym = mesh.node_set("SYMMETRY");
  std::vector<std::pair<double, int>> line;
  line.reserve(sym.size());
  for (int n : sym) line.emplace_back(mesh.nodes[n][0], n);
  std::sort(line.begin(), line.end());
  if (x <= line.front().first) return field[line.front().second];
  if (x >= line.back().first) return field[line.back().second];
  for (std::size_t i = 1; i < line.size(); ++i)
    if (x <= line[i].first) {
      const double t = (x - line[i - 1].first) / (line[i].first - line[i - 1].first);
      return (1.0 - t) * field[line[i - 1].second] + t * field[line[i].second];
    }
  return field[line.back().second];
}

/// One per-cycle observation of the running experiment.
struct CycleSample {
  double N;      // real cycle count
  double t;      // [s]
  double a;      // [mm]
  double deltaK; // [MPa sqrt(m)]
  double C_tip;  // [wppm]
};

/// One logged crack-length crossing (fixed increment da_log).
struct RecordRow {
  double N = 0;
  double t = 0;
  double a = 0;
  double deltaK = 0;
  double dadN = std::numeric_limits<double>::quiet_NaN(); // filled by secant
  double C_tip = 0;
  bool dK_in_range = true;
};

struct CrackGrowthRecord {
  std::vector<RecordRow> rows;
  double W = 0, B = 0, a0 = 0;
  double da_log = 0.1;
  CoeffSet coeff_set = CoeffSet::astm;
  // run identity, echoed into result tables
  std::string run_id = "run";
  double p_H2 = 0, R = 0, f = 0;
};

/// Secant rates over consecutive logged crossings: row k receives
/// (a_k - a_{k-1})/(N_k - N_{k-1}). The first row carries no rate.
inline void extract_dadN(CrackGrowthRecord& rec) {
  for (std::size_t k = 0; k < rec.rows.size(); ++k) {
    if (k == 0) {
      rec.rows[k].dadN = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double dN = rec.rows[k].N - rec.rows[k - 1].N;
    rec.rows[k].dadN = dN > 0
                           ? (rec.rows[k].a - rec.rows[k - 1].a) / dN
                           : std::numeric_limits<double>::quiet_NaN();
  }
}

/// Reduce per-cycle samples to fixed-increment crossing rows and apply the
/// secant rates. Crossing quantities are interpolated linearly in N.
inline CrackGrowthRecord build_record(const std::vector<CycleSample>& samples,
                                      double da_log, double a0, double W,
                                      double B, CoeffSet set) {
  CrackGrowthRecord rec;
  rec.W = W;
  rec.B = B;
  rec.a0 = a0;
  rec.da_log = da_log;
  rec.coeff_set = set;
  if (samples.empty()) return rec;
  double level = a0 + da_log;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    while (samples[i].a >= level && samples[i - 1].a < level) {
      const auto& s0 = samples[i - 1];
      const auto& s1 = samples[i];
      const double u = (level - s0.a) / (s1.a - s0.a);
      RecordRow row;
      row.N = s0.N + u * (s1.N - s0.N);
      row.t = s0.t + u * (s1.t - s0.t);
      row.a = level;
      row.deltaK = s0.deltaK + u * (s1.deltaK - s0.deltaK);
      row.C_tip = s0.C_tip + u * (s1.C_tip - s0.C_tip);
      row.dK_in_range = delta_K_in_validity_range(level / W);
      rec.rows.push_back(row);
      level += da_log;
    }
  }
  extract_dadN(rec);
  return rec;
}

struct ParisFit {
  double C = 0;      // [mm/cycle / (MPa sqrt(m))^m]
  double m = 0;      // log-log slope
  int n_points = 0;
};

/// Least-squares fit of log10(da/dN) vs log10(dK) using mid-interval dK
/// attribution. A window [K_lo, K_hi] of 0 disables the bound.
inline ParisFit fit_paris(const CrackGrowthRecord& rec, double K_lo = 0,
                          double K_hi = 0) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 1; k < rec.rows.size(); ++k) {
    const double rate = rec.rows[k].dadN;
    if (!(rate > 0)) continue;
    const double K_mid = 0.5 * (rec.rows[k - 1].deltaK + rec.rows[k].deltaK);
    if (K_lo > 0 && K_mid < K_lo) continue;
    if (K_hi > 0 && K_mid > K_hi) continue;
    const double x = std::log10(K_mid);
    const double y = std::log10(rate);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  ParisFit fit;
  fit.n_points = n;
  if (n < 2) return fit;
  const double det = n * sxx - sx * sx;
  fit.m = (n * sxy - sx * sy) / det;
  fit.C = std::pow(10.0, (sy - fit.m * sx) / n);
  return fit;
}

/// da/dN interpolated from a record at a given dK (log-log linear between
/// rated rows); NaN when dK is outside the record.
inline double rate_at_deltaK(const CrackGrowthRecord& rec, double deltaK) {
  std::vector<std::pair<double, double>> pts; // (log K_mid, log rate)
  for (std::size_t k = 1; k < rec.rows.size(); ++k) {
    if (!(rec.rows[k].dadN > 0)) continue;
    pts.emplace_back(std::log10(0.5 * (rec.rows[k - 1].deltaK + rec.rows[k].deltaK)),
                     std::log10(rec.rows[k].dadN));
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  std::sort(pts.begin(), pts.end());
  const double x = std::log10(deltaK);
  if (x < pts.front().first || x > pts.back().first)
    return std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (x <= pts[i].first) {
      const double u = (x - pts[i - 1].first) / (pts[i].first - pts[i - 1].first);
      return std::pow(10.0, (1.0 - u) * pts[i - 1].second + u * pts[i].second);
    }
  return std::numeric_limits<double>::quiet_NaN();
}

} // namespace hafcg
