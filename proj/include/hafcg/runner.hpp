#pragma once

// Experiment orchestration: builds the CT problem from a configuration,
// drives the cyclic simulator, reduces the history to a crack growth record
// and handles all on-disk outputs (CSV tables, resolved-config echo, VTK
// snapshots, checkpoints). Sweeps expand one or more load axes and run the
// individual experiments in parallel.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hafcg/config.hpp"
#include "hafcg/driver.hpp"
#include "hafcg/experiment.hpp"
#include "hafcg/vtk.hpp"

namespace hafcg {

struct ExperimentResult {
  CrackGrowthRecord record;
  InvariantReport invariants;
  ParisFit fit;
  bool aborted = false;
  std::string abort_reason;
  bool noncontiguous_warning = false;
  bool dK_range_warning = false;
  long cycles = 0;
  double final_a = 0;
  double C_env = 0;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

} // namespace detail

inline std::string current_timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

/// Write one or more records as a single CSV table ('.' decimal, comma
/// separator, units in the column names). The timestamp comment is the only
/// line that differs between identical runs.
inline void write_results_csv(std::ostream& os,
                              const std::vector<const CrackGrowthRecord*>& recs,
                              const std::string& timestamp = "") {
  if (!timestamp.empty()) os << "# written " << timestamp << "\n";
  if (!recs.empty())
    os << "# coefficient_set=" << coeff_set_name(recs.front()->coeff_set) << "\n";
  os << "run_id,p_H2_MPa,R,f_Hz,N,t_s,a_mm,deltaK_MPa_sqrtm,"
        "dadN_mm_per_cycle,C_tip_wppm\n";
  long out_of_range = 0;
  for (const auto* rec : recs)
    for (const auto& row : rec->rows) {
      os << rec->run_id << ',' << detail::format_double(rec->p_H2) << ','
         << detail::format_double(rec->R) << ',' << detail::format_double(rec->f)
         << ',' << detail::format_double(row.N) << ','
         << detail::format_double(row.t) << ',' << detail::format_double(row.a)
         << ',' << detail::format_double(row.deltaK) << ',';
      if (row.dadN > 0) os << detail::format_double(row.dadN);
      os << ',' << detail::format_double(std::max(0.0, row.C_tip)) << "\n";
      if (!row.dK_in_range) ++out_of_range;
    }
  if (out_of_range > 0)
    os << "# warning: " << out_of_range
       << " rows outside the deltaK validity range 0.2 <= a/W <= 0.8\n";
}

/// Parse a results CSV back into records (grouped by run_id, file order).
inline std::vector<CrackGrowthRecord> read_results_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("csv: cannot open '" + path + "'");
  std::vector<CrackGrowthRecord> recs;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) { // column header
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 10) cells.emplace_back();
    if (recs.empty() || recs.back().run_id != cells[0]) {
      CrackGrowthRecord rec;
      rec.run_id = cells[0];
      rec.p_H2 = std::atof(cells[1].c_str());
      rec.R = std::atof(cells[2].c_str());
      rec.f = std::atof(cells[3].c_str());
      recs.push_back(rec);
    }
    RecordRow row;
    row.N = std::atof(cells[4].c_str());
    row.t = std::atof(cells[5].c_str());
    row.a = std::atof(cells[6].c_str());
    row.deltaK = std::atof(cells[7].c_str());
    row.dadN = cells[8].empty() ? std::numeric_limits<double>::quiet_NaN()
                                : std::atof(cells[8].c_str());
    row.C_tip = std::atof(cells[9].c_str());
    recs.back().rows.push_back(row);
  }
  return recs;
}

/// Boundary conditions and load pattern of the half-CT problem.
inline ProblemSetup ct_problem_setup(const Mesh& mesh, const ExperimentConfig& cfg) {
  ProblemSetup setup;
  setup.mesh = &mesh;
  setup.material = cfg.material;
  setup.fatigue = cfg.fatigue;
  setup.fatigue.alpha_n = cfg.material.alpha_n();
  setup.hydrogen = cfg.hydrogen;
  setup.mode = cfg.plane_stress ? PlaneMode::stress : PlaneMode::strain;
  const auto& sym = mesh.node_set("SYMMETRY");
  int back_node = sym.front();
  for (int n : sym) {
    setup.fixed_dofs.push_back({n, 1});
    if (mesh.nodes[n][0] > mesh.nodes[back_node][0]) back_node = n;
  }
  setup.fixed_dofs.push_back({back_node, 0}); // pin rigid-body translation
  setup.unit_load = pin_unit_load(mesh, cfg.pin_patch_radius);
  setup.gas_nodes = mesh.node_set("OUTER");
  for (int n : mesh.node_set("NOTCH_FACES")) setup.gas_nodes.push_back(n);
  std::sort(setup.gas_nodes.begin(), setup.gas_nodes.end());
  setup.gas_nodes.erase(
      std::unique(setup.gas_nodes.begin(), setup.gas_nodes.end()),
      setup.gas_nodes.end());
  setup.crack_path_nodes = sym;
  return setup;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::string& run_id = "run-000") {
  cfg.validate();
  const Mesh mesh = generate_ct_half_mesh(cfg.geometry, cfg.material.ell, cfg.mesh);
  const ProblemSetup setup = ct_problem_setup(mesh, cfg);
  const double W = cfg.geometry.W, B = cfg.geometry.B, a0 = cfg.geometry.a0;

  LoadProgram program = cfg.program;
  double dP = cfg.delta_P_per_thickness(a0);
  if (program.control == LoadControl::constant_dK)
    dP = program.deltaK_target * units::mpa_sqrt_m * std::sqrt(W) /
         ct_geometry_factor(a0 / W, cfg.coeff_set);
  program.P_max = dP / (1.0 - program.R);

  Simulator sim(setup, program, cfg.solver);
  sim.initialize();

  ExperimentResult res;
  res.C_env = sim.C_env();
  const bool hydrogen = sim.hydrogen_active();

  std::vector<CycleSample> samples;
  auto sample_now = [&]() {
    bool warn = false;
    const double a = measure_crack_length(mesh, sim.state().phi, a0, &warn);
    res.noncontiguous_warning |= warn;
    const double dP_now = sim.peak_load() * (1.0 - program.R);
    // the polynomial blows up toward a = W; clamp the evaluation point for
    // samples taken right at rupture
    const double a_eval = std::min(a, 0.99 * W);
    const double dK = compute_delta_K(dP_now * B, a_eval, W, B, cfg.coeff_set);
    const double C_tip =
        hydrogen ? interpolate_on_symmetry(mesh, sim.state().hyd.C, a) : 0.0;
    samples.push_back({double(sim.state().cycle), sim.state().t, a, dK, C_tip});
    return a;
  };
  sample_now();

  const std::filesystem::path outdir = cfg.output.dir;
  const bool write_files = !cfg.output.dir.empty();
  if (write_files) std::filesystem::create_directories(outdir);

  long snapshots = 0;
  while (!sim.finished()) {
    try {
      sim.advance_cycle();
    } catch (const SolverError& e) {
      res.aborted = true;
      res.abort_reason = e.what();
      break;
    }
    const double a = sample_now();
    if (a >= 0.99 * W) break; // ruptured through the back face
    if (program.control == LoadControl::constant_dK) {
      const double dPn = program.deltaK_target * units::mpa_sqrt_m *
                         std::sqrt(W) / ct_geometry_factor(a / W, cfg.coeff_set);
      sim.set_peak_load(dPn / (1.0 - program.R));
    }
    if (write_files && cfg.output.vtk_every_cycles > 0 &&
        (sim.state().cycle / program.cycle_jump) % cfg.output.vtk_every_cycles == 0) {
      std::ostringstream name;
      name << run_id << "_cycle" << sim.state().cycle << ".vtk";
      write_vtk((outdir / name.str()).string(), mesh,
                {{"phi", &sim.state().phi}, {"concentration", &sim.state().hyd.C}},
                &sim.state().mech.u);
      ++snapshots;
    }
    if (a >= cfg.a_limit_over_W * W) break;
  }

  res.cycles = sim.state().cycle;
  res.final_a = samples.back().a;
  res.invariants = sim.invariants();
  res.record = build_record(samples, cfg.output.delta_a_log, a0, W, B, cfg.coeff_set);
  res.record.run_id = run_id;
  res.record.p_H2 = program.p_H2;
  res.record.R = program.R;
  res.record.f = program.f;
  for (const auto& row : res.record.rows) res.dK_range_warning |= !row.dK_in_range;
  res.fit = fit_paris(res.record, cfg.output.fit_window_lo, cfg.output.fit_window_hi);

  if (write_files) {
    std::ofstream csv(outdir / cfg.output.csv);
    write_results_csv(csv, {&res.record}, current_timestamp());
    if (cfg.output.write_resolved_config) {
      std::ofstream echo(outdir / "resolved_config.json");
      echo << echo_config(cfg) << "\n";
    }
    if (cfg.output.checkpoint_at_end)
      sim.save_checkpoint((outdir / (run_id + ".ckpt")).string());
  }
  return res;
}

/// Cartesian sweep over the given axis values; empty axes keep the base value.
struct SweepAxes {
  std::vector<double> p_H2;
  std::vector<double> R;
  std::vector<double> f;
};

struct SweepCase {
  ExperimentConfig cfg;
  std::string run_id;
};

inline std::vector<SweepCase> expand_sweep(const ExperimentConfig& base,
                                           const SweepAxes& axes) {
  const std::vector<double> ps = axes.p_H2.empty()
                                     ? std::vector<double>{base.program.p_H2}
                                     : axes.p_H2;
  const std::vector<double> rs =
      axes.R.empty() ? std::vector<double>{base.program.R} : axes.R;
  const std::vector<double> fs =
      axes.f.empty() ? std::vector<double>{base.program.f} : axes.f;
  std::vector<SweepCase> cases;
  for (double p : ps)
    for (double r : rs)
      for (double fr : fs) {
        SweepCase c;
        c.cfg = base;
        c.cfg.program.p_H2 = p;
        c.cfg.program.R = r;
        c.cfg.program.f = fr;
        std::ostringstream id;
        id << "p" << detail::format_double(p) << "_R" << detail::format_double(r)
           << "_f" << detail::format_double(fr);
        c.run_id = id.str();
        c.cfg.output.csv = c.run_id + ".csv";
        cases.push_back(std::move(c));
      }
  return cases;
}

inline int worker_cap() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HAFCG_MAX_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min<int>(v, hw);
  }
  return static_cast<int>(hw);
}

/// Run the cases (in parallel up to the worker cap) and keep input order.
inline std::vector<ExperimentResult> run_sweep(const std::vector<SweepCase>& cases) {
  const int cap = worker_cap();
  std::vector<ExperimentResult> results(cases.size());
  std::size_t next = 0;
  while (next < cases.size()) {
    const std::size_t batch =
        std::min<std::size_t>(cap, cases.size() - next);
    std::vector<std::future<ExperimentResult>> futs;
    for (std::size_t k = 0; k < batch; ++k) {
      const SweepCase& c = cases[next + k];
      futs.push_back(std::async(std::launch::async, [&c]() {
        return run_experiment(c.cfg, c.run_id);
      }));
    }
    for (std::size_t k = 0; k < batch; ++k) results[next + k] = futs[k].get();
    next += batch;
  }
  return results;
}

} // namespace hafcg
