// Command line front end: run a single virtual CT experiment, sweep load
// axes, post-process a results table, or export a mesh for inspection.
// Exit codes: 0 success, 1 validation/configuration error, 2 solver failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hafcg/runner.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  hafcg::ExperimentConfig cfg = hafcg::parse_config(config_path);
  hafcg::ExperimentResult res = hafcg::run_experiment(cfg);
  std::cout << "run-000: cycles=" << res.cycles << " final_a_mm=" << res.final_a;
  if (res.fit.n_points >= 2)
    std::cout << " paris_m=" << res.fit.m << " paris_C=" << res.fit.C;
  std::cout << "\n";
  if (res.noncontiguous_warning)
    std::cout << "warning: non-contiguous damage ahead of the notch\n";
  if (res.dK_range_warning)
    std::cout << "warning: some rows outside the deltaK validity range\n";
  if (res.aborted) {
    std::cerr << "run aborted: " << res.abort_reason << "\n";
    return 2;
  }
  std::cout << "wrote " << (std::filesystem::path(cfg.output.dir) / cfg.output.csv).string()
            << "\n";
  return 0;
}

std::vector<double> parse_axis_values(const std::string& s) {
  std::vector<double> values;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    values.push_back(std::stod(tok));
  }
  if (values.empty()) throw hafcg::ConfigError("sweep: empty axis value list");
  return values;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::string>& axis_specs) {
  hafcg::ExperimentConfig base = hafcg::parse_config(config_path);
  hafcg::SweepAxes axes;
  for (const auto& spec : axis_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw hafcg::ConfigError("sweep: axis spec must be axis=v1,v2,... got '" +
                               spec + "'");
    const std::string axis = spec.substr(0, eq);
    const std::vector<double> values = parse_axis_values(spec.substr(eq + 1));
    if (axis == "p_H2")
      axes.p_H2 = values;
    else if (axis == "R")
      axes.R = values;
    else if (axis == "f")
      axes.f = values;
    else
      throw hafcg::ConfigError("sweep: unknown axis '" + axis +
                               "' (use p_H2, R, f)");
  }
  const std::vector<hafcg::SweepCase> cases = hafcg::expand_sweep(base, axes);
  const std::vector<hafcg::ExperimentResult> results = hafcg::run_sweep(cases);

  std::filesystem::create_directories(base.output.dir);
  std::vector<const hafcg::CrackGrowthRecord*> recs;
  for (const auto& r : results) recs.push_back(&r.record);
  const auto table = std::filesystem::path(base.output.dir) / "sweep_results.csv";
  std::ofstream os(table);
  hafcg::write_results_csv(os, recs, hafcg::current_timestamp());

  bool any_aborted = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::cout << cases[i].run_id << ": cycles=" << results[i].cycles
              << " final_a_mm=" << results[i].final_a;
    if (results[i].aborted) {
      std::cout << " ABORTED (" << results[i].abort_reason << ")";
      any_aborted = true;
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << table.string() << "\n";
  return any_aborted ? 2 : 0;
}

int cmd_postprocess(const std::string& csv_path, double lo, double hi) {
  const auto records = hafcg::read_results_csv(csv_path);
  if (records.empty()) throw hafcg::ConfigError("postprocess: no rows in table");
  for (const auto& rec : records) {
    const hafcg::ParisFit fit = hafcg::fit_paris(rec, lo, hi);
    double rate_min = 0, rate_max = 0, rate_gmean = 0;
    int n = 0;
    for (const auto& row : rec.rows)
      if (row.dadN > 0) {
        rate_min = n == 0 ? row.dadN : std::min(rate_min, row.dadN);
        rate_max = std::max(rate_max, row.dadN);
        rate_gmean += std::log10(row.dadN);
        ++n;
      }
    std::cout << rec.run_id << ": points=" << fit.n_points;
    if (fit.n_points >= 2)
      std::cout << " paris_C=" << fit.C << " paris_m=" << fit.m;
    if (n > 0)
      std::cout << " dadN_min=" << rate_min << " dadN_max=" << rate_max
                << " dadN_gmean=" << std::pow(10.0, rate_gmean / n);
    std::cout << "\n";
  }
  return 0;
}

int cmd_export_mesh(const std::string& config_path, const std::string& out) {
  hafcg::ExperimentConfig cfg = hafcg::parse_config(config_path);
  const hafcg::Mesh mesh =
      hafcg::generate_ct_half_mesh(cfg.geometry, cfg.material.ell, cfg.mesh);
  std::string path = out;
  if (path.empty()) {
    std::filesystem::create_directories(cfg.output.dir);
    path = (std::filesystem::path(cfg.output.dir) / "mesh.vtk").string();
  }
  std::vector<double> band(mesh.elem_in_band.begin(), mesh.elem_in_band.end());
  std::vector<double> hsize(mesh.elem_size.begin(), mesh.elem_size.end());
  hafcg::write_vtk(path, mesh, {}, nullptr,
                   {{"band", &band}, {"h_mm", &hsize}});
  std::cout << "mesh: " << mesh.n_elements() << " elements, " << mesh.n_nodes()
            << " nodes -> " << path << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual hydrogen-assisted fatigue crack growth experiments"};
  app.require_subcommand(1);

  std::string config_path, csv_path, mesh_out;
  std::vector<std::string> axis_specs;
  std::vector<double> fit_window;

  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", config_path, "JSON config")->required();

  auto* sweep = app.add_subcommand("sweep", "expand axes (p_H2, R, f) into runs");
  sweep->add_option("config", config_path, "JSON config")->required();
  sweep->add_option("axes", axis_specs, "axis specs like f=0.001,0.1,1,100")
      ->required();

  auto* post = app.add_subcommand("postprocess", "fit Paris parameters from a table");
  post->add_option("record", csv_path, "results CSV")->required();
  post->add_option("--fit-window", fit_window, "deltaK window lo hi [MPa sqrt(m)]")
      ->expected(2);

  auto* exportm = app.add_subcommand("export-mesh", "write the mesh as legacy VTK");
  exportm->add_option("config", config_path, "JSON config")->required();
  exportm->add_option("-o,--output", mesh_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path);
    if (app.got_subcommand(sweep)) return cmd_sweep(config_path, axis_specs);
    if (app.got_subcommand(post))
      return cmd_postprocess(csv_path, fit_window.size() == 2 ? fit_window[0] : 0,
                             fit_window.size() == 2 ? fit_window[1] : 0);
    if (app.got_subcommand(exportm)) return cmd_export_mesh(config_path, mesh_out);
  } catch (const hafcg::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
