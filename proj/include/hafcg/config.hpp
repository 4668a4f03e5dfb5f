#pragma once

// On-disk configuration: a JSON file of nested blocks with fixed keys.
// Unknown keys are rejected, all defaults resolve to the reference material
// and test setup, and the fully resolved configuration can be echoed back
// out (and re-parsed bit-identically) for provenance.

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hafcg/driver.hpp"
#include "hafcg/experiment.hpp"
#include "hafcg/mesh.hpp"
#include "hafcg/params.hpp"

namespace hafcg {

struct OutputConfig {
  std::string dir = "out";
  std::string csv = "record.csv";
  int vtk_every_cycles = 0; // 0 disables snapshots
  double delta_a_log = 0.1; // [mm]
  bool write_resolved_config = true;
  bool checkpoint_at_end = false;
  double fit_window_lo = 0; // [MPa sqrt(m)], 0 = unbounded
  double fit_window_hi = 0;
};

struct ExperimentConfig {
  MaterialParams material = MaterialParams::from_strength(210000.0, 0.3, 100.0, 2860.0);
  bool plane_stress = false;
  FatigueParams fatigue;
  HydrogenParams hydrogen;
  CTGeometry geometry;
  MeshControls mesh;
  LoadProgram program;
  double delta_K0 = 10.0;      // [MPa sqrt(m)]; sets dP from a0 when dP absent
  double delta_P_full = 0.0;   // [N] full specimen load range
  double a_limit_over_W = 0.7; // stop criterion
  double pin_patch_radius = 0; // [mm]; 0 = single-node pin load
  SolverControls solver;
  CoeffSet coeff_set = CoeffSet::astm;
  OutputConfig output;

  /// Pin load range per unit thickness [N/mm] at crack length a.
  double delta_P_per_thickness(double a) const {
    if (delta_P_full > 0) return delta_P_full / geometry.B;
    return delta_K0 * units::mpa_sqrt_m * std::sqrt(geometry.W) /
           ct_geometry_factor(a / geometry.W, coeff_set);
  }

  void validate() const {
    material.validate();
    fatigue.validate();
    hydrogen.validate();
    geometry.validate();
    program.validate();
    if (delta_K0 <= 0 && delta_P_full <= 0)
      throw ConfigError("load: need delta_K0_MPa_sqrt_m > 0 or delta_P_N > 0");
    if (a_limit_over_W <= geometry.a0 / geometry.W || a_limit_over_W >= 1.0)
      throw ConfigError("load: a_limit_over_W must be in (a0/W, 1)");
    if (output.delta_a_log <= 0)
      throw ConfigError("output: delta_a_log_mm must be > 0");
  }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& block,
                       const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key '" + it.key() + "' in block '" +
                        block + "'");
}

template <class T>
void get_to(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) obj.at(key).get_to(out);
}

inline void parse_material(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "material",
             {"E_MPa", "nu", "Gc0_N_per_mm", "sigma_c_MPa", "ell_mm",
              "plane_stress"});
  double E = cfg.material.E, nu = cfg.material.nu, Gc0 = cfg.material.Gc0;
  get_to(j, "E_MPa", E);
  get_to(j, "nu", nu);
  get_to(j, "Gc0_N_per_mm", Gc0);
  std::optional<double> sigma_c, ell;
  if (j.contains("sigma_c_MPa")) sigma_c = j.at("sigma_c_MPa").get<double>();
  if (j.contains("ell_mm")) ell = j.at("ell_mm").get<double>();
  if (sigma_c && ell)
    throw ConfigError("material: give sigma_c_MPa or ell_mm, not both");
  if (ell)
    cfg.material = MaterialParams::from_length_scale(E, nu, Gc0, *ell);
  else
    cfg.material = MaterialParams::from_strength(E, nu, Gc0,
                                                 sigma_c.value_or(2860.0));
  get_to(j, "plane_stress", cfg.plane_stress);
}

inline void parse_fatigue(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "fatigue",
             {"n", "kappa", "alpha_bar_0_N_per_mm2", "alpha_e_N_per_mm2",
              "n_hydrogen_override"});
  get_to(j, "n", cfg.fatigue.n);
  get_to(j, "kappa", cfg.fatigue.kappa);
  get_to(j, "alpha_bar_0_N_per_mm2", cfg.fatigue.alpha_bar_0);
  get_to(j, "alpha_e_N_per_mm2", cfg.fatigue.alpha_e);
  if (j.contains("n_hydrogen_override") && !j.at("n_hydrogen_override").is_null())
    cfg.fatigue.n_hydrogen_override = j.at("n_hydrogen_override").get<double>();
}

inline void parse_hydrogen(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "hydrogen",
             {"D_mm2_per_s", "V_H_mm3_per_mol", "T_K", "S_wppm_per_sqrt_MPa",
              "xi", "eta", "b"});
  get_to(j, "D_mm2_per_s", cfg.hydrogen.D);
  get_to(j, "V_H_mm3_per_mol", cfg.hydrogen.V_H);
  get_to(j, "T_K", cfg.hydrogen.T);
  get_to(j, "S_wppm_per_sqrt_MPa", cfg.hydrogen.S);
  get_to(j, "xi", cfg.hydrogen.xi);
  get_to(j, "eta", cfg.hydrogen.eta);
  get_to(j, "b", cfg.hydrogen.b);
}

inline void parse_geometry(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "geometry",
             {"W_mm", "B_mm", "a0_mm", "front_offset_mm", "half_height_mm",
              "pin_x_mm", "pin_y_mm", "band_halfheight_mm"});
  get_to(j, "W_mm", cfg.geometry.W);
  get_to(j, "B_mm", cfg.geometry.B);
  get_to(j, "a0_mm", cfg.geometry.a0);
  get_to(j, "front_offset_mm", cfg.geometry.front_offset);
  get_to(j, "half_height_mm", cfg.geometry.half_height);
  get_to(j, "pin_x_mm", cfg.geometry.pin_x);
  get_to(j, "pin_y_mm", cfg.geometry.pin_y);
  get_to(j, "band_halfheight_mm", cfg.geometry.band_halfheight);
}

inline void parse_mesh(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "mesh",
             {"h_band_mm", "band_rows", "grading_ratio", "coarse_h_max_mm",
              "band_lead_mm"});
  get_to(j, "h_band_mm", cfg.mesh.h_band);
  get_to(j, "band_rows", cfg.mesh.band_rows);
  get_to(j, "grading_ratio", cfg.mesh.grading_ratio);
  get_to(j, "coarse_h_max_mm", cfg.mesh.coarse_h_max);
  get_to(j, "band_lead_mm", cfg.mesh.band_lead);
}

inline void parse_load(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "load",
             {"delta_K0_MPa_sqrt_m", "delta_P_N", "R", "f_Hz", "waveform",
              "increments_per_cycle", "max_cycles", "cycle_jump", "soak_s",
              "precharged", "p_H2_MPa", "control", "delta_K_target_MPa_sqrt_m",
              "a_limit_over_W", "pin_patch_radius_mm"});
  get_to(j, "delta_K0_MPa_sqrt_m", cfg.delta_K0);
  get_to(j, "delta_P_N", cfg.delta_P_full);
  get_to(j, "R", cfg.program.R);
  get_to(j, "f_Hz", cfg.program.f);
  if (j.contains("waveform")) {
    const std::string w = j.at("waveform").get<std::string>();
    if (w == "sinusoidal")
      cfg.program.waveform = Waveform::sinusoidal;
    else if (w == "triangular")
      cfg.program.waveform = Waveform::triangular;
    else
      throw ConfigError("load: waveform must be 'sinusoidal' or 'triangular'");
  }
  get_to(j, "increments_per_cycle", cfg.program.increments_per_cycle);
  get_to(j, "max_cycles", cfg.program.max_cycles);
  get_to(j, "cycle_jump", cfg.program.cycle_jump);
  get_to(j, "soak_s", cfg.program.soak_s);
  get_to(j, "precharged", cfg.program.precharged);
  get_to(j, "p_H2_MPa", cfg.program.p_H2);
  if (j.contains("control")) {
    const std::string c = j.at("control").get<std::string>();
    if (c == "constant_dP")
      cfg.program.control = LoadControl::constant_dP;
    else if (c == "constant_dK")
      cfg.program.control = LoadControl::constant_dK;
    else
      throw ConfigError("load: control must be 'constant_dP' or 'constant_dK'");
  }
  get_to(j, "delta_K_target_MPa_sqrt_m", cfg.program.deltaK_target);
  get_to(j, "a_limit_over_W", cfg.a_limit_over_W);
  get_to(j, "pin_patch_radius_mm", cfg.pin_patch_radius);
}

inline void parse_solver(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "solver",
             {"stagger_tol", "stagger_max_iter", "k_res",
              "alpha_from_degraded_energy", "damaged_sigma_h", "phi_exposure",
              "penalty_scale", "stabilization", "boundary_ramp_s",
              "jump_transport_substeps", "check_invariants", "coefficient_set"});
  get_to(j, "stagger_tol", cfg.solver.stagger_tol);
  get_to(j, "stagger_max_iter", cfg.solver.stagger_max_iter);
  get_to(j, "k_res", cfg.solver.k_res);
  get_to(j, "alpha_from_degraded_energy", cfg.solver.alpha_from_degraded_energy);
  get_to(j, "damaged_sigma_h", cfg.solver.damaged_sigma_h);
  get_to(j, "phi_exposure", cfg.solver.transport.phi_exposure);
  get_to(j, "penalty_scale", cfg.solver.transport.penalty_scale);
  get_to(j, "stabilization", cfg.solver.transport.stabilization);
  get_to(j, "boundary_ramp_s", cfg.solver.transport.boundary_ramp_s);
  get_to(j, "jump_transport_substeps", cfg.solver.jump_transport_substeps);
  get_to(j, "check_invariants", cfg.solver.check_invariants);
  if (j.contains("coefficient_set")) {
    const std::string c = j.at("coefficient_set").get<std::string>();
    if (c == "astm")
      cfg.coeff_set = CoeffSet::astm;
    else if (c == "paper_as_written")
      cfg.coeff_set = CoeffSet::paper_as_written;
    else
      throw ConfigError("solver: coefficient_set must be 'astm' or 'paper_as_written'");
  }
}

inline void parse_output(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "output",
             {"dir", "csv", "vtk_every_cycles", "delta_a_log_mm",
              "write_resolved_config", "checkpoint_at_end",
              "fit_window_lo_MPa_sqrt_m", "fit_window_hi_MPa_sqrt_m"});
  get_to(j, "dir", cfg.output.dir);
  get_to(j, "csv", cfg.output.csv);
  get_to(j, "vtk_every_cycles", cfg.output.vtk_every_cycles);
  get_to(j, "delta_a_log_mm", cfg.output.delta_a_log);
  get_to(j, "write_resolved_config", cfg.output.write_resolved_config);
  get_to(j, "checkpoint_at_end", cfg.output.checkpoint_at_end);
  get_to(j, "fit_window_lo_MPa_sqrt_m", cfg.output.fit_window_lo);
  get_to(j, "fit_window_hi_MPa_sqrt_m", cfg.output.fit_window_hi);
}

} // namespace detail

/// Parse a configuration from JSON text; an empty document resolves to the
/// all-defaults configuration.
inline ExperimentConfig parse_config_text(const std::string& text) {
  using nlohmann::json;
  json j;
  const auto non_space = text.find_first_not_of(" \t\r\n");
  if (non_space == std::string::npos) {
    j = json::object();
  } else {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::check_keys(j, "<top>", {"material", "fatigue", "hydrogen", "geometry",
                                  "mesh", "load", "solver", "output"});
  ExperimentConfig cfg;
  try {
    if (j.contains("material")) detail::parse_material(j.at("material"), cfg);
    if (j.contains("fatigue")) detail::parse_fatigue(j.at("fatigue"), cfg);
    if (j.contains("hydrogen")) detail::parse_hydrogen(j.at("hydrogen"), cfg);
    if (j.contains("geometry")) detail::parse_geometry(j.at("geometry"), cfg);
    if (j.contains("mesh")) detail::parse_mesh(j.at("mesh"), cfg);
    if (j.contains("load")) detail::parse_load(j.at("load"), cfg);
    if (j.contains("solver")) detail::parse_solver(j.at("solver"), cfg);
    if (j.contains("output")) detail::parse_output(j.at("output"), cfg);
    cfg.fatigue.alpha_n = cfg.material.alpha_n();
    cfg.validate();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

/// Fully resolved configuration as JSON; parse_config_text of this text
/// reproduces the configuration exactly.
inline std::string echo_config(const ExperimentConfig& cfg) {
  using nlohmann::json;
  json j;
  j["material"] = {{"E_MPa", cfg.material.E},
                   {"nu", cfg.material.nu},
                   {"Gc0_N_per_mm", cfg.material.Gc0},
                   {"ell_mm", cfg.material.ell},
                   {"plane_stress", cfg.plane_stress}};
  json fat = {{"n", cfg.fatigue.n},
              {"kappa", cfg.fatigue.kappa},
              {"alpha_bar_0_N_per_mm2", cfg.fatigue.alpha_bar_0},
              {"alpha_e_N_per_mm2", cfg.fatigue.alpha_e}};
  if (cfg.fatigue.n_hydrogen_override)
    fat["n_hydrogen_override"] = *cfg.fatigue.n_hydrogen_override;
  j["fatigue"] = fat;
  j["hydrogen"] = {{"D_mm2_per_s", cfg.hydrogen.D},
                   {"V_H_mm3_per_mol", cfg.hydrogen.V_H},
                   {"T_K", cfg.hydrogen.T},
                   {"S_wppm_per_sqrt_MPa", cfg.hydrogen.S},
                   {"xi", cfg.hydrogen.xi},
                   {"eta", cfg.hydrogen.eta},
                   {"b", cfg.hydrogen.b}};
  j["geometry"] = {{"W_mm", cfg.geometry.W},
                   {"B_mm", cfg.geometry.B},
                   {"a0_mm", cfg.geometry.a0},
                   {"front_offset_mm", cfg.geometry.front_offset},
                   {"half_height_mm", cfg.geometry.half_height},
                   {"pin_x_mm", cfg.geometry.pin_x},
                   {"pin_y_mm", cfg.geometry.pin_y},
                   {"band_halfheight_mm", cfg.geometry.band_halfheight}};
  j["mesh"] = {{"h_band_mm", cfg.mesh.h_band},
               {"band_rows", cfg.mesh.band_rows},
               {"grading_ratio", cfg.mesh.grading_ratio},
               {"coarse_h_max_mm", cfg.mesh.coarse_h_max},
               {"band_lead_mm", cfg.mesh.band_lead}};
  j["load"] = {{"delta_K0_MPa_sqrt_m", cfg.delta_K0},
               {"delta_P_N", cfg.delta_P_full},
               {"R", cfg.program.R},
               {"f_Hz", cfg.program.f},
               {"waveform", cfg.program.waveform == Waveform::sinusoidal
                                ? "sinusoidal"
                                : "triangular"},
               {"increments_per_cycle", cfg.program.increments_per_cycle},
               {"max_cycles", cfg.program.max_cycles},
               {"cycle_jump", cfg.program.cycle_jump},
               {"soak_s", cfg.program.soak_s},
               {"precharged", cfg.program.precharged},
               {"p_H2_MPa", cfg.program.p_H2},
               {"control", cfg.program.control == LoadControl::constant_dP
                               ? "constant_dP"
                               : "constant_dK"},
               {"delta_K_target_MPa_sqrt_m", cfg.program.deltaK_target},
               {"a_limit_over_W", cfg.a_limit_over_W},
               {"pin_patch_radius_mm", cfg.pin_patch_radius}};
  j["solver"] = {{"stagger_tol", cfg.solver.stagger_tol},
                 {"stagger_max_iter", cfg.solver.stagger_max_iter},
                 {"k_res", cfg.solver.k_res},
                 {"alpha_from_degraded_energy", cfg.solver.alpha_from_degraded_energy},
                 {"damaged_sigma_h", cfg.solver.damaged_sigma_h},
                 {"phi_exposure", cfg.solver.transport.phi_exposure},
                 {"penalty_scale", cfg.solver.transport.penalty_scale},
                 {"stabilization", cfg.solver.transport.stabilization},
                 {"boundary_ramp_s", cfg.solver.transport.boundary_ramp_s},
                 {"jump_transport_substeps", cfg.solver.jump_transport_substeps},
                 {"check_invariants", cfg.solver.check_invariants},
                 {"coefficient_set", coeff_set_name(cfg.coeff_set)}};
  j["output"] = {{"dir", cfg.output.dir},
                 {"csv", cfg.output.csv},
                 {"vtk_every_cycles", cfg.output.vtk_every_cycles},
                 {"delta_a_log_mm", cfg.output.delta_a_log},
                 {"write_resolved_config", cfg.output.write_resolved_config},
                 {"checkpoint_at_end", cfg.output.checkpoint_at_end},
                 {"fit_window_lo_MPa_sqrt_m", cfg.output.fit_window_lo},
                 {"fit_window_hi_MPa_sqrt_m", cfg.output.fit_window_hi}};
  return j.dump(2);
}

} // namespace hafcg
