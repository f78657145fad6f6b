#pragma once

#include "phasefrac/fem.hpp"
#include "phasefrac/fatigue.hpp"
#include "phasefrac/mesh.hpp"
#include "phasefrac/solvers.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasefrac {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class CaseKind { Sent, Shear, Fatigue, Dynamic, Custom };

CaseKind parse_case(const std::string& name);
std::string to_string(CaseKind kind);

/// Complete description of one run. Lengths in mm, stresses in MPa, Gc in
/// N/mm, density in tonne/mm^3, times in s (dynamic) or pseudo-time.
struct RunSpec {
  CaseKind kind = CaseKind::Sent;

  // geometry and mesh
  double width = 1.0;
  double height = 1.0;
  double he = 0.05;          // coarse element size
  double refine = 2.0;       // ell / he inside the refinement band; 0 disables the band
  double band_x0 = 0.45, band_x1 = 1.0, band_y0 = 0.44, band_y1 = 0.56;
  int order = 1;
  double notch_x0 = 0.0, notch_x1 = 0.5, notch_y = 0.5;
  NotchRepresentation notch = NotchRepresentation::DuplicatedNodes;

  // material
  MaterialParams material;
  Split split = Split::VolumetricDeviatoric;

  // solver
  SolverConfig solver;
  bool adaptive = true;
  int increments = 20;        // reference increment count of the ramp
  double u_max = 7e-3;        // ramp end, mm

  // fatigue
  FatigueParams fatigue;
  double amplitude = 0.002;
  double load_ratio = -1.0;
  int increments_per_cycle = 4;
  int max_cycles = 200;
  double failure_fraction = 0.9;  // of the ligament length

  // dynamics
  double traction = 1.0;      // MPa
  double dt = 0.0;            // s, 0 picks he / v_r
  double total_time = 80e-6;  // s
  int snapshot_every = 25;

  std::string out_dir = "out";
  bool write_vtk = true;

  /// Element size inside the band (or he without a band).
  double fine_he() const { return refine > 0.0 ? material.ell / refine : he; }
  /// Throws ConfigError listing every violated constraint.
  void validate() const;
};

/// Preset values of a benchmark case.
RunSpec preset(CaseKind kind);

/// Applies "key: value" overrides from a YAML mapping on top of the preset
/// named by its `case` key (default sent). Unknown keys are errors.
RunSpec load_config(const std::string& path);
RunSpec parse_config(const std::string& text, const std::string& source = "<string>");

/// Applies a single override; used by the CLI and by the loader.
void apply_setting(RunSpec& spec, const std::string& key, const std::string& value);

/// Keys accepted by the loader, in documentation order.
std::vector<std::string> config_keys();

/// Writes the spec back as a config document that load_config accepts.
std::string dump_config(const RunSpec& spec);

}  // namespace phasefrac
