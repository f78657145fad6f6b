// Command-line entry point: run a benchmark case, compare finished runs,
// or preview a mesh.
#include "phasefrac/bench.hpp"
#include "phasefrac/config.hpp"
#include "phasefrac/run_log.hpp"
#include "phasefrac/vtk.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace pf = phasefrac;

namespace {

pf::RunSpec resolve_spec(const std::string& config, const std::string& case_name) {
  pf::RunSpec spec = config.empty() ? pf::preset(pf::parse_case(case_name.empty() ? "sent" : case_name))
                                    : pf::load_config(config);
  if (!config.empty() && !case_name.empty() && pf::parse_case(case_name) != spec.kind)
    throw pf::ConfigError("--case " + case_name + " contradicts the case in " + config);
  return spec;
}

int cmd_run(const std::string& config, const std::string& case_name, const std::string& scheme,
            int increments, const std::string& adaptive, double refine, const std::string& out,
            const std::vector<std::string>& sets, bool verbose) {
  pf::RunSpec spec = resolve_spec(config, case_name);
  if (!scheme.empty()) pf::apply_setting(spec, "scheme", scheme);
  if (increments > 0) {
    if (spec.kind == pf::CaseKind::Fatigue)
      spec.increments_per_cycle = increments;
    else
      spec.increments = increments;
  }
  if (!adaptive.empty()) pf::apply_setting(spec, "adaptive", adaptive);
  if (refine > 0) spec.refine = refine;
  if (!out.empty()) spec.out_dir = out;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw pf::ConfigError("--set expects key=value, got '" + kv + "'");
    pf::apply_setting(spec, kv.substr(0, eq), kv.substr(eq + 1));
  }
  spec.validate();

  pf::CaseResult r = pf::run_case(spec, true, verbose);
  const auto& log = r.run.log;
  std::printf("case %s, scheme %s, %d dofs\n", pf::to_string(spec.kind).c_str(),
              pf::to_string(spec.solver.scheme).c_str(), r.num_dofs);
  std::printf("increments %zu, cumulative iterations %lld, wall %.2f s\n", log.records.size(),
              log.cum_iterations(), r.run.wall_seconds);
  if (spec.kind == pf::CaseKind::Fatigue)
    std::printf("cycles to failure %d\n", r.cycles_to_failure);
  else if (spec.kind == pf::CaseKind::Dynamic)
    std::printf("crack branches upper %d lower %d, energy bounded %s\n", r.branches_upper,
                r.branches_lower, r.energy_bounded ? "yes" : "no");
  else
    std::printf("peak force %.6g N at u = %.6g mm\n", log.peak_reaction(), log.critical_displacement());
  if (r.run.adaptive_restarts > 0)
    std::printf("adaptive reduction at increment %d: dt %.4g -> %.4g\n", r.run.restart_increment,
                r.run.dt_before_restart, r.run.dt_after_restart);
  std::printf("outputs in %s\n", spec.out_dir.c_str());
  if (!r.run.completed) {
    std::fprintf(stderr, "run aborted: %s\n", r.run.abort_reason.c_str());
    return 2;
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& csv) {
  pf::ComparisonReport rep = pf::compare_run_dirs(dirs);
  std::cout << rep.text();
  if (!csv.empty()) {
    std::ofstream os(csv);
    if (!os) throw std::runtime_error("cannot write " + csv);
    os << rep.csv();
  }
  return 0;
}

int cmd_mesh(const std::string& config, const std::string& case_name, const std::string& out) {
  pf::RunSpec spec = resolve_spec(config, case_name);
  pf::Mesh mesh = pf::build_mesh(spec);
  const std::string path = out.empty() ? "mesh_preview.vtk" : out;
  if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
    std::filesystem::create_directories(parent);
  pf::write_mesh_vtk(path, mesh);
  std::printf("%d nodes, %d elements, %d dofs -> %s\n", mesh.num_nodes(), mesh.num_elements(),
              3 * mesh.num_nodes(), path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field fracture benchmarks with monolithic BFGS and staggered solvers"};
  app.require_subcommand(1);

  std::string config, case_name, scheme, adaptive, out;
  int increments = 0;
  double refine = 0.0;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "run a benchmark case");
  run->add_option("--case", case_name, "sent | shear | fatigue | dynamic | custom");
  run->add_option("--config", config, "YAML config file")->check(CLI::ExistingFile);
  run->add_option("--scheme", scheme, "monolithic-bfgs | monolithic-newton | staggered");
  run->add_option("--increments", increments, "reference increments (per cycle for fatigue)");
  run->add_option("--adaptive", adaptive, "on | off");
  run->add_option("--refine", refine, "ell / he inside the refinement band");
  run->add_option("--out", out, "output directory");
  run->add_option("--set", sets, "extra key=value overrides");
  bool verbose = false;
  run->add_flag("-v,--verbose", verbose, "print every increment attempt");

  std::vector<std::string> dirs;
  std::string csv;
  auto* cmp = app.add_subcommand("compare", "compare finished runs");
  cmp->add_option("--runs", dirs, "run output directories")->required()->expected(2, -1);
  cmp->add_option("--csv", csv, "also write the report as CSV");

  std::string preview;
  auto* mesh = app.add_subcommand("mesh", "write the mesh of a config as VTK");
  mesh->add_option("--preview", preview, "config file")->check(CLI::ExistingFile);
  mesh->add_option("--case", case_name, "preset case when no config is given");
  mesh->add_option("--out", out, "output VTK path");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, case_name, scheme, increments, adaptive, refine, out, sets, verbose);
    if (*cmp) return cmd_compare(dirs, csv);
    if (*mesh) return cmd_mesh(preview, case_name, out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
