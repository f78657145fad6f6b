#include "phasefrac/bench.hpp"

#include "phasefrac/run_log.hpp"
#include "phasefrac/vtk.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace phasefrac {

namespace fs = std::filesystem;

Mesh build_mesh(const RunSpec& s) {
  std::optional<RefinementBand> band;
  if (s.refine > 0.0) band = RefinementBand{s.band_x0, s.band_x1, s.band_y0, s.band_y1, s.fine_he()};
  NotchSpec notch{{s.notch_x0, s.notch_y}, {s.notch_x1, s.notch_y}, s.notch};
  return generate_structured_quad_mesh(s.width, s.height, s.he, notch, s.order, band);
}

std::unique_ptr<Problem> build_problem(const RunSpec& s) {
  s.validate();
  Mesh mesh = build_mesh(s);
  std::vector<DirichletSpec> bcs;
  const double tol = 1e-9 * std::max(s.width, s.height);

  switch (s.kind) {
    case CaseKind::Sent:
    case CaseKind::Fatigue:
    case CaseKind::Custom: {
      const double u = s.kind == CaseKind::Fatigue ? s.amplitude : s.u_max;
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementX, "bottom", 0.0));
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementY, "bottom", 0.0));
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementX, "top", 0.0));
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementY, "top", u, true));
      break;
    }
    case CaseKind::Shear:
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementX, "bottom", 0.0));
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementY, "bottom", 0.0));
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementY, "left", 0.0));
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementY, "right", 0.0));
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementY, "top", 0.0));
      bcs.push_back(make_dirichlet(mesh, Field::DisplacementX, "top", s.u_max, true));
      break;
    case CaseKind::Dynamic:
      break;  // traction loaded, inertia removes the rigid body modes
  }
  NotchSpec notch{{s.notch_x0, s.notch_y}, {s.notch_x1, s.notch_y}, s.notch};
  if (s.notch == NotchRepresentation::PhaseFieldPrescribed) {
    DirichletSpec crack = prescribe_initial_crack(mesh, notch);
    mesh.node_sets[crack.node_set] = crack.nodes;
    bcs.push_back(std::move(crack));
  }

  Ligament lig;
  lig.tip = {s.notch_x1, s.notch_y};
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const auto& p = mesh.nodes[n];
    if (p.x < s.notch_x1 - tol) continue;
    const bool on_line = std::abs(p.y - s.notch_y) <= tol;
    if (s.kind == CaseKind::Sent || s.kind == CaseKind::Fatigue || s.kind == CaseKind::Custom) {
      if (on_line) lig.nodes.push_back(n);
    } else {
      lig.nodes.push_back(n);
    }
  }

  std::vector<int> top = mesh.node_set("top");
  std::vector<int> bottom = mesh.node_set("bottom");
  auto p = std::make_unique<Problem>(std::move(mesh), s.material, s.split, std::move(bcs));
  p->ligament = std::move(lig);
  if (s.kind == CaseKind::Dynamic) {
    p->external = edge_traction_forces(p->mesh(), top, 0.0, s.traction) +
                  edge_traction_forces(p->mesh(), bottom, 0.0, -s.traction);
    p->reaction_nodes = top;
    p->reaction_component = 1;
  } else {
    p->reaction_nodes = top;
    p->reaction_component = s.kind == CaseKind::Shear ? 0 : 1;
    p->control_displacement = s.kind == CaseKind::Fatigue ? s.amplitude : s.u_max;
  }
  return p;
}

LoadProgram build_ramp(const RunSpec& s) {
  LoadProgram lp;
  lp.t_end = 1.0;
  lp.dt_ref = 1.0 / s.increments;
  return lp;
}

RunOptions build_options(const RunSpec& s) {
  RunOptions o;
  o.solver = s.solver;
  o.adaptive.enabled = s.adaptive && s.kind != CaseKind::Dynamic && s.kind != CaseKind::Fatigue;
  return o;
}

CyclicProgram build_cyclic(const RunSpec& s) {
  CyclicProgram c;
  c.amplitude = s.amplitude;
  c.load_ratio = s.load_ratio;
  c.increments_per_cycle = s.increments_per_cycle;
  c.max_cycles = s.max_cycles;
  c.failure_crack_length = s.failure_fraction * (s.width - s.notch_x1);
  return c;
}

DynamicProgram build_dynamic(const RunSpec& s, const Problem& p) {
  DynamicProgram d;
  d.dt = s.dt > 0.0 ? s.dt : p.mesh().min_element_size() / rayleigh_wave_speed(s.material);
  d.total_time = s.total_time;
  d.snapshot_every = s.snapshot_every;
  if (s.write_vtk) d.snapshot_dir = (fs::path(s.out_dir) / "snapshots").string();
  return d;
}

std::string mesh_signature(const RunSpec& s, const Problem& p) {
  std::ostringstream os;
  os << to_string(s.kind) << " order=" << s.order << " nodes=" << p.mesh().num_nodes()
     << " elements=" << p.mesh().num_elements() << " dofs=" << 3 * p.mesh().num_nodes()
     << " he=" << format_double(s.fine_he());
  return os.str();
}

CaseResult run_case(const RunSpec& spec, bool write_outputs, bool verbose) {
  CaseResult out;
  out.spec = spec;
  std::unique_ptr<Problem> problem = build_problem(spec);
  const Problem& p = *problem;
  out.num_dofs = 3 * p.mesh().num_nodes();
  out.signature = mesh_signature(spec, p);
  if (write_outputs) fs::create_directories(spec.out_dir);

  RunOptions opt = build_options(spec);
  opt.verbose = verbose;
  opt.observer = [&out](const IncrementEvent& ev) {
    for (std::size_t i = 0; i < ev.after->ip.size(); ++i)
      if (ev.after->ip[i].H < ev.before->ip[i].H) ++out.history_violations;
  };

  switch (spec.kind) {
    case CaseKind::Fatigue: {
      CyclicResult r = run_cyclic_program(p, build_cyclic(spec), spec.fatigue, opt);
      out.run = std::move(r.run);
      out.curve = std::move(r.curve);
      out.cycles_to_failure = r.cycles_to_failure;
      break;
    }
    case CaseKind::Dynamic: {
      DynamicProgram dp = build_dynamic(spec, p);
      if (!write_outputs) dp.snapshot_dir.clear();
      DynamicResult r = run_dynamic_program(p, dp, opt);
      if (!r.warning.empty()) std::fprintf(stderr, "warning: %s\n", r.warning.c_str());
      out.run = std::move(r.run);
      out.energy = std::move(r.energy);
      out.energy_bounded = r.energy_bounded;
      out.files = std::move(r.snapshots);
      const double offset = 4.0 * spec.material.ell;
      std::tie(out.branches_upper, out.branches_lower) =
          count_crack_branches(p.mesh(), out.run.final_state.phi, spec.notch_y, offset);
      break;
    }
    default:
      out.run = run_load_program(p, build_ramp(spec), opt, p.initial_state());
      break;
  }

  if (write_outputs) {
    const fs::path dir(spec.out_dir);
    auto add = [&](const fs::path& f) { out.files.push_back(f.string()); };
    out.run.log.write_csv((dir / "run_log.csv").string());
    add(dir / "run_log.csv");
    {
      std::ofstream os(dir / "force_displacement.csv");
      os << "u_applied_mm,reaction_N\n0,0\n";
      for (const auto& r : out.run.log.records)
        os << format_double(r.u_applied_mm) << ',' << format_double(r.reaction_N) << '\n';
      add(dir / "force_displacement.csv");
    }
    {
      std::ofstream os(dir / "iterations.csv");
      os << "increment,time,dt,iterations,cum_iterations\n";
      for (const auto& r : out.run.log.records)
        os << r.increment << ',' << format_double(r.time) << ',' << format_double(r.dt) << ','
           << r.iterations << ',' << r.cum_iterations << '\n';
      add(dir / "iterations.csv");
    }
    if (spec.kind == CaseKind::Fatigue) {
      write_an_csv((dir / "a_N.csv").string(), out.curve);
      add(dir / "a_N.csv");
    }
    if (spec.kind == CaseKind::Dynamic) {
      std::ofstream os(dir / "energy.csv");
      os << "increment,time,kinetic,strain,external_work\n";
      for (const auto& e : out.energy)
        os << e.increment << ',' << format_double(e.time) << ',' << format_double(e.kinetic) << ','
           << format_double(e.strain) << ',' << format_double(e.external_work) << '\n';
      add(dir / "energy.csv");
    }
    if (spec.write_vtk) {
      const SolutionState& s = out.run.final_state;
      std::vector<double> H(s.ip.size());
      for (std::size_t i = 0; i < H.size(); ++i) H[i] = s.ip[i].H;
      write_vtk((dir / "final.vtk").string(), p.mesh(), s.u, s.phi, p.assembler().element_mean(H));
      add(dir / "final.vtk");
    }
    {
      std::ofstream os(dir / "config.yaml");
      os << dump_config(spec);
      add(dir / "config.yaml");
    }
    write_summary((dir / "summary.json").string(), summarize(out, spec.out_dir));
    add(dir / "summary.json");
  }
  return out;
}

RunSummary summarize(const CaseResult& r, const std::string& dir) {
  RunSummary s;
  s.dir = dir;
  s.case_name = to_string(r.spec.kind);
  s.scheme = to_string(r.spec.solver.scheme);
  s.signature = r.signature;
  s.increments = static_cast<int>(r.run.log.records.size());
  s.cum_iterations = r.run.log.cum_iterations();
  s.wall_seconds = r.run.wall_seconds;
  s.peak_force = r.run.log.peak_reaction();
  s.critical_displacement = r.run.log.critical_displacement();
  s.final_crack_length = r.run.log.records.empty() ? 0.0 : r.run.log.records.back().crack_length_mm;
  s.completed = r.run.completed;
  return s;
}

void write_summary(const std::string& path, const RunSummary& s) {
  nlohmann::json j = {{"case", s.case_name},
                      {"scheme", s.scheme},
                      {"signature", s.signature},
                      {"increments", s.increments},
                      {"cum_iterations", s.cum_iterations},
                      {"wall_seconds", s.wall_seconds},
                      {"peak_force_N", s.peak_force},
                      {"critical_displacement_mm", s.critical_displacement},
                      {"final_crack_length_mm", s.final_crack_length},
                      {"completed", s.completed}};
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << '\n';
}

RunSummary read_summary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  RunSummary s;
  s.dir = fs::path(path).parent_path().string();
  s.case_name = j.at("case").get<std::string>();
  s.scheme = j.at("scheme").get<std::string>();
  s.signature = j.at("signature").get<std::string>();
  s.increments = j.at("increments").get<int>();
  s.cum_iterations = j.at("cum_iterations").get<long long>();
  s.wall_seconds = j.at("wall_seconds").get<double>();
  s.peak_force = j.at("peak_force_N").get<double>();
  s.critical_displacement = j.at("critical_displacement_mm").get<double>();
  s.final_crack_length = j.at("final_crack_length_mm").get<double>();
  s.completed = j.at("completed").get<bool>();
  return s;
}

ComparisonReport compare_schemes(const std::vector<RunSummary>& runs) {
  if (runs.size() < 2) throw std::invalid_argument("comparison needs at least two runs");
  for (const auto& r : runs) {
    if (r.case_name != runs.front().case_name)
      throw std::invalid_argument("runs belong to different cases: " + runs.front().case_name +
                                  " vs " + r.case_name);
    if (r.signature != runs.front().signature)
      throw std::invalid_argument("runs use different meshes: '" + runs.front().signature +
                                  "' vs '" + r.signature + "'");
  }
  ComparisonReport rep;
  rep.runs = runs;
  const auto& base = runs.front();
  for (const auto& r : runs) {
    rep.iteration_ratio.push_back(r.cum_iterations > 0
                                      ? static_cast<double>(base.cum_iterations) / r.cum_iterations
                                      : 0.0);
    rep.time_ratio.push_back(r.wall_seconds > 0 ? base.wall_seconds / r.wall_seconds : 0.0);
  }
  return rep;
}

ComparisonReport compare_run_dirs(const std::vector<std::string>& dirs) {
  std::vector<RunSummary> runs;
  for (const auto& d : dirs) runs.push_back(read_summary((fs::path(d) / "summary.json").string()));
  return compare_schemes(runs);
}

std::string ComparisonReport::text() const {
  std::ostringstream os;
  os << "case: " << runs.front().case_name << "\nmesh: " << runs.front().signature << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-18s %6s %10s %10s %12s %12s %10s %9s %9s\n", "run",
                "scheme", "incs", "cum_iter", "wall_s", "peak_N", "u_crit_mm", "a_mm",
                "iter_x", "time_x");
  os << line;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    std::string name = fs::path(r.dir).filename().string();
    if (name.empty()) name = "run" + std::to_string(i);
    std::snprintf(line, sizeof line,
                  "%-24s %-18s %6d %10lld %10.2f %12.5g %12.5g %10.4g %9.3g %9.3g\n",
                  name.c_str(), r.scheme.c_str(), r.increments, r.cum_iterations, r.wall_seconds,
                  r.peak_force, r.critical_displacement, r.final_crack_length, iteration_ratio[i],
                  time_ratio[i]);
    os << line;
  }
  os << "\niter_x and time_x are the first run's cost divided by each run's cost.\n";
  return os.str();
}

std::string ComparisonReport::csv() const {
  std::ostringstream os;
  os << "dir,scheme,increments,cum_iterations,wall_seconds,peak_force_N,critical_displacement_mm,"
        "final_crack_length_mm,iteration_ratio,time_ratio\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    os << r.dir << ',' << r.scheme << ',' << r.increments << ',' << r.cum_iterations << ','
       << format_double(r.wall_seconds) << ',' << format_double(r.peak_force) << ','
       << format_double(r.critical_displacement) << ',' << format_double(r.final_crack_length)
       << ',' << format_double(iteration_ratio[i]) << ',' << format_double(time_ratio[i]) << '\n';
  }
  return os.str();
}

}  // namespace phasefrac
