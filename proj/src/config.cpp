#include "phasefrac/config.hpp"

#include "phasefrac/run_log.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace phasefrac {

CaseKind parse_case(const std::string& name) {
  if (name == "sent") return CaseKind::Sent;
  if (name == "shear") return CaseKind::Shear;
  if (name == "fatigue") return CaseKind::Fatigue;
  if (name == "dynamic") return CaseKind::Dynamic;
  if (name == "custom") return CaseKind::Custom;
  throw ConfigError("unknown case '" + name + "'");
}

std::string to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::Sent: return "sent";
    case CaseKind::Shear: return "shear";
    case CaseKind::Fatigue: return "fatigue";
    case CaseKind::Dynamic: return "dynamic";
    case CaseKind::Custom: return "custom";
  }
  return "?";
}

RunSpec preset(CaseKind kind) {
  RunSpec s;
  s.kind = kind;
  switch (kind) {
    case CaseKind::Sent:
    case CaseKind::Custom:
      // the unstable increment needs hundreds of quasi-Newton iterations
      s.solver.max_iterations = 1000;
      break;
    case CaseKind::Shear:
      s.solver.max_iterations = 1000;
      s.band_y0 = 0.0;
      s.band_y1 = 0.55;
      s.u_max = 0.015;
      s.increments = 50;
      break;
    case CaseKind::Fatigue:
      s.material.ell = 0.004;
      s.refine = 5.0;
      s.split = Split::Isotropic;
      s.fatigue.alpha_T = 56.25;
      s.amplitude = 0.002;
      s.load_ratio = -1.0;
      s.increments_per_cycle = 4;
      s.max_cycles = 500;
      s.adaptive = false;
      s.solver.max_iterations = 1000;
      break;
    case CaseKind::Dynamic:
      s.width = 100.0;
      s.height = 40.0;
      s.he = 0.25;
      s.refine = 0.0;
      s.notch_x0 = 0.0;
      s.notch_x1 = 50.0;
      s.notch_y = 20.0;
      s.material.E = 32000.0;
      s.material.nu = 0.2;
      s.material.Gc = 0.003;  // 3 J/m^2
      s.material.ell = 0.25;
      s.material.rho = 2.45e-9;  // 2450 kg/m^3
      s.traction = 1.0;
      s.total_time = 80e-6;
      s.adaptive = false;
      break;
  }
  return s;
}

void RunSpec::validate() const {
  std::vector<std::string> errs;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };
  need(width > 0 && height > 0, "width and height must be positive");
  need(he > 0 && he < std::min(width, height), "he must be positive and below min(width, height)");
  need(refine >= 0, "refine must be non-negative");
  need(order == 1 || order == 2, "order must be 1 or 2");
  need(notch_x0 >= 0 && notch_x1 <= width && notch_x0 <= notch_x1, "notch must lie inside the width");
  need(notch_y > 0 && notch_y < height, "notch_y must lie inside the height");
  if (refine > 0)
    need(band_x0 < band_x1 && band_y0 < band_y1 && band_x0 >= 0 && band_x1 <= width &&
             band_y0 >= 0 && band_y1 <= height,
         "refinement band must be a non-empty rectangle inside the domain");
  try {
    material.validate();
  } catch (const std::exception& e) {
    errs.push_back(e.what());
  }
  try {
    solver.validate();
  } catch (const std::exception& e) {
    errs.push_back(e.what());
  }
  need(increments > 0, "increments must be positive");
  need(u_max >= 0, "u_max must be non-negative");
  if (kind == CaseKind::Fatigue) {
    try {
      fatigue.validate();
    } catch (const std::exception& e) {
      errs.push_back(e.what());
    }
    need(amplitude > 0, "amplitude must be positive");
    need(load_ratio <= 1, "load_ratio must not exceed 1");
    need(increments_per_cycle >= 4 && increments_per_cycle % 4 == 0,
         "increments_per_cycle must be a positive multiple of 4");
    need(max_cycles > 0, "max_cycles must be positive");
    need(failure_fraction > 0 && failure_fraction <= 1, "failure_fraction must lie in (0, 1]");
  }
  if (kind == CaseKind::Dynamic) {
    need(material.rho > 0, "rho must be positive for dynamic runs");
    need(dt >= 0, "dt must be non-negative");
    need(total_time > 0, "total_time must be positive");
  }
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto [p, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || p != e || !std::isfinite(x))
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected on/off, got '" + v + "'");
}

std::string from_bool(bool b) { return b ? "on" : "off"; }

struct Setting {
  const char* key;
  std::function<void(RunSpec&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunSpec&)> get;
};

#define PF_DOUBLE(name, member)                                                              \
  Setting {                                                                                  \
    name, [](RunSpec& s, const std::string& k, const std::string& v) { s.member = to_double(k, v); }, \
        [](const RunSpec& s) { return format_double(s.member); }                             \
  }
#define PF_INT(name, member)                                                                 \
  Setting {                                                                                  \
    name, [](RunSpec& s, const std::string& k, const std::string& v) { s.member = to_int(k, v); }, \
        [](const RunSpec& s) { return std::to_string(s.member); }                            \
  }
#define PF_BOOL(name, member)                                                                \
  Setting {                                                                                  \
    name, [](RunSpec& s, const std::string& k, const std::string& v) { s.member = to_bool(k, v); }, \
        [](const RunSpec& s) { return from_bool(s.member); }                                 \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      Setting{"case", [](RunSpec& s, const std::string&, const std::string& v) { s.kind = parse_case(v); },
              [](const RunSpec& s) { return to_string(s.kind); }},
      PF_DOUBLE("width", width),
      PF_DOUBLE("height", height),
      PF_DOUBLE("he", he),
      PF_DOUBLE("refine", refine),
      PF_DOUBLE("band_x0", band_x0),
      PF_DOUBLE("band_x1", band_x1),
      PF_DOUBLE("band_y0", band_y0),
      PF_DOUBLE("band_y1", band_y1),
      PF_INT("order", order),
      PF_DOUBLE("notch_x0", notch_x0),
      PF_DOUBLE("notch_x1", notch_x1),
      PF_DOUBLE("notch_y", notch_y),
      Setting{"notch",
              [](RunSpec& s, const std::string& k, const std::string& v) {
                if (v == "duplicated-nodes")
                  s.notch = NotchRepresentation::DuplicatedNodes;
                else if (v == "phase-field")
                  s.notch = NotchRepresentation::PhaseFieldPrescribed;
                else
                  throw ConfigError("key '" + k + "': expected duplicated-nodes or phase-field");
              },
              [](const RunSpec& s) {
                return std::string(s.notch == NotchRepresentation::DuplicatedNodes ? "duplicated-nodes"
                                                                                   : "phase-field");
              }},
      PF_DOUBLE("E", material.E),
      PF_DOUBLE("nu", material.nu),
      PF_DOUBLE("Gc", material.Gc),
      PF_DOUBLE("ell", material.ell),
      PF_DOUBLE("rho", material.rho),
      PF_DOUBLE("k", material.k),
      Setting{"split",
              [](RunSpec& s, const std::string& k, const std::string& v) {
                try {
                  s.split = parse_split(v);
                } catch (const std::exception&) {
                  throw ConfigError("key '" + k + "': unknown split '" + v + "'");
                }
              },
              [](const RunSpec& s) { return to_string(s.split); }},
      Setting{"scheme",
              [](RunSpec& s, const std::string& k, const std::string& v) {
                try {
                  s.solver.scheme = parse_scheme(v);
                } catch (const std::exception&) {
                  throw ConfigError("key '" + k + "': unknown scheme '" + v + "'");
                }
              },
              [](const RunSpec& s) { return to_string(s.solver.scheme); }},
      PF_DOUBLE("Rn", solver.criteria.Rn),
      PF_DOUBLE("Cn", solver.criteria.Cn),
      PF_INT("max_iterations", solver.max_iterations),
      PF_BOOL("line_search", solver.line_search),
      PF_INT("bfgs_max_updates", solver.bfgs_max_updates),
      PF_BOOL("adaptive", adaptive),
      PF_INT("increments", increments),
      PF_DOUBLE("u_max", u_max),
      Setting{"alpha_T",
              [](RunSpec& s, const std::string& k, const std::string& v) {
                s.fatigue.alpha_T = v == "inf" ? std::numeric_limits<double>::infinity() : to_double(k, v);
              },
              [](const RunSpec& s) {
                return std::isinf(s.fatigue.alpha_T) ? std::string("inf") : format_double(s.fatigue.alpha_T);
              }},
      PF_INT("fatigue_exponent", fatigue.exponent),
      PF_DOUBLE("amplitude", amplitude),
      PF_DOUBLE("load_ratio", load_ratio),
      PF_INT("increments_per_cycle", increments_per_cycle),
      PF_INT("max_cycles", max_cycles),
      PF_DOUBLE("failure_fraction", failure_fraction),
      PF_DOUBLE("traction", traction),
      PF_DOUBLE("dt", dt),
      PF_DOUBLE("total_time", total_time),
      PF_INT("snapshot_every", snapshot_every),
      Setting{"out", [](RunSpec& s, const std::string&, const std::string& v) { s.out_dir = v; },
              [](const RunSpec& s) { return s.out_dir; }},
      PF_BOOL("write_vtk", write_vtk),
  };
  return table;
}

#undef PF_DOUBLE
#undef PF_INT
#undef PF_BOOL

const Setting* find_setting(const std::string& key) {
  for (const auto& s : settings())
    if (key == s.key) return &s;
  return nullptr;
}

}  // namespace

void apply_setting(RunSpec& spec, const std::string& key, const std::string& value) {
  const Setting* s = find_setting(key);
  if (!s) throw ConfigError("unknown key '" + key + "'");
  s->set(spec, key, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& s : settings()) out.emplace_back(s.key);
  return out;
}

RunSpec parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (root.IsNull()) return preset(CaseKind::Sent);
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a key: value mapping");

  auto where = [&](const YAML::Node& n) {
    return source + ":" + std::to_string(n.Mark().line + 1) + ": ";
  };
  CaseKind kind = CaseKind::Sent;
  if (auto c = root["case"]) {
    try {
      kind = parse_case(c.as<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(where(c) + e.what());
    }
  }
  RunSpec spec = preset(kind);
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (!kv.second.IsScalar())
      throw ConfigError(where(kv.first) + "key '" + key + "' must have a scalar value");
    try {
      apply_setting(spec, key, kv.second.Scalar());
    } catch (const ConfigError& e) {
      throw ConfigError(where(kv.first) + e.what());
    }
  }
  spec.validate();
  return spec;
}

RunSpec load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

std::string dump_config(const RunSpec& spec) {
  std::string out;
  for (const auto& s : settings()) {
    out += std::string(s.key) + ": " + s.get(spec) + "\n";
  }
  return out;
}

}  // namespace phasefrac
