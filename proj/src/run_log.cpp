#include "phasefrac/run_log.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phasefrac {

namespace {

constexpr const char* kHeader =
    "increment,time,dt,iterations,cum_iterations,u_applied_mm,reaction_N,crack_length_mm";

template <class T>
T parse_field(const std::string& s, int line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("run log line " + std::to_string(line) + ": bad value '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void RunLog::write_csv(std::ostream& os) const {
  os << kHeader << '\n';
  for (const auto& r : records) {
    os << r.increment << ',' << format_double(r.time) << ',' << format_double(r.dt) << ','
       << r.iterations << ',' << r.cum_iterations << ',' << format_double(r.u_applied_mm) << ','
       << format_double(r.reaction_N) << ',' << format_double(r.crack_length_mm) << '\n';
  }
}

void RunLog::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_csv(os);
}

RunLog RunLog::read_csv(std::istream& is) {
  RunLog log;
  std::string line;
  if (!std::getline(is, line) || line != kHeader)
    throw std::runtime_error("run log: unexpected header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 8)
      throw std::runtime_error("run log line " + std::to_string(lineno) + ": expected 8 fields");
    RunRecord r;
    r.increment = parse_field<int>(f[0], lineno);
    r.time = parse_field<double>(f[1], lineno);
    r.dt = parse_field<double>(f[2], lineno);
    r.iterations = parse_field<int>(f[3], lineno);
    r.cum_iterations = parse_field<long long>(f[4], lineno);
    r.u_applied_mm = parse_field<double>(f[5], lineno);
    r.reaction_N = parse_field<double>(f[6], lineno);
    r.crack_length_mm = parse_field<double>(f[7], lineno);
    log.records.push_back(r);
  }
  return log;
}

RunLog RunLog::read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_csv(is);
}

double RunLog::peak_reaction() const {
  double best = 0.0;
  for (const auto& r : records) best = std::max(best, r.reaction_N);
  return best;
}

double RunLog::critical_displacement() const {
  double best = 0.0;
  double u = 0.0;
  for (const auto& r : records)
    if (r.reaction_N > best) {
      best = r.reaction_N;
      u = r.u_applied_mm;
    }
  return u;
}

}  // namespace phasefrac
