#include "polyshoot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace polyshoot {

namespace {

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int L = traj.components();
  os << "r";
  for (int m = 1; m <= L; ++m) os << ",w_" << m;
  for (int m = 1; m <= L; ++m) os << ",dw_" << m;
  os << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << g17(traj.grid[i]);
    for (int m = 0; m < L; ++m) os << ',' << g17(traj.values[i][m]);
    for (int m = 0; m < L; ++m) os << ',' << g17(traj.derivs[i][m]);
    os << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  write_trajectory_csv(os, traj);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("trajectory CSV is empty");
  const auto header = split(line);
  if (header.size() < 3 || header.size() % 2 != 1 || header[0] != "r") {
    throw ConfigError("trajectory CSV header must be r,w_1,..,w_L,dw_1,..,dw_L");
  }
  const int L = static_cast<int>(header.size() - 1) / 2;

  Trajectory traj;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ConfigError("trajectory CSV row " + std::to_string(row) + " has the wrong number of fields");
    }
    Eigen::VectorXd w(L), dw(L);
    double r = 0.0;
    try {
      r = std::stod(cells[0]);
      for (int m = 0; m < L; ++m) {
        w[m] = std::stod(cells[1 + m]);
        dw[m] = std::stod(cells[1 + L + m]);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("trajectory CSV row " + std::to_string(row) + " is not numeric");
    }
    traj.grid.push_back(r);
    traj.values.push_back(w);
    traj.derivs.push_back(dw);
  }
  if (traj.grid.empty()) throw ConfigError("trajectory CSV has no rows");
  traj.alpha = traj.values.front();
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  return read_trajectory_csv(is);
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const CriticalityReport& r) {
  return {{"class", to_string(r.cls)},
          {"threshold_value", r.threshold_value},
          {"compared_value", r.compared_value},
          {"rule", r.rule},
          {"existence_condition", r.existence_condition}};
}

json to_json(const NondegeneracyReport& r) {
  return {{"type1", to_string(r.type1)},
          {"type2", to_string(r.type2)},
          {"cond1_lower_bound", to_string(r.cond1_lower_bound)},
          {"cond1_no_decay", to_string(r.cond1_no_decay)},
          {"witnesses", r.witnesses}};
}

json to_json(const TargetResult& t) {
  json out = {{"alpha", to_json(t.alpha)}, {"psi", to_json(t.psi)}, {"case", to_string(t.kase)}};
  if (t.r0) out["r0"] = *t.r0;
  if (t.hit_index) out["hit_index"] = *t.hit_index + 1;
  if (t.r_end) out["r_end"] = *t.r_end;
  if (t.predicted_hit) out["predicted_hit"] = *t.predicted_hit + 1;
  return out;
}

json to_json(const Outcome& o) {
  if (const auto* hit = std::get_if<WallHit>(&o)) {
    return {{"kind", "wall_hit"}, {"r0", hit->r0}, {"hit_index", hit->hit_index + 1}, {"state", to_json(hit->state)}};
  }
  if (const auto* dec = std::get_if<Decayed>(&o)) {
    return {{"kind", "decayed"}, {"limit", to_json(dec->limit)}, {"r_end", dec->r_end}};
  }
  const auto& tr = std::get<Truncated>(o);
  return {{"kind", "truncated"},
          {"r_end", tr.r_end},
          {"state", to_json(tr.state)},
          {"tail_bound", to_json(tr.tail_bound)}};
}

json to_json(const Label& l) {
  return {{"kind", to_string(l.kind)}, {"index", l.index + 1}, {"psi_norm", l.psi_norm}};
}

json to_json(const DegreeReport& r) {
  json cells = json::array();
  for (const auto& cell : r.completely_labeled_cells) {
    json c = json::array();
    for (const auto& v : cell) c.push_back(to_json(v));
    cells.push_back(std::move(c));
  }
  return {{"degree", r.degree},
          {"grid_depth", r.grid_depth},
          {"completely_labeled_count", r.completely_labeled_count},
          {"completely_labeled_cells", std::move(cells)}};
}

json to_json(const std::vector<TraceEntry>& trace) {
  json out = json::array();
  for (const auto& e : trace) {
    json verts = json::array();
    json labels = json::array();
    for (const auto& v : e.vertices) verts.push_back(to_json(v));
    for (const auto& l : e.labels) labels.push_back(to_json(l));
    out.push_back({{"iteration", e.iteration},
                   {"vertices", std::move(verts)},
                   {"labels", std::move(labels)},
                   {"diameter", e.diameter}});
  }
  return out;
}

json to_json(const PohozaevReport& r) {
  return {{"energy_values", r.energy_values},
          {"energy_spread", r.energy_spread},
          {"interior_combination", r.interior_combination},
          {"boundary_flux", r.boundary_flux},
          {"extra_terms", r.extra_terms},
          {"residual", r.residual},
          {"bracket", r.bracket},
          {"radius", r.radius},
          {"boundary_values_max", r.boundary_values_max},
          {"navier_data", r.navier_data},
          {"flux_nonnegative", r.flux_nonnegative},
          {"bracket_nonpositive", r.bracket_nonpositive}};
}

json to_json(const DecayFit& f) {
  return {{"fitted_rate", f.fitted_rate},
          {"window", {f.r_lo, f.r_hi}},
          {"rms", f.rms},
          {"points", f.points}};
}

std::string gnuplot_script(const std::string& csv_name, int components, const std::string& title) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set title '" << title << "'\n"
     << "set xlabel 'r'\n"
     << "set logscale x\n"
     << "plot ";
  for (int m = 0; m < components; ++m) {
    if (m) os << ", \\\n     ";
    os << "'" << csv_name << "' using 1:" << (m + 2) << " with lines";
  }
  os << "\npause -1\n";
  return os.str();
}

}  // namespace polyshoot
