#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "polyshoot/analysis.hpp"
#include "polyshoot/degree_solver.hpp"
#include "polyshoot/integrator.hpp"
#include "polyshoot/system_spec.hpp"
#include "polyshoot/target_map.hpp"

namespace polyshoot {

using json = nlohmann::json;

// Trajectory CSV: header r,w_1,..,w_L,dw_1,..,dw_L; 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

json to_json(const Eigen::VectorXd& v);
json to_json(const CriticalityReport& r);
json to_json(const NondegeneracyReport& r);
json to_json(const TargetResult& t);
json to_json(const Outcome& o);
json to_json(const Label& l);
json to_json(const DegreeReport& r);
json to_json(const std::vector<TraceEntry>& trace);
json to_json(const PohozaevReport& r);
json to_json(const DecayFit& f);

/// Gnuplot script plotting every w_m of the CSV against r.
std::string gnuplot_script(const std::string& csv_name, int components, const std::string& title);

}  // namespace polyshoot
