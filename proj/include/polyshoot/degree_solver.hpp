#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "polyshoot/errors.hpp"
#include "polyshoot/simplex.hpp"
#include "polyshoot/target_map.hpp"

namespace polyshoot {

/// Which wall psi(alpha) lies on. Solution also covers wall hits far out in
/// the decay zone with psi below eps_decay. `index` is always a usable label value for
/// counting: for Solution it is argmin psi, for Unresolved the predicted wall
/// (or argmin of the terminal state).
struct Label {
  enum class Kind { HitIndex, Solution, Boundary, Unresolved };
  Kind kind = Kind::Unresolved;
  int index = 0;
  /// max-norm of psi at the labelled point (0 for boundary points).
  double psi_norm = 0.0;

  friend bool operator==(const Label&, const Label&) = default;
};

const char* to_string(Label::Kind k);

/// Labels one point of A_a. Boundary points get the face they lie on (lowest
/// zero index) without integrating. Unresolved interior points are retried once
/// with r_max extended by 1000x; if still unresolved they count as Solution
/// candidates when the terminal state is below eps_decay.
Label label(const ReducedSystem& rs, const Eigen::VectorXd& alpha, const IvpControls& controls);

/// Labels every point; `jobs` worker threads, results in input order.
std::vector<Label> label_all(const ReducedSystem& rs, const std::vector<Eigen::VectorXd>& points,
                             const IvpControls& controls, int jobs);

/// Oriented count of completely labelled cells, normalised so that the
/// labelling induced by the identity map (label = argmin alpha) has degree 1.
/// With check_boundary, a vertex on a face alpha_i = 0 must carry a Boundary
/// label naming one of its zero coordinates.
int compute_degree(const SimplexGrid& grid, const std::vector<Label>& labels, bool check_boundary = true);

/// True when the cell's labels cover every index, or it holds a Solution vertex.
bool completely_labeled(const SimplexGrid& grid, const std::vector<Label>& labels, int cell);

struct TraceEntry {
  int iteration = 0;
  std::vector<Eigen::VectorXd> vertices;
  std::vector<Label> labels;
  double diameter = 0.0;
};

struct DegreeReport {
  int degree = 0;
  int grid_depth = 0;
  int completely_labeled_count = 0;
  std::vector<std::vector<Eigen::VectorXd>> completely_labeled_cells;
};

struct SearchOptions {
  int depth = 4;
  int budget = 60;
  int jobs = 1;
};

struct ZeroSearch {
  Eigen::VectorXd alpha_star;
  TargetResult target;
  DegreeReport degree;
  std::vector<TraceEntry> trace;
};

class NotFound : public Error {
 public:
  NotFound(const std::string& what, std::vector<Eigen::VectorXd> deepest_cell, DegreeReport degree,
           std::vector<TraceEntry> trace)
      : Error(what),
        deepest_cell(std::move(deepest_cell)),
        degree(std::move(degree)),
        trace(std::move(trace)) {}

  std::vector<Eigen::VectorXd> deepest_cell;
  DegreeReport degree;
  std::vector<TraceEntry> trace;
};

/// Labels the mass grid and reports its degree.
DegreeReport degree_on_mass_grid(const ReducedSystem& rs, double mass, int depth,
                                 const IvpControls& controls, int jobs,
                                 std::vector<Label>* labels_out = nullptr,
                                 SimplexGrid* grid_out = nullptr);

/// Searches A_a for alpha with psi(alpha) ~ 0 reached by decay. Refines
/// completely labelled cells by halving; one shot at alpha = a when the chain
/// has length 1. A zero reached only through wall hits is a Navier solution on
/// a ball, not an entire solution, and is reported as NotFound.
ZeroSearch find_zero(const ReducedSystem& rs, double mass, const IvpControls& controls,
                     const SearchOptions& options = {});

}  // namespace polyshoot
