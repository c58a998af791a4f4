#pragma once

#include <vector>

#include <Eigen/Core>

namespace polyshoot {

/// Barycentric lattice of a simplex with L corners at subdivision depth d:
/// the points sum_j (c_j / d) corner_j for integer compositions c of d, with
/// the Freudenthal triangulation into d^{L-1} cells.
struct SimplexGrid {
  int depth = 1;
  std::vector<Eigen::VectorXd> corners;
  std::vector<Eigen::VectorXi> compositions;
  std::vector<Eigen::VectorXd> vertices;
  /// Each cell lists L vertex indices in Freudenthal order.
  std::vector<std::vector<int>> cells;
  /// +1/-1 orientation of each cell in lattice coordinates.
  std::vector<int> orientation;

  int corner_count() const { return static_cast<int>(corners.size()); }
  int find(const Eigen::VectorXi& composition) const;
};

SimplexGrid make_grid(const std::vector<Eigen::VectorXd>& corners, int depth);

/// The mass simplex A_a = {alpha >= 0, sum alpha = a} in R^L.
SimplexGrid make_mass_grid(int L, double mass, int depth);

/// Largest edge length of a cell.
double cell_diameter(const SimplexGrid& grid, int cell);

}  // namespace polyshoot
