#include "polyshoot/simplex.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <Eigen/LU>

namespace polyshoot {

namespace {

void compositions(int parts, int total, Eigen::VectorXi& cur, int pos, std::vector<Eigen::VectorXi>& out) {
  if (pos == parts - 1) {
    cur[pos] = total;
    out.push_back(cur);
    return;
  }
  for (int c = total; c >= 0; --c) {
    cur[pos] = c;
    compositions(parts, total - c, cur, pos + 1, out);
  }
}

// Lattice coordinates: partial sums y_i = c_0 + ... + c_i, i < L-1.
Eigen::VectorXi composition_from_lattice(const Eigen::VectorXi& y, int depth) {
  const int m = static_cast<int>(y.size());
  Eigen::VectorXi c(m + 1);
  int prev = 0;
  for (int i = 0; i < m; ++i) {
    c[i] = y[i] - prev;
    prev = y[i];
  }
  c[m] = depth - prev;
  return c;
}

bool inside(const Eigen::VectorXi& y, int depth) {
  int prev = 0;
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] < prev) return false;
    prev = y[i];
  }
  return prev <= depth;
}

}  // namespace

int SimplexGrid::find(const Eigen::VectorXi& composition) const {
  for (std::size_t i = 0; i < compositions.size(); ++i) {
    if (compositions[i] == composition) return static_cast<int>(i);
  }
  return -1;
}

SimplexGrid make_grid(const std::vector<Eigen::VectorXd>& corners, int depth) {
  if (corners.empty()) throw std::invalid_argument("simplex needs at least one corner");
  if (depth < 1) throw std::invalid_argument("subdivision depth must be >= 1");

  SimplexGrid grid;
  grid.depth = depth;
  grid.corners = corners;
  const int L = static_cast<int>(corners.size());
  const int m = L - 1;

  Eigen::VectorXi cur(L);
  compositions(L, depth, cur, 0, grid.compositions);
  for (const auto& c : grid.compositions) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(corners.front().size());
    for (int j = 0; j < L; ++j) {
      if (c[j] != 0) p += (static_cast<double>(c[j]) / depth) * corners[j];
    }
    grid.vertices.push_back(std::move(p));
  }

  if (m == 0) {
    grid.cells.push_back({0});
    grid.orientation.push_back(1);
    return grid;
  }

  // Encode compositions for lookup: lexicographic mixed radix in base depth+1.
  auto encode = [&](const Eigen::VectorXi& c) {
    long long key = 0;
    for (int j = 0; j < L; ++j) key = key * (depth + 1) + c[j];
    return key;
  };
  std::vector<std::pair<long long, int>> index;
  index.reserve(grid.compositions.size());
  for (std::size_t i = 0; i < grid.compositions.size(); ++i) {
    index.emplace_back(encode(grid.compositions[i]), static_cast<int>(i));
  }
  std::sort(index.begin(), index.end());
  auto lookup = [&](const Eigen::VectorXi& c) {
    const long long key = encode(c);
    auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(key, -1));
    return it->second;
  };

  std::vector<int> perm(m);
  Eigen::VectorXi base = Eigen::VectorXi::Zero(m);
  while (true) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<Eigen::VectorXi> verts;
      Eigen::VectorXi v = base;
      bool ok = inside(v, depth);
      verts.push_back(v);
      for (int k = 0; k < m && ok; ++k) {
        v[perm[k]] += 1;
        ok = inside(v, depth);
        verts.push_back(v);
      }
      if (ok) {
        std::vector<int> cell;
        Eigen::MatrixXd edges(m, m);
        for (int k = 0; k <= m; ++k) {
          cell.push_back(lookup(composition_from_lattice(verts[k], depth)));
          if (k > 0) edges.col(k - 1) = (verts[k] - verts[0]).cast<double>();
        }
        grid.cells.push_back(std::move(cell));
        grid.orientation.push_back(edges.determinant() > 0.0 ? 1 : -1);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));

    int pos = 0;
    while (pos < m && ++base[pos] == depth) base[pos++] = 0;
    if (pos == m) break;
  }
  return grid;
}

SimplexGrid make_mass_grid(int L, double mass, int depth) {
  std::vector<Eigen::VectorXd> corners;
  for (int j = 0; j < L; ++j) corners.push_back(mass * Eigen::VectorXd::Unit(L, j));
  return make_grid(corners, depth);
}

double cell_diameter(const SimplexGrid& grid, int cell) {
  double diam = 0.0;
  const auto& c = grid.cells.at(cell);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      diam = std::max(diam, (grid.vertices[c[i]] - grid.vertices[c[j]]).norm());
    }
  }
  return diam;
}

}  // namespace polyshoot
