#include "polyshoot/degree_solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace polyshoot {

namespace {

struct Evaluated {
  Label label;
  TargetResult target;
};

int argmin_index(const Eigen::VectorXd& v) {
  Eigen::Index idx = 0;
  v.minCoeff(&idx);
  return static_cast<int>(idx);
}

Evaluated evaluate(const ReducedSystem& rs, const Eigen::VectorXd& alpha, const IvpControls& c) {
  Evaluated ev;
  ev.target = psi(rs, alpha, c);
  const TargetResult& t = ev.target;
  Label& lab = ev.label;
  lab.psi_norm = t.psi.cwiseAbs().maxCoeff();

  switch (t.kase) {
    case TargetCase::BoundaryIdentity:
      lab.kind = Label::Kind::Boundary;
      lab.index = argmin_index(alpha);
      lab.psi_norm = 0.0;
      return ev;
    case TargetCase::WallHit:
      // A wall reached only deep in the decay zone with psi already below
      // eps_decay is a decaying solution whose tail was tipped over by the
      // growing mode; Navier points sit at finite radius and stay hits.
      lab.kind = lab.psi_norm < c.eps_decay && *t.r0 > 10.0 * decay_length_scale(rs, alpha)
                     ? Label::Kind::Solution
                     : Label::Kind::HitIndex;
      lab.index = *t.hit_index;
      return ev;
    case TargetCase::DecayLimit:
      lab.kind = lab.psi_norm < c.eps_decay ? Label::Kind::Solution : Label::Kind::Unresolved;
      lab.index = argmin_index(t.psi);
      return ev;
    case TargetCase::Unresolved:
      break;
  }

  IvpControls longer = c;
  longer.r_max *= 1e3;
  longer.max_steps *= 4;
  ev.target = psi(rs, alpha, longer);
  const TargetResult& t2 = ev.target;
  lab.psi_norm = t2.psi.cwiseAbs().maxCoeff();
  if (t2.kase == TargetCase::WallHit) {
    lab.kind = Label::Kind::HitIndex;
    lab.index = *t2.hit_index;
  } else if (lab.psi_norm < c.eps_decay) {
    lab.kind = Label::Kind::Solution;
    lab.index = argmin_index(t2.psi);
  } else {
    lab.kind = Label::Kind::Unresolved;
    lab.index = t2.predicted_hit.value_or(argmin_index(t2.psi));
  }
  return ev;
}

int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  }
  return sign;
}

// Oriented count without normalisation. Cells whose labels are not a
// permutation of 0..L-1 contribute nothing.
int raw_degree(const SimplexGrid& grid, const std::vector<int>& label_index) {
  const int L = grid.corner_count();
  int total = 0;
  std::vector<int> labels(L);
  std::vector<char> seen(L);
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    std::fill(seen.begin(), seen.end(), 0);
    bool complete = true;
    for (int k = 0; k < L; ++k) {
      const int lab = label_index[grid.cells[c][k]];
      if (lab < 0 || lab >= L || seen[lab]) {
        complete = false;
        break;
      }
      seen[lab] = 1;
      labels[k] = lab;
    }
    if (complete) total += grid.orientation[c] * permutation_sign(labels);
  }
  return total;
}

int identity_orientation(int L) {
  static std::mutex mu;
  static std::vector<int> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (static_cast<int>(cache.size()) <= L) cache.resize(L + 1, 0);
  if (cache[L] == 0) {
    const SimplexGrid ref = make_mass_grid(L, 1.0, L + 1);
    std::vector<int> idx;
    for (const auto& v : ref.vertices) idx.push_back(argmin_index(v));
    cache[L] = raw_degree(ref, idx) > 0 ? 1 : -1;
  }
  return cache[L];
}

Eigen::VectorXd centroid(const std::vector<Eigen::VectorXd>& pts) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(pts.front().size());
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

bool lexicographic_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

struct Candidate {
  std::vector<Eigen::VectorXd> corners;
  std::vector<Label> labels;
  int level = 0;
};

bool is_candidate(const std::vector<Label>& labels, int L) {
  std::vector<char> seen(L, 0);
  int covered = 0;
  for (const auto& lab : labels) {
    if (lab.kind == Label::Kind::Solution || lab.kind == Label::Kind::Unresolved) return true;
    if (lab.index >= 0 && lab.index < L && !seen[lab.index]) {
      seen[lab.index] = 1;
      ++covered;
    }
  }
  return covered == L;
}

// Candidate cells of a grid in preference order (lowest centroid first).
std::vector<Candidate> candidates_of(const SimplexGrid& grid, const std::vector<Label>& labels, int level) {
  const int L = grid.corner_count();
  std::vector<Candidate> out;
  for (const auto& cell : grid.cells) {
    Candidate cand;
    cand.level = level;
    for (int v : cell) {
      cand.corners.push_back(grid.vertices[v]);
      cand.labels.push_back(labels[v]);
    }
    if (is_candidate(cand.labels, L)) out.push_back(std::move(cand));
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return lexicographic_less(centroid(a.corners), centroid(b.corners));
  });
  return out;
}

}  // namespace

const char* to_string(Label::Kind k) {
  switch (k) {
    case Label::Kind::HitIndex: return "hit";
    case Label::Kind::Solution: return "solution";
    case Label::Kind::Boundary: return "boundary";
    case Label::Kind::Unresolved: return "unresolved";
  }
  return "?";
}

Label label(const ReducedSystem& rs, const Eigen::VectorXd& alpha, const IvpControls& controls) {
  return evaluate(rs, alpha, controls).label;
}

std::vector<Label> label_all(const ReducedSystem& rs, const std::vector<Eigen::VectorXd>& points,
                             const IvpControls& controls, int jobs) {
  std::vector<Label> out(points.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = label(rs, points[i], controls);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        out[i] = label(rs, points[i], controls);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

bool completely_labeled(const SimplexGrid& grid, const std::vector<Label>& labels, int cell) {
  const int L = grid.corner_count();
  std::vector<char> seen(L, 0);
  int covered = 0;
  for (int v : grid.cells.at(cell)) {
    const Label& lab = labels[v];
    if (lab.kind == Label::Kind::Solution) return true;
    if (lab.index >= 0 && lab.index < L && !seen[lab.index]) {
      seen[lab.index] = 1;
      ++covered;
    }
  }
  return covered == L;
}

int compute_degree(const SimplexGrid& grid, const std::vector<Label>& labels, bool check_boundary) {
  if (labels.size() != grid.vertices.size()) throw std::invalid_argument("one label per vertex required");
  const int L = grid.corner_count();
  std::vector<int> idx(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const Label& lab = labels[v];
    const Eigen::VectorXd& x = grid.vertices[v];
    if (check_boundary && x.size() == L && x.minCoeff() == 0.0) {
      const bool on_face = lab.index >= 0 && lab.index < L && x[lab.index] == 0.0;
      if (lab.kind != Label::Kind::Boundary || !on_face) {
        throw InconsistentBoundary("vertex " + std::to_string(v) + " on the boundary carries a foreign label");
      }
    }
    idx[v] = lab.index;
  }
  return identity_orientation(L) * raw_degree(grid, idx);
}

DegreeReport degree_on_mass_grid(const ReducedSystem& rs, double mass, int depth, const IvpControls& controls,
                                 int jobs, std::vector<Label>* labels_out, SimplexGrid* grid_out) {
  // Coarser grids leave boundary faces without interior vertices, and then
  // even the identity has no completely labelled cell.
  depth = std::max(depth, rs.size() - 1);
  SimplexGrid grid = make_mass_grid(rs.size(), mass, depth);
  std::vector<Label> labels = label_all(rs, grid.vertices, controls, jobs);

  DegreeReport report;
  report.grid_depth = depth;
  report.degree = compute_degree(grid, labels);
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    if (completely_labeled(grid, labels, static_cast<int>(c))) {
      ++report.completely_labeled_count;
      std::vector<Eigen::VectorXd> cell;
      for (int v : grid.cells[c]) cell.push_back(grid.vertices[v]);
      report.completely_labeled_cells.push_back(std::move(cell));
    }
  }
  if (labels_out) *labels_out = std::move(labels);
  if (grid_out) *grid_out = std::move(grid);
  return report;
}

ZeroSearch find_zero(const ReducedSystem& rs, double mass, const IvpControls& controls,
                     const SearchOptions& options) {
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
  const int L = rs.size();

  ZeroSearch result;
  auto finish = [&](const Eigen::VectorXd& alpha) {
    result.alpha_star = alpha;
    result.target = evaluate(rs, alpha, controls).target;
    return result;
  };

  if (L == 1) {
    const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(1, mass);
    const Evaluated ev = evaluate(rs, alpha, controls);
    result.degree.degree = 1;
    result.degree.grid_depth = 0;
    result.trace.push_back({0, {alpha}, {ev.label}, 0.0});
    if (ev.label.kind == Label::Kind::Solution) {
      result.alpha_star = alpha;
      result.target = ev.target;
      result.degree.completely_labeled_count = 1;
      result.degree.completely_labeled_cells.push_back({alpha});
      return result;
    }
    throw NotFound(std::string("single shot at alpha = a is ") + to_string(ev.label.kind) +
                       ", not a decaying solution",
                   {alpha}, result.degree, result.trace);
  }

  SimplexGrid grid;
  std::vector<Label> labels;
  result.degree = degree_on_mass_grid(rs, mass, options.depth, controls, options.jobs, &labels, &grid);

  auto best_solution = [](const std::vector<Eigen::VectorXd>& pts, const std::vector<Label>& labs)
      -> std::optional<Eigen::VectorXd> {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < labs.size(); ++i) {
      if (labs[i].kind != Label::Kind::Solution) continue;
      if (!best || labs[i].psi_norm < labs[*best].psi_norm) best = i;
    }
    if (!best) return std::nullopt;
    return pts[*best];
  };

  {
    TraceEntry entry{0, grid.vertices, labels, 0.0};
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
      entry.diameter = std::max(entry.diameter, cell_diameter(grid, static_cast<int>(c)));
    }
    result.trace.push_back(std::move(entry));
  }
  if (auto sol = best_solution(grid.vertices, labels)) return finish(*sol);

  std::vector<Candidate> stack = candidates_of(grid, labels, 0);
  if (stack.empty()) {
    const bool all_unresolved = std::all_of(labels.begin(), labels.end(), [](const Label& l) {
      return l.kind == Label::Kind::Unresolved || l.kind == Label::Kind::Boundary;
    });
    if (all_unresolved) throw AllUnresolved("every interior vertex is unresolved; loosen or extend the controls");
    throw NotFound("no completely labelled cell on the initial grid", {}, result.degree, result.trace);
  }
  std::reverse(stack.begin(), stack.end());

  std::vector<Eigen::VectorXd> deepest = stack.back().corners;
  int deepest_level = 0;
  const double min_diameter = 1e-14 * mass;

  for (int iter = 1; iter <= options.budget && !stack.empty(); ++iter) {
    Candidate cand = std::move(stack.back());
    stack.pop_back();
    if (cand.level >= deepest_level) {
      deepest_level = cand.level;
      deepest = cand.corners;
    }

    SimplexGrid sub = make_grid(cand.corners, 2);
    std::vector<Label> sub_labels(sub.vertices.size());
    std::vector<Eigen::VectorXd> fresh;
    std::vector<std::size_t> fresh_idx;
    for (std::size_t v = 0; v < sub.vertices.size(); ++v) {
      const Eigen::VectorXi& comp = sub.compositions[v];
      Eigen::Index corner = 0;
      if (comp.maxCoeff(&corner) == 2) {
        sub_labels[v] = cand.labels[corner];
      } else {
        fresh.push_back(sub.vertices[v]);
        fresh_idx.push_back(v);
      }
    }
    const std::vector<Label> fresh_labels = label_all(rs, fresh, controls, options.jobs);
    for (std::size_t i = 0; i < fresh.size(); ++i) sub_labels[fresh_idx[i]] = fresh_labels[i];

    double diam = 0.0;
    for (std::size_t c = 0; c < sub.cells.size(); ++c) diam = std::max(diam, cell_diameter(sub, static_cast<int>(c)));
    result.trace.push_back({iter, sub.vertices, sub_labels, diam});

    if (auto sol = best_solution(sub.vertices, sub_labels)) return finish(*sol);

    if (diam < min_diameter) {
      throw NotFound(
          "candidate cell shrank to rounding level without a decaying solution: the zero of psi is "
          "reached through a wall hit, i.e. a solution of the Navier problem on a ball",
          cand.corners, result.degree, result.trace);
    }

    auto next = candidates_of(sub, sub_labels, cand.level + 1);
    for (auto it = next.rbegin(); it != next.rend(); ++it) stack.push_back(std::move(*it));
  }

  throw NotFound(stack.empty() ? "no completely labelled sub-cell left to refine"
                               : "iteration budget exhausted",
                 deepest, result.degree, result.trace);
}

}  // namespace polyshoot
