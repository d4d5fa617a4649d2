// Copyright 2026 The wjdot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wjdot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "wjdot/error.hpp"
#include "wjdot/kernels.hpp"

namespace wjdot {

CostMatrix::CostMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.cols() == 0)
    throw InputError("cost matrix: empty");
  for (Eigen::Index k = 0; k < entries_.size(); ++k) {
    const double v = entries_.data()[k];
    if (!std::isfinite(v)) throw InputError("cost matrix: non-finite entry");
    if (v < 0.0) throw InputError("cost matrix: negative entry");
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int8_t kUp = 1;     // pred arc points from the node to its parent
constexpr std::int8_t kDown = -1;  // pred arc points from the parent to the node

// Primal network simplex on the complete bipartite graph rows -> columns,
// plus one artificial root joined to every node. Arcs have infinite
// capacity, so every non-tree arc sits at flow zero and the flow of a tree
// arc is stored on the node below it.
//
// Arc ids: real arc (i, j) is i*m + j (the index into the row-major cost);
// the artificial arc of node u is n*m + u.
class NetworkSimplex {
 public:
  NetworkSimplex(const double* cost, int n, int m, const double* supply,
                 const double* demand)
      : cost_(cost),
        n_(n),
        m_(m),
        root_(n + m),
        kernels_(kernels::active()) {
    const double max_cost =
        *std::max_element(cost, cost + std::size_t(n) * std::size_t(m));
    // On a complete bipartite graph any flow routed through the root can be
    // moved onto the direct arc, so any constant above the largest cost
    // makes the artificial arcs unattractive.
    art_cost_ = max_cost + 1.0;
    tolerance_ = 1e-13 * art_cost_;
    block_ = std::max<std::int64_t>(
        m, std::int64_t(std::sqrt(double(n) * double(m))));

    const int nodes = root_ + 1;
    parent_.assign(nodes, -1);
    pred_.assign(nodes, -1);
    dir_.assign(nodes, 0);
    flow_.assign(nodes, 0.0);
    pi_.assign(nodes, 0.0);
    depth_.assign(nodes, 0);
    first_child_.assign(nodes, -1);
    next_sib_.assign(nodes, -1);
    prev_sib_.assign(nodes, -1);

    for (int u = root_ - 1; u >= 0; --u) {
      parent_[u] = root_;
      pred_[u] = artificial_arc(u);
      depth_[u] = 1;
      if (u < n_) {
        dir_[u] = kUp;
        flow_[u] = supply[u];
        pi_[u] = 0.0;
      } else {
        dir_[u] = kDown;
        flow_[u] = demand[u - n_];
        pi_[u] = art_cost_;
      }
      link_child(root_, u);
    }
  }

  void run() {
    const std::int64_t max_pivots =
        std::int64_t(200) * (std::int64_t(n_) + m_) * (std::int64_t(n_) + m_) +
        1000000;
    for (;;) {
      int i = 0, j = 0;
      while (find_entering(i, j)) {
        pivot(i, j);
        if (++pivots_ > max_pivots)
          throw InternalError("network simplex: pivot limit exceeded");
      }
      // Potentials drift while subtrees are shifted; rebuild them from the
      // tree and accept only if no arc prices out against the fresh values.
      recompute_potentials_from_root();
      next_row_ = 0;
      if (!find_entering(i, j)) break;
      pivot(i, j);
      ++pivots_;
    }
  }

  long pivots() const { return long(pivots_); }

  // Plan entries carried by real tree arcs.
  template <typename F>
  void for_each_basic_flow(F&& f) const {
    const std::int64_t real = std::int64_t(n_) * m_;
    for (int u = 0; u < root_; ++u) {
      if (pred_[u] < real) f(int(pred_[u] / m_), int(pred_[u] % m_), flow_[u]);
    }
  }

  // Duals from the basis, with f_i + g_j = C_ij on every real tree arc.
  // Returns the number of connected pieces of the basis forest.
  int extract_duals(std::vector<double>& f, std::vector<double>& g) const;

 private:
  std::int64_t artificial_arc(int u) const {
    return std::int64_t(n_) * m_ + u;
  }
  double arc_cost(std::int64_t arc) const {
    const std::int64_t real = std::int64_t(n_) * m_;
    if (arc < real) return cost_[arc];
    return (arc - real) < n_ ? 0.0 : art_cost_;
  }

  void link_child(int p, int c) {
    prev_sib_[c] = -1;
    next_sib_[c] = first_child_[p];
    if (first_child_[p] >= 0) prev_sib_[first_child_[p]] = c;
    first_child_[p] = c;
  }
  void unlink_child(int p, int c) {
    if (prev_sib_[c] >= 0)
      next_sib_[prev_sib_[c]] = next_sib_[c];
    else
      first_child_[p] = next_sib_[c];
    if (next_sib_[c] >= 0) prev_sib_[next_sib_[c]] = prev_sib_[c];
    prev_sib_[c] = next_sib_[c] = -1;
  }

  // Block search over rows: scan whole rows until at least block_ arcs have
  // been priced and an improving arc was seen; keep the most negative one.
  bool find_entering(int& bi, int& bj) {
    double best = -tolerance_;
    bi = -1;
    std::int64_t scanned = 0;
    const double* sink_pi = pi_.data() + n_;
    for (int count = 0; count < n_; ++count) {
      const int i = next_row_;
      next_row_ = (next_row_ + 1 == n_) ? 0 : next_row_ + 1;
      const kernels::ArgMin r = kernels_.shifted_argmin(
          cost_ + std::size_t(i) * std::size_t(m_), sink_pi, std::size_t(m_));
      const double rc = r.value + pi_[i];
      if (rc < best) {
        best = rc;
        bi = i;
        bj = int(r.index);
      }
      scanned += m_;
      if (bi >= 0 && scanned >= block_) break;
    }
    return bi >= 0;
  }

  void pivot(int i, int j) {
    const int s = i;
    const int t = n_ + j;
    const std::int64_t in_arc = std::int64_t(i) * m_ + j;
    const double c = cost_[in_arc];

    int u = s, v = t;
    while (u != v) {
      if (depth_[u] > depth_[v]) {
        u = parent_[u];
      } else if (depth_[v] > depth_[u]) {
        v = parent_[v];
      } else {
        u = parent_[u];
        v = parent_[v];
      }
    }
    const int join = u;

    // Flow goes s -> t on the entering arc and returns t -> join -> s
    // through the tree. Ties pick the last blocking arc in cycle order
    // starting at the join, which keeps the tree strongly feasible.
    double delta = kInf;
    int u_out = -1;
    bool out_on_source_side = false;
    for (int w = s; w != join; w = parent_[w]) {
      if (dir_[w] == kUp && flow_[w] < delta) {
        delta = flow_[w];
        u_out = w;
        out_on_source_side = true;
      }
    }
    for (int w = t; w != join; w = parent_[w]) {
      if (dir_[w] == kDown && flow_[w] <= delta) {
        delta = flow_[w];
        u_out = w;
        out_on_source_side = false;
      }
    }
    if (u_out < 0) throw InternalError("network simplex: unbounded cycle");

    if (delta > 0.0) {
      for (int w = s; w != join; w = parent_[w]) flow_[w] -= dir_[w] * delta;
      for (int w = t; w != join; w = parent_[w]) flow_[w] += dir_[w] * delta;
    }

    const int u_in = out_on_source_side ? s : t;
    const int v_in = out_on_source_side ? t : s;
    const double sigma =
        (u_in == t) ? (c + pi_[s] - pi_[t]) : (pi_[t] - c - pi_[s]);

    // Re-hang the stem u_in .. u_out below v_in, reversing parent links.
    std::int64_t carry_pred = in_arc;
    std::int8_t carry_dir = (u_in == s) ? kUp : kDown;
    double carry_flow = delta;
    int new_parent = v_in;
    for (int w = u_in;;) {
      const int old_parent = parent_[w];
      const std::int64_t old_pred = pred_[w];
      const std::int8_t old_dir = dir_[w];
      const double old_flow = flow_[w];
      unlink_child(old_parent, w);
      parent_[w] = new_parent;
      pred_[w] = carry_pred;
      dir_[w] = carry_dir;
      flow_[w] = carry_flow;
      link_child(new_parent, w);
      if (w == u_out) break;
      carry_pred = old_pred;
      carry_dir = std::int8_t(-old_dir);
      carry_flow = old_flow;
      new_parent = w;
      w = old_parent;
    }

    // The moved subtree keeps its internal potential differences.
    stack_.clear();
    stack_.push_back(u_in);
    while (!stack_.empty()) {
      const int w = stack_.back();
      stack_.pop_back();
      depth_[w] = depth_[parent_[w]] + 1;
      pi_[w] += sigma;
      for (int ch = first_child_[w]; ch >= 0; ch = next_sib_[ch])
        stack_.push_back(ch);
    }
  }

  void set_from_parent(int w) {
    const int p = parent_[w];
    const double cst = arc_cost(pred_[w]);
    // Reduced cost cost + pi[tail] - pi[head] is zero on tree arcs.
    pi_[w] = (dir_[w] == kUp) ? pi_[p] - cst : pi_[p] + cst;
    depth_[w] = depth_[p] + 1;
  }

  void recompute_potentials_from_root() {
    pi_[root_] = 0.0;
    depth_[root_] = 0;
    stack_.clear();
    for (int ch = first_child_[root_]; ch >= 0; ch = next_sib_[ch])
      stack_.push_back(ch);
    while (!stack_.empty()) {
      const int w = stack_.back();
      stack_.pop_back();
      set_from_parent(w);
      for (int ch = first_child_[w]; ch >= 0; ch = next_sib_[ch])
        stack_.push_back(ch);
    }
  }

  const double* cost_;
  int n_, m_, root_;
  const kernels::KernelTable& kernels_;
  double art_cost_ = 0.0;
  double tolerance_ = 0.0;
  std::int64_t block_ = 0;
  int next_row_ = 0;
  std::int64_t pivots_ = 0;

  std::vector<int> parent_;
  std::vector<std::int64_t> pred_;
  std::vector<std::int8_t> dir_;
  std::vector<double> flow_;
  std::vector<double> pi_;
  std::vector<int> depth_;
  std::vector<int> first_child_, next_sib_, prev_sib_;
  std::vector<int> stack_;
};

// Dense Dijkstra on a complete digraph with nonnegative weights.
std::vector<double> shortest_from(const std::vector<double>& w, int r,
                                  int source) {
  std::vector<double> dist(std::size_t(r), kInf);
  std::vector<char> done(std::size_t(r), 0);
  dist[std::size_t(source)] = 0.0;
  for (int it = 0; it < r; ++it) {
    int best = -1;
    for (int k = 0; k < r; ++k) {
      if (!done[std::size_t(k)] &&
          (best < 0 || dist[std::size_t(k)] < dist[std::size_t(best)]))
        best = k;
    }
    if (best < 0 || dist[std::size_t(best)] == kInf) break;
    done[std::size_t(best)] = 1;
    for (int k = 0; k < r; ++k) {
      const double cand =
          dist[std::size_t(best)] + w[std::size_t(best) * std::size_t(r) + std::size_t(k)];
      if (cand < dist[std::size_t(k)]) dist[std::size_t(k)] = cand;
    }
  }
  return dist;
}

int NetworkSimplex::extract_duals(std::vector<double>& f,
                                  std::vector<double>& g) const {
  // Potentials inside each piece hanging from the root, anchored at zero on
  // the piece's top node. Only real arcs occur below the root.
  std::vector<double> pi(std::size_t(root_ + 1), 0.0);
  std::vector<int> piece(std::size_t(root_), -1);
  std::vector<int> stack;
  int pieces = 0;
  for (int top = first_child_[root_]; top >= 0; top = next_sib_[top]) {
    pi[std::size_t(top)] = 0.0;
    piece[std::size_t(top)] = pieces;
    for (int ch = first_child_[top]; ch >= 0; ch = next_sib_[ch])
      stack.push_back(ch);
    while (!stack.empty()) {
      const int w = stack.back();
      stack.pop_back();
      const int p = parent_[w];
      const double cst = cost_[pred_[w]];
      pi[std::size_t(w)] = (dir_[w] == kUp) ? pi[std::size_t(p)] - cst
                                            : pi[std::size_t(p)] + cst;
      piece[std::size_t(w)] = pieces;
      for (int ch = first_child_[w]; ch >= 0; ch = next_sib_[ch])
        stack.push_back(ch);
    }
    ++pieces;
  }
  f.assign(std::size_t(n_), 0.0);
  g.assign(std::size_t(m_), 0.0);
  for (int i = 0; i < n_; ++i) f[std::size_t(i)] = -pi[std::size_t(i)];
  for (int j = 0; j < m_; ++j) g[std::size_t(j)] = pi[std::size_t(n_ + j)];
  if (pieces <= 1) return pieces;

  // Shifting piece k by s_k (f += s_k, g -= s_k on its nodes) stays feasible
  // iff s_k - s_l <= slack(k, l) for every pair, where slack(k, l) is the
  // smallest reduced cost from rows of k to columns of l. With piece 0 fixed
  // at zero, shortest paths give the largest and the smallest feasible
  // shifts; their average is feasible as well.
  const std::size_t r = std::size_t(pieces);
  std::vector<double> slack(r * r, kInf);
  for (int i = 0; i < n_; ++i) {
    const std::size_t pk = std::size_t(piece[std::size_t(i)]);
    const double* row = cost_ + std::size_t(i) * std::size_t(m_);
    for (int j = 0; j < m_; ++j) {
      const std::size_t pl = std::size_t(piece[std::size_t(n_ + j)]);
      if (pk == pl) continue;
      const double rc =
          std::max(0.0, row[j] - f[std::size_t(i)] - g[std::size_t(j)]);
      double& cell = slack[pk * r + pl];
      if (rc < cell) cell = rc;
    }
  }
  // Upper shifts: s_k <= s_l + slack(k, l), i.e. an edge l -> k.
  std::vector<double> up_w(r * r, kInf), down_w(r * r, kInf);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t l = 0; l < r; ++l) {
      if (k == l) continue;
      up_w[l * r + k] = slack[k * r + l];
      down_w[k * r + l] = slack[k * r + l];
    }
  }
  const std::vector<double> upper = shortest_from(up_w, pieces, 0);
  const std::vector<double> lower = shortest_from(down_w, pieces, 0);
  std::vector<double> shift(r, 0.0);
  for (std::size_t k = 1; k < r; ++k) {
    const double hi = upper[k];
    const double lo = -lower[k];
    if (std::isfinite(hi) && std::isfinite(lo))
      shift[k] = 0.5 * (hi + lo);
    else if (std::isfinite(hi))
      shift[k] = std::min(0.0, hi);
    else if (std::isfinite(lo))
      shift[k] = std::max(0.0, lo);
  }
  for (int i = 0; i < n_; ++i) f[std::size_t(i)] += shift[std::size_t(piece[std::size_t(i)])];
  for (int j = 0; j < m_; ++j)
    g[std::size_t(j)] -= shift[std::size_t(piece[std::size_t(n_ + j)])];
  return pieces;
}

}  // namespace

TransportSolution solve_exact_ot(std::span<const double> a,
                                 std::span<const double> b,
                                 const CostMatrix& cost, OtStats* stats) {
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  if (Eigen::Index(a.size()) != n || Eigen::Index(b.size()) != m)
    throw InputError("solve_exact_ot: weight lengths do not match the cost");
  validate_probability_vector(a, kOtWeightTolerance, "solve_exact_ot source");
  validate_probability_vector(b, kOtWeightTolerance, "solve_exact_ot target");

  std::vector<int> rows, cols;
  for (Eigen::Index i = 0; i < n; ++i)
    if (a[std::size_t(i)] > 0.0) rows.push_back(int(i));
  for (Eigen::Index j = 0; j < m; ++j)
    if (b[std::size_t(j)] > 0.0) cols.push_back(int(j));
  const int na = int(rows.size());
  const int ma = int(cols.size());
  const bool full = (na == n && ma == m);

  Matrix compact;
  const double* cdata = cost.entries().data();
  if (!full) {
    compact.resize(na, ma);
    for (int r = 0; r < na; ++r)
      for (int c = 0; c < ma; ++c) compact(r, c) = cost(rows[std::size_t(r)], cols[std::size_t(c)]);
    cdata = compact.data();
  }
  std::vector<double> supply(static_cast<std::size_t>(na)), demand(static_cast<std::size_t>(ma));
  for (int r = 0; r < na; ++r) supply[std::size_t(r)] = a[std::size_t(rows[std::size_t(r)])];
  for (int c = 0; c < ma; ++c) demand[std::size_t(c)] = b[std::size_t(cols[std::size_t(c)])];

  NetworkSimplex simplex(cdata, na, ma, supply.data(), demand.data());
  simplex.run();

  TransportSolution sol;
  sol.plan = Matrix::Zero(n, m);
  simplex.for_each_basic_flow([&](int r, int c, double flow) {
    sol.plan(rows[std::size_t(r)], cols[std::size_t(c)]) = std::max(flow, 0.0);
  });

  std::vector<double> f_active, g_active;
  const int pieces = simplex.extract_duals(f_active, g_active);
  if (stats) {
    stats->pivots = simplex.pivots();
    stats->components = pieces;
  }

  sol.dual_source = Vector::Zero(n);
  sol.dual_target = Vector::Zero(m);
  std::vector<char> row_set(std::size_t(n), 0), col_set(std::size_t(m), 0);
  for (int r = 0; r < na; ++r) {
    sol.dual_source[rows[std::size_t(r)]] = f_active[std::size_t(r)];
    row_set[std::size_t(rows[std::size_t(r)])] = 1;
  }
  for (int c = 0; c < ma; ++c) {
    sol.dual_target[cols[std::size_t(c)]] = g_active[std::size_t(c)];
    col_set[std::size_t(cols[std::size_t(c)])] = 1;
  }
  // Zero-mass columns, then zero-mass rows: c-transforms against the side
  // that is already fixed.
  for (Eigen::Index j = 0; j < m; ++j) {
    if (col_set[std::size_t(j)]) continue;
    double best = kInf;
    for (int r : rows) best = std::min(best, cost(r, j) - sol.dual_source[r]);
    sol.dual_target[j] = best;
  }
  if (na < n) {
    const auto& kt = kernels::active();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (row_set[std::size_t(i)]) continue;
      sol.dual_source[i] =
          kt.shifted_argmin(&cost.entries()(i, 0), sol.dual_target.data(),
                            std::size_t(m))
              .value;
    }
  }

  const double mean = sol.dual_source.mean();
  sol.dual_source.array() -= mean;
  sol.dual_target.array() += mean;

  sol.value = (sol.plan.array() * cost.entries().array()).sum();
  return sol;
}

CostMatrix squared_euclidean_cost(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols())
    throw InputError("squared_euclidean_cost: dimension mismatch");
  const Matrix yt = y.transpose();
  Matrix out(x.rows(), y.rows());
  kernels::pairwise_sq_dist({x.data(), std::size_t(x.size())},
                            {yt.data(), std::size_t(yt.size())},
                            std::size_t(x.rows()), std::size_t(y.rows()),
                            std::size_t(x.cols()), 1.0,
                            {out.data(), std::size_t(out.size())}, false);
  return CostMatrix(std::move(out));
}

double wasserstein2_squared(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  const CostMatrix c = squared_euclidean_cost(p.atoms(), q.atoms());
  return solve_exact_ot({p.weights().data(), std::size_t(p.size())},
                        {q.weights().data(), std::size_t(q.size())}, c)
      .value;
}

}  // namespace wjdot
