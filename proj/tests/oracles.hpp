#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's numerical code paths.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using IntVec = std::vector<long long>;

struct Cvp {
  double value = 0.0;
  std::vector<IntVec> minimizers;  // sorted
};

// 1/2 min over n in {-box..box}^r of (x+n)^T Q (x+n), exhaustive.
inline Cvp brute_force_cvp(const Eigen::MatrixXd& q, const Eigen::VectorXd& x, int box = 6,
                           double window = 1e-9) {
  const int r = static_cast<int>(q.rows());
  Cvp out;
  if (r == 0) {
    out.minimizers.push_back({});
    return out;
  }
  std::vector<std::pair<double, IntVec>> all;
  IntVec n(static_cast<std::size_t>(r), -box);
  double best = INFINITY;
  for (;;) {
    Eigen::VectorXd v = x;
    for (int i = 0; i < r; ++i) v(i) += static_cast<double>(n[static_cast<std::size_t>(i)]);
    const double val = 0.5 * v.dot(q * v);
    best = std::min(best, val);
    if (val <= best + 2 * window) all.emplace_back(val, n);
    int k = 0;
    while (k < r && n[static_cast<std::size_t>(k)] == box) n[static_cast<std::size_t>(k++)] = -box;
    if (k == r) break;
    ++n[static_cast<std::size_t>(k)];
  }
  out.value = best;
  for (const auto& [val, vec] : all)
    if (val <= best + window) out.minimizers.push_back(vec);
  std::sort(out.minimizers.begin(), out.minimizers.end());
  return out;
}

// Midpoint Riemann sum of 2 * ||Psi|| with a box search at every node.
inline double riemann_moment(const Eigen::MatrixXd& q, int per_axis, int box = 2) {
  const int r = static_cast<int>(q.rows());
  if (r == 0) return 0.0;
  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  double total = 0.0;
  std::uint64_t count = 0;
  for (;;) {
    Eigen::VectorXd x(r);
    for (int i = 0; i < r; ++i) x(i) = (idx[static_cast<std::size_t>(i)] + 0.5) / per_axis;
    total += 2.0 * brute_force_cvp(q, x, box).value;
    ++count;
    int k = 0;
    while (k < r && idx[static_cast<std::size_t>(k)] == per_axis - 1) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == r) break;
    ++idx[static_cast<std::size_t>(k)];
  }
  return total / static_cast<double>(count);
}

// theta(tau, z) summed over the box |n_i| <= bound.
inline std::complex<double> partial_theta(const Eigen::MatrixXcd& tau, const Eigen::VectorXcd& z, int bound) {
  const int g = static_cast<int>(tau.rows());
  const std::complex<double> i_pi(0.0, std::numbers::pi);
  std::vector<int> n(static_cast<std::size_t>(g), -bound);
  std::complex<double> sum = 0.0;
  for (;;) {
    Eigen::VectorXcd v(g);
    for (int i = 0; i < g; ++i) v(i) = static_cast<double>(n[static_cast<std::size_t>(i)]);
    sum += std::exp(i_pi * (v.transpose() * tau * v)(0, 0) + 2.0 * i_pi * (v.transpose() * z)(0, 0));
    int k = 0;
    while (k < g && n[static_cast<std::size_t>(k)] == bound) n[static_cast<std::size_t>(k++)] = -bound;
    if (k == g) break;
    ++n[static_cast<std::size_t>(k)];
  }
  return sum;
}

// ||theta|| from the partial sum and the defining formula with Im z.
inline double partial_theta_norm(const Eigen::MatrixXcd& tau, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                 int bound) {
  const Eigen::MatrixXd y = tau.imag();
  const Eigen::VectorXcd z = a.cast<std::complex<double>>() + tau * b.cast<std::complex<double>>();
  const Eigen::VectorXd im = z.imag();
  const double quad = im.dot(y.ldlt().solve(im));
  return std::pow(y.determinant(), 0.25) * std::exp(-std::numbers::pi * quad) * std::abs(partial_theta(tau, z, bound));
}

// I(A, Theta) for tau = iY (g = 1) in closed form, from the Jacobi triple
// product and Jensen's formula:
//   I = 1/2 log pi + L/12 - 1/2 log L - 2 sum_m log(1 - e^{-mL}),  L = 2 pi Y.
inline double elliptic_invariant_imaginary_axis(double y) {
  const double l = 2.0 * std::numbers::pi * y;
  double corr = 0.0;
  for (int m = 1; m < 200; ++m) corr += std::log1p(-std::exp(-m * l));
  return 0.5 * std::log(std::numbers::pi) + l / 12.0 - 0.5 * std::log(l) - 2.0 * corr;
}

// Two-terminal series-parallel reduction. Returns nullopt when the network
// is not reducible to a single edge between the terminals.
struct Resistor {
  int u, v;
  double r;
};

inline std::optional<double> series_parallel(std::vector<Resistor> edges, int s, int t) {
  if (s == t) return 0.0;
  for (bool changed = true; changed;) {
    changed = false;
    // drop loops (they carry no current)
    const auto loop_end = std::remove_if(edges.begin(), edges.end(), [](const Resistor& e) { return e.u == e.v; });
    if (loop_end != edges.end()) {
      edges.erase(loop_end, edges.end());
      changed = true;
    }
    // parallel merge
    for (std::size_t i = 0; i < edges.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        const bool same = (edges[i].u == edges[j].u && edges[i].v == edges[j].v) ||
                          (edges[i].u == edges[j].v && edges[i].v == edges[j].u);
        if (same) {
          edges[i].r = edges[i].r * edges[j].r / (edges[i].r + edges[j].r);
          edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
      }
    if (changed) continue;
    // series merge at a non-terminal vertex of degree 2; dangling vertices go
    std::map<int, std::vector<std::size_t>> inc;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      inc[edges[i].u].push_back(i);
      inc[edges[i].v].push_back(i);
    }
    for (const auto& [v, es] : inc) {
      if (v == s || v == t) continue;
      if (es.size() == 1) {
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(es[0]));
        changed = true;
        break;
      }
      if (es.size() == 2) {
        const Resistor a = edges[es[0]], b = edges[es[1]];
        const int x = a.u == v ? a.v : a.u;
        const int y = b.u == v ? b.v : b.u;
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(std::max(es[0], es[1])));
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(std::min(es[0], es[1])));
        edges.push_back({x, y, a.r + b.r});
        changed = true;
        break;
      }
    }
  }
  if (edges.size() == 1 && ((edges[0].u == s && edges[0].v == t) || (edges[0].u == t && edges[0].v == s)))
    return edges[0].r;
  return std::nullopt;
}

// Circle of length l: resistance between points at distance d.
inline double circle_resistance(double l, double d) { return d * (l - d) / l; }

// Random Gram matrix A^T A + shift I with small integer-ish entries.
inline Eigen::MatrixXd random_gram(std::mt19937_64& rng, int r, double shift = 0.5) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = u(rng);
  Eigen::MatrixXd q = a.transpose() * a + shift * Eigen::MatrixXd::Identity(r, r);
  return 0.5 * (q + q.transpose());
}

// Random unimodular integer matrix: product of elementary operations.
inline Eigen::MatrixXi random_unimodular(std::mt19937_64& rng, int r, int steps = 6) {
  Eigen::MatrixXi m = Eigen::MatrixXi::Identity(r, r);
  if (r < 2) return m;
  std::uniform_int_distribution<int> pick(0, r - 1), coef(-1, 1), flip(0, 3);
  for (int s = 0; s < steps; ++s) {
    const int i = pick(rng);
    int j = pick(rng);
    if (i == j) j = (j + 1) % r;
    const int c = coef(rng);
    m.col(i) += c * m.col(j);
    if (flip(rng) == 0) m.col(i) = -m.col(i).eval();
  }
  return m;
}

// A random connected multigraph on 3..5 vertices with at most 6 edges and a
// polarization making K effective with even degree. Vertex ids "v0".."vn".
struct RandomGraph {
  int vertices = 0;
  std::vector<Resistor> edges;  // r = length
  std::vector<int> q;
};

inline RandomGraph random_polarized_graph(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nv(3, 5);
  std::uniform_real_distribution<double> len(0.5, 2.0);
  RandomGraph g;
  g.vertices = nv(rng);
  // spanning tree first
  for (int v = 1; v < g.vertices; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    g.edges.push_back({parent(rng), v, len(rng)});
  }
  std::uniform_int_distribution<int> extra(1, 6 - (g.vertices - 1));
  std::uniform_int_distribution<int> anyv(0, g.vertices - 1);
  const int n_extra = extra(rng);
  for (int k = 0; k < n_extra; ++k) g.edges.push_back({anyv(rng), anyv(rng), len(rng)});
  std::vector<int> valency(static_cast<std::size_t>(g.vertices), 0);
  for (const auto& e : g.edges) {
    ++valency[static_cast<std::size_t>(e.u)];
    ++valency[static_cast<std::size_t>(e.v)];
  }
  std::uniform_int_distribution<int> qd(0, 2);
  g.q.assign(static_cast<std::size_t>(g.vertices), 0);
  int total = 0;
  for (int v = 0; v < g.vertices; ++v) {
    int& qv = g.q[static_cast<std::size_t>(v)];
    qv = qd(rng);
    qv = std::max(qv, 2 - valency[static_cast<std::size_t>(v)]);
    total += valency[static_cast<std::size_t>(v)] + qv - 2;
  }
  if (total % 2 != 0) ++g.q[0];
  return g;
}

}  // namespace oracle
