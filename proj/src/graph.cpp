#include "tropdeg/graph.hpp"

#include "tropdeg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <string>

namespace tropdeg {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

bool connected(int n, const std::vector<GraphEdge>& edges, int skip = -1) {
  if (n <= 1) return true;
  UnionFind uf(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (static_cast<int>(e) == skip) continue;
    uf.unite(edges[e].u, edges[e].v);
  }
  const int root = uf.find(0);
  for (int v = 1; v < n; ++v)
    if (uf.find(v) != root) return false;
  return true;
}

// Resistor network on nodes 0..n-1; resistance by a grounded solve.
struct Network {
  int nodes = 0;
  std::vector<GraphEdge> resistors;  // length = resistance

  double resistance(int a, int b) const {
    if (a == b) return 0.0;
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(nodes, nodes);
    for (const auto& r : resistors) {
      if (r.u == r.v) continue;
      const double c = 1.0 / r.length;
      lap(r.u, r.u) += c;
      lap(r.v, r.v) += c;
      lap(r.u, r.v) -= c;
      lap(r.v, r.u) -= c;
    }
    // ground b: drop its row and column
    std::vector<int> keep;
    for (int i = 0; i < nodes; ++i)
      if (i != b) keep.push_back(i);
    const int k = static_cast<int>(keep.size());
    Eigen::MatrixXd reduced(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    int a_pos = -1;
    for (int i = 0; i < k; ++i) {
      if (keep[static_cast<std::size_t>(i)] == a) a_pos = i;
      for (int j = 0; j < k; ++j) reduced(i, j) = lap(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
    }
    rhs(a_pos) = 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(reduced);
    if (llt.info() != Eigen::Success) fail(ErrorCode::SolveFailure, "network Laplacian is singular");
    const Eigen::VectorXd x = llt.solve(rhs);
    return x(a_pos);
  }
};

double sum_density_mass(const MetrizedGraph& graph, const ZhangMeasure& mu) {
  double total = 0.0;
  for (int e = 0; e < graph.edge_count(); ++e) total += mu.densities[static_cast<std::size_t>(e)] * graph.edge(e).length;
  return total;
}

}  // namespace

int MetrizedGraph::valency(int v) const {
  int n = 0;
  for (const auto& e : edges_) {
    if (e.u == v) ++n;
    if (e.v == v) ++n;
  }
  return n;
}

int MetrizedGraph::vertex_index(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::InvalidArgument, "unknown vertex '" + id + "'");
  return it->second;
}

double MetrizedGraph::total_length() const {
  double total = 0.0;
  for (const auto& e : edges_) total += e.length;
  return total;
}

MetrizedGraph MetrizedGraph::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorCode::InvalidArgument, "scale must be positive");
  auto edges = edges_;
  for (auto& e : edges) e.length *= c;
  return make_metrized_graph(ids_, std::move(edges));
}

MetrizedGraph MetrizedGraph::subdivided(int e, double offset, const std::string& new_id) const {
  if (e < 0 || e >= edge_count()) fail(ErrorCode::InvalidArgument, "edge index out of range");
  const GraphEdge old = edges_[static_cast<std::size_t>(e)];
  if (!(offset > 0.0 && offset < old.length)) fail(ErrorCode::InvalidArgument, "offset must lie inside the edge");
  auto ids = ids_;
  ids.push_back(new_id);
  const int w = static_cast<int>(ids.size()) - 1;
  auto edges = edges_;
  edges[static_cast<std::size_t>(e)] = {old.u, w, offset};
  edges.push_back({w, old.v, old.length - offset});
  return make_metrized_graph(std::move(ids), std::move(edges));
}

MetrizedGraph make_metrized_graph(std::vector<std::string> ids, std::vector<GraphEdge> edges) {
  MetrizedGraph g;
  if (ids.empty()) fail(ErrorCode::InvalidArgument, "graph needs at least one vertex");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!g.index_.emplace(ids[i], static_cast<int>(i)).second) {
      fail(ErrorCode::InvalidArgument, "duplicate vertex id '" + ids[i] + "'");
    }
  }
  const int n = static_cast<int>(ids.size());
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) fail(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) fail(ErrorCode::InvalidArgument, "edge lengths must be positive");
  }
  if (!connected(n, edges)) fail(ErrorCode::DisconnectedGraph, "graph is not connected");
  g.ids_ = std::move(ids);
  g.edges_ = std::move(edges);
  return g;
}

int PolarizedGraph::genus() const {
  int deg = 0;
  for (int v = 0; v < graph.vertex_count(); ++v) deg += canonical_multiplicity(v);
  return deg / 2 + 1;
}

PolarizedGraph make_polarized_graph(MetrizedGraph graph, std::vector<int> q) {
  if (static_cast<int>(q.size()) != graph.vertex_count()) {
    fail(ErrorCode::InvalidArgument, "polarization needs one entry per vertex");
  }
  int deg = 0;
  for (int v = 0; v < graph.vertex_count(); ++v) {
    const int qv = q[static_cast<std::size_t>(v)];
    if (qv < 0) fail(ErrorCode::InvalidArgument, "polarization must be non-negative");
    const int k = graph.valency(v) + qv - 2;
    if (k < 0) {
      fail(ErrorCode::InvalidArgument, "K is not effective at vertex '" + graph.vertex_ids()[static_cast<std::size_t>(v)] + "'");
    }
    deg += k;
  }
  if (deg % 2 != 0) fail(ErrorCode::InvalidArgument, "deg K must be even");
  return PolarizedGraph{std::move(graph), std::move(q)};
}

void check_point(const MetrizedGraph& graph, const GraphPoint& p) {
  if (p.vertex >= 0) {
    if (p.vertex >= graph.vertex_count() || p.edge >= 0) fail(ErrorCode::InvalidArgument, "invalid graph point");
    return;
  }
  if (p.edge < 0 || p.edge >= graph.edge_count()) fail(ErrorCode::InvalidArgument, "invalid graph point");
  if (!(p.offset > 0.0 && p.offset < graph.edge(p.edge).length)) {
    fail(ErrorCode::InvalidArgument, "edge offset must lie strictly inside the edge");
  }
}

GenusInfo genus_and_lengths(const PolarizedGraph& graph) {
  GenusInfo info;
  info.g = graph.genus();
  info.g0 = graph.graph.edge_count() - graph.graph.vertex_count() + 1;
  info.delta = graph.graph.total_length();
  return info;
}

double effective_resistance(const MetrizedGraph& graph, const GraphPoint& p, const GraphPoint& q) {
  check_point(graph, p);
  check_point(graph, q);
  Network net;
  net.nodes = graph.vertex_count();
  // interior cut points per edge
  std::map<int, std::vector<double>> cuts;
  for (const auto* x : {&p, &q})
    if (x->edge >= 0) cuts[x->edge].push_back(x->offset);
  int node_p = p.vertex, node_q = q.vertex;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const GraphEdge& edge = graph.edge(e);
    auto it = cuts.find(e);
    if (it == cuts.end()) {
      net.resistors.push_back(edge);
      continue;
    }
    auto offsets = it->second;
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    int prev = edge.u;
    double prev_offset = 0.0;
    for (double off : offsets) {
      const int node = net.nodes++;
      net.resistors.push_back({prev, node, off - prev_offset});
      if (p.edge == e && p.offset == off) node_p = node;
      if (q.edge == e && q.offset == off) node_q = node;
      prev = node;
      prev_offset = off;
    }
    net.resistors.push_back({prev, edge.v, edge.length - prev_offset});
  }
  return net.resistance(node_p, node_q);
}

std::optional<double> edge_complement_resistance(const MetrizedGraph& graph, int e) {
  if (e < 0 || e >= graph.edge_count()) fail(ErrorCode::InvalidArgument, "edge index out of range");
  const GraphEdge& edge = graph.edge(e);
  if (edge.u == edge.v) return 0.0;
  if (!connected(graph.vertex_count(), graph.edges(), e)) return std::nullopt;
  Network net;
  net.nodes = graph.vertex_count();
  for (int f = 0; f < graph.edge_count(); ++f)
    if (f != e) net.resistors.push_back(graph.edge(f));
  return net.resistance(edge.u, edge.v);
}

double ZhangMeasure::total_mass(const MetrizedGraph& graph) const {
  double total = std::accumulate(atoms.begin(), atoms.end(), 0.0);
  return total + sum_density_mass(graph, *this);
}

ZhangMeasure zhang_measure(const PolarizedGraph& pg) {
  const int g = pg.genus();
  if (g == 0) fail(ErrorCode::GenusZero, "Zhang measure needs g >= 1");
  const MetrizedGraph& graph = pg.graph;
  ZhangMeasure mu;
  mu.atoms.resize(static_cast<std::size_t>(graph.vertex_count()));
  // delta_K - delta_Kcan = sum q_p p
  for (int v = 0; v < graph.vertex_count(); ++v) {
    mu.atoms[static_cast<std::size_t>(v)] = pg.q[static_cast<std::size_t>(v)] / (2.0 * g);
  }
  mu.densities.resize(static_cast<std::size_t>(graph.edge_count()));
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto r = edge_complement_resistance(graph, e);
    // bridges: 2/(inf + l) = 0
    mu.densities[static_cast<std::size_t>(e)] = r ? 1.0 / (g * (*r + graph.edge(e).length)) : 0.0;
  }
  return mu;
}

namespace {

int interior_index(int vertices, int s, int e, int step) { return vertices + e * (s - 1) + (step - 1); }

}  // namespace

DiscreteGreen discrete_green(const MetrizedGraph& graph, const ZhangMeasure& mu, int subdivisions) {
  if (subdivisions < 2) fail(ErrorCode::InvalidArgument, "subdivisions must be at least 2");
  const int nv = graph.vertex_count();
  const int ne = graph.edge_count();
  const int s = subdivisions;
  const int n = nv + ne * (s - 1);
  DiscreteGreen out;
  out.subdivisions = s;
  out.vertex_count = nv;
  out.nodes.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < nv; ++v) out.nodes[static_cast<std::size_t>(v)].vertex = v;
  out.laplacian = Eigen::MatrixXd::Zero(n, n);
  out.mass = Eigen::VectorXd::Zero(n);
  for (int v = 0; v < nv; ++v) out.mass(v) = mu.atoms[static_cast<std::size_t>(v)];
  for (int e = 0; e < ne; ++e) {
    const GraphEdge& edge = graph.edge(e);
    const double h = edge.length / s;
    const double c = 1.0 / h;
    const double seg_mass = mu.densities[static_cast<std::size_t>(e)] * h;
    auto node_at = [&](int k) {
      if (k == 0) return edge.u;
      if (k == s) return edge.v;
      return interior_index(nv, s, e, k);
    };
    for (int k = 1; k < s; ++k) {
      auto& node = out.nodes[static_cast<std::size_t>(interior_index(nv, s, e, k))];
      node.edge = e;
      node.step = k;
      node.offset = k * h;
    }
    for (int k = 0; k < s; ++k) {
      const int a = node_at(k), b = node_at(k + 1);
      out.mass(a) += 0.5 * seg_mass;
      out.mass(b) += 0.5 * seg_mass;
      if (a == b) continue;
      out.laplacian(a, a) += c;
      out.laplacian(b, b) += c;
      out.laplacian(a, b) -= c;
      out.laplacian(b, a) -= c;
    }
  }
  // Grounded inverse: K = [0 0; 0 L_red^{-1}] with node 0 grounded, so
  // L K = I - e_0 1^T.
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  if (n > 1) {
    const Eigen::MatrixXd reduced = out.laplacian.bottomRightCorner(n - 1, n - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(reduced);
    if (llt.info() != Eigen::Success) fail(ErrorCode::SolveFailure, "grounded Laplacian is singular");
    k.bottomRightCorner(n - 1, n - 1) = llt.solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
  }
  // g = K - (Km) 1^T - 1 (Km)^T + (m^T K m) 1 1^T solves L_y g(x, .) = delta_x - mu
  // with zero mu-average.
  const Eigen::VectorXd km = k * out.mass;
  const double mkm = out.mass.dot(km);
  out.green = k;
  out.green.colwise() -= km;
  out.green.rowwise() -= km.transpose();
  out.green.array() += mkm;
  return out;
}

namespace {

std::vector<double> node_diagonal(const DiscreteGreen& d) {
  std::vector<double> out(static_cast<std::size_t>(d.green.rows()));
  for (Eigen::Index i = 0; i < d.green.rows(); ++i) out[static_cast<std::size_t>(i)] = d.green(i, i);
  return out;
}

struct PotentialSums {
  double mu_integral = 0.0;  // int g(x,x) mu
  double k_sum = 0.0;        // sum K_p g(p,p)
};

PotentialSums potential_sums(const PolarizedGraph& pg, const DiscreteGreen& d) {
  PotentialSums out;
  // trapezoid on each segment for the density part, exact at atoms; both
  // reduce to the lumped node masses
  for (Eigen::Index i = 0; i < d.green.rows(); ++i) out.mu_integral += d.mass(i) * d.green(i, i);
  for (int v = 0; v < pg.graph.vertex_count(); ++v) out.k_sum += pg.canonical_multiplicity(v) * d.green(v, v);
  return out;
}

void fill_potential(const PotentialSums& sums, GraphInvariants& inv) {
  const double g = inv.g;
  inv.epsilon = (2.0 * g - 2.0) * sums.mu_integral + sums.k_sum;
  inv.phi = -0.25 * inv.delta + 0.25 * ((10.0 * g + 2.0) * sums.mu_integral - sums.k_sum);
  inv.tau = (inv.delta + 4.0 * inv.phi - 2.0 * inv.epsilon) / 12.0;
}

}  // namespace

GreenDiagonal green_diagonal(const MetrizedGraph& graph, const ZhangMeasure& mu, int subdivisions,
                             bool extrapolate) {
  const DiscreteGreen coarse = discrete_green(graph, mu, subdivisions);
  std::vector<double> values = node_diagonal(coarse);
  if (extrapolate) {
    const DiscreteGreen fine = discrete_green(graph, mu, 2 * subdivisions);
    const int nv = graph.vertex_count();
    for (std::size_t i = 0; i < coarse.nodes.size(); ++i) {
      const auto& node = coarse.nodes[i];
      const int j = node.vertex >= 0 ? node.vertex : interior_index(nv, 2 * subdivisions, node.edge, 2 * node.step);
      values[i] = (4.0 * fine.green(j, j) - values[i]) / 3.0;
    }
  }
  GreenDiagonal out;
  out.subdivisions = subdivisions;
  out.extrapolated = extrapolate;
  for (std::size_t i = 0; i < coarse.nodes.size(); ++i) {
    const auto& node = coarse.nodes[i];
    out.samples.push_back({node.vertex, node.edge, node.offset, values[i]});
  }
  return out;
}

GraphInvariants potential_invariants(const PolarizedGraph& pg, int subdivisions, bool extrapolate) {
  GraphInvariants inv;
  const GenusInfo info = genus_and_lengths(pg);
  if (info.g == 0) fail(ErrorCode::GenusZero, "invariants need g >= 1");
  inv.g = info.g;
  inv.g0 = info.g0;
  inv.delta = info.delta;
  const ZhangMeasure mu = zhang_measure(pg);
  PotentialSums sums = potential_sums(pg, discrete_green(pg.graph, mu, subdivisions));
  if (extrapolate) {
    const PotentialSums fine = potential_sums(pg, discrete_green(pg.graph, mu, 2 * subdivisions));
    sums.mu_integral = (4.0 * fine.mu_integral - sums.mu_integral) / 3.0;
    sums.k_sum = (4.0 * fine.k_sum - sums.k_sum) / 3.0;
  }
  fill_potential(sums, inv);
  return inv;
}

GraphInvariants graph_invariants(const PolarizedGraph& pg, const GraphInvariantOptions& options) {
  GraphInvariants inv = potential_invariants(pg, options.subdivisions, options.extrapolate);
  const TropicalJacobian jac = tropical_jacobian(pg.graph);
  const MomentOptions mo = options.moment ? *options.moment : default_moment_options(jac.gram.rank());
  const MomentEstimate m = tropical_moment(jac.gram, mo);
  inv.i_jac = m.estimate;
  inv.i_jac_error = m.error_estimate;
  return inv;
}

TropicalJacobian tropical_jacobian(const MetrizedGraph& graph) {
  const int nv = graph.vertex_count(), ne = graph.edge_count();
  std::vector<int> parent_edge(static_cast<std::size_t>(nv), -1);
  std::vector<int> parent(static_cast<std::size_t>(nv), -1);
  std::vector<bool> seen(static_cast<std::size_t>(nv), false), tree(static_cast<std::size_t>(ne), false);
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(nv));
  for (int e = 0; e < ne; ++e) {
    incident[static_cast<std::size_t>(graph.edge(e).u)].push_back(e);
    if (graph.edge(e).v != graph.edge(e).u) incident[static_cast<std::size_t>(graph.edge(e).v)].push_back(e);
  }
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const int x = frontier.front();
    frontier.pop();
    for (int e : incident[static_cast<std::size_t>(x)]) {
      const GraphEdge& edge = graph.edge(e);
      const int y = edge.u == x ? edge.v : edge.u;
      if (seen[static_cast<std::size_t>(y)]) continue;
      seen[static_cast<std::size_t>(y)] = true;
      parent[static_cast<std::size_t>(y)] = x;
      parent_edge[static_cast<std::size_t>(y)] = e;
      tree[static_cast<std::size_t>(e)] = true;
      frontier.push(y);
    }
  }
  // chain of the tree path from x up to the root
  auto path_to_root = [&](int x, std::vector<int>& chain, int sign) {
    while (parent[static_cast<std::size_t>(x)] >= 0) {
      const int e = parent_edge[static_cast<std::size_t>(x)];
      const int up = parent[static_cast<std::size_t>(x)];
      // traversing x -> up along e
      chain[static_cast<std::size_t>(e)] += sign * (graph.edge(e).u == x ? 1 : -1);
      x = up;
    }
  };
  TropicalJacobian jac;
  for (int e = 0; e < ne; ++e) {
    if (tree[static_cast<std::size_t>(e)]) continue;
    std::vector<int> chain(static_cast<std::size_t>(ne), 0);
    chain[static_cast<std::size_t>(e)] = 1;  // u -> v, then back v -> root -> u
    path_to_root(graph.edge(e).v, chain, 1);
    path_to_root(graph.edge(e).u, chain, -1);
    jac.cycle_basis.push_back(std::move(chain));
  }
  jac.gram = cycle_gram(graph, jac.cycle_basis);
  return jac;
}

GramLattice cycle_gram(const MetrizedGraph& graph, const std::vector<std::vector<int>>& cycles) {
  const int ne = graph.edge_count();
  const int r = static_cast<int>(cycles.size());
  for (const auto& c : cycles) {
    if (static_cast<int>(c.size()) != ne) fail(ErrorCode::InvalidArgument, "cycle needs one coefficient per edge");
    std::vector<long long> boundary(static_cast<std::size_t>(graph.vertex_count()), 0);
    for (int e = 0; e < ne; ++e) {
      boundary[static_cast<std::size_t>(graph.edge(e).v)] += c[static_cast<std::size_t>(e)];
      boundary[static_cast<std::size_t>(graph.edge(e).u)] -= c[static_cast<std::size_t>(e)];
    }
    if (std::any_of(boundary.begin(), boundary.end(), [](long long b) { return b != 0; })) {
      fail(ErrorCode::InvalidArgument, "chain is not a cycle");
    }
  }
  std::vector<Rational> lengths;
  for (int e = 0; e < ne; ++e) lengths.push_back(rational_from_double(graph.edge(e).length));
  RationalMatrix gram(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      Rational sum = 0;
      for (int e = 0; e < ne; ++e) {
        const int ci = cycles[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
        const int cj = cycles[static_cast<std::size_t>(j)][static_cast<std::size_t>(e)];
        if (ci != 0 && cj != 0) sum += lengths[static_cast<std::size_t>(e)] * (ci * cj);
      }
      gram(i, j) = sum;
    }
  }
  return validate_gram(gram);
}

IdentityReport identity_and_bounds_check(const PolarizedGraph& pg, const GraphInvariantOptions& options,
                                         double tolerance, double sign_tolerance) {
  IdentityReport rep;
  rep.invariants = graph_invariants(pg, options);
  const auto& inv = rep.invariants;
  const double lhs = inv.delta + inv.epsilon;
  const double rhs = 12.0 * inv.i_jac + 2.0 * inv.phi;
  rep.residual = lhs - rhs;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  rep.relative_residual = scale > 0.0 ? std::abs(rep.residual) / scale : std::abs(rep.residual);
  rep.identity_holds = rep.relative_residual <= tolerance;
  rep.epsilon_nonnegative = inv.epsilon >= -sign_tolerance;
  rep.tau_nonnegative = inv.tau >= -sign_tolerance;
  rep.inequalities_hold = rep.epsilon_nonnegative && rep.tau_nonnegative;
  const double g = inv.g;
  if (inv.g >= 2) {
    rep.cinkir_checked = true;
    rep.cinkir_slack = 2.0 * g * (7.0 * g + 5.0) / ((g - 1.0) * (g - 1.0)) * inv.phi - inv.delta;
    const double mid = 1.5 * inv.delta + 2.0 * inv.phi;
    const double top = (23.0 * g * g + 11.0 * g + 2.0) / ((g - 1.0) * (g - 1.0)) * inv.phi;
    rep.chain_slacks = {lhs, mid - lhs, top - mid};
    rep.inequalities_hold = rep.inequalities_hold && rep.cinkir_slack >= -sign_tolerance;
    for (double s : rep.chain_slacks) rep.inequalities_hold = rep.inequalities_hold && s >= -sign_tolerance;
  }
  return rep;
}

PolarizedGraph reduction_graph(const std::vector<FiberNode>& nodes,
                               const std::map<std::string, int>& component_genera) {
  std::set<std::string> names;
  for (const auto& [name, genus] : component_genera) {
    if (genus < 0) fail(ErrorCode::InvalidArgument, "component genus must be non-negative");
    names.insert(name);
  }
  for (const auto& node : nodes) {
    if (node.thickness < 1) fail(ErrorCode::InvalidArgument, "node thickness must be a positive integer");
    names.insert(node.first);
    names.insert(node.second);
  }
  std::vector<std::string> ids(names.begin(), names.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);
  std::vector<GraphEdge> edges;
  for (const auto& node : nodes) {
    edges.push_back({index[node.first], index[node.second], static_cast<double>(node.thickness)});
  }
  MetrizedGraph graph;
  try {
    graph = make_metrized_graph(ids, edges);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DisconnectedGraph) fail(ErrorCode::DisconnectedSpecialFiber, "special fiber is not connected");
    throw;
  }
  std::vector<int> q(ids.size(), 0);
  for (const auto& [name, genus] : component_genera) q[static_cast<std::size_t>(index[name])] = 2 * genus;
  return make_polarized_graph(std::move(graph), std::move(q));
}

}  // namespace tropdeg
