#pragma once

// Polarized metrized graphs (Gamma, K) with K = sum_p (n_p + q_p - 2) p and
// their potential theory: resistance, Zhang measure, Green function and the
// invariants delta, epsilon, phi, tau; plus the tropical Jacobian H_1(Gamma, Z)
// with [e_i, e_j] = delta_ij l(e_i).

#include "tropdeg/lattice.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tropdeg {

struct GraphEdge {
  int u = 0;
  int v = 0;
  double length = 1.0;
};

class MetrizedGraph {
public:
  MetrizedGraph() = default;

  int vertex_count() const { return static_cast<int>(ids_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::string>& vertex_ids() const { return ids_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const GraphEdge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
  /// Number of edge ends at v (loops count twice).
  int valency(int v) const;
  int vertex_index(const std::string& id) const;
  double total_length() const;

  /// Same graph with every length multiplied by c > 0.
  MetrizedGraph scaled(double c) const;
  /// Inserts a valency-2 vertex on edge e at distance `offset` from its u end.
  MetrizedGraph subdivided(int e, double offset, const std::string& new_id) const;

private:
  friend MetrizedGraph make_metrized_graph(std::vector<std::string> ids, std::vector<GraphEdge> edges);
  std::vector<std::string> ids_;
  std::vector<GraphEdge> edges_;
  std::map<std::string, int> index_;
};

/// Checks unique ids, positive finite lengths and connectivity
/// (DisconnectedGraph).
MetrizedGraph make_metrized_graph(std::vector<std::string> ids, std::vector<GraphEdge> edges);

struct PolarizedGraph {
  MetrizedGraph graph;
  std::vector<int> q;  // per vertex; K_p = n_p + q_p - 2

  int genus() const;
  int canonical_multiplicity(int v) const { return graph.valency(v) + q[static_cast<std::size_t>(v)] - 2; }
};

/// Checks q_p >= 0, effectiveness n_p + q_p - 2 >= 0 and that
/// sum (n_p + q_p - 2) is even.
PolarizedGraph make_polarized_graph(MetrizedGraph graph, std::vector<int> q);

struct GraphPoint {
  int vertex = -1;  // >= 0 for a vertex
  int edge = -1;    // >= 0 for an interior point
  double offset = 0.0;

  static GraphPoint at_vertex(int v) { return {v, -1, 0.0}; }
  static GraphPoint on_edge(int e, double offset) { return {-1, e, offset}; }
};

void check_point(const MetrizedGraph& graph, const GraphPoint& p);

struct GenusInfo {
  int g = 0;
  int g0 = 0;
  double delta = 0.0;
};

GenusInfo genus_and_lengths(const PolarizedGraph& graph);

double effective_resistance(const MetrizedGraph& graph, const GraphPoint& p, const GraphPoint& q);

/// r(e) = r(Gamma \ e; u, v); nullopt (infinite) exactly for bridges.
std::optional<double> edge_complement_resistance(const MetrizedGraph& graph, int e);

struct ZhangMeasure {
  std::vector<double> atoms;      // per vertex
  std::vector<double> densities;  // per edge, constant along the edge
  double total_mass(const MetrizedGraph& graph) const;
};

/// mu = (1/2g)(delta_K - delta_Kcan + sum 2/(r(e)+l(e)) dx|_e); GenusZero for g = 0.
ZhangMeasure zhang_measure(const PolarizedGraph& graph);

/// Discrete model of (Gamma, mu): every edge cut into `subdivisions`
/// segments, the density lumped half-and-half onto the segment ends.
struct DiscreteGreen {
  struct Node {
    int vertex = -1;  // original vertex, or -1
    int edge = -1;    // edge of an interior node
    int step = 0;     // interior node index along the edge (1..s-1)
    double offset = 0.0;
  };
  int subdivisions = 0;
  int vertex_count = 0;
  std::vector<Node> nodes;
  Eigen::MatrixXd laplacian;  // weighted, conductance 1/h, positive semidefinite
  Eigen::VectorXd mass;       // measure on the nodes, sums to 1
  Eigen::MatrixXd green;      // g_mu on the nodes

  /// Vertices come first (node v = vertex v); interior node `step` of edge e.
  int edge_node(int e, int step) const;
};

/// SolveFailure if the grounded Laplacian cannot be factored.
DiscreteGreen discrete_green(const MetrizedGraph& graph, const ZhangMeasure& mu, int subdivisions);

struct GreenDiagonal {
  struct Sample {
    int vertex = -1;
    int edge = -1;
    double offset = 0.0;
    double value = 0.0;
  };
  int subdivisions = 0;
  bool extrapolated = false;
  std::vector<Sample> samples;  // vertices first, then edges in order
};

/// g_mu(x, x) at the nodes of the `subdivisions` level; with `extrapolate`,
/// combined with level 2*subdivisions as (4 X_2s - X_s)/3.
GreenDiagonal green_diagonal(const MetrizedGraph& graph, const ZhangMeasure& mu, int subdivisions,
                             bool extrapolate = true);

struct GraphInvariants {
  int g = 0;
  int g0 = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  double phi = 0.0;
  double tau = 0.0;
  double i_jac = 0.0;
  double i_jac_error = 0.0;
};

struct GraphInvariantOptions {
  int subdivisions = 64;
  bool extrapolate = true;
  std::optional<MomentOptions> moment;  // default by rank when absent
};

GraphInvariants graph_invariants(const PolarizedGraph& graph, const GraphInvariantOptions& options = {});

/// epsilon, phi and tau only (no lattice quadrature).
GraphInvariants potential_invariants(const PolarizedGraph& graph, int subdivisions, bool extrapolate);

struct TropicalJacobian {
  GramLattice gram;
  std::vector<std::vector<int>> cycle_basis;  // edge coefficients per cycle
};

/// Fundamental cycles of a BFS spanning tree; the Gram matrix is exact
/// (lengths are converted to dyadic rationals).
TropicalJacobian tropical_jacobian(const MetrizedGraph& graph);

/// Gram matrix of a user-supplied family of 1-chains; each must be a cycle.
GramLattice cycle_gram(const MetrizedGraph& graph, const std::vector<std::vector<int>>& cycles);

struct IdentityReport {
  GraphInvariants invariants;
  double residual = 0.0;           // delta + epsilon - 12 I - 2 phi
  double relative_residual = 0.0;
  bool identity_holds = false;
  bool cinkir_checked = false;     // g >= 2
  double cinkir_slack = 0.0;       // 2g(7g+5)/(g-1)^2 phi - delta
  std::vector<double> chain_slacks;  // successive differences of the chain
  bool epsilon_nonnegative = false;
  bool tau_nonnegative = false;
  bool inequalities_hold = false;
};

IdentityReport identity_and_bounds_check(const PolarizedGraph& graph, const GraphInvariantOptions& options,
                                         double tolerance = 1e-3, double sign_tolerance = 1e-6);

struct FiberNode {
  std::string first;
  std::string second;
  int thickness = 1;
};

/// Dual graph of a semistable special fiber: one vertex per component, one
/// edge of length n per node of thickness n, q_v = 2 g_v.
PolarizedGraph reduction_graph(const std::vector<FiberNode>& nodes,
                               const std::map<std::string, int>& component_genera);

}  // namespace tropdeg
