#pragma once

// Height inequalities for a curve X of genus g >= 2 over a number field of
// degree d_K with semistable reduction. Coefficients are exact rationals;
// inputs such as omega^2 or h_Fal are real and enter only at the end.

#include "tropdeg/graph.hpp"
#include "tropdeg/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tropdeg {

struct PlaceInvariants {
  double delta = 0.0;
  double epsilon = 0.0;
  double phi = 0.0;
};

struct FinitePlace {
  std::optional<PlaceInvariants> invariants;  // precomputed (delta, epsilon, phi)
  std::optional<PolarizedGraph> graph;        // or the reduction graph
  long long norm = 2;                         // N(v) = #O_K / v
};

struct InfinitePlace {
  std::optional<double> delta;  // Faltings delta(X_sigma)
  std::optional<double> phi;    // phi(X_sigma)
};

struct CurveArithmeticData {
  int g = 2;
  int d_k = 1;
  std::vector<FinitePlace> finite_places;
  std::vector<InfinitePlace> infinite_places;
  double omega_sq = 0.0;
  double h_fal = 0.0;
  GraphInvariantOptions graph_options;
};

/// Throws GenusTooSmall / InvalidArgument for g < 2, d_K < 1, N(v) < 2 or
/// omega^2 < 0.
void check_curve_data(const CurveArithmeticData& data);

struct Aggregate {
  double delta_x = 0.0;
  double phi_x = 0.0;
};

/// delta(X) = sum_v (delta + epsilon)(Gamma_v) log N(v) + sum_sigma (delta(X_sigma) - 4g log 2 pi)
/// phi(X)   = sum_v phi(Gamma_v) log N(v) + sum_sigma phi(X_sigma)
/// MissingPlaceData when a place lacks what is needed.
Aggregate aggregate(const CurveArithmeticData& data);

/// 12 d_K h_Fal - omega^2 - delta(X).
double noether_residual(const CurveArithmeticData& data);

struct LabeledValue {
  std::string label;
  double value = 0.0;
};

struct LabeledRational {
  std::string label;
  Rational value;
};

struct BoundReport {
  double bound_value = 0.0;
  std::vector<LabeledRational> coefficients;
  std::vector<LabeledValue> components;
  std::vector<LabeledValue> slacks;  // each must be >= 0 for the chain to hold
  std::string label;
};

/// (g-1)^2 / (23g^2 + 11g + 2)
Rational phi_coefficient(int g);
/// (g-1)^3 / (47g^3 + 42g^2 + 18g + 1)
Rational omega_coefficient(int g);
/// (g-1)^3 / (24 (47g^4 + 42g^3 + 18g^2 + g))
Rational tautological_coefficient(int g);

/// phi >= coefficient * max(delta + c1, c2); in arithmetic form
/// phi(X) >= coefficient * max(delta(X) + d_K c1, d_K c2).
BoundReport phi_lower_bound(int g, double delta, double c1, double c2, bool arithmetic = false, int d_k = 1);

struct ChainInputs {
  double omega_sq = 0.0;
  double phi_x = 0.0;
  double delta_x = 0.0;
};

/// omega^2 >= d_K * coefficient * max(12 h_Fal + c1, c2). With chain inputs the
/// intermediate values of the proof are reported together with their slacks.
BoundReport omega_lower_bound(int g, int d_k, double h_fal, double c1, double c2,
                              const std::optional<ChainInputs>& chain = std::nullopt);

struct TautologicalSpec {
  int r = 1;
  std::vector<long long> m;
};

/// InvalidSpec unless 1 <= r <= g-1, |m| = r and no entry is zero.
void check_tautological_spec(int g, const TautologicalSpec& spec);

struct TautologicalReport {
  BoundReport report;
  double m_dependent = 0.0;  // the (g-r)/(2 d_K)(... omega^2 + ... phi) bound
  double m_free = 0.0;       // (g-r) r / (24 d_K g (g-1)) omega^2
  Rational weight_omega;     // coefficient of omega^2 inside the bracket
  Rational weight_phi;       // coefficient of phi inside the bracket
  bool case_one = true;      // sum_{j<k} m_j m_k >= 0
};

TautologicalReport tautological_height_bound(int g, const TautologicalSpec& spec, int d_k, double omega_sq,
                                             double phi_x);

struct MEstimates {
  Integer sum_cross;
  Rational upper;  // (r-1)/2 sum m^2
  Rational lower;  // -1/2 sum m^2
  bool both_hold = false;
};

MEstimates m_vector_estimates(const std::vector<long long>& m);

}  // namespace tropdeg
