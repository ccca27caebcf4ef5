#include "tropdeg/bounds.hpp"

#include "tropdeg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tropdeg {

namespace {

void check_genus(int g) {
  if (g < 2) fail(ErrorCode::GenusTooSmall, "bounds need g >= 2");
}

PlaceInvariants resolve(const FinitePlace& place, const GraphInvariantOptions& options, std::size_t index) {
  if (place.invariants) return *place.invariants;
  if (place.graph) {
    const GraphInvariants inv = potential_invariants(*place.graph, options.subdivisions, options.extrapolate);
    return {inv.delta, inv.epsilon, inv.phi};
  }
  fail(ErrorCode::MissingPlaceData, "finite place " + std::to_string(index) + " has neither invariants nor a graph");
}

double delta_x(const CurveArithmeticData& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.finite_places.size(); ++i) {
    const auto inv = resolve(data.finite_places[i], data.graph_options, i);
    total += (inv.delta + inv.epsilon) * std::log(static_cast<double>(data.finite_places[i].norm));
  }
  for (std::size_t i = 0; i < data.infinite_places.size(); ++i) {
    const auto& place = data.infinite_places[i];
    if (!place.delta) fail(ErrorCode::MissingPlaceData, "infinite place " + std::to_string(i) + " has no delta");
    total += *place.delta - 4.0 * data.g * std::log(2.0 * std::numbers::pi);
  }
  return total;
}

double phi_x(const CurveArithmeticData& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.finite_places.size(); ++i) {
    const auto inv = resolve(data.finite_places[i], data.graph_options, i);
    total += inv.phi * std::log(static_cast<double>(data.finite_places[i].norm));
  }
  for (std::size_t i = 0; i < data.infinite_places.size(); ++i) {
    const auto& place = data.infinite_places[i];
    if (!place.phi) fail(ErrorCode::MissingPlaceData, "infinite place " + std::to_string(i) + " has no phi");
    total += *place.phi;
  }
  return total;
}

Rational rat(long long n, long long d = 1) { return Rational(n) / Rational(d); }

Integer sum_squares(const std::vector<long long>& m) {
  Integer s = 0;
  for (long long x : m) s += Integer(x) * Integer(x);
  return s;
}

Integer sum_cross(const std::vector<long long>& m) {
  // sum_{j<k} m_j m_k = ((sum m)^2 - sum m^2) / 2
  Integer total = 0;
  for (long long x : m) total += Integer(x);
  return (total * total - sum_squares(m)) / 2;
}

}  // namespace

void check_curve_data(const CurveArithmeticData& data) {
  check_genus(data.g);
  if (data.d_k < 1) fail(ErrorCode::InvalidArgument, "d_K must be a positive integer");
  for (const auto& p : data.finite_places) {
    if (p.norm < 2) fail(ErrorCode::InvalidArgument, "N(v) must be at least 2");
  }
  if (!(data.omega_sq >= 0.0)) fail(ErrorCode::InvalidArgument, "omega^2 must be non-negative");
  if (!std::isfinite(data.h_fal)) fail(ErrorCode::InvalidArgument, "h_Fal must be finite");
}

Aggregate aggregate(const CurveArithmeticData& data) {
  check_curve_data(data);
  return {delta_x(data), phi_x(data)};
}

double noether_residual(const CurveArithmeticData& data) {
  check_curve_data(data);
  return 12.0 * data.d_k * data.h_fal - data.omega_sq - delta_x(data);
}

Rational phi_coefficient(int g) {
  check_genus(g);
  const Rational G(g);
  return (G - 1) * (G - 1) / (23 * G * G + 11 * G + 2);
}

Rational omega_coefficient(int g) {
  check_genus(g);
  const Rational G(g);
  return (G - 1) * (G - 1) * (G - 1) / (47 * G * G * G + 42 * G * G + 18 * G + 1);
}

Rational tautological_coefficient(int g) {
  check_genus(g);
  const Rational G(g);
  return (G - 1) * (G - 1) * (G - 1) / (24 * (47 * G * G * G * G + 42 * G * G * G + 18 * G * G + G));
}

BoundReport phi_lower_bound(int g, double delta, double c1, double c2, bool arithmetic, int d_k) {
  const Rational coef = phi_coefficient(g);
  if (arithmetic && d_k < 1) fail(ErrorCode::InvalidArgument, "d_K must be a positive integer");
  const double scale = arithmetic ? d_k : 1.0;
  const double first = delta + scale * c1;
  const double second = scale * c2;
  BoundReport rep;
  rep.coefficients.push_back({"coefficient", coef});
  rep.components = {{"delta_plus_c1", first}, {"c2", second}, {"uses_c2_branch", second > first ? 1.0 : 0.0}};
  rep.bound_value = to_double(coef) * std::max(first, second);
  rep.label = arithmetic ? "phi(X) >= coefficient * max(delta(X) + d_K c1, d_K c2)"
                         : "phi(M) >= coefficient * max(delta(M) + c1, c2)";
  return rep;
}

BoundReport omega_lower_bound(int g, int d_k, double h_fal, double c1, double c2,
                              const std::optional<ChainInputs>& chain) {
  const Rational coef = omega_coefficient(g);
  if (d_k < 1) fail(ErrorCode::InvalidArgument, "d_K must be a positive integer");
  const double inner = std::max(12.0 * h_fal + c1, c2);
  BoundReport rep;
  rep.coefficients.push_back({"coefficient", coef});
  rep.coefficients.push_back({"phi_coefficient_inverse", 1 / phi_coefficient(g)});
  rep.coefficients.push_back({"omega_phi_ratio", rat(2 * g + 1, g - 1)});
  rep.bound_value = d_k * to_double(coef) * inner;
  rep.components = {{"max_term", inner}, {"uses_c2_branch", c2 > 12.0 * h_fal + c1 ? 1.0 : 0.0}};
  rep.label = "omega^2 >= d_K * coefficient * max(12 h_Fal + c1, c2)";
  if (chain) {
    const double w = chain->omega_sq;
    const double inv_phi = to_double(1 / phi_coefficient(g));
    const double lhs = to_double(1 / coef) * w;
    const double step1 = w + inv_phi * chain->phi_x;
    const double step2 = std::max(w + chain->delta_x + d_k * c1, w + d_k * c2);
    const double step3 = d_k * inner;
    rep.components.push_back({"chain_lhs", lhs});
    rep.components.push_back({"chain_after_omega_phi", step1});
    rep.components.push_back({"chain_after_phi_delta", step2});
    rep.components.push_back({"chain_after_noether", step3});
    rep.slacks = {{"omega_phi_inequality", lhs - step1},
                  {"phi_delta_inequality", step1 - step2},
                  {"noether_step", step2 - step3}};
  }
  return rep;
}

void check_tautological_spec(int g, const TautologicalSpec& spec) {
  if (spec.r < 1 || spec.r > g - 1) fail(ErrorCode::InvalidSpec, "r must satisfy 1 <= r <= g-1");
  if (static_cast<int>(spec.m.size()) != spec.r) fail(ErrorCode::InvalidSpec, "m must have r entries");
  for (long long x : spec.m)
    if (x == 0) fail(ErrorCode::InvalidSpec, "entries of m must be non-zero");
}

TautologicalReport tautological_height_bound(int g, const TautologicalSpec& spec, int d_k, double omega_sq,
                                             double phi) {
  check_genus(g);
  check_tautological_spec(g, spec);
  if (d_k < 1) fail(ErrorCode::InvalidArgument, "d_K must be a positive integer");
  const int r = spec.r;
  const Rational G(g);
  const Rational sq(sum_squares(spec.m));
  const Rational cross(sum_cross(spec.m));
  // Fractions carrying sum_{j<k} m_j m_k are 0 when g = 2 (then r = 1).
  const bool g2 = g == 2;
  const Rational cross_omega = g2 ? Rational(0) : (2 * G + 1) * cross / (6 * G * (G - 1) * (G - 1) * (G - 2));
  const Rational cross_phi = g2 ? Rational(0) : cross / (3 * G * (G - 1) * (G - 2));

  TautologicalReport out;
  out.weight_omega = sq / (4 * (G - 1) * (G - 1)) - cross_omega;
  out.weight_phi = cross_phi;
  out.case_one = cross >= 0;
  const Rational prefactor = (G - r) / (2 * Rational(d_k));
  const double bracket = to_double(out.weight_omega) * omega_sq + to_double(out.weight_phi) * phi;
  out.m_dependent = to_double(prefactor) * bracket;
  const Rational m_free_coef = (G - r) * r / (24 * Rational(d_k) * G * (G - 1));
  out.m_free = to_double(m_free_coef) * omega_sq;
  const Rational floor_coef = Rational(r) / (12 * G * (G - 1));

  BoundReport& rep = out.report;
  rep.coefficients = {{"prefactor", prefactor},
                      {"omega_weight", out.weight_omega},
                      {"phi_weight", out.weight_phi},
                      {"m_free_coefficient", m_free_coef},
                      {"closed_form_coefficient", tautological_coefficient(g)}};
  rep.components = {{"sum_squares", to_double(sq)},
                    {"sum_cross", to_double(cross)},
                    {"bracket", bracket},
                    {"m_dependent_bound", out.m_dependent},
                    {"m_free_bound", out.m_free},
                    {"case", out.case_one ? 1.0 : 2.0}};
  const double floor_value = to_double(floor_coef) * omega_sq;
  if (out.case_one) {
    // (i): drop the phi term, then sum_{j<k} <= (r-1)/2 sum m^2, r <= g-1, sum m^2 >= r
    Rational reduced = sq / (4 * (G - 1) * (G - 1));
    if (!g2 && r > 1)
      reduced = (3 * G * (G - 2) - (2 * G + 1) * (r - 1)) * sq / (12 * G * (G - 1) * (G - 1) * (G - 2));
    const double step1 = to_double(out.weight_omega) * omega_sq;
    const double step2 = to_double(reduced) * omega_sq;
    rep.components.push_back({"case_i_without_phi", step1});
    rep.components.push_back({"case_i_after_estimate", step2});
    rep.slacks = {{"drop_phi_term", bracket - step1}, {"cross_estimate", step1 - step2}, {"r_estimate", step2 - floor_value}};
  } else {
    // (ii): phi <= (2g+1)/(g-1) omega^2, then sum_{j<k} >= -1/2 sum m^2
    const Rational w1 = sq / (4 * (G - 1) * (G - 1)) + cross_omega;
    const Rational w2 = (3 * G * (G - 2) - (2 * G + 1)) * sq / (12 * G * (G - 1) * (G - 1) * (G - 2));
    const double step1 = to_double(w1) * omega_sq;
    const double step2 = to_double(w2) * omega_sq;
    rep.components.push_back({"case_ii_after_omega_phi", step1});
    rep.components.push_back({"case_ii_after_estimate", step2});
    rep.slacks = {{"omega_phi_inequality", bracket - step1}, {"cross_estimate", step1 - step2}, {"r_estimate", step2 - floor_value}};
  }
  rep.slacks.push_back({"m_dependent_minus_m_free", out.m_dependent - out.m_free});
  rep.bound_value = out.m_dependent;
  rep.label = "essential minimum e'_L(Z) >= h'_L(Z) >= bound";
  return out;
}

MEstimates m_vector_estimates(const std::vector<long long>& m) {
  if (m.empty()) fail(ErrorCode::InvalidArgument, "m must be non-empty");
  MEstimates out;
  const Rational sq(sum_squares(m));
  out.sum_cross = sum_cross(m);
  out.upper = Rational(static_cast<long long>(m.size()) - 1) / 2 * sq;
  out.lower = -sq / 2;
  const Rational c(out.sum_cross);
  out.both_hold = c <= out.upper && c >= out.lower;
  return out;
}

}  // namespace tropdeg
