#include "tropdeg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace tropdeg {

namespace {

[[noreturn]] void schema_error(std::string_view context, const std::string& what) {
  fail(ErrorCode::ParseError, std::string(context) + ": " + what);
}

double number(const Json& j, std::string_view context) {
  if (!j.is_number()) schema_error(context, "expected a number");
  return j.get<double>();
}

long long integer(const Json& j, std::string_view context) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (std::nearbyint(x) == x && std::abs(x) < 9e15) return static_cast<long long>(x);
  }
  schema_error(context, "expected an integer");
}

const Json& array(const Json& j, std::string_view context) {
  if (!j.is_array()) schema_error(context, "expected an array");
  return j;
}

Integer json_integer(const Json& j, std::string_view context) {
  if (j.is_string()) {
    try {
      return Integer(j.get<std::string>());
    } catch (const std::exception&) {
      schema_error(context, "malformed integer string");
    }
  }
  return Integer(integer(j, context));
}

Json integer_to_json(const Integer& n) {
  if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
    return Json(n.convert_to<long long>());
  return Json(n.str());
}

// Exact when the entry is an integer or a [num, den] pair.
bool exact_entry(const Json& j) {
  return j.is_number_integer() || j.is_array() ||
         (j.is_number_float() && std::nearbyint(j.get<double>()) == j.get<double>());
}

Json rational_entry(const Rational& q) {
  if (denominator_of(q) == 1) return integer_to_json(numerator_of(q));
  return Json::array({integer_to_json(numerator_of(q)), integer_to_json(denominator_of(q))});
}

PolyMatrix parse_poly(const Json& j, int rows, int cols, std::string_view name) {
  const std::string ctx(name);
  PolyMatrix p(rows, cols);
  if (j.is_null()) return p;
  array(j, ctx);
  if (static_cast<int>(j.size()) != rows) schema_error(ctx, "expected " + std::to_string(rows) + " rows");
  std::size_t degree = 0;
  for (const auto& row : j) {
    array(row, ctx);
    if (static_cast<int>(row.size()) != cols) schema_error(ctx, "expected " + std::to_string(cols) + " columns");
    for (const auto& entry : row) degree = std::max(degree, array(entry, ctx).size());
  }
  p.coeffs.assign(degree, Eigen::MatrixXcd::Zero(rows, cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const auto& entry = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      for (std::size_t k = 0; k < entry.size(); ++k) p.coeffs[k](r, c) = parse_complex(entry[k], ctx);
    }
  return p;
}

Json poly_to_json(const PolyMatrix& p) {
  Json rows = Json::array();
  for (int r = 0; r < p.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < p.cols; ++c) {
      Json entry = Json::array();
      for (const auto& coeff : p.coeffs) entry.push_back(complex_to_json(coeff(r, c)));
      row.push_back(std::move(entry));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

RationalMatrix parse_rational_matrix(const Json& j, int n, std::string_view ctx) {
  array(j, ctx);
  if (static_cast<int>(j.size()) != n) schema_error(ctx, "expected " + std::to_string(n) + " rows");
  RationalMatrix out(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = array(j[static_cast<std::size_t>(r)], ctx);
    if (static_cast<int>(row.size()) != n) schema_error(ctx, "expected " + std::to_string(n) + " columns");
    for (int c = 0; c < n; ++c) out(r, c) = parse_rational(row[static_cast<std::size_t>(c)], ctx);
  }
  return out;
}

Json rational_matrix_to_json(const RationalMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(rational_entry(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void format_double(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  out += buf;
}

void dump(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {  // std::map: sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        dump(out, value, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& x : j) scalar = scalar && !x.is_structured();
      if (scalar) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(out, j[i], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(out, j[i], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      format_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string csv_cell(const Json& j) {
  if (j.is_number_float()) {
    std::string s;
    format_double(s, j.get<double>());
    return s == "null" ? "" : s;
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (j.is_null()) return "";
  return j.dump();
}

void flatten(const Json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else {
    out += csv_cell(Json(prefix)) + "," + csv_cell(j) + "\n";
  }
}

// line and column (1-based) of a byte offset
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // e.byte is the 1-based index of the offending character
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, column] = locate(text, byte);
    throw JsonParseError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column),
                         byte, line, column);
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str());
}

void check_object(const Json& j, std::initializer_list<std::string_view> allowed,
                  std::initializer_list<std::string_view> required, std::string_view context) {
  if (!j.is_object()) schema_error(context, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) schema_error(context, "unknown field \"" + key + "\"");
  }
  for (auto r : required)
    if (!j.contains(std::string(r))) schema_error(context, "missing field \"" + std::string(r) + "\"");
}

Rational parse_rational(const Json& j, std::string_view context) {
  if (j.is_array()) {
    if (j.size() != 2) schema_error(context, "rational must be [num, den]");
    const Integer num = json_integer(j[0], context);
    const Integer den = json_integer(j[1], context);
    if (den == 0) schema_error(context, "zero denominator");
    return Rational(num, den);
  }
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) schema_error(context, "non-finite number");
    return rational_from_double(x);
  }
  if (j.is_object()) {
    check_object(j, {"num", "den"}, {"num", "den"}, context);
    const Integer den = json_integer(j["den"], context);
    if (den == 0) schema_error(context, "zero denominator");
    return Rational(json_integer(j["num"], context), den);
  }
  schema_error(context, "expected a number or [num, den]");
}

Json rational_to_json(const Rational& q) {
  return Json{{"num", integer_to_json(numerator_of(q))}, {"den", integer_to_json(denominator_of(q))}};
}

Complex parse_complex(const Json& j, std::string_view context) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  check_object(j, {"re", "im"}, {}, context);
  const double re = j.contains("re") ? number(j["re"], context) : 0.0;
  const double im = j.contains("im") ? number(j["im"], context) : 0.0;
  return {re, im};
}

Json complex_to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

GramLattice parse_gram(const Json& j) {
  check_object(j, {"rank", "gram"}, {"gram"}, "gram");
  const auto& rows = array(j["gram"], "gram");
  const int n = static_cast<int>(rows.size());
  if (j.contains("rank") && integer(j["rank"], "gram.rank") != n)
    schema_error("gram", "rank does not match the matrix size");
  bool exact = true;
  for (const auto& row : rows) {
    if (static_cast<int>(array(row, "gram").size()) != n) schema_error("gram", "matrix must be square");
    for (const auto& x : row) exact = exact && exact_entry(x);
  }
  if (exact) return validate_gram(parse_rational_matrix(rows, n, "gram"));
  Eigen::MatrixXd q(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const auto& x = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      q(r, c) = x.is_array() ? to_double(parse_rational(x, "gram")) : number(x, "gram");
    }
  return validate_gram(q);
}

Json gram_to_json(const GramLattice& lattice) {
  Json out{{"rank", lattice.rank()}};
  if (lattice.exact_gram()) {
    out["gram"] = rational_matrix_to_json(*lattice.exact_gram());
  } else {
    out["gram"] = matrix_to_json(lattice.gram());
  }
  return out;
}

PeriodMatrix parse_period_matrix(const Json& j) {
  check_object(j, {"g", "tau"}, {"tau"}, "period matrix");
  const auto& rows = array(j["tau"], "tau");
  const int g = static_cast<int>(rows.size());
  if (j.contains("g") && integer(j["g"], "g") != g) schema_error("period matrix", "g does not match tau");
  Eigen::MatrixXcd tau(g, g);
  for (int r = 0; r < g; ++r) {
    const auto& row = array(rows[static_cast<std::size_t>(r)], "tau");
    if (static_cast<int>(row.size()) != g) schema_error("tau", "matrix must be square");
    for (int c = 0; c < g; ++c) tau(r, c) = parse_complex(row[static_cast<std::size_t>(c)], "tau");
  }
  return validate_period_matrix(tau);
}

Json period_matrix_to_json(const PeriodMatrix& tau) {
  Json rows = Json::array();
  for (int r = 0; r < tau.genus(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < tau.genus(); ++c) row.push_back(complex_to_json(tau.tau()(r, c)));
    rows.push_back(std::move(row));
  }
  return Json{{"g", tau.genus()}, {"tau", rows}};
}

PeriodFamily parse_family(const Json& j) {
  check_object(j, {"g1", "g2", "m", "B", "S1", "S2", "S3"}, {"g1", "g2"}, "family");
  const long long g1 = integer(j["g1"], "family.g1");
  const long long g2 = integer(j["g2"], "family.g2");
  if (g1 < 0 || g2 < 0 || g1 > 16 || g2 > 16) schema_error("family", "g1, g2 must be in 0..16");
  const long long m = j.contains("m") ? integer(j["m"], "family.m") : 1;
  RationalMatrix b(static_cast<int>(g2), static_cast<int>(g2));
  if (j.contains("B")) {
    b = parse_rational_matrix(j["B"], static_cast<int>(g2), "family.B");
  } else if (g2 > 0) {
    schema_error("family", "missing field \"B\"");
  }
  const auto get = [&](const char* key) { return j.contains(key) ? j[key] : Json(); };
  return make_period_family(static_cast<int>(g1), static_cast<int>(g2), static_cast<int>(m), b,
                            parse_poly(get("S1"), static_cast<int>(g1), static_cast<int>(g1), "family.S1"),
                            parse_poly(get("S2"), static_cast<int>(g2), static_cast<int>(g2), "family.S2"),
                            parse_poly(get("S3"), static_cast<int>(g1), static_cast<int>(g2), "family.S3"));
}

Json family_to_json(const PeriodFamily& family) {
  return Json{{"g1", family.g1()},
              {"g2", family.g2()},
              {"m", family.m()},
              {"B", rational_matrix_to_json(family.exact_b())},
              {"S1", poly_to_json(family.s1())},
              {"S2", poly_to_json(family.s2())},
              {"S3", poly_to_json(family.s3())}};
}

PolarizedGraph parse_graph(const Json& j) {
  check_object(j, {"vertices", "edges"}, {"vertices"}, "graph");
  std::vector<std::string> ids;
  std::vector<int> q;
  for (const auto& v : array(j["vertices"], "graph.vertices")) {
    check_object(v, {"id", "q"}, {"id"}, "graph.vertices");
    if (!v["id"].is_string()) schema_error("graph.vertices", "id must be a string");
    ids.push_back(v["id"].get<std::string>());
    const long long qv = v.contains("q") ? integer(v["q"], "graph.vertices.q") : 0;
    if (qv < 0 || qv > 1000000) schema_error("graph.vertices", "q out of range");
    q.push_back(static_cast<int>(qv));
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<int>(i));
  std::vector<GraphEdge> edges;
  if (j.contains("edges")) {
    for (const auto& e : array(j["edges"], "graph.edges")) {
      check_object(e, {"u", "v", "length"}, {"u", "v"}, "graph.edges");
      if (!e["u"].is_string() || !e["v"].is_string()) schema_error("graph.edges", "endpoints must be vertex ids");
      const auto u = index.find(e["u"].get<std::string>());
      const auto v = index.find(e["v"].get<std::string>());
      if (u == index.end() || v == index.end()) schema_error("graph.edges", "edge refers to an unknown vertex");
      const double length = e.contains("length") ? number(e["length"], "graph.edges.length") : 1.0;
      edges.push_back({u->second, v->second, length});
    }
  }
  return make_polarized_graph(make_metrized_graph(std::move(ids), std::move(edges)), std::move(q));
}

Json graph_to_json(const PolarizedGraph& graph) {
  Json vertices = Json::array();
  const auto& ids = graph.graph.vertex_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) vertices.push_back(Json{{"id", ids[i]}, {"q", graph.q[i]}});
  Json edges = Json::array();
  for (const auto& e : graph.graph.edges())
    edges.push_back(Json{{"u", ids[static_cast<std::size_t>(e.u)]},
                         {"v", ids[static_cast<std::size_t>(e.v)]},
                         {"length", e.length}});
  return Json{{"vertices", vertices}, {"edges", edges}};
}

CurveArithmeticData parse_curve(const Json& j, const std::filesystem::path& base) {
  check_object(j, {"g", "d_K", "omega_sq", "h_fal", "finite_places", "infinite_places", "subdivisions"},
               {"g", "d_K", "omega_sq", "h_fal"}, "curve");
  CurveArithmeticData data;
  data.g = static_cast<int>(integer(j["g"], "curve.g"));
  data.d_k = static_cast<int>(integer(j["d_K"], "curve.d_K"));
  data.omega_sq = number(j["omega_sq"], "curve.omega_sq");
  data.h_fal = number(j["h_fal"], "curve.h_fal");
  if (j.contains("subdivisions")) data.graph_options.subdivisions = static_cast<int>(integer(j["subdivisions"], "curve.subdivisions"));
  if (j.contains("finite_places")) {
    for (const auto& p : array(j["finite_places"], "curve.finite_places")) {
      check_object(p, {"norm", "invariants", "graph", "graph_file"}, {"norm"}, "curve.finite_places");
      FinitePlace place;
      place.norm = integer(p["norm"], "curve.finite_places.norm");
      if (p.contains("invariants")) {
        const auto& inv = p["invariants"];
        check_object(inv, {"delta", "epsilon", "phi"}, {"delta", "epsilon", "phi"}, "curve.finite_places.invariants");
        place.invariants = PlaceInvariants{number(inv["delta"], "delta"), number(inv["epsilon"], "epsilon"),
                                           number(inv["phi"], "phi")};
      }
      if (p.contains("graph")) place.graph = parse_graph(p["graph"]);
      if (p.contains("graph_file")) {
        if (!p["graph_file"].is_string()) schema_error("curve.finite_places", "graph_file must be a path");
        place.graph = parse_graph(read_json_file(base / p["graph_file"].get<std::string>()));
      }
      data.finite_places.push_back(std::move(place));
    }
  }
  if (j.contains("infinite_places")) {
    for (const auto& p : array(j["infinite_places"], "curve.infinite_places")) {
      check_object(p, {"delta", "phi"}, {}, "curve.infinite_places");
      InfinitePlace place;
      if (p.contains("delta")) place.delta = number(p["delta"], "curve.infinite_places.delta");
      if (p.contains("phi")) place.phi = number(p["phi"], "curve.infinite_places.phi");
      data.infinite_places.push_back(place);
    }
  }
  check_curve_data(data);
  return data;
}

Json curve_to_json(const CurveArithmeticData& data) {
  Json finite = Json::array();
  for (const auto& p : data.finite_places) {
    Json place{{"norm", p.norm}};
    if (p.invariants)
      place["invariants"] = Json{{"delta", p.invariants->delta}, {"epsilon", p.invariants->epsilon}, {"phi", p.invariants->phi}};
    if (p.graph) place["graph"] = graph_to_json(*p.graph);
    finite.push_back(std::move(place));
  }
  Json infinite = Json::array();
  for (const auto& p : data.infinite_places) {
    Json place = Json::object();
    if (p.delta) place["delta"] = *p.delta;
    if (p.phi) place["phi"] = *p.phi;
    infinite.push_back(std::move(place));
  }
  return Json{{"g", data.g},
              {"d_K", data.d_k},
              {"omega_sq", data.omega_sq},
              {"h_fal", data.h_fal},
              {"subdivisions", data.graph_options.subdivisions},
              {"finite_places", finite},
              {"infinite_places", infinite}};
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Json int_vectors_to_json(const std::vector<IntVector>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(v);
  return out;
}

Json bound_report_to_json(const BoundReport& report) {
  Json coefficients = Json::object();
  for (const auto& c : report.coefficients) {
    Json q = rational_to_json(c.value);
    q["value"] = to_double(c.value);
    coefficients[c.label] = q;
  }
  Json components = Json::object();
  for (const auto& c : report.components) components[c.label] = c.value;
  Json slacks = Json::object();
  bool holds = true;
  for (const auto& s : report.slacks) {
    slacks[s.label] = s.value;
    holds = holds && s.value >= -1e-12 * (1.0 + std::abs(report.bound_value));
  }
  return Json{{"bound_value", report.bound_value},
              {"coefficients", coefficients},
              {"components", components},
              {"slacks", slacks},
              {"slacks_nonnegative", holds},
              {"label", report.label}};
}

Json graph_invariants_to_json(const GraphInvariants& inv) {
  return Json{{"g", inv.g},     {"g0", inv.g0},   {"delta", inv.delta}, {"epsilon", inv.epsilon},
              {"phi", inv.phi}, {"tau", inv.tau}, {"i_jac", inv.i_jac}, {"i_jac_error", inv.i_jac_error}};
}

Json identity_report_to_json(const IdentityReport& report) {
  Json out{{"invariants", graph_invariants_to_json(report.invariants)},
           {"residual", report.residual},
           {"relative_residual", report.relative_residual},
           {"identity_holds", report.identity_holds},
           {"epsilon_nonnegative", report.epsilon_nonnegative},
           {"tau_nonnegative", report.tau_nonnegative},
           {"cinkir_checked", report.cinkir_checked},
           {"inequalities_hold", report.inequalities_hold}};
  if (report.cinkir_checked) {
    out["cinkir_slack"] = report.cinkir_slack;
    out["chain_slacks"] = report.chain_slacks;
  }
  return out;
}

Json fit_to_json(const AsymptoticFit& fit) {
  Json points = Json::array();
  for (const auto& p : fit.points)
    points.push_back(Json{{"abs_t", p.abs_t},
                          {"L", p.big_l},
                          {"I_estimate", p.estimate},
                          {"I_stderr", p.standard_error},
                          {"model_value", p.model},
                          {"residual", p.residual}});
  return Json{{"c0", fit.c0},
              {"c1", fit.c1},
              {"c2", fit.c2},
              {"predicted_c1", fit.predicted_c1},
              {"predicted_c1_error", fit.predicted_c1_error},
              {"predicted_c2", fit.predicted_c2},
              {"condition_number", fit.condition_number},
              {"points", points}};
}

std::string dump_report(const Json& j) {
  std::string out;
  dump(out, j, 0);
  out += "\n";
  return out;
}

std::string to_csv(const Json& rows, const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ",";
      if (row.contains(columns[i])) out += csv_cell(row[columns[i]]);
    }
    out += "\n";
  }
  return out;
}

std::string to_key_value_csv(const Json& j) {
  std::string out = "key,value\n";
  flatten(j, "", out);
  return out;
}

std::string fit_to_csv(const AsymptoticFit& fit) {
  return to_csv(fit_to_json(fit)["points"], {"abs_t", "L", "I_estimate", "I_stderr", "model_value", "residual"});
}

}  // namespace tropdeg
