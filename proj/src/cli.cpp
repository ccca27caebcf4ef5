#include "tropdeg/cli.hpp"

#include "tropdeg/bounds.hpp"
#include "tropdeg/degeneration.hpp"
#include "tropdeg/error.hpp"
#include "tropdeg/graph.hpp"
#include "tropdeg/io.hpp"
#include "tropdeg/lattice.hpp"
#include "tropdeg/theta.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

namespace tropdeg {

namespace {

struct Settings {
  std::string input;
  std::string format = "json";
  std::uint64_t seed = 0x5eed;
  std::uint64_t samples = 1000000;
  std::int64_t resolution = 0;  // 0: default for the rank
  std::string method;
  int subdivisions = 64;
  bool extrapolate = true;
  std::optional<double> tol;
  unsigned threads = 1;
  int shifts = 16;
  std::string x, a, b, abs_t, m_list, p, q;
  double arg = 0.0;
  int branch = 0;
  std::optional<double> c1, c2;
  int g = 2, r = 1, d_k = 1;
  double omega_sq = 0.0, phi = 0.0;
};

// Output of one command: a JSON report, optionally with a dedicated CSV
// rendering, and an exit code (nonzero when a check fails).
struct Outcome {
  Json report;
  std::string csv;
  int code = kExitOk;
};

std::vector<double> parse_list(const std::string& text, const char* name) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v))
      fail(ErrorCode::InvalidArgument, std::string("--") + name + ": cannot read \"" + item + "\"");
    out.push_back(v);
  }
  return out;
}

Eigen::VectorXd vector_option(const std::string& text, int size, const char* name) {
  if (text.empty()) return Eigen::VectorXd::Zero(size);
  const auto values = parse_list(text, name);
  if (static_cast<int>(values.size()) != size)
    fail(ErrorCode::InvalidArgument,
         std::string("--") + name + " needs " + std::to_string(size) + " entries, got " + std::to_string(values.size()));
  return Eigen::Map<const Eigen::VectorXd>(values.data(), size);
}

std::vector<long long> integer_list(const std::string& text, const char* name) {
  std::vector<long long> out;
  for (double v : parse_list(text, name)) {
    if (std::nearbyint(v) != v || std::abs(v) > 1e15)
      fail(ErrorCode::InvalidArgument, std::string("--") + name + " entries must be integers");
    out.push_back(static_cast<long long>(v));
  }
  return out;
}

std::vector<PunctureParameter> t_list(const std::string& text, double arg) {
  std::vector<PunctureParameter> out;
  for (double v : parse_list(text, "abs-t")) {
    if (!(v > 0.0 && v < 1.0)) fail(ErrorCode::InvalidT, "|t| must lie in (0, 1)");
    PunctureParameter t;
    t.log_abs = std::log(v);
    t.arg = arg;
    out.push_back(t);
  }
  if (out.empty()) fail(ErrorCode::InvalidArgument, "--abs-t needs at least one value");
  return out;
}

GraphPoint graph_point(const MetrizedGraph& graph, const std::string& text) {
  // a vertex id, or "<edge index>@<offset>"
  const auto at = text.rfind('@');
  if (at == std::string::npos) return GraphPoint::at_vertex(graph.vertex_index(text));
  try {
    std::size_t used = 0;
    const int e = std::stoi(text.substr(0, at), &used);
    const double offset = std::stod(text.substr(at + 1));
    GraphPoint p = GraphPoint::on_edge(e, offset);
    check_point(graph, p);
    return p;
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidArgument, "cannot read graph point \"" + text + "\"");
  }
}

MomentOptions moment_options(const Settings& s, int rank) {
  MomentOptions mo = default_moment_options(rank);
  if (!s.method.empty()) {
    if (s.method == "grid") {
      if (mo.method != MomentMethod::grid) mo.resolution = 256;
      mo.method = MomentMethod::grid;
    } else if (s.method == "ld" || s.method == "low-discrepancy") {
      if (mo.method != MomentMethod::low_discrepancy) mo.resolution = 1 << 20;
      mo.method = MomentMethod::low_discrepancy;
    } else {
      fail(ErrorCode::InvalidArgument, "--method must be grid or ld");
    }
  }
  if (s.resolution > 0) mo.resolution = s.resolution;
  mo.seed = s.seed;
  mo.shifts = s.shifts;
  return mo;
}

InvariantOptions invariant_options(const Settings& s) {
  InvariantOptions io;
  if (s.method.empty() || s.method == "mc" || s.method == "monte-carlo") {
    io.integrator = Integrator::monte_carlo;
  } else if (s.method == "ld" || s.method == "low-discrepancy") {
    io.integrator = Integrator::low_discrepancy;
  } else {
    fail(ErrorCode::InvalidArgument, "--integrator must be mc or ld");
  }
  io.samples = s.samples;
  io.seed = s.seed;
  io.threads = s.threads;
  io.shifts = s.shifts;
  return io;
}

GraphInvariantOptions graph_options(const Settings& s, int rank) {
  GraphInvariantOptions go;
  go.subdivisions = s.subdivisions;
  go.extrapolate = s.extrapolate;
  if (s.resolution > 0 || !s.method.empty()) go.moment = moment_options(s, rank);
  return go;
}

Json trop_json(const TropResult& tr) {
  return Json{{"point", vector_to_json(tr.point.values())},
              {"value", tr.value},
              {"minimizers", int_vectors_to_json(tr.minimizers)}};
}

SectionSpec section(const Settings& s, const PeriodFamily& fam) {
  SectionSpec sec{vector_option(s.a, fam.genus(), "a"), vector_option(s.b, fam.genus(), "b")};
  check_section(fam, sec);
  return sec;
}

// ---- commands

Outcome trop_moment(const Settings& s) {
  const GramLattice lattice = parse_gram(read_json_file(s.input));
  const MomentOptions mo = moment_options(s, lattice.rank());
  const MomentEstimate est = tropical_moment(lattice, mo);
  return {Json{{"rank", lattice.rank()},
               {"method", mo.method == MomentMethod::grid ? "grid" : "low-discrepancy"},
               {"resolution", mo.resolution},
               {"estimate", est.estimate},
               {"error_estimate", est.error_estimate},
               {"evaluations", est.evaluations}},
          {}};
}

Outcome trop_value(const Settings& s) {
  const GramLattice lattice = parse_gram(read_json_file(s.input));
  const Eigen::VectorXd x = vector_option(s.x, lattice.rank(), "x");
  const TorusCoordinate point(x);
  const ThetaNormResult res = tropical_theta_norm(lattice, point);
  return {Json{{"point", vector_to_json(point.values())},
               {"value", res.value},
               {"psi", tropical_psi(lattice, x)},
               {"minimizers", int_vectors_to_json(res.minimizers)}},
          {}};
}

Outcome theta_eval(const Settings& s) {
  const PeriodMatrix tau = parse_period_matrix(read_json_file(s.input));
  const int g = tau.genus();
  const Eigen::VectorXd a = vector_option(s.a, g, "a");
  const Eigen::VectorXd b = vector_option(s.b, g, "b");
  const Eigen::VectorXcd z = a.cast<Complex>() + tau.tau() * b.cast<Complex>();
  const ThetaEvaluation th = riemann_theta(tau, z, s.tol.value_or(1e-12));
  const ThetaEvaluator ev(tau);
  return {Json{{"theta", complex_to_json(th.value)},
               {"abs_theta", std::abs(th.value)},
               {"tail_bound", th.tail_bound},
               {"terms_used", th.terms_used},
               {"norm", ev.norm(a, b)},
               {"log_norm", ev.log_norm(a, b).log_value}},
          {}};
}

Outcome theta_invariant(const Settings& s) {
  const PeriodMatrix tau = parse_period_matrix(read_json_file(s.input));
  const InvariantOptions io = invariant_options(s);
  const InvariantEstimate est = abelian_invariant(tau, io);
  return {Json{{"g", tau.genus()},
               {"integrator", io.integrator == Integrator::monte_carlo ? "monte-carlo" : "low-discrepancy"},
               {"seed", io.seed},
               {"value", est.value},
               {"standard_error", est.standard_error},
               {"samples", est.samples},
               {"redraws", est.redraws}},
          {}};
}

Outcome family_period_cmd(const Settings& s) {
  const PeriodFamily fam = parse_family(read_json_file(s.input));
  const PunctureParameter t = t_list(s.abs_t, s.arg).front();
  const PeriodMatrix tau = family_period(fam, t, s.branch);
  return {Json{{"tau", period_matrix_to_json(tau)},
               {"abs_t", t.abs()},
               {"L", t.big_l()},
               {"branch", s.branch},
               {"det_im_limit", det_im_limit(fam)},
               {"det_im_ratio", det_im_ratio(fam, t)}},
          {}};
}

Outcome family_trop_cmd(const Settings& s) {
  const PeriodFamily fam = parse_family(read_json_file(s.input));
  return {trop_json(family_trop(fam, section(s, fam))), {}};
}

Outcome family_alpha_cmd(const Settings& s) {
  const PeriodFamily fam = parse_family(read_json_file(s.input));
  const SectionSpec sec = section(s, fam);
  return {Json{{"alpha", alpha_of_section(fam, sec, s.tol.value_or(1e-14))}, {"trop", trop_json(family_trop(fam, sec))}},
          {}};
}

Outcome family_probe_cmd(const Settings& s) {
  const PeriodFamily fam = parse_family(read_json_file(s.input));
  const SectionSpec sec = section(s, fam);
  const double alpha = alpha_of_section(fam, sec);
  const auto probes = theta_limit_probe(fam, sec, t_list(s.abs_t, s.arg));
  Json rows = Json::array();
  for (const auto& p : probes)
    rows.push_back(Json{{"abs_t", p.t.abs()}, {"L", p.t.big_l()}, {"normalized", p.normalized},
                        {"deviation", p.normalized - alpha}});
  Outcome out{Json{{"alpha", alpha}, {"probes", rows}}, {}};
  out.csv = to_csv(rows, {"abs_t", "L", "normalized", "deviation"});
  return out;
}

Outcome family_fit_cmd(const Settings& s) {
  const PeriodFamily fam = parse_family(read_json_file(s.input));
  const std::string grid = s.abs_t.empty() ? "1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8,1e-9,1e-10" : s.abs_t;
  std::optional<MomentOptions> mo;
  if (s.resolution > 0) {
    Settings ms = s;
    ms.method.clear();
    mo = moment_options(ms, fam.g2());
  }
  const AsymptoticFit fit = invariant_asymptotic_fit(fam, t_list(grid, s.arg), invariant_options(s), mo);
  return {fit_to_json(fit), fit_to_csv(fit)};
}

Outcome graph_invariants_cmd(const Settings& s) {
  const PolarizedGraph pg = parse_graph(read_json_file(s.input));
  const GenusInfo info = genus_and_lengths(pg);
  const GraphInvariants inv = graph_invariants(pg, graph_options(s, info.g0));
  const ZhangMeasure mu = zhang_measure(pg);
  return {Json{{"invariants", graph_invariants_to_json(inv)},
               {"zhang_measure", Json{{"atoms", mu.atoms}, {"densities", mu.densities}}},
               {"subdivisions", s.subdivisions},
               {"extrapolate", s.extrapolate}},
          {}};
}

Outcome graph_jacobian_cmd(const Settings& s) {
  const PolarizedGraph pg = parse_graph(read_json_file(s.input));
  const TropicalJacobian jac = tropical_jacobian(pg.graph);
  Json gram = Json::array();
  for (int i = 0; i < jac.gram.rank(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < jac.gram.rank(); ++j) row.push_back(rational_to_json((*jac.gram.exact_gram())(i, j)));
    gram.push_back(std::move(row));
  }
  return {Json{{"rank", jac.gram.rank()},
               {"gram", gram},
               {"determinant", jac.gram.determinant()},
               {"cycle_basis", jac.cycle_basis}},
          {}};
}

Outcome graph_identity_cmd(const Settings& s) {
  const PolarizedGraph pg = parse_graph(read_json_file(s.input));
  const GenusInfo info = genus_and_lengths(pg);
  const IdentityReport rep = identity_and_bounds_check(pg, graph_options(s, info.g0), s.tol.value_or(1e-3));
  Outcome out{identity_report_to_json(rep), {}};
  if (!rep.identity_holds || !rep.inequalities_hold) out.code = kExitNumerical;
  return out;
}

Outcome graph_resistance_cmd(const Settings& s) {
  const PolarizedGraph pg = parse_graph(read_json_file(s.input));
  const MetrizedGraph& graph = pg.graph;
  Json out = Json::object();
  if (!s.p.empty() || !s.q.empty()) {
    if (s.p.empty() || s.q.empty()) fail(ErrorCode::InvalidArgument, "--p and --q go together");
    out["resistance"] = effective_resistance(graph, graph_point(graph, s.p), graph_point(graph, s.q));
  }
  Json edges = Json::array();
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto r = edge_complement_resistance(graph, e);
    edges.push_back(Json{{"edge", e}, {"length", graph.edge(e).length}, {"bridge", !r.has_value()},
                         {"complement_resistance", r ? Json(*r) : Json()}});
  }
  out["edges"] = edges;
  return {out, {}};
}

Json coefficient_json(const Rational& q) {
  Json j = rational_to_json(q);
  j["value"] = to_double(q);
  return j;
}

Outcome bounds_curve_cmd(const Settings& s) {
  const std::filesystem::path path(s.input);
  CurveArithmeticData data = parse_curve(read_json_file(path), path.parent_path());
  if (s.subdivisions != 64) data.graph_options.subdivisions = s.subdivisions;
  data.graph_options.extrapolate = s.extrapolate;
  const Aggregate agg = aggregate(data);
  Json out{{"g", data.g},
           {"d_K", data.d_k},
           {"delta_X", agg.delta_x},
           {"phi_X", agg.phi_x},
           {"noether_residual", noether_residual(data)},
           {"phi_coefficient", coefficient_json(phi_coefficient(data.g))},
           {"omega_coefficient", coefficient_json(omega_coefficient(data.g))},
           {"tautological_coefficient", coefficient_json(tautological_coefficient(data.g))},
           {"omega_phi_slack", to_double(Rational(2 * data.g + 1) / (data.g - 1)) * data.omega_sq - agg.phi_x}};
  if (s.c1 && s.c2) {
    out["phi_bound"] = bound_report_to_json(phi_lower_bound(data.g, agg.delta_x, *s.c1, *s.c2, true, data.d_k));
    out["omega_bound"] = bound_report_to_json(
        omega_lower_bound(data.g, data.d_k, data.h_fal, *s.c1, *s.c2, ChainInputs{data.omega_sq, agg.phi_x, agg.delta_x}));
  } else if (s.c1 || s.c2) {
    fail(ErrorCode::InvalidArgument, "--c1 and --c2 go together");
  }
  return {out, {}};
}

Outcome bounds_tautological_cmd(const Settings& s) {
  const TautologicalSpec spec{s.r, integer_list(s.m_list, "m")};
  const TautologicalReport rep = tautological_height_bound(s.g, spec, s.d_k, s.omega_sq, s.phi);
  Json out = bound_report_to_json(rep.report);
  out["m_dependent_bound"] = rep.m_dependent;
  out["m_free_bound"] = rep.m_free;
  out["case"] = rep.case_one ? "i" : "ii";
  out["omega_weight"] = coefficient_json(rep.weight_omega);
  out["phi_weight"] = coefficient_json(rep.weight_phi);
  return {out, {}};
}

Outcome bounds_estimates_cmd(const Settings& s) {
  const MEstimates est = m_vector_estimates(integer_list(s.m_list, "m"));
  return {Json{{"sum_cross", est.sum_cross.str()},
               {"upper", rational_to_json(est.upper)},
               {"lower", rational_to_json(est.lower)},
               {"both_hold", est.both_hold}},
          {}};
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message, const Json& extra = {}) {
  Json j{{"error", kind}, {"message", message}};
  if (extra.is_object())
    for (const auto& [k, v] : extra.items()) j[k] = v;
  err << j.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tropdeg - tropical and degeneration invariants of abelian varieties and metrized graphs"};
  app.require_subcommand(1);
  Settings s;
  std::function<Outcome(const Settings&)> action;

  const auto common = [&](CLI::App* cmd) {
    cmd->add_option("--format", s.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  const auto input = [&](CLI::App* cmd, const char* what) {
    cmd->add_option("input", s.input, what)->required();
  };
  const auto leaf = [&](CLI::App* parent, const char* name, const char* help, Outcome (*fn)(const Settings&)) {
    CLI::App* cmd = parent->add_subcommand(name, help);
    common(cmd);
    cmd->callback([&action, fn] { action = fn; });
    return cmd;
  };

  CLI::App* trop = app.add_subcommand("trop", "tropical theta function and tropical moment")->require_subcommand(1);
  {
    auto* c = leaf(trop, "moment", "I(Sigma) = 2 * integral of ||Psi||", trop_moment);
    input(c, "Gram matrix JSON");
    c->add_option("--method", s.method, "grid or ld");
    c->add_option("--resolution", s.resolution, "points per axis (grid) or total points (ld)");
    c->add_option("--seed", s.seed);
    c->add_option("--shifts", s.shifts);
    c = leaf(trop, "value", "||Psi|| and its minimizers at a point", trop_value);
    input(c, "Gram matrix JSON");
    c->add_option("--x", s.x, "comma-separated basis coordinates")->required();
  }

  CLI::App* theta = app.add_subcommand("theta", "Riemann theta function")->require_subcommand(1);
  {
    auto* c = leaf(theta, "eval", "theta(tau, a + tau b) and ||theta||", theta_eval);
    input(c, "period matrix JSON");
    c->add_option("--a", s.a);
    c->add_option("--b", s.b);
    c->add_option("--tol", s.tol, "truncation error bound");
    c = leaf(theta, "invariant", "I(A, Theta) by integration over [0,1)^{2g}", theta_invariant);
    input(c, "period matrix JSON");
    c->add_option("--integrator", s.method, "mc or ld");
    c->add_option("--samples", s.samples);
    c->add_option("--seed", s.seed);
    c->add_option("--threads", s.threads);
    c->add_option("--shifts", s.shifts);
  }

  CLI::App* family = app.add_subcommand("family", "degenerating period families")->require_subcommand(1);
  {
    const auto point_opts = [&](CLI::App* c) {
      c->add_option("--a", s.a);
      c->add_option("--b", s.b);
    };
    auto* c = leaf(family, "period", "T_f(t)", family_period_cmd);
    input(c, "family JSON");
    c->add_option("--abs-t", s.abs_t)->required();
    c->add_option("--arg", s.arg);
    c->add_option("--branch", s.branch);
    c = leaf(family, "trop", "trop(z) and ||Psi_f|| there", family_trop_cmd);
    input(c, "family JSON");
    point_opts(c);
    c = leaf(family, "alpha", "limit alpha(a, b) of the normalized norm", family_alpha_cmd);
    input(c, "family JSON");
    point_opts(c);
    c->add_option("--tol", s.tol);
    c = leaf(family, "probe", "normalized ||theta|| along a sequence of t", family_probe_cmd);
    input(c, "family JSON");
    point_opts(c);
    c->add_option("--abs-t", s.abs_t)->required();
    c->add_option("--arg", s.arg);
    c = leaf(family, "fit", "fit I(T_f(t)) = c0 + c1 L - c2 log L", family_fit_cmd);
    input(c, "family JSON");
    c->add_option("--abs-t", s.abs_t, "comma-separated |t| grid");
    c->add_option("--arg", s.arg);
    c->add_option("--integrator", s.method, "mc or ld");
    c->add_option("--samples", s.samples);
    c->add_option("--seed", s.seed);
    c->add_option("--threads", s.threads);
    c->add_option("--resolution", s.resolution, "quadrature resolution for the predicted slope");
  }

  CLI::App* graph = app.add_subcommand("graph", "polarized metrized graphs")->require_subcommand(1);
  {
    const auto potential_opts = [&](CLI::App* c) {
      c->add_option("--subdivisions", s.subdivisions);
      c->add_flag("--extrapolate,!--no-extrapolate", s.extrapolate);
      c->add_option("--method", s.method, "moment quadrature: grid or ld");
      c->add_option("--resolution", s.resolution);
      c->add_option("--seed", s.seed);
    };
    auto* c = leaf(graph, "invariants", "delta, epsilon, phi, tau and I(Jac)", graph_invariants_cmd);
    input(c, "graph JSON");
    potential_opts(c);
    c = leaf(graph, "jacobian", "Gram matrix of H_1(Gamma, Z)", graph_jacobian_cmd);
    input(c, "graph JSON");
    c = leaf(graph, "identity", "delta + epsilon = 12 I + 2 phi and the inequalities", graph_identity_cmd);
    input(c, "graph JSON");
    potential_opts(c);
    c->add_option("--tol", s.tol, "relative tolerance for the identity");
    c = leaf(graph, "resistance", "effective resistances", graph_resistance_cmd);
    input(c, "graph JSON");
    c->add_option("--p", s.p, "vertex id or <edge>@<offset>");
    c->add_option("--q", s.q, "vertex id or <edge>@<offset>");
  }

  CLI::App* bounds = app.add_subcommand("bounds", "height inequalities")->require_subcommand(1);
  {
    auto* c = leaf(bounds, "curve", "aggregates, Noether residual and lower bounds", bounds_curve_cmd);
    input(c, "curve data JSON");
    c->add_option("--c1", s.c1);
    c->add_option("--c2", s.c2);
    c->add_option("--subdivisions", s.subdivisions);
    c->add_flag("--extrapolate,!--no-extrapolate", s.extrapolate);
    c = leaf(bounds, "tautological", "lower bounds for h'(Z_{m,alpha})", bounds_tautological_cmd);
    c->add_option("--g", s.g)->required();
    c->add_option("--r", s.r)->required();
    c->add_option("--m", s.m_list, "comma-separated non-zero integers")->required();
    c->add_option("--d-k", s.d_k);
    c->add_option("--omega-sq", s.omega_sq)->required();
    c->add_option("--phi", s.phi);
    c = leaf(bounds, "estimates", "elementary estimates for sum_{j<k} m_j m_k", bounds_estimates_cmd);
    c->add_option("--m", s.m_list)->required();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "UsageError", e.what());
    return kExitValidation;
  }
  if (!action) {
    emit_error(err, "UsageError", "no command given");
    return kExitValidation;
  }

  try {
    const Outcome result = action(s);
    if (s.format == "csv") {
      out << (result.csv.empty() ? to_key_value_csv(result.report) : result.csv);
    } else {
      out << dump_report(result.report);
    }
    return result.code;
  } catch (const JsonParseError& e) {
    emit_error(err, std::string(error_name(e.code())), e.what(),
               Json{{"position", Json{{"byte", e.byte()}, {"line", e.line()}, {"column", e.column()}}}});
    return kExitValidation;
  } catch (const Error& e) {
    emit_error(err, std::string(error_name(e.code())), e.what());
    return is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
  } catch (const std::exception& e) {
    emit_error(err, "InternalError", e.what());
    return kExitNumerical;
  }
}

}  // namespace tropdeg
