#include "helpers.hpp"

#include "tropdeg/io.hpp"

#include <filesystem>

using namespace tropdeg;

namespace {

std::vector<std::filesystem::path> files_in(const std::string& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(fixture(dir)))
    if (entry.path().extension() == ".json") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Position reported for a malformed document, or {0, 0} if it parsed.
std::pair<std::size_t, std::size_t> error_position(const std::string& text) {
  try {
    parse_json_text(text);
  } catch (const JsonParseError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("graph fixtures round-trip") {
  const auto files = files_in("graphs");
  CHECK(files.size() >= 7);
  for (const auto& f : files) {
    INFO(f.string());
    const auto a = parse_graph(read_json_file(f));
    const Json j = graph_to_json(a);
    const auto b = parse_graph(j);
    CHECK(graph_to_json(b) == j);
    CHECK(b.q == a.q);
    CHECK(b.graph.vertex_ids() == a.graph.vertex_ids());
    REQUIRE(b.graph.edge_count() == a.graph.edge_count());
    for (int e = 0; e < a.graph.edge_count(); ++e) CHECK(b.graph.edge(e).length == a.graph.edge(e).length);
  }
}

TEST_CASE("family fixtures round-trip") {
  const auto files = files_in("families");
  CHECK(files.size() >= 4);
  for (const auto& f : files) {
    INFO(f.string());
    const auto a = parse_family(read_json_file(f));
    const Json j = family_to_json(a);
    const auto b = parse_family(j);
    CHECK(family_to_json(b) == j);
    CHECK(b.g1() == a.g1());
    CHECK(b.g2() == a.g2());
    const auto t = PunctureParameter::from_complex(Complex(0.01, 0.003));
    CHECK((family_period(a, t).tau() - family_period(b, t).tau()).norm() == 0.0);
  }
}

TEST_CASE("lattice and period fixtures round-trip") {
  for (const auto& f : files_in("lattices")) {
    INFO(f.string());
    const auto a = parse_gram(read_json_file(f));
    const Json j = gram_to_json(a);
    const auto b = parse_gram(j);
    CHECK(gram_to_json(b) == j);
    CHECK(b.gram() == a.gram());
    CHECK(b.exact_gram().has_value() == a.exact_gram().has_value());
  }
  const auto d = parse_gram(read_json_file(fixture("lattices/diag_2_5.json")));
  REQUIRE(d.exact_gram().has_value());
  CHECK((*d.exact_gram())(1, 1) == Rational(5));
  for (const auto& f : files_in("periods")) {
    INFO(f.string());
    const auto a = parse_period_matrix(read_json_file(f));
    const Json j = period_matrix_to_json(a);
    CHECK(period_matrix_to_json(parse_period_matrix(j)) == j);
  }
}

TEST_CASE("curve fixtures round-trip") {
  for (const auto& f : files_in("curves")) {
    INFO(f.string());
    const auto a = parse_curve(read_json_file(f), f.parent_path());
    const Json j = curve_to_json(a);
    const auto b = parse_curve(j);
    CHECK(curve_to_json(b) == j);
    CHECK(aggregate(b).delta_x == aggregate(a).delta_x);
    CHECK(b.h_fal == a.h_fal);
  }
}

TEST_CASE("unknown and missing fields are rejected") {
  CHECK(throws_code([] { parse_graph(parse_json_text(R"({"vertices": [{"id": "p"}], "edges": [], "extra": 1})")); },
                    ErrorCode::ParseError));
  CHECK(throws_code([] { parse_graph(parse_json_text(R"({"vertices": [{"id": "p", "genus": 1}], "edges": []})")); },
                    ErrorCode::ParseError));
  CHECK(throws_code([] { parse_graph(parse_json_text(R"({"edges": []})")); }, ErrorCode::ParseError));
  CHECK(throws_code([] { parse_gram(parse_json_text(R"({"rank": 1, "gram": [[1]], "name": "z"})")); },
                    ErrorCode::ParseError));
  CHECK(throws_code([] { parse_curve(parse_json_text(R"({"g": 2, "d_K": 1, "omega_sq": 0})")); }, ErrorCode::ParseError));
  CHECK(throws_code([] {
    parse_curve(parse_json_text(R"({"g": 2, "d_K": 1, "omega_sq": 0, "h_fal": 0, "finite_places": [{"norm": 2, "x": 0}]})"));
  }, ErrorCode::ParseError));
}

TEST_CASE("schema values are validated") {
  // unknown vertex in an edge
  CHECK_THROWS_AS(parse_graph(parse_json_text(R"({"vertices": [{"id": "p"}], "edges": [{"u": "p", "v": "z"}]})")),
                  Error);
  // gram must be square and match the rank
  CHECK_THROWS_AS(parse_gram(parse_json_text(R"({"rank": 2, "gram": [[1]]})")), Error);
  CHECK(throws_code([] { parse_gram(parse_json_text(R"({"rank": 1, "gram": [[-1]]})")); }, ErrorCode::NotPositiveDefinite));
  CHECK(parse_rational(parse_json_text("[3, 6]"), "x") == Rational(1) / Rational(2));
  CHECK(parse_rational(parse_json_text(R"({"num": -2, "den": 4})"), "x") == Rational(-1) / Rational(2));
  CHECK(parse_rational(parse_json_text("7"), "x") == Rational(7));
  CHECK_THROWS_AS(parse_rational(parse_json_text("[1, 0]"), "x"), Error);
  CHECK(parse_complex(parse_json_text(R"({"re": 1.5, "im": -2})"), "z") == Complex(1.5, -2));
  CHECK(parse_complex(parse_json_text("0.25"), "z") == Complex(0.25, 0));
}

TEST_CASE("rationals are emitted as num/den") {
  const Json j = rational_to_json(Rational(-3) / Rational(27888));
  CHECK(j["num"] == -1);
  CHECK(j["den"] == 9296);
  const Rational big = Rational(Integer(1) << 80) / Rational(3);
  const Json jb = rational_to_json(big);
  CHECK(jb["num"].is_string());
  CHECK(parse_rational(jb, "x") == big);
}

TEST_CASE("malformed JSON reports a position") {
  CHECK(error_position("{\n,") == std::pair<std::size_t, std::size_t>{2, 1});
  CHECK(error_position("[1, 2,\n  3,\n  ]") == std::pair<std::size_t, std::size_t>{3, 3});
  CHECK(error_position("{\"a\": 1}") == std::pair<std::size_t, std::size_t>{0, 0});
  try {
    parse_json_text("{\"a\": tru}");
    FAIL("expected a parse error");
  } catch (const JsonParseError& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.line() == 1);
    CHECK(e.byte() > 0);
  }
  CHECK(throws_code([] { read_json_file(fixture("graphs/does_not_exist.json")); }, ErrorCode::InvalidArgument));
}

TEST_CASE("report formatting is deterministic") {
  const Json j = {{"b", 1.0 / 3}, {"a", Json::array({1, 2})}, {"c", std::nan("")}, {"d", {{"z", 1}, {"y", 2}}}};
  const std::string s = dump_report(j);
  CHECK(s == dump_report(j));
  CHECK(s.find("0.333333333333") != std::string::npos);
  CHECK(s.find("0.3333333333333") == std::string::npos);
  CHECK(s.find("null") != std::string::npos);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("\"y\"") < s.find("\"z\""));
  const std::string kv = to_key_value_csv(j);
  CHECK(kv.find("d.y,2") != std::string::npos);
}

}  // TEST_SUITE
