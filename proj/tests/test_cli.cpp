#include "helpers.hpp"

#include "tropdeg/cli.hpp"
#include "tropdeg/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tropdeg;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("trop moment on [[1]]") {
  const auto r = run({"trop", "moment", fixture("lattices/z1.json"), "--resolution", "4096"});
  REQUIRE(r.code == kExitOk);
  const Json j = parse_json_text(r.out);
  CHECK(std::abs(j["estimate"].get<double>() - 1.0 / 12) < 1e-4);
  CHECK(j["method"] == "grid");
  CHECK(r.out.find("0.08333") != std::string::npos);
}

TEST_CASE("trop value") {
  const auto r = run({"trop", "value", fixture("lattices/a2.json"), "--x", "0.5,0.5"});
  REQUIRE(r.code == kExitOk);
  const Json j = parse_json_text(r.out);
  CHECK(j["minimizers"].size() == 2);
  CHECK(run({"trop", "value", fixture("lattices/a2.json"), "--x", "0.5"}).code == kExitValidation);
}

TEST_CASE("graph identity on the theta graph") {
  const auto r = run({"graph", "identity", fixture("graphs/theta.json")});
  CHECK(r.code == kExitOk);
  const Json j = parse_json_text(r.out);
  CHECK(j["relative_residual"].get<double>() < 1e-3);
}

TEST_CASE("graph commands") {
  auto r = run({"graph", "resistance", fixture("graphs/theta.json"), "--p", "p", "--q", "q"});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_json_text(r.out)["resistance"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-12));
  r = run({"graph", "resistance", fixture("graphs/circle.json"), "--p", "p", "--q", "0@0.25"});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_json_text(r.out)["resistance"].get<double>() == doctest::Approx(0.1875).epsilon(1e-12));
  r = run({"graph", "jacobian", fixture("graphs/theta.json")});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_json_text(r.out)["rank"] == 2);
  r = run({"graph", "invariants", fixture("graphs/circle.json"), "--subdivisions", "32"});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_json_text(r.out)["invariants"]["tau"].get<double>() == doctest::Approx(1.0 / 12).epsilon(1e-4));
}

TEST_CASE("bounds commands") {
  auto r = run({"bounds", "tautological", "--g", "2", "--r", "1", "--m", "1", "--omega-sq", "1"});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_json_text(r.out)["m_dependent_bound"].get<double>() == doctest::Approx(0.125));
  r = run({"bounds", "estimates", "--m", "2,-3"});
  REQUIRE(r.code == kExitOk);
  const Json e = parse_json_text(r.out);
  CHECK(e["sum_cross"] == "-6");
  CHECK(e["lower"]["num"] == -13);
  r = run({"bounds", "curve", fixture("curves/synthetic_g2.json"), "--c1", "0", "--c2", "0"});
  REQUIRE(r.code == kExitOk);
  const Json c = parse_json_text(r.out);
  CHECK(std::abs(c["noether_residual"].get<double>()) < 1e-11);
  CHECK(c["omega_coefficient"]["den"] == 581);
  CHECK(run({"bounds", "tautological", "--g", "3", "--r", "3", "--m", "1,1,1", "--omega-sq", "1"}).code ==
        kExitValidation);
}

TEST_CASE("family commands") {
  auto r = run({"family", "alpha", fixture("families/tate.json"), "--a", "0", "--b", "0.5"});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_json_text(r.out)["alpha"].get<double>() == doctest::Approx(1.595769).epsilon(1e-6));
  r = run({"family", "probe", fixture("families/tate.json"), "--a", "0", "--b", "0.5", "--abs-t", "1e-2,1e-4", "--format",
           "csv"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("abs_t,L,normalized,deviation\n", 0) == 0);
  r = run({"family", "period", fixture("families/tate.json"), "--abs-t", "1e-3"});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_json_text(r.out)["det_im_ratio"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit emits CSV with the documented columns") {
  const auto r = run({"family", "fit", fixture("families/tate.json"), "--samples", "20000", "--format", "csv"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "abs_t,L,I_estimate,I_stderr,model_value,residual");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 9);
}

TEST_CASE("output is byte-identical for identical configuration") {
  const std::vector<std::string> args = {"theta", "invariant", fixture("periods/tau_g2.json"), "--samples", "20000"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  const auto c = run({"graph", "identity", fixture("graphs/dumbbell.json")});
  CHECK(c.out == run({"graph", "identity", fixture("graphs/dumbbell.json")}).out);
}

TEST_CASE("errors are reported as JSON with exit codes") {
  const auto bad = temp_file("tropdeg_malformed.json", "{\n,\n");
  auto r = run({"graph", "invariants", bad.string()});
  CHECK(r.code == kExitValidation);
  const Json e = parse_json_text(r.err);
  CHECK(e["error"] == "ParseError");
  CHECK(e["position"]["line"] == 2);
  CHECK(e["position"]["column"] == 1);

  r = run({"graph", "invariants", fixture("graphs/missing.json")});
  CHECK(r.code == kExitValidation);
  r = run({"nosuch"});
  CHECK(r.code == kExitValidation);
  CHECK(parse_json_text(r.err)["error"] == "UsageError");
  r = run({"trop", "moment", fixture("lattices/z1.json"), "--resolution", "1"});
  CHECK(r.code != kExitOk);
  CHECK(parse_json_text(r.err).contains("error"));
  std::filesystem::remove(bad);
}

TEST_CASE("the installed binary behaves like run_cli") {
#ifdef TROPDEG_CLI
  const std::string cmd = std::string(TROPDEG_CLI) + " graph jacobian " + fixture("graphs/theta.json");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[256];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  CHECK(status == 0);
  CHECK(out == run({"graph", "jacobian", fixture("graphs/theta.json")}).out);

  const std::string bad = std::string(TROPDEG_CLI) + " graph invariants /nonexistent.json 2>/dev/null";
  const int code = std::system(bad.c_str());
  CHECK(WEXITSTATUS(code) == 1);
#endif
}

}  // TEST_SUITE
