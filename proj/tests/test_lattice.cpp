#include "helpers.hpp"
#include "oracles.hpp"

#include "tropdeg/lattice.hpp"

#include <random>

using namespace tropdeg;

TEST_SUITE("lattice") {

TEST_CASE("validate_gram accepts positive definite matrices") {
  CHECK(validate_gram(mat({{2}})).rank() == 1);
  const auto a2 = validate_gram(mat({{2, -1}, {-1, 2}}));
  CHECK(a2.rank() == 2);
  CHECK(a2.determinant() == doctest::Approx(3.0));
  const auto pivots = exact_ldl_pivots(rmat({{2, -1}, {-1, 2}}));
  REQUIRE(pivots.size() == 2);
  CHECK(pivots[0] == Rational(2));
  CHECK(pivots[1] == Rational(3, 2));
  CHECK(validate_gram(Eigen::MatrixXd(0, 0)).rank() == 0);
}

TEST_CASE("validate_gram rejects bad matrices and names the pivot") {
  CHECK(throws_code([] { validate_gram(mat({{1, 2}, {2, 1}})); }, ErrorCode::NotPositiveDefinite));
  CHECK(throws_code([] { validate_gram(rmat({{1, 2}, {2, 1}})); }, ErrorCode::NotPositiveDefinite));
  CHECK(throws_code([] { validate_gram(mat({{2, 1}, {0, 2}})); }, ErrorCode::NotSymmetric));
  CHECK(throws_code([] { validate_gram(rmat({{2, 1}, {0, 2}})); }, ErrorCode::NotSymmetric));
  try {
    validate_gram(rmat({{1, 2}, {2, 1}}));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
    CHECK(std::string(e.what()).find("-3") != std::string::npos);
  }
}

TEST_CASE("tropical theta norm on small lattices") {
  const auto z2 = validate_gram(mat({{2}}));
  auto r = tropical_theta_norm(z2, TorusCoordinate(vec({0.0})));
  CHECK(r.value == 0.0);
  CHECK(r.minimizers == std::vector<IntVector>{{0}});

  r = tropical_theta_norm(z2, TorusCoordinate(vec({0.5})));
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.minimizers == std::vector<IntVector>{{-1}, {0}});

  const auto a2 = validate_gram(mat({{2, -1}, {-1, 2}}));
  r = tropical_theta_norm(a2, TorusCoordinate(vec({0.5, 0.5})));
  const auto bf = oracle::brute_force_cvp(a2.gram(), vec({0.5, 0.5}), 2);
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.minimizers == bf.minimizers);
}

TEST_CASE("rational mode decides ties exactly") {
  const auto a2 = validate_gram(rmat({{2, -1}, {-1, 2}}));
  const auto r = tropical_theta_norm_exact(a2, {Rational(1, 2), Rational(1, 2)});
  CHECK(r.value == Rational(1, 4));
  CHECK(r.minimizers == std::vector<IntVector>{{-1, -1}, {0, 0}});
  const auto r3 = tropical_theta_norm_exact(a2, {Rational(1, 3), Rational(2, 3)});
  CHECK(r3.value == Rational(1, 3));
  CHECK(r3.minimizers.size() == 3);
}

TEST_CASE("Psi is non-positive and relates to the norm") {
  const auto z2 = validate_gram(mat({{2}}));
  CHECK(tropical_psi(z2, vec({0.0})) == 0.0);
  CHECK(std::abs(tropical_psi(z2, vec({0.5}))) < 1e-15);
  // direct min over lambda of 1/2 [l,l] + [x,l]
  for (double x : {0.25, 0.1, 0.9, 1.7, -0.3}) {
    double best = INFINITY;
    for (int l = -3; l <= 3; ++l) best = std::min(best, 0.5 * 2 * l * l + 2 * x * l);
    CHECK(tropical_psi(z2, vec({x})) == doctest::Approx(best).epsilon(1e-12));
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + trial % 3;
    const auto lat = validate_gram(oracle::random_gram(rng, r));
    Eigen::VectorXd x(r);
    for (int i = 0; i < r; ++i) x(i) = u(rng);
    const double psi = tropical_psi(lat, x);
    CHECK(psi <= 1e-15);
    const double norm = tropical_theta_norm_unreduced(lat, x).value;
    CHECK(std::abs(norm - (psi + 0.5 * x.dot(lat.gram() * x))) < 1e-12 * (1 + norm));
  }
}

TEST_CASE("CVP agrees with exhaustive search (1000 random instances)") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = 1 + trial % 4;
    const auto lat = validate_gram(oracle::random_gram(rng, r));
    Eigen::VectorXd x(r);
    for (int i = 0; i < r; ++i) x(i) = u(rng);
    const auto got = tropical_theta_norm(lat, TorusCoordinate(x));
    const auto want = oracle::brute_force_cvp(lat.gram(), TorusCoordinate(x).values());
    if (std::abs(got.value - want.value) > 1e-12 * (1 + want.value) || got.minimizers != want.minimizers) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("enumeration and box strategies agree") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + trial % 2;
    const auto lat = validate_gram(oracle::random_gram(rng, r));
    Eigen::VectorXd x(r);
    for (int i = 0; i < r; ++i) x(i) = u(rng);
    const auto e = tropical_theta_norm(lat, TorusCoordinate(x), CvpStrategy::enumeration);
    const auto b = tropical_theta_norm(lat, TorusCoordinate(x), CvpStrategy::box);
    CHECK(e.value == doctest::Approx(b.value).epsilon(1e-12));
    CHECK(e.minimizers == b.minimizers);
  }
}

TEST_CASE("symmetry, lattice points and scaling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int r = 1 + trial % 4;
    const auto lat = validate_gram(oracle::random_gram(rng, r));
    Eigen::VectorXd x(r);
    for (int i = 0; i < r; ++i) x(i) = u(rng);
    const double v = tropical_theta_norm(lat, TorusCoordinate(x)).value;
    CHECK(tropical_theta_norm(lat, TorusCoordinate(-x)).value == doctest::Approx(v).epsilon(1e-12));
    CHECK(tropical_theta_norm(lat, TorusCoordinate(Eigen::VectorXd::Zero(r))).value == 0.0);
    const double c = 0.1 + 3 * u(rng);
    CHECK(std::abs(tropical_theta_norm(lat.scaled(c), TorusCoordinate(x)).value - c * v) <= 1e-10 * c * v + 1e-15);
  }
}

TEST_CASE("tropical moment closed forms") {
  MomentOptions grid{MomentMethod::grid, 4096};
  for (double b : {1.0, 2.0, 5.0}) {
    const auto est = tropical_moment(validate_gram(mat({{b}})), grid);
    CHECK(est.estimate == doctest::Approx(b / 12).epsilon(1e-6));
    CHECK(est.error_estimate < 1e-6);
  }
  const auto diag = tropical_moment(validate_gram(mat({{2, 0}, {0, 5}})), MomentOptions{MomentMethod::grid, 512});
  CHECK(diag.estimate == doctest::Approx(7.0 / 12).epsilon(1e-5));
  CHECK(tropical_moment(validate_gram(Eigen::MatrixXd(0, 0)), grid).estimate == 0.0);
  CHECK(throws_code([] { tropical_moment(validate_gram(mat({{1}})), MomentOptions{MomentMethod::grid, 1}); },
                    ErrorCode::ResolutionTooSmall));
}

TEST_CASE("tropical moment matches an independent Riemann sum") {
  const Eigen::MatrixXd q = mat({{2, -1}, {-1, 2}});
  const double oracle_value = oracle::riemann_moment(q, 200);
  const auto est = tropical_moment(validate_gram(q), MomentOptions{MomentMethod::grid, 512});
  CHECK(est.estimate == doctest::Approx(oracle_value).epsilon(1e-4));
  CHECK(est.estimate == doctest::Approx(5.0 / 18).epsilon(1e-4));
}

TEST_CASE("moment error estimate shrinks under refinement") {
  const auto lat = validate_gram(mat({{2, -1}, {-1, 2}}));
  const auto coarse = tropical_moment(lat, MomentOptions{MomentMethod::grid, 32});
  const auto fine = tropical_moment(lat, MomentOptions{MomentMethod::grid, 256});
  CHECK(fine.error_estimate < coarse.error_estimate);
  const auto ld_coarse = tropical_moment(lat, MomentOptions{MomentMethod::low_discrepancy, 1 << 12});
  const auto ld_fine = tropical_moment(lat, MomentOptions{MomentMethod::low_discrepancy, 1 << 18});
  CHECK(ld_fine.error_estimate < ld_coarse.error_estimate);
  CHECK(ld_fine.estimate == doctest::Approx(5.0 / 18).epsilon(1e-3));
}

TEST_CASE("low-discrepancy moment is deterministic given the seed") {
  const auto lat = validate_gram(mat({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}));
  MomentOptions o{MomentMethod::low_discrepancy, 1 << 14, 99, 8};
  CHECK(tropical_moment(lat, o).estimate == tropical_moment(lat, o).estimate);
}

TEST_CASE("unimodular invariance") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int r = 2 + trial % 2;
    const auto lat = validate_gram(oracle::random_gram(rng, r, 1.0));
    const Eigen::MatrixXi rm = oracle::random_unimodular(rng, r);
    const auto moved = lat.transformed(rm);
    Eigen::VectorXd x(r);
    for (int i = 0; i < r; ++i) x(i) = u(rng);
    // x' = R^{-1} x
    const Eigen::VectorXd xp = rm.cast<double>().lu().solve(x);
    CHECK(tropical_theta_norm(moved, TorusCoordinate(xp)).value ==
          doctest::Approx(tropical_theta_norm(lat, TorusCoordinate(x)).value).epsilon(1e-9));
    if (trial < 6) {
      const auto opts = default_moment_options(r);
      const auto a = tropical_moment(lat, opts);
      const auto b = tropical_moment(moved, opts);
      CHECK(std::abs(a.estimate - b.estimate) <= 3 * (a.error_estimate + b.error_estimate) + 1e-9);
    }
  }
}

TEST_CASE("isometry check") {
  const auto a2 = validate_gram(mat({{2, -1}, {-1, 2}}));
  Eigen::MatrixXi r(2, 2);
  r << 1, 1, 0, 1;
  const auto res = isometry_check(a2, a2.transformed(r));
  CHECK(res.verdict == Isometry::isometric);
  REQUIRE(res.witness);
  const Eigen::MatrixXd w = res.witness->cast<double>();
  CHECK((w.transpose() * a2.gram() * w - a2.transformed(r).gram()).norm() < 1e-12);

  CHECK(isometry_check(validate_gram(mat({{1}})), validate_gram(mat({{2}}))).verdict == Isometry::not_isometric);
  CHECK(isometry_check(validate_gram(mat({{2, 0}, {0, 2}})), a2).verdict == Isometry::not_isometric);
  CHECK(throws_code([&] { isometry_check(a2, validate_gram(mat({{1}}))); }, ErrorCode::RankMismatch));
  const auto big = validate_gram(Eigen::MatrixXd::Identity(5, 5));
  CHECK(isometry_check(big, big, 4).verdict == Isometry::inconclusive);
}

TEST_CASE("short vectors count norms") {
  // norm-2 vectors: 4 in Z^2 scaled by 2 (+-e1, +-e2), 6 in A2
  CHECK(short_vectors(validate_gram(mat({{2, 0}, {0, 2}})), 2.0 + 1e-9).size() == 4);
  CHECK(short_vectors(validate_gram(mat({{2, -1}, {-1, 2}})), 2.0 + 1e-9).size() == 6);
}

}  // TEST_SUITE
