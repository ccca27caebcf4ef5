#pragma once

// Euclidean lattices given by a Gram matrix Q in a fixed basis, and the
// tropical theta function on the polarized real torus R^r / Z^r with the
// inner product Q:
//
//   ||Psi||(x) = 1/2 min_{n in Z^r} (x + n)^T Q (x + n)
//   Psi(x)     = ||Psi||(x) - 1/2 x^T Q x
//   I(Sigma)   = 2 * integral over [0,1]^r of ||Psi||
//
// A torus R^g / B Z^g with [x, y] = x^T B^{-1} y is represented by Q = B.

#include "tropdeg/rational.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace tropdeg {

using IntVector = std::vector<long long>;

class GramLattice {
public:
  GramLattice() = default;

  int rank() const { return static_cast<int>(gram_.rows()); }
  const Eigen::MatrixXd& gram() const { return gram_; }
  /// Present when the lattice was built from exact rational entries.
  const std::optional<RationalMatrix>& exact_gram() const { return exact_; }
  /// Upper-triangular R with Q = R^T R.
  const Eigen::MatrixXd& cholesky_upper() const { return upper_; }
  double determinant() const;

  /// Lattice with Gram c * Q (c > 0).
  GramLattice scaled(double c) const;
  /// Lattice with Gram R^T Q R for an integer matrix R.
  GramLattice transformed(const Eigen::MatrixXi& basis_change) const;

private:
  friend GramLattice validate_gram(const Eigen::MatrixXd& q);
  friend GramLattice validate_gram(const RationalMatrix& q);

  Eigen::MatrixXd gram_;
  Eigen::MatrixXd upper_;
  std::optional<RationalMatrix> exact_;
};

/// Checks symmetry (1e-12 relative) and positive definiteness via LDL^T
/// pivots; throws NotSymmetric / NotPositiveDefinite (message names the pivot).
GramLattice validate_gram(const Eigen::MatrixXd& q);
/// Exact variant: symmetry and pivots are checked in rational arithmetic.
GramLattice validate_gram(const RationalMatrix& q);

/// LDL^T pivots of a symmetric matrix without pivoting; exposed for reports.
std::vector<Rational> exact_ldl_pivots(const RationalMatrix& q);

class TorusCoordinate {
public:
  TorusCoordinate() = default;
  /// Reduces every entry into [0, 1).
  explicit TorusCoordinate(Eigen::VectorXd x);

  int size() const { return static_cast<int>(x_.size()); }
  const Eigen::VectorXd& values() const { return x_; }
  double operator[](int i) const { return x_(i); }

private:
  Eigen::VectorXd x_;
};

/// Reduces a real number into [0, 1).
double reduce_mod_one(double x);

inline constexpr double kMinimizerTieWindow = 1e-9;

struct ThetaNormResult {
  double value = 0.0;
  /// All n with 1/2 (x+n)^T Q (x+n) within kMinimizerTieWindow of the
  /// minimum, sorted lexicographically.
  std::vector<IntVector> minimizers;
};

enum class CvpStrategy { automatic, enumeration, box };

/// ||Psi|| at basis coordinates x together with its argmin set. Exact up to
/// floating point: the search region always contains the optimum.
ThetaNormResult tropical_theta_norm(const GramLattice& lattice, const TorusCoordinate& x,
                                    CvpStrategy strategy = CvpStrategy::automatic);

/// Same minimization on an unreduced real vector (no mod-1 reduction).
ThetaNormResult tropical_theta_norm_unreduced(const GramLattice& lattice,
                                              const Eigen::VectorXd& x,
                                              CvpStrategy strategy = CvpStrategy::automatic);

/// Value only; used by quadrature loops.
double tropical_theta_norm_value(const GramLattice& lattice, const Eigen::VectorXd& x);

struct ExactThetaNormResult {
  Rational value;
  std::vector<IntVector> minimizers;  // exact argmin, sorted
};

/// Rational mode: requires an exact Gram matrix; ties are decided exactly.
ExactThetaNormResult tropical_theta_norm_exact(const GramLattice& lattice,
                                               const std::vector<Rational>& x);

/// Psi(x) = ||Psi||(x) - 1/2 x^T Q x, evaluated at the given (unreduced) x.
double tropical_psi(const GramLattice& lattice, const Eigen::VectorXd& x);

enum class MomentMethod { grid, low_discrepancy };

struct MomentEstimate {
  double estimate = 0.0;
  double error_estimate = 0.0;
  std::uint64_t evaluations = 0;
};

struct MomentOptions {
  MomentMethod method = MomentMethod::grid;
  /// grid: points per axis; low-discrepancy: total points.
  std::int64_t resolution = 256;
  std::uint64_t seed = 0x5eed;
  /// Number of randomly shifted copies of the low-discrepancy sequence.
  int shifts = 16;
};

/// I(Sigma) = 2 * integral of ||Psi|| over [0,1]^r. Rank 0 gives exactly 0.
/// grid: composite midpoint rule, error = |I_N - I_{N/2}|.
/// low-discrepancy: Kronecker sequence with random shifts, error = standard
/// error over shifts.
MomentEstimate tropical_moment(const GramLattice& lattice, const MomentOptions& options);

/// Grid for rank <= 2, low-discrepancy above, with a resolution suited to
/// relative accuracy ~1e-5 on well-conditioned lattices.
MomentOptions default_moment_options(int rank);

enum class Isometry { isometric, not_isometric, inconclusive };

struct IsometryResult {
  Isometry verdict = Isometry::inconclusive;
  /// When isometric: integer R (columns = images of the second basis in the
  /// first basis) with R^T Q1 R = Q2.
  std::optional<Eigen::MatrixXi> witness;
};

/// Decides whether Q2 = R^T Q1 R for a unimodular R by enumerating short
/// vectors of the first lattice. Returns inconclusive above max_rank.
/// Throws RankMismatch for different ranks.
IsometryResult isometry_check(const GramLattice& first, const GramLattice& second,
                              int max_rank = 4);

/// All nonzero n with n^T Q n <= bound (one of each +-pair is not removed).
std::vector<IntVector> short_vectors(const GramLattice& lattice, double bound,
                                     std::size_t budget = 2000000);

}  // namespace tropdeg
