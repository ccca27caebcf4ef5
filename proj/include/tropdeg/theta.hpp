#pragma once

// Riemann theta function
//
//   theta(tau, z) = sum_n exp(pi i n^T tau n + 2 pi i n^T z)
//
// its invariant norm ||theta||(tau, z) and the abelian invariant I(A, Theta).

#include "tropdeg/lattice.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace tropdeg {

using Complex = std::complex<double>;

class PeriodMatrix {
public:
  PeriodMatrix() = default;

  int genus() const { return static_cast<int>(tau_.rows()); }
  const Eigen::MatrixXcd& tau() const { return tau_; }
  Eigen::MatrixXd real_part() const { return tau_.real(); }
  Eigen::MatrixXd imag_part() const { return tau_.imag(); }

private:
  friend PeriodMatrix validate_period_matrix(const Eigen::MatrixXcd& tau);
  Eigen::MatrixXcd tau_;
};

/// Symmetric to 1e-12 relative with positive-definite imaginary part;
/// otherwise NotInSiegelSpace naming the failing pivot.
PeriodMatrix validate_period_matrix(const Eigen::MatrixXcd& tau);

struct ThetaOptions {
  int max_genus = 5;
  /// Upper limit on the number of lattice points summed per evaluation.
  std::uint64_t term_budget = 20000000;
};

struct ThetaEvaluation {
  Complex value;
  double tail_bound = 0.0;  // certified bound on |value - theta|
  std::uint64_t terms_used = 0;
};

/// Sums over the ellipsoid (n + c)^T (pi Im tau) (n + c) <= R^2 with
/// c = (Im tau)^{-1} Im z and R from a Gaussian tail bound, so that the
/// truncation error is at most eps.
ThetaEvaluation riemann_theta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps,
                              const ThetaOptions& options = {});

/// Certified tail bound used above: sum over q_n > R^2 of exp(-q_n), where
/// q_n = (n + c)^T A (n + c) and lambda = lambda_min(A).
double gaussian_tail_bound(int g, double lambda_min, double radius_sq);

/// Precomputed data for repeated ||theta|| evaluations at one tau, in the
/// real coordinates z = a + tau b:
///
///   ||theta||(tau, a + tau b) = det(Y)^{1/4} |sum_n e^{pi i (n+b)^T tau (n+b) + 2 pi i n^T a}|.
///
/// Everything is done in log space relative to the dominant term so large
/// Im tau neither overflows nor underflows.
class ThetaEvaluator {
public:
  explicit ThetaEvaluator(const PeriodMatrix& tau, const ThetaOptions& options = {});

  struct LogNorm {
    double log_value = 0.0;    // log ||theta||; -inf at an exact zero
    double min_exponent = 0.0; // q_min = min_n pi (n+b)^T Y (n+b)
    double reduced_modulus = 0.0;  // |sum| / e^{-q_min}
    std::uint64_t terms = 0;
  };

  /// `rel` bounds the dropped tail relative to the dominant term.
  LogNorm log_norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double rel = 1e-14) const;
  double norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double rel = 1e-14) const;

  int genus() const { return g_; }
  double log_det_imag() const { return log_det_y_; }

private:
  int g_ = 0;
  Eigen::MatrixXd x_;
  GramLattice scaled_imag_;  // Gram pi * Y
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
  double log_det_y_ = 0.0;
  ThetaOptions options_;
};

/// ||theta|| at real coordinates (a, b), z = a + tau b.
double theta_norm(const PeriodMatrix& tau, const Eigen::VectorXd& a, const Eigen::VectorXd& b);
/// ||theta|| at a complex point, via the (a, b) coordinates of z.
double theta_norm_at(const PeriodMatrix& tau, const Eigen::VectorXcd& z);

enum class Integrator { monte_carlo, low_discrepancy };

struct InvariantOptions {
  Integrator integrator = Integrator::monte_carlo;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0x5eed;
  unsigned threads = 1;  // 0 = hardware concurrency
  int shifts = 16;       // low-discrepancy only
  ThetaOptions theta;
};

struct InvariantEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t redraws = 0;  // points that hit the theta divisor numerically
};

/// I(A, Theta) = -(g log 2)/2 - 2 * integral over [0,1)^{2g} of
/// log ||theta||(tau, a + tau b).
InvariantEstimate abelian_invariant(const PeriodMatrix& tau, const InvariantOptions& options);

}  // namespace tropdeg
