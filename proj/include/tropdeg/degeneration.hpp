#pragma once

// Degenerating families of period matrices over the punctured disc,
//
//   T_f(t^m) = [ S1(t)      S3(t)                         ]
//              [ S3(t)^T    (m log t)/(2 pi i) B + S2(t)  ]
//
// with polynomial S-blocks. Public inputs are in the coordinate t of the
// family; internally the S-blocks are evaluated at s = t^{1/m}.

#include "tropdeg/lattice.hpp"
#include "tropdeg/theta.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace tropdeg {

/// Matrix-valued polynomial sum_k coeffs[k] s^k.
struct PolyMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Eigen::MatrixXcd> coeffs;

  PolyMatrix() = default;
  PolyMatrix(int r, int c) : rows(r), cols(c) {}

  Eigen::MatrixXcd at(Complex s) const;
  Eigen::MatrixXcd at_zero() const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

class PeriodFamily {
public:
  PeriodFamily() = default;

  int g1() const { return g1_; }
  int g2() const { return g2_; }
  int genus() const { return g1_ + g2_; }
  int m() const { return m_; }
  const RationalMatrix& exact_b() const { return b_exact_; }
  const Eigen::MatrixXd& b() const { return b_; }
  /// Sigma_f = R^{g2} / B Z^{g2}, stored through Q = B.
  const GramLattice& torus() const { return torus_; }
  const PolyMatrix& s1() const { return s1_; }
  const PolyMatrix& s2() const { return s2_; }
  const PolyMatrix& s3() const { return s3_; }

private:
  friend PeriodFamily make_period_family(int g1, int g2, int m, const RationalMatrix& b,
                                         PolyMatrix s1, PolyMatrix s2, PolyMatrix s3);
  int g1_ = 0;
  int g2_ = 0;
  int m_ = 1;
  RationalMatrix b_exact_;
  Eigen::MatrixXd b_;
  GramLattice torus_;
  PolyMatrix s1_, s2_, s3_;
};

/// Checks shapes, B symmetric positive definite (exactly), S1 and S2
/// symmetric coefficientwise, and S1(0) in the Siegel space.
PeriodFamily make_period_family(int g1, int g2, int m, const RationalMatrix& b, PolyMatrix s1,
                                PolyMatrix s2, PolyMatrix s3);

/// A point t of the punctured disc carried as (log|t|, arg t) so that
/// |t| = 1e-300 and below stay representable.
struct PunctureParameter {
  double log_abs = 0.0;
  double arg = 0.0;

  static PunctureParameter from_complex(Complex t);
  static PunctureParameter from_abs(double abs_t) { return from_complex(Complex(abs_t, 0.0)); }
  double abs() const;
  double big_l() const { return -log_abs; }  // L = -log|t|
};

/// InvalidT unless 0 < |t| < 1.
void check_puncture(const PunctureParameter& t);

/// Assembles T_f at t. `branch` picks log t = log|t| + i(arg t + 2 pi branch);
/// it moves the real part by branch * m * B and leaves Im unchanged.
PeriodMatrix family_period(const PeriodFamily& family, const PunctureParameter& t, int branch = 0);

struct SectionSpec {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

void check_section(const PeriodFamily& family, const SectionSpec& section);

struct TropResult {
  TorusCoordinate point;  // b2 mod 1
  double value = 0.0;     // T = ||Psi_f||(trop z)
  std::vector<IntVector> minimizers;  // for the reduced point
};

TropResult family_trop(const PeriodFamily& family, const SectionSpec& section);

/// lim det Im T_f(t) / (-log|t|)^{g2} = (2 pi)^{-g2} det Im S1(0) det B.
double det_im_limit(const PeriodFamily& family);
/// det Im T_f(t) / (-log|t|)^{g2}, divided by det_im_limit.
double det_im_ratio(const PeriodFamily& family, const PunctureParameter& t);

double alpha_of_section(const PeriodFamily& family, const SectionSpec& section, double eps = 1e-14);

struct ProbeValue {
  PunctureParameter t;
  double normalized = 0.0;  // (||theta|| |t|^{-T} (-log|t|)^{-g2/4})^2
};

/// t_sequence must be strictly decreasing in |t|.
std::vector<ProbeValue> theta_limit_probe(const PeriodFamily& family, const SectionSpec& section,
                                          const std::vector<PunctureParameter>& t_sequence);

struct FitPoint {
  double abs_t = 0.0;
  double big_l = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double model = 0.0;
  double residual = 0.0;
};

struct AsymptoticFit {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  double predicted_c1 = 0.0;
  double predicted_c1_error = 0.0;
  double predicted_c2 = 0.0;
  double condition_number = 0.0;
  std::vector<FitPoint> points;
};

/// Least squares of I(T_f(t)) on c0 + c1 L - c2 log L. Point k uses the seed
/// derive_seed(options.seed, k). Needs >= 5 points spanning >= 4 decades.
AsymptoticFit invariant_asymptotic_fit(const PeriodFamily& family,
                                       const std::vector<PunctureParameter>& t_grid,
                                       const InvariantOptions& options,
                                       const std::optional<MomentOptions>& moment = std::nullopt);

/// The OLS step alone, exposed for testing.
AsymptoticFit fit_log_model(const std::vector<double>& big_l, const std::vector<double>& values);

}  // namespace tropdeg
