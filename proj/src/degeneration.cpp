#include "tropdeg/degeneration.hpp"

#include "tropdeg/error.hpp"
#include "tropdeg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace tropdeg {

namespace {

constexpr double kPi = std::numbers::pi;

void check_poly(const PolyMatrix& p, int rows, int cols, const char* name) {
  if (p.rows != rows || p.cols != cols) {
    fail(ErrorCode::InvalidArgument, std::string(name) + " must be " + std::to_string(rows) + "x" +
                                         std::to_string(cols));
  }
  for (const auto& c : p.coeffs) {
    if (c.rows() != rows || c.cols() != cols) {
      fail(ErrorCode::InvalidArgument, std::string(name) + " has a coefficient of the wrong shape");
    }
    if (!c.allFinite()) fail(ErrorCode::InvalidArgument, std::string(name) + " has non-finite coefficients");
  }
}

void check_symmetric_poly(const PolyMatrix& p, const char* name) {
  for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
    const auto& c = p.coeffs[k];
    const double scale = std::max(1.0, c.size() ? c.cwiseAbs().maxCoeff() : 0.0);
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      fail(ErrorCode::NotSymmetric, std::string(name) + " coefficient of degree " + std::to_string(k) +
                                        " is not symmetric");
    }
  }
}

Complex unit_phase(Complex x) { return std::exp(Complex(0.0, 2.0 * kPi) * x); }

}  // namespace

Eigen::MatrixXcd PolyMatrix::at(Complex s) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, cols);
  // Horner
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) out = (out * s + *it).eval();
  return out;
}

Eigen::MatrixXcd PolyMatrix::at_zero() const {
  if (coeffs.empty()) return Eigen::MatrixXcd::Zero(rows, cols);
  return coeffs.front();
}

PeriodFamily make_period_family(int g1, int g2, int m, const RationalMatrix& b, PolyMatrix s1,
                                PolyMatrix s2, PolyMatrix s3) {
  if (g1 < 0 || g2 < 0 || g1 + g2 < 1) fail(ErrorCode::InvalidArgument, "need g1, g2 >= 0 and g1 + g2 >= 1");
  if (m < 1) fail(ErrorCode::InvalidArgument, "m must be a positive integer");
  if (b.rows != g2 || b.cols != g2) fail(ErrorCode::InvalidArgument, "B must be g2 x g2");
  check_poly(s1, g1, g1, "S1");
  check_poly(s2, g2, g2, "S2");
  check_poly(s3, g1, g2, "S3");
  check_symmetric_poly(s1, "S1");
  check_symmetric_poly(s2, "S2");

  PeriodFamily fam;
  fam.g1_ = g1;
  fam.g2_ = g2;
  fam.m_ = m;
  fam.b_exact_ = b;
  fam.torus_ = validate_gram(b);
  fam.b_ = fam.torus_.gram();
  if (g1 > 0) {
    try {
      validate_period_matrix(s1.at_zero());
    } catch (const Error& e) {
      fail(ErrorCode::NotInSiegelSpace, std::string("S1(0): ") + e.what());
    }
  }
  fam.s1_ = std::move(s1);
  fam.s2_ = std::move(s2);
  fam.s3_ = std::move(s3);
  return fam;
}

PunctureParameter PunctureParameter::from_complex(Complex t) {
  PunctureParameter p;
  p.log_abs = std::log(std::abs(t));
  p.arg = std::arg(t);
  return p;
}

double PunctureParameter::abs() const { return std::exp(log_abs); }

void check_puncture(const PunctureParameter& t) {
  if (std::isnan(t.log_abs) || t.log_abs == -std::numeric_limits<double>::infinity()) {
    fail(ErrorCode::InvalidT, "t = 0 is not in the punctured disc");
  }
  if (!(t.log_abs < 0.0)) fail(ErrorCode::InvalidT, "|t| must be below 1");
  if (!std::isfinite(t.arg)) fail(ErrorCode::InvalidT, "arg t is not finite");
}

PeriodMatrix family_period(const PeriodFamily& family, const PunctureParameter& t, int branch) {
  check_puncture(t);
  const int g1 = family.g1(), g2 = family.g2(), g = family.genus();
  const double m = family.m();
  // s = t^{1/m}, principal root
  const Complex log_s(t.log_abs / m, t.arg / m);
  const Complex s = std::exp(log_s);
  Eigen::MatrixXcd tau(g, g);
  if (g1 > 0) {
    tau.topLeftCorner(g1, g1) = family.s1().at(s);
    if (g2 > 0) {
      const Eigen::MatrixXcd s3 = family.s3().at(s);
      tau.topRightCorner(g1, g2) = s3;
      tau.bottomLeftCorner(g2, g1) = s3.transpose();
    }
  }
  if (g2 > 0) {
    // (m log s + 2 pi i branch)/(2 pi i) = (arg t + 2 pi branch)/(2 pi) - i log|t|/(2 pi)
    const Complex factor((t.arg + 2.0 * kPi * branch) / (2.0 * kPi), -t.log_abs / (2.0 * kPi));
    tau.bottomRightCorner(g2, g2) = factor * family.b().cast<Complex>() + family.s2().at(s);
  }
  return validate_period_matrix(tau);
}

void check_section(const PeriodFamily& family, const SectionSpec& section) {
  if (section.a.size() != family.genus() || section.b.size() != family.genus()) {
    fail(ErrorCode::RankMismatch, "section vectors must have length g");
  }
  if (!section.a.allFinite() || !section.b.allFinite()) {
    fail(ErrorCode::InvalidArgument, "section has non-finite entries");
  }
}

TropResult family_trop(const PeriodFamily& family, const SectionSpec& section) {
  check_section(family, section);
  const Eigen::VectorXd b2 = section.b.tail(family.g2());
  TropResult out;
  out.point = TorusCoordinate(b2);
  const auto norm = tropical_theta_norm(family.torus(), out.point);
  out.value = norm.value;
  out.minimizers = norm.minimizers;
  return out;
}

double det_im_limit(const PeriodFamily& family) {
  double det_s1 = 1.0;
  if (family.g1() > 0) det_s1 = Eigen::MatrixXd(family.s1().at_zero().imag()).determinant();
  return std::pow(2.0 * kPi, -family.g2()) * det_s1 * family.torus().determinant();
}

double det_im_ratio(const PeriodFamily& family, const PunctureParameter& t) {
  const PeriodMatrix tau = family_period(family, t);
  const double det = Eigen::MatrixXd(tau.imag_part()).determinant();
  return det / std::pow(t.big_l(), family.g2()) / det_im_limit(family);
}

double alpha_of_section(const PeriodFamily& family, const SectionSpec& section, double eps) {
  const TropResult trop = family_trop(family, section);
  const int g1 = family.g1(), g2 = family.g2();
  const Eigen::VectorXd a1 = section.a.head(g1), a2 = section.a.tail(g2);
  const Eigen::VectorXd b1 = section.b.head(g1), b2 = section.b.tail(g2);
  const Eigen::MatrixXcd s1 = family.s1().at_zero();
  const Eigen::MatrixXcd s2 = family.s2().at_zero();
  const Eigen::MatrixXcd s3 = family.s3().at_zero();
  std::optional<PeriodMatrix> s1_tau;
  if (g1 > 0) s1_tau = validate_period_matrix(s1);

  Complex beta = 0.0;
  for (const auto& reduced : trop.minimizers) {
    // back from the reduced point to the original b2
    Eigen::VectorXd n(g2);
    for (int i = 0; i < g2; ++i) n(i) = static_cast<double>(reduced[static_cast<std::size_t>(i)]) + std::nearbyint(trop.point[i] - b2(i));
    const Eigen::VectorXcd w = (n + b2).cast<Complex>();
    const Eigen::VectorXcd b1c = b1.cast<Complex>();
    Complex phase_arg = 0.5 * (b1c.dot(s1 * b1c) + w.dot(s2 * w)) + b1c.dot(s3 * w) + n.dot(a2);
    Complex theta_factor = 1.0;
    if (g1 > 0) {
      const Eigen::VectorXcd z1 = a1.cast<Complex>() + s3 * w + s1 * b1c;
      theta_factor = riemann_theta(*s1_tau, z1, eps).value;
    }
    beta += unit_phase(phase_arg) * theta_factor;
  }
  double det_s1 = 1.0;
  if (g1 > 0) det_s1 = Eigen::MatrixXd(s1.imag()).determinant();
  const double scale = std::sqrt(det_s1 * family.torus().determinant() / std::pow(2.0 * kPi, g2));
  return scale * std::norm(beta);
}

std::vector<ProbeValue> theta_limit_probe(const PeriodFamily& family, const SectionSpec& section,
                                          const std::vector<PunctureParameter>& t_sequence) {
  check_section(family, section);
  for (std::size_t k = 0; k < t_sequence.size(); ++k) {
    check_puncture(t_sequence[k]);
    if (k > 0 && !(t_sequence[k].log_abs < t_sequence[k - 1].log_abs)) {
      fail(ErrorCode::InvalidT, "probe sequence must be strictly decreasing in |t|");
    }
  }
  const double trop_value = family_trop(family, section).value;
  const double g2 = family.g2();
  std::vector<ProbeValue> out;
  for (const auto& t : t_sequence) {
    const ThetaEvaluator theta(family_period(family, t));
    const auto log_norm = theta.log_norm(section.a, section.b);
    const double big_l = t.big_l();
    ProbeValue v;
    v.t = t;
    v.normalized = std::exp(2.0 * (log_norm.log_value + trop_value * big_l - 0.25 * g2 * std::log(big_l)));
    out.push_back(v);
  }
  return out;
}

AsymptoticFit fit_log_model(const std::vector<double>& big_l, const std::vector<double>& values) {
  if (big_l.size() != values.size() || big_l.size() < 3) {
    fail(ErrorCode::InvalidArgument, "fit needs at least three (L, value) pairs");
  }
  const int n = static_cast<int>(big_l.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = big_l[static_cast<std::size_t>(i)];
    design(i, 2) = -std::log(big_l[static_cast<std::size_t>(i)]);
    rhs(i) = values[static_cast<std::size_t>(i)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  AsymptoticFit fit;
  fit.condition_number = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
  if (!(fit.condition_number <= 1e10)) {
    fail(ErrorCode::IllConditionedFit, "design matrix condition number " +
                                           std::to_string(fit.condition_number) + " exceeds 1e10");
  }
  const Eigen::VectorXd c = svd.solve(rhs);
  fit.c0 = c(0);
  fit.c1 = c(1);
  fit.c2 = c(2);
  const Eigen::VectorXd model = design * c;
  for (int i = 0; i < n; ++i) {
    FitPoint p;
    p.big_l = big_l[static_cast<std::size_t>(i)];
    p.abs_t = std::exp(-p.big_l);
    p.estimate = rhs(i);
    p.model = model(i);
    p.residual = rhs(i) - model(i);
    fit.points.push_back(p);
  }
  return fit;
}

AsymptoticFit invariant_asymptotic_fit(const PeriodFamily& family,
                                       const std::vector<PunctureParameter>& t_grid,
                                       const InvariantOptions& options,
                                       const std::optional<MomentOptions>& moment) {
  if (t_grid.size() < 5) fail(ErrorCode::InvalidArgument, "fit needs at least 5 grid points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : t_grid) {
    check_puncture(t);
    lo = std::min(lo, t.log_abs);
    hi = std::max(hi, t.log_abs);
  }
  if ((hi - lo) / std::log(10.0) < 4.0 - 1e-9) {
    fail(ErrorCode::InvalidArgument, "fit grid must span at least 4 decades of |t|");
  }
  std::vector<double> big_l, values, errors;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    InvariantOptions point_options = options;
    point_options.seed = derive_seed(options.seed, k);
    const auto estimate = abelian_invariant(family_period(family, t_grid[k]), point_options);
    big_l.push_back(t_grid[k].big_l());
    values.push_back(estimate.value);
    errors.push_back(estimate.standard_error);
  }
  AsymptoticFit fit = fit_log_model(big_l, values);
  for (std::size_t k = 0; k < fit.points.size(); ++k) {
    fit.points[k].standard_error = errors[k];
    fit.points[k].abs_t = t_grid[k].abs();
  }
  const MomentOptions mo = moment ? *moment : default_moment_options(family.g2());
  const MomentEstimate m = tropical_moment(family.torus(), mo);
  fit.predicted_c1 = m.estimate;
  fit.predicted_c1_error = m.error_estimate;
  fit.predicted_c2 = 0.5 * family.g2();
  return fit;
}

}  // namespace tropdeg
