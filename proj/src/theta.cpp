#include "tropdeg/theta.hpp"

#include "tropdeg/detail/enumerate.hpp"
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
constexpr double kTailSplits[] = {0.5, 0.25, 0.1};

// log of (1 + sqrt(pi / (s lambda)))^g
double log_lattice_sum_factor(int g, double lambda, double s) {
  return g * std::log1p(std::sqrt(kPi / (s * lambda)));
}

// Smallest R^2 over the split parameters s such that the tail bound
// e^{-(1-s) R^2} (1 + sqrt(pi/(s lambda)))^g is at most e^{-log_target}.
double radius_for(int g, double lambda, double log_target) {
  double best = std::numeric_limits<double>::infinity();
  for (double s : kTailSplits) {
    best = std::min(best, (log_target + log_lattice_sum_factor(g, lambda, s)) / (1.0 - s));
  }
  // small margin so that the reported bound is <= the target after rounding
  return std::max(best, 0.0) * (1.0 + 1e-12) + 1e-9;
}

void check_budget(int g, double radius_sq, double lambda_max, double log_det_a, std::uint64_t budget) {
  // Unit cubes around admissible points lie in the ellipsoid enlarged by
  // half the cube diagonal (measured in the A-norm).
  const double rho = std::sqrt(radius_sq) + 0.5 * std::sqrt(g * lambda_max);
  const double log_ball = 0.5 * g * std::log(kPi) - std::lgamma(0.5 * g + 1.0);
  const double log_count = log_ball + g * std::log(rho) - 0.5 * log_det_a;
  if (log_count > std::log(static_cast<double>(budget))) {
    fail(ErrorCode::TruncationFailure,
         "theta series needs about " + std::to_string(std::exp(log_count)) +
             " terms, above the budget of " + std::to_string(budget));
  }
}

void check_genus(int g, const ThetaOptions& options) {
  if (g > options.max_genus) {
    fail(ErrorCode::InvalidArgument, "genus " + std::to_string(g) + " exceeds the configured cap " +
                                         std::to_string(options.max_genus));
  }
}

}  // namespace

PeriodMatrix validate_period_matrix(const Eigen::MatrixXcd& tau) {
  if (tau.rows() != tau.cols() || tau.rows() == 0) {
    fail(ErrorCode::NotInSiegelSpace, "period matrix must be square of size >= 1");
  }
  if (!tau.allFinite()) fail(ErrorCode::NotInSiegelSpace, "period matrix has non-finite entries");
  const int g = static_cast<int>(tau.rows());
  const double scale = std::max(1.0, tau.cwiseAbs().maxCoeff());
  for (int i = 0; i < g; ++i) {
    for (int j = i + 1; j < g; ++j) {
      if (std::abs(tau(i, j) - tau(j, i)) > 1e-12 * scale) {
        fail(ErrorCode::NotInSiegelSpace, "period matrix not symmetric at (" + std::to_string(i) +
                                              "," + std::to_string(j) + ")");
      }
    }
  }
  PeriodMatrix out;
  out.tau_ = 0.5 * (tau + tau.transpose());
  try {
    validate_gram(Eigen::MatrixXd(out.tau_.imag()));
  } catch (const Error& e) {
    fail(ErrorCode::NotInSiegelSpace, std::string("imaginary part: ") + e.what());
  }
  return out;
}

double gaussian_tail_bound(int g, double lambda_min, double radius_sq) {
  double best = std::numeric_limits<double>::infinity();
  for (double s : kTailSplits) {
    best = std::min(best, std::exp(-(1.0 - s) * radius_sq + log_lattice_sum_factor(g, lambda_min, s)));
  }
  return best;
}

ThetaEvaluation riemann_theta(const PeriodMatrix& tau, const Eigen::VectorXcd& z, double eps,
                              const ThetaOptions& options) {
  const int g = tau.genus();
  check_genus(g, options);
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  if (z.size() != g) fail(ErrorCode::RankMismatch, "z has the wrong length");
  if (!z.allFinite()) fail(ErrorCode::InvalidArgument, "z has non-finite entries");

  const Eigen::MatrixXd y = tau.imag_part();
  const Eigen::MatrixXd a = kPi * y;
  const Eigen::LLT<Eigen::MatrixXd> llt(y);
  const Eigen::VectorXd c = llt.solve(Eigen::VectorXd(z.imag()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues()(0);
  const double lambda_max = eig.eigenvalues()(g - 1);
  // |term_n| = e^{pi c^T Y c} e^{-(n+c)^T A (n+c)}
  const double log_envelope = kPi * c.dot(y * c);
  double radius_sq = radius_for(g, lambda_min, log_envelope - std::log(eps));
  check_budget(g, radius_sq, lambda_max, std::log(a.determinant()), options.term_budget);

  const Eigen::MatrixXd upper = Eigen::LLT<Eigen::MatrixXd>(a).matrixU();
  const Eigen::VectorXd center = -c;
  const Eigen::MatrixXcd& t = tau.tau();
  Complex sum = 0.0;
  Eigen::VectorXcd nv(g);
  const Complex two_pi_i(0.0, 2.0 * kPi);
  const Complex pi_i(0.0, kPi);
  const std::size_t visited = detail::enumerate_ellipsoid(
      upper, center, radius_sq,
      [&](const IntVector& n, double) {
        for (int i = 0; i < g; ++i) nv(i) = static_cast<double>(n[static_cast<std::size_t>(i)]);
        const Complex quad = (nv.transpose() * t * nv).value();
        const Complex lin = nv.dot(z);
        sum += std::exp(pi_i * quad + two_pi_i * lin);
      },
      options.term_budget);
  if (visited > options.term_budget) fail(ErrorCode::TruncationFailure, "theta term budget exhausted");

  ThetaEvaluation out;
  out.value = sum;
  out.terms_used = visited;
  out.tail_bound = std::exp(log_envelope) * gaussian_tail_bound(g, lambda_min, radius_sq);
  return out;
}

ThetaEvaluator::ThetaEvaluator(const PeriodMatrix& tau, const ThetaOptions& options)
    : g_(tau.genus()), x_(tau.real_part()), options_(options) {
  check_genus(g_, options);
  const Eigen::MatrixXd y = tau.imag_part();
  scaled_imag_ = validate_gram(Eigen::MatrixXd(kPi * y));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled_imag_.gram(), Eigen::EigenvaluesOnly);
  lambda_min_ = eig.eigenvalues()(0);
  lambda_max_ = eig.eigenvalues()(g_ - 1);
  const Eigen::MatrixXd& r = scaled_imag_.cholesky_upper();
  double log_det_a = 0.0;
  for (int i = 0; i < g_; ++i) log_det_a += 2.0 * std::log(r(i, i));
  log_det_y_ = log_det_a - g_ * std::log(kPi);
}

ThetaEvaluator::LogNorm ThetaEvaluator::log_norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                                 double rel) const {
  if (a.size() != g_ || b.size() != g_) fail(ErrorCode::RankMismatch, "(a, b) have the wrong length");
  if (!a.allFinite() || !b.allFinite()) fail(ErrorCode::InvalidArgument, "(a, b) not finite");
  LogNorm out;
  double radius_sq = 0.0;
  double re = 0.0, im = 0.0;

  if (g_ == 1) {
    const double a11 = scaled_imag_.gram()(0, 0);
    const double b0 = b(0);
    const double d = b0 - std::nearbyint(b0);
    const double q_min = a11 * d * d;
    out.min_exponent = q_min;
    radius_sq = radius_for(1, lambda_min_, q_min - std::log(rel));
    const double w = std::sqrt(radius_sq / a11);
    const long long lo = static_cast<long long>(std::ceil(-b0 - w));
    const long long hi = static_cast<long long>(std::floor(-b0 + w));
    if (hi - lo + 1 > static_cast<long long>(options_.term_budget)) {
      fail(ErrorCode::TruncationFailure, "theta term budget exhausted");
    }
    const double x11 = x_(0, 0);
    for (long long n = lo; n <= hi; ++n) {
      const double v = static_cast<double>(n) + b0;
      const double mag = std::exp(-(a11 * v * v - q_min));
      const double phase = kPi * x11 * v * v + 2.0 * kPi * static_cast<double>(n) * a(0);
      re += mag * std::cos(phase);
      im += mag * std::sin(phase);
      ++out.terms;
    }
  } else {
    const double q_min = 2.0 * tropical_theta_norm_value(scaled_imag_, b);
    out.min_exponent = q_min;
    radius_sq = radius_for(g_, lambda_min_, q_min - std::log(rel));
    check_budget(g_, radius_sq, lambda_max_, log_det_y_ + g_ * std::log(kPi), options_.term_budget);
    const Eigen::VectorXd center = -b;
    Eigen::VectorXd v(g_);
    const std::size_t visited = detail::enumerate_ellipsoid(
        scaled_imag_.cholesky_upper(), center, radius_sq,
        [&](const IntVector& n, double q) {
          double lin = 0.0;
          for (int i = 0; i < g_; ++i) {
            const double ni = static_cast<double>(n[static_cast<std::size_t>(i)]);
            v(i) = ni + b(i);
            lin += ni * a(i);
          }
          const double mag = std::exp(-(q - q_min));
          const double phase = kPi * v.dot(x_ * v) + 2.0 * kPi * lin;
          re += mag * std::cos(phase);
          im += mag * std::sin(phase);
        },
        options_.term_budget);
    if (visited > options_.term_budget) fail(ErrorCode::TruncationFailure, "theta term budget exhausted");
    out.terms = visited;
  }
  out.reduced_modulus = std::hypot(re, im);
  out.log_value = 0.25 * log_det_y_ - out.min_exponent + std::log(out.reduced_modulus);
  return out;
}

double ThetaEvaluator::norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double rel) const {
  return std::exp(log_norm(a, b, rel).log_value);
}

double theta_norm(const PeriodMatrix& tau, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return ThetaEvaluator(tau).norm(a, b);
}

double theta_norm_at(const PeriodMatrix& tau, const Eigen::VectorXcd& z) {
  const Eigen::MatrixXd y = tau.imag_part();
  const Eigen::VectorXd b = Eigen::LLT<Eigen::MatrixXd>(y).solve(Eigen::VectorXd(z.imag()));
  const Eigen::VectorXd a = z.real() - tau.real_part() * b;
  return theta_norm(tau, a, b);
}

namespace {

constexpr std::uint64_t kBlock = 4096;
constexpr int kMaxAttempts = 16;
constexpr double kDivisorThreshold = 1e-13;

struct BlockSums {
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  std::uint64_t count = 0;
  std::uint64_t redraws = 0;
  std::uint64_t non_finite = 0;
};

template <class PointFn>
BlockSums integrate_range(const ThetaEvaluator& theta, std::uint64_t begin, std::uint64_t end,
                          std::uint64_t seed, PointFn&& point) {
  const int g = theta.genus();
  Eigen::VectorXd a(g), b(g);
  std::vector<double> coords(static_cast<std::size_t>(2 * g));
  BlockSums sums;
  for (std::uint64_t i = begin; i < end; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      if (attempt == 0) {
        point(i, coords);
      } else {
        ++sums.redraws;
        for (int j = 0; j < 2 * g; ++j)
          coords[static_cast<std::size_t>(j)] = counter_uniform(seed, i, static_cast<std::uint64_t>(attempt), static_cast<std::uint64_t>(j));
      }
      for (int j = 0; j < g; ++j) {
        a(j) = coords[static_cast<std::size_t>(j)];
        b(j) = coords[static_cast<std::size_t>(g + j)];
      }
      const auto value = theta.log_norm(a, b);
      if (value.reduced_modulus < kDivisorThreshold || !std::isfinite(value.log_value)) continue;
      sums.sum += value.log_value;
      sums.sum_sq += static_cast<long double>(value.log_value) * value.log_value;
      ++sums.count;
      ok = true;
    }
    if (!ok) ++sums.non_finite;
  }
  return sums;
}

}  // namespace

InvariantEstimate abelian_invariant(const PeriodMatrix& tau, const InvariantOptions& options) {
  if (options.samples < 1000) fail(ErrorCode::InvalidArgument, "abelian_invariant needs at least 1000 samples");
  const ThetaEvaluator theta(tau, options.theta);
  const int g = theta.genus();
  const double offset = -0.5 * g * std::log(2.0);
  InvariantEstimate out;
  std::uint64_t non_finite = 0;

  if (options.integrator == Integrator::monte_carlo) {
    const std::uint64_t blocks = (options.samples + kBlock - 1) / kBlock;
    std::vector<BlockSums> partial(blocks);
    for_each_block(options.samples, kBlock, options.threads,
                   [&](std::uint64_t begin, std::uint64_t end, std::size_t k) {
                     partial[k] = integrate_range(theta, begin, end, options.seed,
                                                  [&](std::uint64_t i, std::vector<double>& c) {
                                                    for (int j = 0; j < 2 * g; ++j)
                                                      c[static_cast<std::size_t>(j)] = counter_uniform(options.seed, i, 0, static_cast<std::uint64_t>(j));
                                                  });
                   });
    BlockSums total;
    for (const auto& p : partial) {
      total.sum += p.sum;
      total.sum_sq += p.sum_sq;
      total.count += p.count;
      total.redraws += p.redraws;
      total.non_finite += p.non_finite;
    }
    non_finite = total.non_finite;
    if (total.count < 2) fail(ErrorCode::NonFinite, "no finite samples");
    const long double n = static_cast<long double>(total.count);
    const long double mean = total.sum / n;
    const long double var = std::max(0.0L, (total.sum_sq - n * mean * mean) / (n - 1.0L));
    out.value = offset - 2.0 * static_cast<double>(mean);
    out.standard_error = 2.0 * static_cast<double>(std::sqrt(var / n));
    out.samples = total.count;
    out.redraws = total.redraws;
  } else {
    const int shifts = std::max(2, options.shifts);
    const std::uint64_t per_shift = options.samples / static_cast<std::uint64_t>(shifts);
    const KroneckerSequence sequence(2 * g);
    std::vector<long double> means;
    for (int s = 0; s < shifts; ++s) {
      std::vector<double> shift(static_cast<std::size_t>(2 * g));
      for (int j = 0; j < 2 * g; ++j)
        shift[static_cast<std::size_t>(j)] = counter_uniform(options.seed ^ 0x9d2c5680u, static_cast<std::uint64_t>(s), 0, static_cast<std::uint64_t>(j));
      const std::uint64_t stream = derive_seed(options.seed, static_cast<std::uint64_t>(s));
      const std::uint64_t blocks = (per_shift + kBlock - 1) / kBlock;
      std::vector<BlockSums> partial(blocks);
      for_each_block(per_shift, kBlock, options.threads,
                     [&](std::uint64_t begin, std::uint64_t end, std::size_t k) {
                       std::vector<double> buffer;
                       partial[k] = integrate_range(theta, begin, end, stream,
                                                    [&](std::uint64_t i, std::vector<double>& c) {
                                                      sequence.point(i, shift, buffer);
                                                      c = buffer;
                                                    });
                     });
      BlockSums total;
      for (const auto& p : partial) {
        total.sum += p.sum;
        total.count += p.count;
        total.redraws += p.redraws;
        total.non_finite += p.non_finite;
      }
      if (total.count == 0) fail(ErrorCode::NonFinite, "no finite samples");
      means.push_back(total.sum / static_cast<long double>(total.count));
      out.samples += total.count;
      out.redraws += total.redraws;
      non_finite += total.non_finite;
    }
    long double mean = 0.0L;
    for (auto m : means) mean += m;
    mean /= static_cast<long double>(means.size());
    long double var = 0.0L;
    for (auto m : means) var += (m - mean) * (m - mean);
    var /= static_cast<long double>(means.size() - 1);
    out.value = offset - 2.0 * static_cast<double>(mean);
    out.standard_error = 2.0 * static_cast<double>(std::sqrt(var / means.size()));
  }
  if (static_cast<double>(non_finite) > 1e-4 * static_cast<double>(options.samples)) {
    fail(ErrorCode::NonFinite, std::to_string(non_finite) + " samples gave non-finite log ||theta||");
  }
  return out;
}

}  // namespace tropdeg
