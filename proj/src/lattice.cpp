#include "tropdeg/lattice.hpp"

#include "tropdeg/detail/enumerate.hpp"
#include "tropdeg/error.hpp"
#include "tropdeg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tropdeg {

namespace {

double max_abs(const Eigen::MatrixXd& q) {
  return q.size() == 0 ? 0.0 : q.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd upper_factor(const Eigen::MatrixXd& q) {
  if (q.rows() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  return llt.matrixU();
}

// (x + n)^T Q (x + n), evaluated directly so every candidate is scored the
// same way regardless of the search path.
double shifted_norm(const Eigen::MatrixXd& q, const Eigen::VectorXd& x, const IntVector& n) {
  const int r = static_cast<int>(x.size());
  double total = 0.0;
  for (int i = 0; i < r; ++i) {
    const double yi = x(i) + static_cast<double>(n[static_cast<std::size_t>(i)]);
    double row = 0.0;
    for (int j = 0; j < r; ++j) row += q(i, j) * (x(j) + static_cast<double>(n[static_cast<std::size_t>(j)]));
    total += yi * row;
  }
  return total;
}

struct NearMinimum {
  double best = std::numeric_limits<double>::infinity();
  std::vector<IntVector> candidates;  // all visited points within the window at visit time
};

// All n with (x+n)^T Q (x+n) <= min + window (in units of the quadratic form).
NearMinimum near_minimizers(const GramLattice& lattice, const Eigen::VectorXd& x, double window,
                            CvpStrategy strategy) {
  const int r = lattice.rank();
  const Eigen::MatrixXd& q = lattice.gram();
  NearMinimum out;
  if (r == 0) {
    out.best = 0.0;
    out.candidates.push_back({});
    return out;
  }
  IntVector rounded(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) rounded[static_cast<std::size_t>(i)] = std::llround(-x(i));
  const double start = shifted_norm(q, x, rounded);
  if (strategy == CvpStrategy::automatic) {
    strategy = r <= 2 ? CvpStrategy::box : CvpStrategy::enumeration;
  }

  auto consider = [&](const IntVector& n) {
    const double value = shifted_norm(q, x, n);
    if (value <= out.best + window) out.candidates.push_back(n);
    if (value < out.best) out.best = value;
    return value;
  };

  if (strategy == CvpStrategy::box) {
    const double bound = start + window;
    const Eigen::MatrixXd inverse = q.inverse();
    std::vector<long long> lo(static_cast<std::size_t>(r)), hi(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
      const double w = std::sqrt(std::max(0.0, bound * inverse(i, i))) * (1.0 + 1e-9) + 1e-12;
      lo[static_cast<std::size_t>(i)] = static_cast<long long>(std::ceil(-x(i) - w));
      hi[static_cast<std::size_t>(i)] = static_cast<long long>(std::floor(-x(i) + w));
    }
    IntVector n = lo;
    while (true) {
      consider(n);
      int k = 0;
      while (k < r) {
        auto& slot = n[static_cast<std::size_t>(k)];
        if (slot < hi[static_cast<std::size_t>(k)]) {
          ++slot;
          break;
        }
        slot = lo[static_cast<std::size_t>(k)];
        ++k;
      }
      if (k == r) break;
    }
  } else {
    double bound = start + window;
    const Eigen::VectorXd center = -x;
    detail::enumerate_ellipsoid(lattice.cholesky_upper(), center, bound,
                                [&](const IntVector& n, double) {
                                  consider(n);
                                  bound = out.best + window;
                                });
  }
  // Drop candidates admitted before the minimum settled.
  std::erase_if(out.candidates, [&](const IntVector& n) {
    return shifted_norm(q, x, n) > out.best + window;
  });
  std::sort(out.candidates.begin(), out.candidates.end());
  out.candidates.erase(std::unique(out.candidates.begin(), out.candidates.end()),
                       out.candidates.end());
  return out;
}

}  // namespace

double reduce_mod_one(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // x slightly below an integer
  return f;
}

TorusCoordinate::TorusCoordinate(Eigen::VectorXd x) : x_(std::move(x)) {
  for (Eigen::Index i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_(i))) fail(ErrorCode::InvalidArgument, "torus coordinate is not finite");
    x_(i) = reduce_mod_one(x_(i));
  }
}

double GramLattice::determinant() const {
  double d = 1.0;
  for (int i = 0; i < rank(); ++i) d *= upper_(i, i) * upper_(i, i);
  return d;
}

GramLattice GramLattice::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorCode::InvalidArgument, "scale must be positive");
  return validate_gram(Eigen::MatrixXd(c * gram_));
}

GramLattice GramLattice::transformed(const Eigen::MatrixXi& basis_change) const {
  if (basis_change.rows() != rank() || basis_change.cols() != rank()) {
    fail(ErrorCode::RankMismatch, "basis change must be square of the lattice rank");
  }
  if (exact_) {
    RationalMatrix out(rank(), rank());
    for (int i = 0; i < rank(); ++i) {
      for (int j = 0; j < rank(); ++j) {
        Rational sum = 0;
        for (int k = 0; k < rank(); ++k) {
          for (int l = 0; l < rank(); ++l) {
            sum += Rational(basis_change(k, i)) * (*exact_)(k, l) * Rational(basis_change(l, j));
          }
        }
        out(i, j) = sum;
      }
    }
    return validate_gram(out);
  }
  const Eigen::MatrixXd r = basis_change.cast<double>();
  return validate_gram(Eigen::MatrixXd(r.transpose() * gram_ * r));
}

GramLattice validate_gram(const Eigen::MatrixXd& q) {
  if (q.rows() != q.cols()) fail(ErrorCode::InvalidArgument, "Gram matrix must be square");
  const int r = static_cast<int>(q.rows());
  if (!q.allFinite()) fail(ErrorCode::InvalidArgument, "Gram matrix has non-finite entries");
  const double scale = std::max(1.0, max_abs(q));
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      if (std::abs(q(i, j) - q(j, i)) > 1e-12 * scale) {
        fail(ErrorCode::NotSymmetric, "Gram matrix not symmetric at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
      }
    }
  }
  Eigen::MatrixXd sym = 0.5 * (q + q.transpose());
  // LDL^T without pivoting; the first non-positive pivot is reported.
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(r, r);
  Eigen::VectorXd d(r);
  for (int j = 0; j < r; ++j) {
    double dj = sym(j, j);
    for (int k = 0; k < j; ++k) dj -= l(j, k) * l(j, k) * d(k);
    if (!(dj > 1e-13 * std::max(std::abs(sym(j, j)), 1e-300))) {
      fail(ErrorCode::NotPositiveDefinite,
           "Gram matrix not positive definite: pivot " + std::to_string(j) + " = " + std::to_string(dj));
    }
    d(j) = dj;
    for (int i = j + 1; i < r; ++i) {
      double v = sym(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k) * d(k);
      l(i, j) = v / dj;
    }
  }
  GramLattice out;
  out.gram_ = sym;
  out.upper_ = upper_factor(sym);
  return out;
}

std::vector<Rational> exact_ldl_pivots(const RationalMatrix& q) {
  const int r = q.rows;
  std::vector<Rational> d(static_cast<std::size_t>(r));
  RationalMatrix l(r, r);
  for (int j = 0; j < r; ++j) {
    Rational dj = q(j, j);
    for (int k = 0; k < j; ++k) dj -= l(j, k) * l(j, k) * d[static_cast<std::size_t>(k)];
    d[static_cast<std::size_t>(j)] = dj;
    if (dj == 0) {
      // remaining pivots are undefined; leave them zero
      break;
    }
    for (int i = j + 1; i < r; ++i) {
      Rational v = q(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k) * d[static_cast<std::size_t>(k)];
      l(i, j) = v / dj;
    }
  }
  return d;
}

GramLattice validate_gram(const RationalMatrix& q) {
  if (q.rows != q.cols) fail(ErrorCode::InvalidArgument, "Gram matrix must be square");
  const int r = q.rows;
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      if (q(i, j) != q(j, i)) {
        fail(ErrorCode::NotSymmetric, "Gram matrix not symmetric at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
      }
    }
  }
  const auto pivots = exact_ldl_pivots(q);
  for (int j = 0; j < r; ++j) {
    if (pivots[static_cast<std::size_t>(j)] <= 0) {
      fail(ErrorCode::NotPositiveDefinite, "Gram matrix not positive definite: pivot " +
                                               std::to_string(j) + " = " +
                                               to_string(pivots[static_cast<std::size_t>(j)]));
    }
  }
  Eigen::MatrixXd dq(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) dq(i, j) = to_double(q(i, j));
  GramLattice out;
  out.gram_ = dq;
  out.upper_ = upper_factor(dq);
  out.exact_ = q;
  return out;
}

ThetaNormResult tropical_theta_norm_unreduced(const GramLattice& lattice, const Eigen::VectorXd& x,
                                              CvpStrategy strategy) {
  if (x.size() != lattice.rank()) fail(ErrorCode::RankMismatch, "coordinate length differs from rank");
  const auto near = near_minimizers(lattice, x, 2.0 * kMinimizerTieWindow, strategy);
  ThetaNormResult out;
  out.value = 0.5 * near.best;
  out.minimizers = near.candidates;
  return out;
}

ThetaNormResult tropical_theta_norm(const GramLattice& lattice, const TorusCoordinate& x,
                                    CvpStrategy strategy) {
  return tropical_theta_norm_unreduced(lattice, x.values(), strategy);
}

double tropical_theta_norm_value(const GramLattice& lattice, const Eigen::VectorXd& x) {
  const int r = lattice.rank();
  if (r == 0) return 0.0;
  if (r == 1) {
    const double y = x(0) - std::nearbyint(x(0));
    return 0.5 * lattice.gram()(0, 0) * y * y;
  }
  const Eigen::MatrixXd& q = lattice.gram();
  IntVector rounded(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) rounded[static_cast<std::size_t>(i)] = std::llround(-x(i));
  double bound = shifted_norm(q, x, rounded);
  const Eigen::VectorXd center = -x;
  detail::enumerate_ellipsoid(lattice.cholesky_upper(), center, bound,
                              [&](const IntVector&, double norm) { bound = std::min(bound, norm); });
  return 0.5 * bound;
}

ExactThetaNormResult tropical_theta_norm_exact(const GramLattice& lattice,
                                               const std::vector<Rational>& x) {
  if (!lattice.exact_gram()) fail(ErrorCode::InvalidArgument, "rational mode needs an exact Gram matrix");
  const int r = lattice.rank();
  if (static_cast<int>(x.size()) != r) fail(ErrorCode::RankMismatch, "coordinate length differs from rank");
  const RationalMatrix& q = *lattice.exact_gram();
  Eigen::VectorXd xd(r);
  for (int i = 0; i < r; ++i) xd(i) = to_double(x[static_cast<std::size_t>(i)]);
  const double approx = tropical_theta_norm_value(lattice, xd);
  const auto near = near_minimizers(lattice, xd, 1e-6 * std::max(1.0, 2.0 * approx), CvpStrategy::automatic);
  ExactThetaNormResult out;
  bool first = true;
  for (const auto& n : near.candidates) {
    std::vector<Rational> y(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + Rational(n[static_cast<std::size_t>(i)]);
    Rational value = 0;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) value += y[static_cast<std::size_t>(i)] * q(i, j) * y[static_cast<std::size_t>(j)];
    value /= 2;
    if (first || value < out.value) {
      out.value = value;
      out.minimizers.clear();
      first = false;
    }
    if (value == out.value) out.minimizers.push_back(n);
  }
  if (r == 0) out.value = 0;
  std::sort(out.minimizers.begin(), out.minimizers.end());
  return out;
}

double tropical_psi(const GramLattice& lattice, const Eigen::VectorXd& x) {
  if (x.size() != lattice.rank()) fail(ErrorCode::RankMismatch, "coordinate length differs from rank");
  const double norm = tropical_theta_norm_value(lattice, x);
  return norm - 0.5 * x.dot(lattice.gram() * x);
}

namespace {

// Mean of ||Psi|| over the N^r midpoint grid.
long double midpoint_mean(const GramLattice& lattice, std::int64_t n) {
  const int r = lattice.rank();
  std::vector<std::int64_t> idx(static_cast<std::size_t>(r), 0);
  Eigen::VectorXd x(r);
  long double total = 0.0L;
  std::uint64_t count = 0;
  const double h = 1.0 / static_cast<double>(n);
  while (true) {
    for (int i = 0; i < r; ++i) x(i) = (static_cast<double>(idx[static_cast<std::size_t>(i)]) + 0.5) * h;
    total += tropical_theta_norm_value(lattice, x);
    ++count;
    int k = 0;
    while (k < r && ++idx[static_cast<std::size_t>(k)] == n) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == r) break;
  }
  return total / static_cast<long double>(count);
}

}  // namespace

MomentEstimate tropical_moment(const GramLattice& lattice, const MomentOptions& options) {
  const int r = lattice.rank();
  MomentEstimate out;
  if (options.resolution < 1) fail(ErrorCode::ResolutionTooSmall, "resolution must be at least 1");
  if (r == 0) return out;
  if (options.method == MomentMethod::grid) {
    const std::int64_t n = options.resolution;
    if (n < 2) fail(ErrorCode::ResolutionTooSmall, "grid needs at least 2 points per axis");
    const double total = std::pow(static_cast<double>(n), r);
    if (total > 4e9) fail(ErrorCode::InvalidArgument, "grid too large; use low-discrepancy mode");
    const std::int64_t coarse = std::max<std::int64_t>(1, n / 2);
    const long double fine_mean = midpoint_mean(lattice, n);
    const long double coarse_mean = midpoint_mean(lattice, coarse);
    out.estimate = static_cast<double>(2.0L * fine_mean);
    out.error_estimate = static_cast<double>(std::abs(2.0L * (fine_mean - coarse_mean)));
    out.evaluations = static_cast<std::uint64_t>(total + std::pow(static_cast<double>(coarse), r));
    return out;
  }
  const int shifts = std::max(2, options.shifts);
  const std::int64_t per_shift = options.resolution / shifts;
  if (per_shift < 1) fail(ErrorCode::ResolutionTooSmall, "low-discrepancy mode needs resolution >= shifts");
  const KroneckerSequence sequence(r);
  std::vector<double> shift(static_cast<std::size_t>(r)), point;
  Eigen::VectorXd x(r);
  std::vector<long double> means(static_cast<std::size_t>(shifts));
  for (int s = 0; s < shifts; ++s) {
    for (int j = 0; j < r; ++j) shift[static_cast<std::size_t>(j)] = counter_uniform(options.seed, static_cast<std::uint64_t>(s), 0, static_cast<std::uint64_t>(j));
    long double total = 0.0L;
    for (std::int64_t i = 0; i < per_shift; ++i) {
      sequence.point(static_cast<std::uint64_t>(i), shift, point);
      for (int j = 0; j < r; ++j) x(j) = point[static_cast<std::size_t>(j)];
      total += tropical_theta_norm_value(lattice, x);
    }
    means[static_cast<std::size_t>(s)] = total / static_cast<long double>(per_shift);
  }
  long double mean = 0.0L;
  for (auto m : means) mean += m;
  mean /= shifts;
  long double var = 0.0L;
  for (auto m : means) var += (m - mean) * (m - mean);
  var /= (shifts - 1);
  out.estimate = static_cast<double>(2.0L * mean);
  out.error_estimate = static_cast<double>(2.0L * std::sqrt(var / shifts));
  out.evaluations = static_cast<std::uint64_t>(per_shift) * static_cast<std::uint64_t>(shifts);
  return out;
}

MomentOptions default_moment_options(int rank) {
  MomentOptions o;
  if (rank <= 1) {
    o.method = MomentMethod::grid;
    o.resolution = 4096;
  } else if (rank == 2) {
    o.method = MomentMethod::grid;
    o.resolution = 1024;
  } else {
    o.method = MomentMethod::low_discrepancy;
    o.resolution = 1 << 21;
  }
  return o;
}

std::vector<IntVector> short_vectors(const GramLattice& lattice, double bound, std::size_t budget) {
  std::vector<IntVector> out;
  const int r = lattice.rank();
  if (r == 0) return out;
  const Eigen::VectorXd center = Eigen::VectorXd::Zero(r);
  double b = bound;
  const std::size_t visited = detail::enumerate_ellipsoid(
      lattice.cholesky_upper(), center, b,
      [&](const IntVector& n, double) {
        if (std::any_of(n.begin(), n.end(), [](long long v) { return v != 0; })) out.push_back(n);
      },
      budget);
  if (visited > budget) fail(ErrorCode::TruncationFailure, "short vector budget exceeded");
  return out;
}

namespace {

long long integer_determinant(Eigen::MatrixXi m) {
  // Bareiss fraction-free elimination
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 1;
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> a = m.cast<long long>();
  long long sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a(k, k) == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (a(i, k) != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      a.row(k).swap(a.row(swap));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace

IsometryResult isometry_check(const GramLattice& first, const GramLattice& second, int max_rank) {
  if (first.rank() != second.rank()) fail(ErrorCode::RankMismatch, "lattices have different ranks");
  const int r = first.rank();
  IsometryResult out;
  if (r > max_rank) return out;
  if (r == 0) {
    out.verdict = Isometry::isometric;
    out.witness = Eigen::MatrixXi(0, 0);
    return out;
  }
  const bool exact = first.exact_gram() && second.exact_gram();
  const Eigen::MatrixXd& q1 = first.gram();
  const Eigen::MatrixXd& q2 = second.gram();
  const double scale = std::max(max_abs(q1), max_abs(q2));
  const double tol = 1e-9 * scale;

  // Equal Gram under an integer map forces det R^2 = det Q2 / det Q1.
  if (exact) {
    Rational d1 = 1, d2 = 1;
    for (const auto& p : exact_ldl_pivots(*first.exact_gram())) d1 *= p;
    for (const auto& p : exact_ldl_pivots(*second.exact_gram())) d2 *= p;
    if (d1 != d2) {
      out.verdict = Isometry::not_isometric;
      return out;
    }
  } else if (std::abs(first.determinant() - second.determinant()) >
             1e-9 * std::max(first.determinant(), second.determinant())) {
    out.verdict = Isometry::not_isometric;
    return out;
  }

  double bound = 0.0;
  for (int j = 0; j < r; ++j) bound = std::max(bound, q2(j, j));
  std::vector<IntVector> pool;
  try {
    pool = short_vectors(first, bound + tol);
  } catch (const Error&) {
    return out;  // inconclusive
  }

  auto exact_pair = [&](const IntVector& u, const IntVector& v) {
    Rational s = 0;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        s += Rational(u[static_cast<std::size_t>(i)]) * (*first.exact_gram())(i, j) * Rational(v[static_cast<std::size_t>(j)]);
    return s;
  };
  auto float_pair = [&](const IntVector& u, const IntVector& v) {
    double s = 0.0;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        s += static_cast<double>(u[static_cast<std::size_t>(i)]) * q1(i, j) * static_cast<double>(v[static_cast<std::size_t>(j)]);
    return s;
  };
  auto matches = [&](const IntVector& u, const IntVector& v, int i, int j) {
    if (exact) return exact_pair(u, v) == (*second.exact_gram())(i, j);
    return std::abs(float_pair(u, v) - q2(i, j)) <= tol;
  };

  std::vector<std::vector<std::size_t>> candidates(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) {
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (matches(pool[k], pool[k], j, j)) candidates[static_cast<std::size_t>(j)].push_back(k);
    }
    if (candidates[static_cast<std::size_t>(j)].empty()) {
      out.verdict = Isometry::not_isometric;
      return out;
    }
  }

  std::vector<std::size_t> chosen(static_cast<std::size_t>(r));
  bool found = false;
  auto search = [&](auto&& self, int j) -> void {
    if (found) return;
    if (j == r) {
      Eigen::MatrixXi m(r, r);
      for (int c = 0; c < r; ++c)
        for (int i = 0; i < r; ++i) m(i, c) = static_cast<int>(pool[chosen[static_cast<std::size_t>(c)]][static_cast<std::size_t>(i)]);
      const long long det = integer_determinant(m);
      if (det == 1 || det == -1) {
        found = true;
        out.witness = m;
      }
      return;
    }
    for (std::size_t k : candidates[static_cast<std::size_t>(j)]) {
      bool ok = true;
      for (int i = 0; i < j && ok; ++i) ok = matches(pool[chosen[static_cast<std::size_t>(i)]], pool[k], i, j);
      if (!ok) continue;
      chosen[static_cast<std::size_t>(j)] = k;
      self(self, j + 1);
      if (found) return;
    }
  };
  search(search, 0);
  out.verdict = found ? Isometry::isometric : Isometry::not_isometric;
  return out;
}

}  // namespace tropdeg
