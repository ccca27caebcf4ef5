#pragma once

// Fincke–Pohst enumeration of the integer points inside an ellipsoid
// {n : (n - c)^T Q (n - c) <= bound}, given the upper-triangular Cholesky
// factor R of Q (Q = R^T R). Shared by the CVP solver, short-vector search
// and the theta-series truncation.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

namespace tropdeg::detail {

using IntVector = std::vector<long long>;

template <class Visit>
class EllipsoidEnumerator {
public:
  EllipsoidEnumerator(const Eigen::MatrixXd& upper, const Eigen::VectorXd& center, double& bound,
                      Visit& visit, std::size_t budget)
      : upper_(upper), center_(center), bound_(bound), visit_(visit), budget_(budget),
        n_(static_cast<std::size_t>(upper.rows()), 0) {}

  /// Returns false when the visit budget was exhausted.
  bool run() {
    const int r = static_cast<int>(upper_.rows());
    if (r == 0) {
      ++visited_;
      visit_(n_, 0.0);
      return true;
    }
    descend(r - 1, 0.0);
    return !exhausted_;
  }

  std::size_t visited() const { return visited_; }

private:
  double limit() const { return bound_ * (1.0 + 1e-12) + 1e-300; }

  void descend(int level, double partial) {
    if (exhausted_) return;
    const int r = static_cast<int>(upper_.rows());
    double shift = 0.0;
    for (int k = level + 1; k < r; ++k) {
      shift += upper_(level, k) * (static_cast<double>(n_[static_cast<std::size_t>(k)]) - center_(k));
    }
    const double pivot = upper_(level, level);
    const double c = center_(level) - shift / pivot;
    const double p2 = pivot * pivot;
    const long long base = static_cast<long long>(std::floor(c + 0.5));
    const int first_dir = (c >= static_cast<double>(base)) ? 1 : -1;
    bool side_open[2] = {true, true};  // [0]: first_dir side, [1]: opposite
    auto& slot = n_[static_cast<std::size_t>(level)];
    for (long long offset = 0; side_open[0] || side_open[1]; ++offset) {
      for (int side = 0; side < 2; ++side) {
        if (offset == 0 && side == 1) continue;
        if (!side_open[side]) continue;
        const int dir = side == 0 ? first_dir : -first_dir;
        const long long value = base + dir * offset;
        const double d = static_cast<double>(value) - c;
        const double norm = partial + p2 * d * d;
        if (norm > limit()) {
          // |value - c| grows monotonically along each side, and the rounded
          // centre is the nearest integer of all.
          side_open[side] = false;
          if (offset == 0) side_open[1] = false;
          continue;
        }
        slot = value;
        if (level == 0) {
          ++visited_;
          visit_(n_, norm);
          if (visited_ > budget_) {
            exhausted_ = true;
            return;
          }
        } else {
          descend(level - 1, norm);
          if (exhausted_) return;
        }
      }
    }
    slot = 0;
  }

  const Eigen::MatrixXd& upper_;
  const Eigen::VectorXd& center_;
  double& bound_;
  Visit& visit_;
  std::size_t budget_;
  IntVector n_;
  std::size_t visited_ = 0;
  bool exhausted_ = false;
};

/// Visits every n with (n - center)^T Q (n - center) <= bound. The visitor
/// gets (n, q(n)) and may shrink `bound`. Returns the number of visited
/// points, or budget + 1 when the budget was exceeded.
template <class Visit>
std::size_t enumerate_ellipsoid(const Eigen::MatrixXd& upper, const Eigen::VectorXd& center,
                                double& bound, Visit&& visit,
                                std::size_t budget = std::numeric_limits<std::size_t>::max() - 1) {
  EllipsoidEnumerator<std::remove_reference_t<Visit>> e(upper, center, bound, visit, budget);
  e.run();
  return e.visited();
}

}  // namespace tropdeg::detail
