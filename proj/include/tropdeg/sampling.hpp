#pragma once

// Deterministic sample streams. Uniforms are a pure function of
// (seed, sample index, attempt, coordinate) so any partition of the sample
// range across workers reproduces the same numbers.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace tropdeg {

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Uniform in [0, 1) from the counter tuple.
double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt,
                       std::uint64_t coordinate) noexcept;

/// Derived seed for sub-problem `k` (grid point, shift, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) noexcept;

/// Additive-recurrence (Kronecker) sequence x_i = frac(shift + i * alpha)
/// with alpha_j = phi_d^{-(j+1)} and phi_d the root of x^{d+1} = x + 1.
class KroneckerSequence {
public:
  explicit KroneckerSequence(int dimension);

  int dimension() const { return static_cast<int>(alpha_.size()); }
  void point(std::uint64_t index, const std::vector<double>& shift, std::vector<double>& out) const;

private:
  std::vector<double> alpha_;
};

/// Runs body(begin, end, block_index) over fixed-size blocks of [0, count)
/// using `threads` workers (0 = hardware concurrency). Block boundaries do
/// not depend on the thread count.
void for_each_block(std::uint64_t count, std::uint64_t block_size, unsigned threads,
                    const std::function<void(std::uint64_t, std::uint64_t, std::size_t)>& body);

}  // namespace tropdeg
