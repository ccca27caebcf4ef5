#include "tropdeg/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace tropdeg {

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt,
                       std::uint64_t coordinate) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ index);
  h = mix64(h ^ (attempt * 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ (coordinate + 0x61c8864680b583ebULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) noexcept {
  return mix64(mix64(seed) ^ mix64(k + 0x2545f4914f6cdd1dULL));
}

KroneckerSequence::KroneckerSequence(int dimension) {
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dimension + 1));
  alpha_.resize(static_cast<std::size_t>(dimension));
  double p = 1.0;
  for (int j = 0; j < dimension; ++j) {
    p /= phi;
    alpha_[static_cast<std::size_t>(j)] = p;
  }
}

void KroneckerSequence::point(std::uint64_t index, const std::vector<double>& shift,
                              std::vector<double>& out) const {
  out.resize(alpha_.size());
  for (std::size_t j = 0; j < alpha_.size(); ++j) {
    // index * alpha mod 1 computed in long double to keep precision for
    // indices up to ~1e9.
    const long double v = static_cast<long double>(index) * alpha_[j] + shift[j];
    out[j] = static_cast<double>(v - std::floor(v));
  }
}

void for_each_block(std::uint64_t count, std::uint64_t block_size, unsigned threads,
                    const std::function<void(std::uint64_t, std::uint64_t, std::size_t)>& body) {
  if (block_size == 0) block_size = 1;
  const std::uint64_t blocks = (count + block_size - 1) / block_size;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(blocks, 1)));
  auto run_block = [&](std::uint64_t b) {
    const std::uint64_t begin = b * block_size;
    const std::uint64_t end = std::min(count, begin + block_size);
    body(begin, end, static_cast<std::size_t>(b));
  };
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::uint64_t b = next++; b < blocks; b = next++) run_block(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = blocks;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tropdeg
