#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace densfx {

/// Point cloud stored one point per column (d rows, n columns).
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using SampleSet = Points<double>;
using Index = Eigen::Index;

enum class Variant { truncated, standard };

/// splitmix64 finalizer; derives independent sub-seeds from a trial seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace densfx
