#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "densfx/types.hpp"

namespace densfx {

/// Box window of side (k/M)^{1/d} centred on a query point. k is real-valued.
template <typename Scalar = double>
struct KernelWindow {
  Scalar k;
  Index M;
  int d;

  KernelWindow(Scalar k_, Index M_, int d_) : k(k_), M(M_), d(d_) {
    if (M < 1 || d < 1) throw std::invalid_argument("KernelWindow needs M >= 1 and d >= 1");
    if (!(k > Scalar(0)) || k > Scalar(M)) throw std::invalid_argument("KernelWindow needs 0 < k <= M");
  }

  Scalar nominal_volume() const { return k / Scalar(M); }
  Scalar side() const {
    using std::pow;
    return pow(nominal_volume(), Scalar(1) / Scalar(d));
  }
  Scalar half_width() const { return side() / Scalar(2); }
};

template <typename Scalar = double>
struct DensityEstimate {
  Scalar value;
  Index count;
  Scalar volume;
};

/// Sup-norm distance between two points.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar linf_distance(const Eigen::MatrixBase<DerivedA>& x,
                                        const Eigen::MatrixBase<DerivedB>& y) {
  using Scalar = typename DerivedA::Scalar;
  Scalar out = Scalar(0);
  for (Index j = 0; j < x.size(); ++j) {
    using std::abs;
    out = std::max(out, Scalar(abs(x(j) - y(j))));
  }
  return out;
}

/// Volume of the window clipped to [0,1]^d. Returns k/M exactly when no face is crossed.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Scalar truncated_volume(const Eigen::MatrixBase<Derived>& x, const KernelWindow<Scalar>& window) {
  const Scalar side = window.side();
  const Scalar half = side / Scalar(2);
  Scalar volume = Scalar(1);
  bool clipped = false;
  for (Index j = 0; j < x.size(); ++j) {
    const Scalar lo = x(j) - half;
    const Scalar hi = x(j) + half;
    if (lo >= Scalar(0) && hi <= Scalar(1)) {
      volume *= side;
    } else {
      clipped = true;
      volume *= std::min(hi, Scalar(1)) - std::max(lo, Scalar(0));
    }
  }
  return clipped ? volume : window.nominal_volume();
}

/// Number of samples Y with ||x - Y||_inf <= half width (boundary inclusive).
template <typename DerivedX, typename DerivedS, typename Scalar = typename DerivedX::Scalar>
Index count_in_window(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedS>& samples,
                      const KernelWindow<Scalar>& window) {
  const Scalar half = window.half_width();
  Index count = 0;
  for (Index i = 0; i < samples.cols(); ++i)
    if (linf_distance(x, samples.col(i)) <= half) ++count;
  return count;
}

template <typename DerivedX, typename DerivedS, typename Scalar = typename DerivedX::Scalar>
DensityEstimate<Scalar> density_at(const Eigen::MatrixBase<DerivedX>& x,
                                   const Eigen::MatrixBase<DerivedS>& samples,
                                   const KernelWindow<Scalar>& window, Variant variant) {
  for (Index j = 0; j < x.size(); ++j)
    if (!(x(j) >= Scalar(0) && x(j) <= Scalar(1)))
      throw std::domain_error("density_at: query point outside the unit cube");
  const Index count = count_in_window(x, samples, window);
  const Scalar volume =
      variant == Variant::truncated ? truncated_volume(x, window) : window.nominal_volume();
  return {Scalar(count) / (Scalar(window.M) * volume), count, volume};
}

/// All M sup-norm distances from x, ascending. Duplicates are kept.
template <typename DerivedX, typename DerivedS>
std::vector<typename DerivedX::Scalar> sorted_distances(const Eigen::MatrixBase<DerivedX>& x,
                                                        const Eigen::MatrixBase<DerivedS>& samples) {
  std::vector<typename DerivedX::Scalar> out(std::size_t(samples.cols()));
  for (Index i = 0; i < samples.cols(); ++i) out[std::size_t(i)] = linf_distance(x, samples.col(i));
  std::sort(out.begin(), out.end());
  return out;
}

/// Count of distances <= half, read off a sorted distance list.
template <typename Scalar>
Index count_within(std::span<const Scalar> sorted, Scalar half) {
  return Index(std::upper_bound(sorted.begin(), sorted.end(), half) - sorted.begin());
}

/// Window counts for several half widths (ascending) in a single pass over the samples.
/// Produces the same counts as count_in_window for each width.
template <typename DerivedX, typename DerivedS, typename Scalar = typename DerivedX::Scalar>
void window_counts(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedS>& samples,
                   std::span<const Scalar> halves, std::span<Index> counts) {
  const std::size_t n = halves.size();
  std::fill(counts.begin(), counts.end(), Index(0));
  if (n == 0) return;
  const Scalar widest = halves[n - 1];
  // Histogram over the first width that admits each point, then prefix-sum.
  std::vector<Index> first(n, 0);
  const Index d = x.size();
  for (Index i = 0; i < samples.cols(); ++i) {
    Scalar dist = Scalar(0);
    bool outside = false;
    for (Index j = 0; j < d; ++j) {
      using std::abs;
      dist = std::max(dist, Scalar(abs(x(j) - samples(j, i))));
      if (dist > widest) {
        outside = true;
        break;
      }
    }
    if (outside) continue;
    const auto it = std::lower_bound(halves.begin(), halves.end(), dist);
    ++first[std::size_t(it - halves.begin())];
  }
  Index running = 0;
  for (std::size_t w = 0; w < n; ++w) {
    running += first[w];
    counts[w] = running;
  }
}

}  // namespace densfx
