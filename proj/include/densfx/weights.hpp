#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "densfx/plugin.hpp"
#include "densfx/types.hpp"

namespace densfx {

/// Bandwidth grid l_1..l_L, dimension and sample size for one ensemble.
///
/// The component estimator for parameter l uses k(l) = l * sqrt(M). Its leading
/// bias terms scale like l^{i/d} for i = 1..d-1, which the weights cancel.
struct EnsembleConfig {
  std::vector<double> lbar;
  int d = 1;
  std::int64_t T = 2;

  void validate() const;
  int index_count() const { return d - 1; }
  Index size() const { return Index(lbar.size()); }
};

template <typename Scalar>
struct BasicWeightSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w;
  Scalar epsilon = Scalar(0);  // max_i |gamma_w(i)| * T^{1/2 - i/(2d)}
  Scalar norm_sq = Scalar(0);  // ||w||_2^2
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> residuals;  // gamma_w(i) for i = 0..d-1; gamma_w(0) = sum(w)
  double eta_bound = 0.0;      // norm bound used by the relaxed solver; 0 for the exact solver
  std::string method;          // "exact" or "relaxed"
};

using WeightSolution = BasicWeightSolution<double>;

/// l_i = x/a + (a-1) i x / (a L), i = 1..L.
std::vector<double> default_lbar(int L = 50, double a = 10.0, double x = 3.0);

/// Rows: all ones, then l^{i/d} for i = 1..d-1. Shape (d) x L.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> basis_matrix(const EnsembleConfig& cfg) {
  using std::pow;
  const Index L = cfg.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A(cfg.d, L);
  A.row(0).setOnes();
  for (int i = 1; i < cfg.d; ++i)
    for (Index c = 0; c < L; ++c) A(i, c) = pow(Scalar(cfg.lbar[std::size_t(c)]), Scalar(i) / Scalar(cfg.d));
  return A;
}

/// T^{1/2 - i/(2d)}, the weight on the i-th bias constraint.
template <typename Scalar = double>
Scalar rate_scale(int i, int d, std::int64_t T) {
  using std::pow;
  return pow(Scalar(T), Scalar(0.5) - Scalar(i) / (Scalar(2) * Scalar(d)));
}

/// Fills residuals, norm and epsilon of `sol` from its weight vector.
template <typename Scalar>
void evaluate_solution(const EnsembleConfig& cfg, BasicWeightSolution<Scalar>& sol) {
  using std::abs;
  sol.residuals = basis_matrix<Scalar>(cfg) * sol.w;
  sol.norm_sq = sol.w.squaredNorm();
  Scalar eps = Scalar(0);
  for (int i = 1; i < cfg.d; ++i) {
    const Scalar v = abs(sol.residuals(i)) * rate_scale<Scalar>(i, cfg.d, cfg.T);
    if (v > eps) eps = v;
  }
  sol.epsilon = eps;
}

namespace detail {

// Upper-triangular R of a Householder QR of A', with a relative rank test on its diagonal.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> checked_r_factor(
    const Eigen::HouseholderQR<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& qr, Index m,
    const char* what) {
  using std::abs;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> R =
      qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
  const Scalar scale = R.diagonal().cwiseAbs().maxCoeff();
  const Scalar tol = scale * Scalar(100) * Eigen::NumTraits<Scalar>::epsilon();
  for (Index i = 0; i < m; ++i)
    if (!(abs(R(i, i)) > tol)) throw std::invalid_argument(std::string(what) + ": basis matrix is rank deficient");
  return R;
}

// det(A A') as the squared product of the R diagonal.
template <typename Scalar>
Scalar gram_determinant(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A) {
  if (A.rows() == 0) return Scalar(1);
  const Eigen::HouseholderQR<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> qr(A.transpose());
  const auto R = checked_r_factor<Scalar>(qr, A.rows(), "eta_exact");
  Scalar det = Scalar(1);
  for (Index i = 0; i < R.rows(); ++i) det *= R(i, i) * R(i, i);
  return det;
}

}  // namespace detail

/// Minimum-norm weights with sum(w) = 1 and every bias basis term cancelled.
///
/// Weights for large d reach norms near 1e9, where double rounding alone leaves
/// residuals around 1e-8; a wider Scalar (see precision.hpp) removes that floor.
template <typename Scalar = double>
BasicWeightSolution<Scalar> solve_exact(const EnsembleConfig& cfg) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  cfg.validate();
  const Matrix A = basis_matrix<Scalar>(cfg);
  const Index m = A.rows();
  // A' = Q R, so the minimum-norm solution of A w = e1 is w = Q R^{-T} e1.
  const Eigen::HouseholderQR<Matrix> qr(A.transpose());
  const Matrix R = detail::checked_r_factor<Scalar>(qr, m, "solve_exact");
  Vector y = Vector::Unit(m, 0);
  R.transpose().template triangularView<Eigen::Lower>().solveInPlace(y);
  Vector padded = Vector::Zero(cfg.size());
  padded.head(m) = y;

  BasicWeightSolution<Scalar> sol;
  sol.w = qr.householderQ() * padded;
  sol.method = "exact";
  evaluate_solution(cfg, sol);
  sol.epsilon = Scalar(0);
  return sol;
}

/// solve_exact in quad precision, rounded to double. Residuals are then limited
/// by the final rounding rather than by the factorisation.
WeightSolution solve_exact_rounded(const EnsembleConfig& cfg);

/// ||w_0||^2 of the exact solution via det(A1 A1') / det(A0 A0').
template <typename Scalar = double>
Scalar eta_exact(const EnsembleConfig& cfg) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  cfg.validate();
  const Matrix A0 = basis_matrix<Scalar>(cfg);
  const Matrix A1 = A0.bottomRows(A0.rows() - 1);
  return detail::gram_determinant<Scalar>(A1) / detail::gram_determinant<Scalar>(A0);
}

/// min eps s.t. sum(w) = 1, |gamma_w(i)| T^{1/2 - i/(2d)} <= eps, ||w||^2 <= eta_bound.
/// Throws std::invalid_argument if eta_bound < 1/L.
WeightSolution solve_relaxed(const EnsembleConfig& cfg, double eta_bound);

/// Relaxed weights with the default bound eta = 3d.
inline WeightSolution solve_relaxed(const EnsembleConfig& cfg) { return solve_relaxed(cfg, 3.0 * cfg.d); }

/// Identifies a weight computation; depends only on (lbar, d, T, eta), never on data.
std::string weights_cache_key(const EnsembleConfig& cfg, double eta_bound);

/// Bandwidths k(l) = l sqrt(M). Throws if any exceeds M, naming the offending l values.
std::vector<double> ensemble_bandwidths(std::span<const double> lbar, Index M);

/// sum_l w(l) * component(l), reduced in grid order.
double combine(const Eigen::VectorXd& w, std::span<const double> components);

/// Weighted ensemble of truncated plug-in estimates, all on the same split.
template <typename G>
EstimateRecord ensemble_estimate(const G& g, const SampleSet& samples, const EnsembleConfig& cfg,
                                 const WeightSolution& w, const SplitConfig& split_cfg) {
  if (w.w.size() != cfg.size()) throw std::invalid_argument("weight vector length does not match the l grid");
  const Split parts = split(samples, split_cfg);
  const std::vector<double> ks = ensemble_bandwidths(cfg.lbar, parts.density.cols());
  const PluginBank bank = plugin_bank(g, parts.eval, parts.density, std::span<const double>(ks));
  EstimateRecord rec;
  rec.value = combine(w.w, bank.truncated);
  rec.estimator_id = "ensemble";
  rec.N = parts.eval.cols();
  rec.M = parts.density.cols();
  rec.seed = split_cfg.seed;
  return rec;
}

}  // namespace densfx
