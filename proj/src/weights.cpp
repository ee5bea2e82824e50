#include "densfx/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>

#include "densfx/precision.hpp"

namespace densfx {

void EnsembleConfig::validate() const {
  if (d < 1) throw std::invalid_argument("ensemble dimension d must be at least 1");
  if (T < 2) throw std::invalid_argument("ensemble sample size T must be at least 2");
  if (lbar.size() <= std::size_t(index_count()))
    throw std::invalid_argument("ensemble needs L > d - 1 grid points, got L = " + std::to_string(lbar.size()));
  std::set<double> seen;
  for (double l : lbar) {
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("grid values must be positive and finite");
    if (!seen.insert(l).second) throw std::invalid_argument("grid values must be distinct");
  }
}

std::vector<double> default_lbar(int L, double a, double x) {
  if (L < 1) throw std::invalid_argument("default_lbar needs L >= 1");
  if (!(a > 1.0)) throw std::invalid_argument("default_lbar needs a > 1");
  if (!(x > 0.0)) throw std::invalid_argument("default_lbar needs x > 0");
  std::vector<double> out(static_cast<std::size_t>(L));
  for (int i = 1; i <= L; ++i) out[std::size_t(i - 1)] = x / a + (a - 1.0) * double(i) * x / (a * double(L));
  return out;
}

namespace {

// min ||u|| subject to |b + Rt u|_inf <= t, by enumerating active sets.
// Returns +inf when the box is unreachable.
struct BoxMinNorm {
  const Eigen::MatrixXd& Rt;  // m x m
  const Eigen::VectorXd& b;

  double operator()(double t, Eigen::VectorXd* best_u) const {
    const Index m = b.size();
    const double tol = 1e-12 * std::max({1.0, t, b.cwiseAbs().maxCoeff()});
    double best = std::numeric_limits<double>::infinity();
    // Base-3 counter over constraint states: 0 free, 1 upper bound active, 2 lower bound active.
    std::vector<int> state(std::size_t(m), 0);
    auto sign = [&](Index i) { return state[std::size_t(i)] == 1 ? 1.0 : -1.0; };
    Eigen::VectorXd u(m);
    while (true) {
      std::vector<Index> rows;
      for (Index i = 0; i < m; ++i)
        if (state[std::size_t(i)] != 0) rows.push_back(i);
      if (rows.empty()) {
        u.setZero();
      } else {
        Eigen::MatrixXd E(Index(rows.size()), m);
        Eigen::VectorXd rhs(Index(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          E.row(Index(r)) = Rt.row(rows[r]);
          rhs(Index(r)) = sign(rows[r]) * t - b(rows[r]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
        cod.setThreshold(1e-15);
        cod.compute(E);
        u = cod.solve(rhs);
        if ((E * u - rhs).cwiseAbs().maxCoeff() > tol) u.setConstant(std::numeric_limits<double>::quiet_NaN());
      }
      if (u.allFinite()) {
        const Eigen::VectorXd v = b + Rt * u;
        const double norm = u.norm();
        if (v.cwiseAbs().maxCoeff() <= t + tol && norm < best) {
          best = norm;
          if (best_u) *best_u = u;
        }
      }
      Index pos = 0;
      while (pos < m) {
        int& s = state[std::size_t(pos)];
        if (s == 2) {
          s = 0;
          ++pos;
        } else {
          ++s;
          break;
        }
      }
      if (pos == m) break;
    }
    return best;
  }
};

}  // namespace

WeightSolution solve_relaxed(const EnsembleConfig& cfg, double eta_bound) {
  cfg.validate();
  const Index L = cfg.size();
  const double floor_norm = 1.0 / double(L);
  if (!(eta_bound >= floor_norm)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "infeasible norm bound eta = %.17g: sum(w) = 1 requires eta >= 1/L = %.17g",
                  eta_bound, floor_norm);
    throw std::invalid_argument(buf);
  }

  WeightSolution sol;
  sol.method = "relaxed";
  sol.eta_bound = eta_bound;
  const int m = cfg.index_count();
  if (m == 0) {
    sol.w = Eigen::VectorXd::Constant(L, floor_norm);
    evaluate_solution(cfg, sol);
    return sol;
  }

  // w = 1/L + z with z orthogonal to the ones vector and ||z||^2 <= eta - 1/L.
  // Only the span of the centred constraint rows matters for z, so z = Q u.
  Eigen::MatrixXd C = basis_matrix(cfg).bottomRows(m);
  for (int i = 0; i < m; ++i) C.row(i) *= rate_scale(i + 1, cfg.d, cfg.T);
  const Eigen::VectorXd b = C.rowwise().mean();
  const Eigen::MatrixXd centred = C.colwise() - b;

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(centred.transpose());
  const Eigen::MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(L, m);
  const Eigen::MatrixXd Rt = R.transpose();
  const double radius = std::sqrt(std::max(0.0, eta_bound - floor_norm));

  const BoxMinNorm min_norm{Rt, b};
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd candidate(m);
  if (min_norm(0.0, &candidate) <= radius) {
    // The ball holds the exact solution; take it at full accuracy.
    WeightSolution exact = solve_exact_rounded(cfg);
    exact.method = "relaxed";
    exact.eta_bound = eta_bound;
    return exact;
  } else {
    double lo = 0.0;
    double hi = b.cwiseAbs().maxCoeff();  // u = 0 is always inside the ball
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (min_norm(mid, &candidate) <= radius) {
        hi = mid;
        u = candidate;
      } else {
        lo = mid;
      }
    }
  }

  sol.w = Eigen::VectorXd::Constant(L, floor_norm) + Q * u;
  evaluate_solution(cfg, sol);
  return sol;
}

WeightSolution solve_exact_rounded(const EnsembleConfig& cfg) {
  const auto precise = solve_exact<quad>(cfg);
  WeightSolution sol;
  sol.w = precise.w.cast<double>();
  sol.method = "exact";
  evaluate_solution(cfg, sol);
  return sol;
}

std::string weights_cache_key(const EnsembleConfig& cfg, double eta_bound) {
  std::string key = "lbar=[";
  char buf[64];
  for (std::size_t i = 0; i < cfg.lbar.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", cfg.lbar[i]);
    key += buf;
  }
  std::snprintf(buf, sizeof buf, "];d=%d;T=%lld;eta=%.17g", cfg.d, static_cast<long long>(cfg.T), eta_bound);
  return key + buf;
}

std::vector<double> ensemble_bandwidths(std::span<const double> lbar, Index M) {
  std::vector<double> ks;
  std::string bad;
  const double root = std::sqrt(double(M));
  for (double l : lbar) {
    const double k = l * root;
    if (k > double(M)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s%.17g", bad.empty() ? "" : ", ", l);
      bad += buf;
    }
    ks.push_back(k);
  }
  if (!bad.empty())
    throw std::invalid_argument("k(l) = l*sqrt(M) exceeds M = " + std::to_string(M) + " for l = " + bad);
  return ks;
}

double combine(const Eigen::VectorXd& w, std::span<const double> components) {
  if (std::size_t(w.size()) != components.size())
    throw std::invalid_argument("weights and component estimates differ in length");
  double out = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) out += w(Index(i)) * components[i];
  return out;
}

}  // namespace densfx
