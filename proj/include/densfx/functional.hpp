#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace densfx {

enum class FunctionalKind { shannon, renyi, quadratic, panter_dite };

/// Pointwise integrand g(f, x) of a density functional G(f) = E_f[g(f(X), X)].
///
/// Shannon, Renyi and Panter-Dite use the indicator convention g(0, x) = 1 so
/// that a plug-in density estimate of zero still yields a finite value.
struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::shannon;
  double alpha = 2.0;  // Renyi order
  int n = 16;          // Panter-Dite quantizer levels
  int q = 6;           // Panter-Dite quantizer dimension

  static FunctionalSpec shannon() { return {FunctionalKind::shannon}; }
  static FunctionalSpec renyi(double alpha) { return {FunctionalKind::renyi, alpha}; }
  static FunctionalSpec quadratic() { return {FunctionalKind::quadratic}; }
  static FunctionalSpec panter_dite(int n, int q) {
    return {FunctionalKind::panter_dite, 2.0, n, q};
  }

  void validate() const;

  /// Renyi order whose integrand is proportional to the Panter-Dite one.
  double panter_dite_order() const { return double(q) / double(q + 2); }
  /// Multiplicative factor n^{-2/q} of the Panter-Dite integrand.
  double panter_dite_scale() const { return std::pow(double(n), -2.0 / double(q)); }

  template <typename Scalar>
  Scalar operator()(Scalar f) const {
    using std::log;
    using std::pow;
    if (!(f >= Scalar(0))) throw std::domain_error("functional evaluated at negative density");
    switch (kind) {
      case FunctionalKind::shannon:
        return f > Scalar(0) ? -log(f) : Scalar(1);
      case FunctionalKind::renyi:
        return f > Scalar(0) ? pow(f, Scalar(alpha - 1.0)) : Scalar(1);
      case FunctionalKind::quadratic:
        return f * f;
      case FunctionalKind::panter_dite:
        return f > Scalar(0)
                   ? Scalar(panter_dite_scale()) * pow(f, Scalar(-2.0 / double(q + 2)))
                   : Scalar(1);
    }
    return Scalar(0);
  }

  /// None of the supported integrands depend on the location x.
  template <typename Scalar, typename Derived>
  Scalar operator()(Scalar f, const Eigen::MatrixBase<Derived>&) const {
    return (*this)(f);
  }

  /// Closed-form G(f) for the uniform density on the unit cube (f == 1).
  double uniform_value() const;

  /// Short stable identifier, e.g. "panter_dite(n=16,q=6)".
  std::string id() const;
};

template <typename Scalar, typename Derived>
Scalar g_eval(const FunctionalSpec& spec, Scalar f, const Eigen::MatrixBase<Derived>& x) {
  return spec(f, x);
}

FunctionalKind functional_kind_from_string(const std::string& name);
std::string to_string(FunctionalKind kind);

}  // namespace densfx
