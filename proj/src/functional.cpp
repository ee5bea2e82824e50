#include "densfx/functional.hpp"

#include <cstdio>

namespace densfx {

void FunctionalSpec::validate() const {
  switch (kind) {
    case FunctionalKind::renyi:
      if (!(alpha > 0.0) || alpha == 1.0)
        throw std::invalid_argument("Renyi order must be positive and different from 1");
      break;
    case FunctionalKind::panter_dite:
      if (n < 1 || q < 1) throw std::invalid_argument("Panter-Dite requires n >= 1 and q >= 1");
      break;
    default:
      break;
  }
}

double FunctionalSpec::uniform_value() const { return (*this)(1.0); }

std::string FunctionalSpec::id() const {
  char buf[96];
  switch (kind) {
    case FunctionalKind::shannon:
      return "shannon";
    case FunctionalKind::renyi:
      std::snprintf(buf, sizeof buf, "renyi(alpha=%.17g)", alpha);
      return buf;
    case FunctionalKind::quadratic:
      return "quadratic";
    case FunctionalKind::panter_dite:
      std::snprintf(buf, sizeof buf, "panter_dite(n=%d,q=%d)", n, q);
      return buf;
  }
  return "unknown";
}

FunctionalKind functional_kind_from_string(const std::string& name) {
  if (name == "shannon") return FunctionalKind::shannon;
  if (name == "renyi") return FunctionalKind::renyi;
  if (name == "quadratic") return FunctionalKind::quadratic;
  if (name == "panter_dite") return FunctionalKind::panter_dite;
  throw std::invalid_argument("unknown functional kind '" + name + "'");
}

std::string to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::shannon: return "shannon";
    case FunctionalKind::renyi: return "renyi";
    case FunctionalKind::quadratic: return "quadratic";
    case FunctionalKind::panter_dite: return "panter_dite";
  }
  return "unknown";
}

}  // namespace densfx
