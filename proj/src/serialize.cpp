#include "densfx/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace densfx {

void to_json(json& j, const MixtureParams& params) {
  j = json{{"a", params.a}, {"b", params.b}, {"p", params.p}, {"d", params.d}};
}

void from_json(const json& j, MixtureParams& params) {
  params = MixtureParams{};
  params.a = j.value("a", params.a);
  params.b = j.value("b", params.b);
  params.p = j.value("p", params.p);
  params.d = j.value("d", params.d);
  params.validate();
}

void to_json(json& j, const FunctionalSpec& spec) {
  j = json{{"kind", to_string(spec.kind)}};
  if (spec.kind == FunctionalKind::renyi) j["alpha"] = spec.alpha;
  if (spec.kind == FunctionalKind::panter_dite) {
    j["n"] = spec.n;
    j["q"] = spec.q;
  }
}

void from_json(const json& j, FunctionalSpec& spec) {
  spec = FunctionalSpec{};
  spec.kind = functional_kind_from_string(j.at("kind").get<std::string>());
  spec.alpha = j.value("alpha", spec.alpha);
  spec.n = j.value("n", spec.n);
  spec.q = j.value("q", spec.q);
  spec.validate();
}

void to_json(json& j, const TruthEstimate& truth) {
  j = json{{"value", truth.value}, {"stderr", truth.std_error}, {"n_mc", truth.n_mc}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("invalid JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace densfx
