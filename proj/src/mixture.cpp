#include "densfx/mixture.hpp"

#include <cstdio>
#include <filesystem>
#include <random>

#include "densfx/serialize.hpp"

namespace densfx {

void MixtureParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("mixture shapes a and b must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mixture weight p must lie in [0,1]");
  if (d < 1) throw std::invalid_argument("mixture dimension d must be at least 1");
}

std::string MixtureParams::id() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "a=%.17g,b=%.17g,p=%.17g,d=%d", a, b, p, d);
  return buf;
}

SampleSet sample(const MixtureParams& params, Index n, std::uint64_t seed) {
  params.validate();
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::gamma_distribution<double> gamma_a(params.a, 1.0);
  std::gamma_distribution<double> gamma_b(params.b, 1.0);

  SampleSet out(params.d, n);
  for (Index i = 0; i < n; ++i) {
    const bool from_beta = unit(rng) < params.p;
    for (int j = 0; j < params.d; ++j) {
      if (from_beta) {
        const double ga = gamma_a(rng);
        const double gb = gamma_b(rng);
        out(j, i) = ga / (ga + gb);
      } else {
        out(j, i) = unit(rng);
      }
    }
  }
  return out;
}

TruthEstimate true_functional(const MixtureParams& params, const FunctionalSpec& g, std::int64_t n_mc,
                              std::uint64_t seed) {
  params.validate();
  g.validate();
  if (n_mc < 1000) throw std::invalid_argument("true_functional needs n_mc >= 1000");

  // Stream in blocks to keep memory flat for n_mc ~ 1e7.
  constexpr Index block = 1 << 16;
  std::uint64_t block_seed = seed;
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t count = 0;
  for (std::int64_t done = 0; done < n_mc; done += block) {
    const Index n = Index(std::min<std::int64_t>(block, n_mc - done));
    const SampleSet xs = sample(params, n, block_seed);
    block_seed = mix_seed(block_seed);
    for (Index i = 0; i < n; ++i) {
      const double v = g(mixture_pdf(xs.col(i), params), xs.col(i));
      ++count;
      const double delta = v - mean;
      mean += delta / double(count);
      m2 += delta * (v - mean);
    }
  }
  TruthEstimate out;
  out.value = mean;
  out.std_error = count > 1 ? std::sqrt(m2 / double(count - 1) / double(count)) : 0.0;
  out.n_mc = count;
  return out;
}

std::string TruthCache::key(const MixtureParams& params, const FunctionalSpec& g, std::int64_t n_mc,
                            std::uint64_t seed) {
  return params.id() + "|" + g.id() + "|n_mc=" + std::to_string(n_mc) + "|seed=" + std::to_string(seed);
}

namespace {
bool same_problem(const TruthEntry& e, const MixtureParams& params, const FunctionalSpec& g) {
  return e.params.id() == params.id() && e.functional.id() == g.id();
}
}  // namespace

TruthCache TruthCache::load(const std::string& path) {
  TruthCache cache;
  if (!std::filesystem::exists(path)) return cache;
  const json doc = read_json_file(path);
  for (const auto& item : doc.at("entries")) {
    TruthEntry e;
    e.params = item.at("params").get<MixtureParams>();
    e.functional = item.at("functional").get<FunctionalSpec>();
    e.n_mc = item.at("n_mc").get<std::int64_t>();
    e.seed = item.at("seed").get<std::uint64_t>();
    e.estimate.value = item.at("value").get<double>();
    e.estimate.std_error = item.at("stderr").get<double>();
    e.estimate.n_mc = e.n_mc;
    cache.insert(e);
  }
  return cache;
}

void TruthCache::save(const std::string& path) const {
  json entries = json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"key", key(e.params, e.functional, e.n_mc, e.seed)},
                       {"params", e.params},
                       {"functional", e.functional},
                       {"n_mc", e.n_mc},
                       {"seed", e.seed},
                       {"value", e.estimate.value},
                       {"stderr", e.estimate.std_error}});
  }
  write_json_file(path, json{{"schema", 1}, {"entries", entries}});
}

void TruthCache::insert(const TruthEntry& entry) {
  const std::string k = key(entry.params, entry.functional, entry.n_mc, entry.seed);
  for (auto& e : entries_) {
    if (key(e.params, e.functional, e.n_mc, e.seed) == k) {
      e = entry;
      return;
    }
  }
  entries_.push_back(entry);
}

std::optional<TruthEntry> TruthCache::find(const MixtureParams& params, const FunctionalSpec& g,
                                           std::int64_t n_mc, std::uint64_t seed) const {
  for (const auto& e : entries_)
    if (same_problem(e, params, g) && e.n_mc == n_mc && e.seed == seed) return e;
  return std::nullopt;
}

std::optional<TruthEntry> TruthCache::best(const MixtureParams& params, const FunctionalSpec& g) const {
  std::optional<TruthEntry> out;
  for (const auto& e : entries_)
    if (same_problem(e, params, g) && (!out || e.n_mc > out->n_mc)) out = e;
  return out;
}

}  // namespace densfx
