#include "f2erg/finite_system.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

#include "f2erg/errors.hpp"

namespace f2erg {

namespace {

bool is_permutation_of_range(const std::vector<std::size_t>& p) {
  std::vector<bool> seen(p.size(), false);
  for (std::size_t v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& p) {
  std::vector<std::size_t> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = i;
  return inv;
}

Rational random_positive_rational(CounterRng& rng) {
  Rational q(static_cast<long>(rng.below(9)) + 1, static_cast<long>(rng.below(7)) + 1);
  q.canonicalize();
  return q;
}

}  // namespace

FiniteSystem::FiniteSystem(std::vector<std::size_t> perm_a, std::vector<std::size_t> perm_b,
                           std::vector<Rational> weights)
    : perm_a_(std::move(perm_a)), perm_b_(std::move(perm_b)), weights_(std::move(weights)) {
  const std::size_t n = perm_a_.size();
  if (n == 0) throw DomainError("finite system needs at least one state");
  if (perm_b_.size() != n || weights_.size() != n) throw DomainError("permutation/weight sizes disagree");
  if (!is_permutation_of_range(perm_a_) || !is_permutation_of_range(perm_b_)) {
    throw DomainError("perm_a and perm_b must be bijections of {0..N-1}");
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (weights_[x] <= 0) throw DomainError("weights must be positive");
    if (weights_[perm_a_[x]] != weights_[x] || weights_[perm_b_[x]] != weights_[x]) {
      throw DomainError("weights must be constant along perm_a and perm_b orbits");
    }
  }
  table_[code(Letter::a)] = perm_a_;
  table_[code(Letter::b)] = perm_b_;
  table_[code(Letter::A)] = inverse_permutation(perm_a_);
  table_[code(Letter::B)] = inverse_permutation(perm_b_);
}

FiniteSystem FiniteSystem::two_point_swap() {
  return FiniteSystem({1, 0}, {1, 0}, {Rational(1, 2), Rational(1, 2)});
}

FiniteSystem FiniteSystem::random(std::size_t n, CounterRng& rng) {
  if (n == 0) throw DomainError("random system needs n >= 1");
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[rng.below(static_cast<std::uint32_t>(i))]);
    }
  };
  std::vector<std::size_t> pa(n), pb(n);
  std::iota(pa.begin(), pa.end(), 0);
  std::iota(pb.begin(), pb.end(), 0);
  shuffle(pa);
  shuffle(pb);

  // Union-find over both generators; one weight per component.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t x = 0; x < n; ++x) {
    parent[find(x)] = find(pa[x]);
    parent[find(x)] = find(pb[x]);
  }
  std::vector<Rational> component_weight(n);
  std::vector<bool> assigned(n, false);
  std::vector<Rational> w(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t r = find(x);
    if (!assigned[r]) {
      component_weight[r] = random_positive_rational(rng);
      assigned[r] = true;
    }
    w[x] = component_weight[r];
  }
  return FiniteSystem(std::move(pa), std::move(pb), std::move(w));
}

Rational FiniteSystem::total_weight() const {
  Rational total = 0;
  for (const auto& w : weights_) total += w;
  return total;
}

std::string FiniteSystem::to_json() const {
  nlohmann::ordered_json doc;
  doc["states"] = size();
  doc["perm_a"] = perm_a_;
  doc["perm_b"] = perm_b_;
  std::vector<std::string> ws;
  for (const auto& w : weights_) ws.push_back(to_string(w));
  doc["weights"] = ws;
  return doc.dump(2);
}

FiniteSystem FiniteSystem::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("finite system document: ") + e.what());
  }
  try {
    const auto n = doc.at("states").get<std::size_t>();
    auto pa = doc.at("perm_a").get<std::vector<std::size_t>>();
    auto pb = doc.at("perm_b").get<std::vector<std::size_t>>();
    std::vector<Rational> w;
    for (const auto& s : doc.at("weights")) w.push_back(parse_rational(s.get<std::string>()));
    if (pa.size() != n) throw DomainError("state count does not match perm_a");
    return FiniteSystem(std::move(pa), std::move(pb), std::move(w));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("finite system document: ") + e.what());
  }
}

std::size_t apply_group(const FiniteSystem& sys, const ReducedWord& w, std::size_t x) {
  for (std::size_t i = w.length(); i-- > 0;) x = sys.shift(x, w[i]);
  return x;
}

Density avg_operator(const FiniteSystem& sys, const Density& f, int n, int cap) {
  if (n < 1) throw DomainError("avg_operator needs n >= 1");
  const std::size_t N = sys.size();
  Density sum(N, Rational(0));
  for_each_in_sphere(
      n,
      [&](const ReducedWord& g) {
        const ReducedWord ginv = invert(g);
        for (std::size_t x = 0; x < N; ++x) sum[x] += f[apply_group(sys, ginv, x)];
      },
      cap);
  const Rational norm(mpz_class(1), mpz_class(std::to_string(sphere_size(n))));
  for (auto& v : sum) v *= norm;
  return sum;
}

LiftedDensity pullback(const FiniteSystem& sys, const Density& f) {
  LiftedDensity g{std::vector<Rational>(4 * sys.size())};
  for (std::size_t x = 0; x < sys.size(); ++x) {
    for (Letter s : kLetters) g.at(x, s) = f[x];
  }
  return g;
}

Density pushforward(const FiniteSystem& sys, const LiftedDensity& g) {
  Density f(sys.size());
  for (std::size_t x = 0; x < sys.size(); ++x) {
    Rational acc = 0;
    for (Letter s : kLetters) acc += g.at(x, s);
    f[x] = acc / 4;
  }
  return f;
}

LiftedDensity markov_P(const FiniteSystem& sys, const LiftedDensity& g) {
  LiftedDensity out{std::vector<Rational>(g.values.size())};
  for (std::size_t x = 0; x < sys.size(); ++x) {
    for (Letter s : kLetters) {
      const std::size_t y = sys.shift(x, inverse(s));
      Rational acc = 0;
      for (Letter t : kLetters) {
        if (t != inverse(s)) acc += g.at(y, t);
      }
      out.at(x, s) = acc / 3;
    }
  }
  return out;
}

bool check_identity(const FiniteSystem& sys, const Density& f, int n, int cap) {
  const Density direct = avg_operator(sys, f, n, cap);
  LiftedDensity g = pullback(sys, f);
  for (int i = 0; i < n; ++i) g = markov_P(sys, g);
  return direct == pushforward(sys, g);
}

Density maximal_function(const FiniteSystem& sys, const Density& f, int n_max, int cap) {
  if (n_max < 1) throw DomainError("maximal_function needs n_max >= 1");
  if (2 * n_max > cap) throw CapExceeded("maximal_function: 2*n_max exceeds enumeration cap");
  Density best = avg_operator(sys, f, 2, cap);
  for (int n = 2; n <= n_max; ++n) {
    const Density next = avg_operator(sys, f, 2 * n, cap);
    for (std::size_t x = 0; x < best.size(); ++x) best[x] = std::max(best[x], next[x]);
  }
  return best;
}

Rational integral(const FiniteSystem& sys, const Density& f) {
  Rational acc = 0;
  for (std::size_t x = 0; x < sys.size(); ++x) acc += f[x] * sys.weight(x);
  return acc;
}

Rational integral(const FiniteSystem& sys, const LiftedDensity& g) {
  Rational acc = 0;
  for (std::size_t x = 0; x < sys.size(); ++x) {
    for (Letter s : kLetters) acc += g.at(x, s) * sys.weight(x);
  }
  return acc / 4;
}

Rational l1_norm(const FiniteSystem& sys, const LiftedDensity& g) {
  Rational acc = 0;
  for (std::size_t x = 0; x < sys.size(); ++x) {
    for (Letter s : kLetters) acc += abs(g.at(x, s)) * sys.weight(x);
  }
  return acc / 4;
}

Density random_density(const FiniteSystem& sys, CounterRng& rng) {
  Density f(sys.size());
  for (auto& v : f) {
    v = Rational(static_cast<long>(rng.below(20)), static_cast<long>(rng.below(6)) + 1);
    v.canonicalize();
  }
  return f;
}

LiftedDensity random_lifted_density(const FiniteSystem& sys, CounterRng& rng) {
  LiftedDensity g{std::vector<Rational>(4 * sys.size())};
  for (auto& v : g.values) {
    v = Rational(static_cast<long>(rng.below(20)), static_cast<long>(rng.below(6)) + 1);
    v.canonicalize();
  }
  return g;
}

}  // namespace f2erg
