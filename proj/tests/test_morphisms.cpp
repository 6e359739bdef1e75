#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>

#include "morita/expansion.hpp"
#include "morita/morphism.hpp"
#include "morita/text.hpp"
#include "support.hpp"

using namespace morita;
using namespace morita::testing;

namespace {

FiniteStructure partition_pair() {
  auto T = load_theory(corpus_path("partition.th"));
  return enumerate_models(T, Bound(2)).at(0);
}

std::vector<std::vector<int>> random_perm(const FiniteStructure& A, std::mt19937_64& rng) {
  std::vector<std::vector<int>> perm;
  for (int s = 0; s < static_cast<int>(A.signature().sorts().size()); ++s) {
    std::vector<int> p(A.size(s));
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    perm.push_back(p);
  }
  return perm;
}

/// Per-sort bijections preserving every table, counted by brute force.
int automorphism_count(const FiniteStructure& A) {
  const Signature& sig = A.signature();
  std::size_t n = sig.sorts().size();
  std::vector<std::vector<int>> perm(n);
  for (std::size_t s = 0; s < n; ++s) {
    perm[s].resize(A.size(static_cast<int>(s)));
    std::iota(perm[s].begin(), perm[s].end(), 0);
  }
  auto sort_id = [&](const std::string& s) { return *sig.sort_id(s); };
  auto preserved = [&] {
    for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
      const auto& ar = sig.predicates()[p].arity;
      std::vector<int> t(ar.size(), 0);
      std::function<bool(std::size_t)> walk = [&](std::size_t k) {
        if (k == ar.size()) {
          std::vector<int> u;
          for (std::size_t i = 0; i < t.size(); ++i) u.push_back(perm[sort_id(ar[i])][t[i]]);
          return A.holds(static_cast<int>(p), t) == A.holds(static_cast<int>(p), u);
        }
        for (t[k] = 0; t[k] < A.size(sort_id(ar[k])); ++t[k]) {
          if (!walk(k + 1)) return false;
        }
        return true;
      };
      if (!walk(0)) return false;
    }
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      const auto& dom = sig.functions()[f].domain;
      int cod = sort_id(sig.functions()[f].codomain);
      std::vector<int> t(dom.size(), 0);
      std::function<bool(std::size_t)> walk = [&](std::size_t k) {
        if (k == dom.size()) {
          std::vector<int> u;
          for (std::size_t i = 0; i < t.size(); ++i) u.push_back(perm[sort_id(dom[i])][t[i]]);
          return perm[cod][A.apply(static_cast<int>(f), t)] == A.apply(static_cast<int>(f), u);
        }
        for (t[k] = 0; t[k] < A.size(sort_id(dom[k])); ++t[k]) {
          if (!walk(k + 1)) return false;
        }
        return true;
      };
      if (!walk(0)) return false;
    }
    for (std::size_t c = 0; c < sig.constants().size(); ++c) {
      int s = sort_id(sig.constants()[c].sort);
      if (perm[s][A.constant(static_cast<int>(c))] != A.constant(static_cast<int>(c))) return false;
    }
    return true;
  };
  int count = 0;
  std::function<void(std::size_t)> walk = [&](std::size_t s) {
    if (s == n) {
      count += preserved();
      return;
    }
    std::sort(perm[s].begin(), perm[s].end());
    do {
      walk(s + 1);
    } while (std::next_permutation(perm[s].begin(), perm[s].end()));
  };
  walk(0);
  return count;
}

std::vector<std::vector<std::vector<int>>> all_maps(const FiniteStructure& M,
                                                    const FiniteStructure& N) {
  std::vector<std::vector<std::vector<int>>> out{{}};
  for (const auto& s : M.signature().sorts()) {
    std::vector<std::vector<std::vector<int>>> next;
    int m = M.size(s), n = N.size(s);
    std::vector<int> f(m, 0);
    while (true) {
      for (const auto& partial : out) {
        auto extended = partial;
        extended.push_back(f);
        next.push_back(std::move(extended));
      }
      int k = m - 1;
      while (k >= 0 && ++f[k] == n) f[k--] = 0;
      if (k < 0) break;
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("identity and swap on the two-element partition model") {
  auto A = partition_pair();
  CHECK(is_isomorphism(identity(A)));
  Morphism swap{A, A, {{1, 0}}};
  CHECK(well_typed(swap));
  CHECK_FALSE(is_isomorphism(swap));
  CHECK_FALSE(is_elementary_embedding(swap));
  auto isos = enumerate_isomorphisms(A, A);
  REQUIRE(isos.size() == 1);
  CHECK(isos[0] == identity(A));
}

TEST_CASE("one-element structure has only the identity") {
  auto T = parse_theory("sort s\n");
  auto A = enumerate_models(T, Bound(1)).at(0);
  auto isos = enumerate_isomorphisms(A, A);
  REQUIRE(isos.size() == 1);
  CHECK(isos[0] == identity(A));
}

TEST_CASE("non-isomorphic structures have no isomorphisms") {
  auto models = enumerate_models(load_theory(corpus_path("partition.th")), Bound(3));
  REQUIRE(models.size() == 3);
  CHECK(enumerate_isomorphisms(models[1], models[2]).empty());
  CHECK_FALSE(find_isomorphism(models[1], models[2]));
  CHECK(enumerate_isomorphisms(models[0], models[1]).empty());
}

TEST_CASE("relabeling gives isomorphisms, and their inverses compose to identities") {
  std::mt19937_64 rng(1);
  for (const auto& [name, T] : corpus_theories()) {
    CAPTURE(name);
    for (const auto& A : enumerate_models(T, Bound(3))) {
      auto perm = random_perm(A, rng);
      auto B = relabel(A, perm);
      Morphism h{A, B, perm};
      CHECK(is_isomorphism(h));
      CHECK(is_elementary_embedding(h));
      auto back = inverse(h);
      CHECK(compose(back, h) == identity(A));
      CHECK(compose(h, back) == identity(B));
      auto found = find_isomorphism(A, B);
      REQUIRE(found);
      CHECK(is_isomorphism(*found));
    }
  }
}

TEST_CASE("automorphism counts match brute force") {
  for (const auto& [name, T] : corpus_theories()) {
    CAPTURE(name);
    for (const auto& A : enumerate_models(T, Bound(3))) {
      auto isos = enumerate_isomorphisms(A, A);
      CHECK(static_cast<int>(isos.size()) == automorphism_count(A));
      for (std::size_t i = 1; i < isos.size(); ++i) CHECK(isos[i - 1].maps < isos[i].maps);
    }
  }
}

TEST_CASE("non-injective and predicate-breaking maps are not elementary") {
  auto T = parse_theory("sort s\npred p : s\n");
  StructureBuilder b(T.signature);
  b.set_atoms("s", 2);
  b.set_predicate("p", {Element::atom("s", 0)});
  auto A = b.build();
  CHECK_FALSE(is_elementary_embedding(Morphism{A, A, {{0, 0}}}));
  CHECK_FALSE(is_elementary_embedding(Morphism{A, A, {{1, 0}}}));
  CHECK(is_elementary_embedding(Morphism{A, A, {{0, 1}}}));
}

TEST_CASE("elementary embeddings agree with the depth-two game oracle") {
  int maps = 0, elementary = 0;
  for (const char* file : {"partition.th", "exists_p.th", "order_strict.th",
                           "equivalence_relation.th"}) {
    CAPTURE(file);
    auto T = load_theory(corpus_path(file));
    auto models = enumerate_models(T, Bound(3));
    for (const auto& M : models) {
      for (const auto& N : models) {
        for (auto& f : all_maps(M, N)) {
          Morphism h{M, N, f};
          bool decided = is_elementary_embedding(h);
          CHECK(decided == preserves_to_depth(h, 2, 2));
          if (decided) CHECK(is_isomorphism(h));
          ++maps;
          elementary += decided;
        }
      }
    }
  }
  CHECK(maps > 1000);
  CHECK(elementary > 0);
}

TEST_CASE("game oracle distinguishes sizes by the number of rounds") {
  auto T = parse_theory("sort s\n");
  auto models = enumerate_models(T, Bound(3));
  REQUIRE(models.size() == 3);
  CHECK_FALSE(duplicator_wins(models[0], {}, models[1], {}, 2));
  CHECK(duplicator_wins(models[0], {}, models[1], {}, 1));
  CHECK(duplicator_wins(models[1], {}, models[2], {}, 2));
  CHECK_FALSE(duplicator_wins(models[1], {}, models[2], {}, 3));
  CHECK_FALSE(duplicator_wins(models[1], {{0, 0}}, models[2], {{0, 0}}, 2));
}

TEST_CASE("reduct morphisms") {
  auto T = load_theory(corpus_path("relation.th"));
  auto A = enumerate_models(T, Bound(2)).at(0);
  auto id = identity(A);
  CHECK(reduct_morphism(id, T.signature) == id);
  Signature only_a;
  only_a.add_sort("a");
  auto r = reduct_morphism(id, only_a);
  CHECK(r.maps.size() == 1);
  CHECK(r.maps[0] == id.map("a"));
  Signature other;
  other.add_sort("z");
  CHECK_THROWS_AS(reduct_morphism(id, other), Error);
}

TEST_CASE("lifting isomorphisms along every corpus step") {
  std::mt19937_64 rng(5);
  for (const auto& c : load_cases(3)) {
    CAPTURE(c.name);
    const Signature& base = c.step.base();
    for (const auto& M : enumerate_models(c.theory, c.bound)) {
      auto Mp = expand_model(M, c.theory, c.step);
      auto id = lift_morphism(identity(M), Mp, Mp, c.step);
      CHECK(id == identity(Mp));

      auto p1 = random_perm(M, rng), p2 = random_perm(M, rng);
      auto N = relabel(M, p1);
      auto K = relabel(N, p2);
      auto Np = expand_model(N, c.theory, c.step);
      auto Kp = expand_model(K, c.theory, c.step);
      Morphism h{M, N, p1}, g{N, K, p2};
      auto hp = lift_morphism(h, Mp, Np, c.step);
      auto gp = lift_morphism(g, Np, Kp, c.step);
      CHECK(is_isomorphism(hp));
      CHECK(reduct_morphism(hp, base).maps == h.maps);
      auto composite = lift_morphism(compose(g, h), Mp, Kp, c.step);
      CHECK(composite == compose(gp, hp));
    }
  }
}

TEST_CASE("subsort lifting follows the inclusion") {
  auto T = load_theory(corpus_path("exists_p.th"));
  auto step = load_extension(T.signature, corpus_path("exists_p_subsort.ext").string());
  StructureBuilder b(T.signature);
  b.set_atoms("s", 2);
  b.set_predicate("p", {Element::atom("s", 0)});
  b.set_predicate("p", {Element::atom("s", 1)});
  auto M = b.build();
  auto Mp = expand_model(M, T, step);
  Morphism swap{M, M, {{1, 0}}};
  auto lifted = lift_morphism(swap, Mp, Mp, step);
  for (const auto& e : Mp.carrier("sp")) {
    CHECK(lifted(e) == Element::sub("sp", swap(e.parts()[0])));
  }

  StructureBuilder c(T.signature);
  c.set_atoms("s", 2);
  c.set_predicate("p", {Element::atom("s", 0)});
  auto N = c.build();
  auto Np = expand_model(N, T, step);
  CHECK_THROWS_AS(lift_morphism(Morphism{N, N, {{1, 0}}}, Np, Np, step), Error);
  try {
    lift_morphism(Morphism{N, N, {{1, 0}}}, Np, Np, step);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotElementary);
  }
}

TEST_CASE("total quotient lifts to the map between singletons") {
  auto T = load_theory(corpus_path("marked.th"));
  auto step = load_extension(T.signature, corpus_path("marked_collapse.ext").string());
  for (const auto& M : enumerate_models(T, Bound(3))) {
    auto Mp = expand_model(M, T, step);
    REQUIRE(Mp.size("one") == 1);
    for (const auto& h : enumerate_isomorphisms(M, M)) {
      auto lifted = lift_morphism(h, Mp, Mp, step);
      CHECK(lifted.map("one") == std::vector<int>{0});
    }
  }
}

TEST_CASE("morphism files round-trip") {
  auto models = enumerate_models(load_theory(corpus_path("equivalence_relation.th")), Bound(3));
  for (const auto& A : models) {
    for (const auto& h : enumerate_isomorphisms(A, A)) {
      CHECK(parse_morphism(A, A, print_morphism(h)) == h);
    }
  }
  auto A = partition_pair();
  CHECK_THROWS_AS(parse_morphism(A, A, "map s1: e0 -> e7\nmap s1: e1 -> e0\n"), Error);
}
