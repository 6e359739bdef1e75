#include "morita/category.hpp"

#include <algorithm>
#include <sstream>

#include "morita/text.hpp"

namespace morita {

std::size_t BoundedModelCategory::arrow_count() const {
  std::size_t n = 0;
  for (const auto& a : automorphisms) n += a.size();
  return n;
}

std::vector<Morphism> BoundedModelCategory::arrows(int i, int j) const {
  if (i != j) return {};
  return automorphisms.at(i);
}

int BoundedModelCategory::find(const FiniteStructure& A) const {
  if (!(A.signature() == theory.signature)) return -1;
  auto form = canonical_form(A);
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (forms[i] == form) return static_cast<int>(i);
  }
  return -1;
}

namespace {

int index_of(const std::vector<Morphism>& arrows, const std::vector<std::vector<int>>& maps) {
  for (std::size_t k = 0; k < arrows.size(); ++k) {
    if (arrows[k].maps == maps) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

BoundedModelCategory build_category(const Theory& T, const Bound& bound) {
  BoundedModelCategory C{T, bound, {}, {}, {}, {}};
  C.objects = enumerate_models(T, bound);
  for (const auto& A : C.objects) {
    C.forms.push_back(canonical_form(A));
    auto autos = enumerate_isomorphisms(A, A);
    auto id = identity(A);
    auto it = std::find(autos.begin(), autos.end(), id);
    if (it != autos.begin()) std::iter_swap(autos.begin(), it);
    int n = static_cast<int>(autos.size());
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        table[a][b] = index_of(autos, compose(autos[a], autos[b]).maps);
      }
    }
    C.automorphisms.push_back(std::move(autos));
    C.composition.push_back(std::move(table));
  }
  return C;
}

bool satisfies_category_laws(const BoundedModelCategory& C) {
  for (std::size_t i = 0; i < C.objects.size(); ++i) {
    const auto& autos = C.automorphisms[i];
    const auto& table = C.composition[i];
    int n = static_cast<int>(autos.size());
    if (n == 0 || !(autos[0] == identity(C.objects[i]))) return false;
    for (int a = 0; a < n; ++a) {
      if (!is_elementary_embedding(autos[a])) return false;
      if (table[0][a] != a || table[a][0] != a) return false;
      for (int b = 0; b < n; ++b) {
        if (table[a][b] < 0) return false;
        for (int c = 0; c < n; ++c) {
          if (table[table[a][b]][c] != table[a][table[b][c]]) return false;
        }
      }
    }
  }
  return true;
}

FunctorData projection_functor(std::shared_ptr<const BoundedModelCategory> plus,
                               std::shared_ptr<const BoundedModelCategory> base) {
  const Signature& sigma = base->theory.signature;
  if (!plus->theory.signature.contains(sigma)) {
    throw Error(ErrorKind::NotSubsignature, "target signature is not contained in the source");
  }
  for (const auto& s : sigma.sorts()) {
    if (plus->bound.cap(s) != base->bound.cap(s)) {
      throw Error(ErrorKind::BoundMismatch, "bounds differ on sort " + s + ": " +
                                                std::to_string(plus->bound.cap(s)) + " vs " +
                                                std::to_string(base->bound.cap(s)));
    }
  }
  FunctorData F{plus, base, {}, {}};
  for (std::size_t i = 0; i < plus->objects.size(); ++i) {
    auto R = reduct(plus->objects[i], sigma);
    int j = base->find(R);
    if (j < 0) {
      throw Error(ErrorKind::BoundMismatch,
                  "reduct of object " + std::to_string(i) + " is not an object of the target");
    }
    auto phi = *find_isomorphism(R, base->objects[j]);
    auto phi_inv = inverse(phi);
    std::vector<int> arrows;
    for (const auto& a : plus->automorphisms[i]) {
      auto image = compose(phi, compose(reduct_morphism(a, sigma), phi_inv));
      arrows.push_back(index_of(base->automorphisms[j], image.maps));
    }
    F.object_map.push_back(j);
    F.arrow_map.push_back(std::move(arrows));
  }
  return F;
}

FunctorData projection_functor(const Theory& T, const ExtensionStep& step, const Bound& bound) {
  auto base = std::make_shared<const BoundedModelCategory>(build_category(T, bound));
  auto plus = std::make_shared<const BoundedModelCategory>(
      build_category(extend_theory(T, step), extended_bound(step, bound)));
  return projection_functor(plus, base);
}

FunctorData compose(const FunctorData& G, const FunctorData& F) {
  if (F.target != G.source) {
    throw Error(ErrorKind::SignatureMismatch, "functors are not composable");
  }
  FunctorData H{F.source, G.target, {}, {}};
  for (std::size_t i = 0; i < F.object_map.size(); ++i) {
    int j = F.object_map[i];
    H.object_map.push_back(G.object_map[j]);
    std::vector<int> arrows;
    for (int a : F.arrow_map[i]) arrows.push_back(a < 0 ? -1 : G.arrow_map[j][a]);
    H.arrow_map.push_back(std::move(arrows));
  }
  return H;
}

FunctorCheck check_functor(const FunctorData& F, const std::optional<std::vector<bool>>& restrict_to) {
  const auto& S = *F.source;
  const auto& D = *F.target;
  FunctorCheck out;

  out.preserves_structure = true;
  for (std::size_t i = 0; i < S.objects.size(); ++i) {
    const auto& m = F.arrow_map[i];
    int j = F.object_map[i];
    if (j < 0 || m.empty() || m[0] != 0) {
      out.preserves_structure = false;
      continue;
    }
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::size_t b = 0; b < m.size(); ++b) {
        if (m[a] < 0 || m[b] < 0 || m[S.composition[i][a][b]] != D.composition[j][m[a]][m[b]]) {
          out.preserves_structure = false;
        }
      }
    }
  }

  out.faithful = true;
  out.full = true;
  for (std::size_t i = 0; i < S.objects.size(); ++i) {
    auto images = F.arrow_map[i];
    std::sort(images.begin(), images.end());
    if (std::adjacent_find(images.begin(), images.end()) != images.end()) out.faithful = false;
    images.erase(std::unique(images.begin(), images.end()), images.end());
    int j = F.object_map[i];
    if (j < 0 || images.size() != D.automorphisms[j].size() || images.front() < 0) {
      out.full = false;
    }
  }
  // Distinct objects have no arrows between them, but their common image has
  // its identity, which nothing hits.
  auto targets = F.object_map;
  std::sort(targets.begin(), targets.end());
  if (std::adjacent_find(targets.begin(), targets.end()) != targets.end()) out.full = false;

  out.essentially_surjective = true;
  for (std::size_t j = 0; j < D.objects.size(); ++j) {
    if (restrict_to && !(*restrict_to)[j]) continue;
    if (std::find(F.object_map.begin(), F.object_map.end(), static_cast<int>(j)) ==
        F.object_map.end()) {
      out.essentially_surjective = false;
    }
  }
  return out;
}

std::string describe(const FunctorCheck& c) {
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  std::ostringstream out;
  out << "full: " << yn(c.full) << "\nfaithful: " << yn(c.faithful)
      << "\nessentially surjective: " << yn(c.essentially_surjective)
      << "\nequivalence: " << yn(c.equivalence()) << "\n";
  return out.str();
}

bool is_discrete(const BoundedModelCategory& C) {
  return std::all_of(C.automorphisms.begin(), C.automorphisms.end(),
                     [](const auto& a) { return a.size() == 1; });
}

DiscreteVerdict discrete_equivalence_verdict(const BoundedModelCategory& C,
                                             const BoundedModelCategory& D) {
  if (!is_discrete(C) || !is_discrete(D)) {
    throw Error(ErrorKind::NotDiscrete, "category has a nontrivial automorphism");
  }
  return {C.objects.size() == D.objects.size(), C.objects.size(), D.objects.size(), C.bound};
}

std::string describe(const DiscreteVerdict& v) {
  std::ostringstream out;
  if (v.equivalent) {
    out << "EquivalentAtBound(" << v.bound.describe() << ")";
  } else {
    out << "NotEquivalentAtBound(" << v.bound.describe() << "): " << v.left_objects << " vs "
        << v.right_objects << " objects";
  }
  return out.str();
}

std::pair<Theory, Theory> truncated_discrete_pair(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidSignature, "truncation needs at least one predicate");
  std::ostringstream left, right;
  left << "sort s1\n";
  right << "sort s2\n";
  for (int i = 0; i < n; ++i) {
    left << "pred p" << i << " : s1\n";
    right << "pred q" << i << " : s2\n";
  }
  left << "axiom exists1 s1 x. x = x\n";
  right << "axiom exists1 s2 y. y = y\n";
  for (int i = 1; i < n; ++i) right << "axiom forall s2 y. q0(y) -> q" << i << "(y)\n";
  return {parse_theory(left.str()), parse_theory(right.str())};
}

std::string render(const BoundedModelCategory& C) {
  std::ostringstream out;
  out << "bound: " << C.bound.describe() << "\n";
  out << "objects: " << C.objects.size() << "\n";
  out << "arrows: " << C.arrow_count() << "\n";
  out << "automorphism group sizes:";
  for (const auto& a : C.automorphisms) out << " " << a.size();
  out << "\ndiscrete: " << (is_discrete(C) ? "yes" : "no") << "\n";
  return out.str();
}

}  // namespace morita
