#pragma once

// Categories of bounded finite models with elementary embeddings as arrows.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "morita/enumerate.hpp"
#include "morita/extension.hpp"
#include "morita/morphism.hpp"

namespace morita {

/// One object per isomorphism class of models within the bound. Between
/// finite models every elementary embedding is an isomorphism, so the only
/// arrows are automorphisms.
struct BoundedModelCategory {
  Theory theory;
  Bound bound;
  std::vector<FiniteStructure> objects;
  std::vector<CanonicalForm> forms;
  /// automorphisms[i][0] is the identity of object i.
  std::vector<std::vector<Morphism>> automorphisms;
  /// composition[i][a][b] is the index of automorphisms[i][a] after [i][b].
  std::vector<std::vector<std::vector<int>>> composition;

  std::size_t arrow_count() const;
  /// Arrows from object i to object j.
  std::vector<Morphism> arrows(int i, int j) const;
  /// Object isomorphic to A, or -1.
  int find(const FiniteStructure& A) const;
};

BoundedModelCategory build_category(const Theory& T, const Bound& bound);

/// Identity and associativity laws of the composition tables.
bool satisfies_category_laws(const BoundedModelCategory& C);

struct FunctorData {
  std::shared_ptr<const BoundedModelCategory> source;
  std::shared_ptr<const BoundedModelCategory> target;
  std::vector<int> object_map;
  /// arrow_map[i][a]: index in the automorphisms of object_map[i].
  std::vector<std::vector<int>> arrow_map;
};

/// Reduct functor: M goes to the object isomorphic to M restricted to the
/// target signature, arrows through the chosen isomorphisms. Throws
/// BoundMismatch when the target bound differs on a shared sort.
FunctorData projection_functor(std::shared_ptr<const BoundedModelCategory> plus,
                               std::shared_ptr<const BoundedModelCategory> base);
/// Builds both categories: the base at `bound`, the extension at
/// extended_bound(step, bound).
FunctorData projection_functor(const Theory& T, const ExtensionStep& step, const Bound& bound);

FunctorData compose(const FunctorData& G, const FunctorData& F);

struct FunctorCheck {
  bool full = false;
  bool faithful = false;
  bool essentially_surjective = false;
  bool preserves_structure = false;

  bool equivalence() const { return full && faithful && essentially_surjective; }
};

/// When `restrict_to` is given, essential surjectivity is judged against the
/// target objects it marks.
FunctorCheck check_functor(const FunctorData& F,
                           const std::optional<std::vector<bool>>& restrict_to = std::nullopt);
std::string describe(const FunctorCheck& c);

/// Every automorphism group is trivial.
bool is_discrete(const BoundedModelCategory& C);

struct DiscreteVerdict {
  bool equivalent = false;
  std::size_t left_objects = 0;
  std::size_t right_objects = 0;
  Bound bound;
};

/// Throws NotDiscrete unless both categories are discrete.
DiscreteVerdict discrete_equivalence_verdict(const BoundedModelCategory& C,
                                             const BoundedModelCategory& D);
std::string describe(const DiscreteVerdict& v);

/// The pair of theories over predicates p0..p{n-1} and q0..q{n-1}: the first
/// says only that there is exactly one element, the second adds q0 -> qi for
/// every i.
std::pair<Theory, Theory> truncated_discrete_pair(int n);

std::string render(const BoundedModelCategory& C);

}  // namespace morita
