#pragma once

// Sort-indexed maps between finite structures.

#include <optional>
#include <string>
#include <vector>

#include "morita/extension.hpp"
#include "morita/structure.hpp"

namespace morita {

/// maps[s][i] is the target position of element i of the source's sort s;
/// sorts follow the source signature, looked up by name in the target.
struct Morphism {
  FiniteStructure source;
  FiniteStructure target;
  std::vector<std::vector<int>> maps;

  const std::vector<int>& map(std::string_view sort) const;
  Element operator()(const Element& e) const;

  friend bool operator==(const Morphism&, const Morphism&) = default;
};

Morphism identity(const FiniteStructure& A);
/// g after h. Throws SignatureMismatch unless h's target has g's source carriers.
Morphism compose(const Morphism& g, const Morphism& h);
/// Requires h bijective on every sort.
Morphism inverse(const Morphism& h);

/// Every sort is mapped into the target carrier of the same sort.
bool well_typed(const Morphism& h);
bool is_isomorphism(const Morphism& h);
/// For finite structures an elementary embedding is exactly an isomorphism:
/// sentences counting each carrier force bijectivity and atomic formulas
/// force preservation.
bool is_elementary_embedding(const Morphism& h);

/// All isomorphisms M -> N, in lexicographic order of their maps.
std::vector<Morphism> enumerate_isomorphisms(const FiniteStructure& M, const FiniteStructure& N);
std::optional<Morphism> find_isomorphism(const FiniteStructure& M, const FiniteStructure& N);
bool isomorphic(const FiniteStructure& M, const FiniteStructure& N);

/// Restriction to the sorts of `sig`, between the reducts.
Morphism reduct_morphism(const Morphism& h, const Signature& sig);

/// Extends h : M|base -> N|base to the sorts defined by `step`, using the
/// commuting conditions of each construction. Throws NotElementary when a
/// required witness is missing or not unique.
Morphism lift_morphism(const Morphism& h, const FiniteStructure& M, const FiniteStructure& N,
                       const ExtensionStep& step);

// Morphism files: one `map <sort>: e -> e'` line per source element, with
// element names as in model files.
std::string print_morphism(const Morphism& h);
Morphism parse_morphism(const FiniteStructure& source, const FiniteStructure& target,
                        std::string_view text, const std::string& file = {});

}  // namespace morita
