#pragma once

// Exhaustive finite model search up to isomorphism.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morita/structure.hpp"

namespace morita {

/// Per-sort carrier size caps: a default plus overrides.
class Bound {
 public:
  explicit Bound(int default_cap = 3);

  Bound& set(const std::string& sort, int cap);
  int cap(const std::string& sort) const;
  int default_cap() const { return default_cap_; }
  const std::map<std::string, int>& overrides() const { return overrides_; }

  /// "3", or "3 (s<=9, t<=6)" when there are overrides.
  std::string describe() const;

  friend bool operator==(const Bound&, const Bound&) = default;

 private:
  int default_cap_;
  std::map<std::string, int> overrides_;
};

/// Isomorphism-invariant encoding: two structures over the same signature are
/// isomorphic iff their forms are equal.
struct CanonicalForm {
  std::vector<int> sizes;
  std::vector<int> code;

  friend auto operator<=>(const CanonicalForm&, const CanonicalForm&) = default;
};

struct Canonization {
  CanonicalForm form;
  /// labeling[s][i] = canonical position of carrier element i of sort s.
  std::vector<std::vector<int>> labeling;
};

Canonization canonize(const FiniteStructure& A);
CanonicalForm canonical_form(const FiniteStructure& A);

/// Moves carrier element i of sort s to position perm[s][i].
FiniteStructure relabel(const FiniteStructure& A, const std::vector<std::vector<int>>& perm);

/// Return false to stop the enumeration.
using ModelVisitor = std::function<bool(const FiniteStructure&)>;

/// Every model of T with carrier sizes within `bound`, one per isomorphism
/// class. Size vectors are visited in lexicographic order (first sort most
/// significant); within a size vector models come in canonical-form order.
/// Carriers are Atom(s, 0..n-1).
void enumerate_models(const Theory& T, const Bound& bound, const ModelVisitor& visit);
std::vector<FiniteStructure> enumerate_models(const Theory& T, const Bound& bound);

/// Search statistics of the last enumeration on this thread.
struct EnumerationStats {
  long long nodes = 0;
  long long leaves = 0;
  long long emitted = 0;
};
EnumerationStats last_enumeration_stats();

struct Entailment {
  /// Present iff refuted: a model of the theory falsifying the sentence.
  std::optional<FiniteStructure> countermodel;
  Bound bound;

  bool refuted() const { return countermodel.has_value(); }
};

Entailment bounded_entails(const Theory& T, const Formula& sentence, const Bound& bound);
/// Same verdict against a precomputed list of all bounded models.
Entailment bounded_entails(const std::vector<FiniteStructure>& models, const Formula& sentence,
                           const Bound& bound);

/// "Refuted" or "NoCountermodelUpTo(<bound>)".
std::string describe(const Entailment& e);

}  // namespace morita
