#pragma once

// Checking equivalence witnesses between theories.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "morita/category.hpp"
#include "morita/enumerate.hpp"
#include "morita/extension.hpp"

namespace morita {

struct LogicalEquivalence {
  /// Present iff inequivalent: a structure that models exactly one side.
  std::optional<FiniteStructure> separating;
  /// 0 when the separating structure models the left theory, 1 for the right.
  int models_side = 0;
  Bound bound;

  bool equivalent() const { return !separating; }
};

/// Throws SignatureMismatch unless both theories declare the same symbols.
/// The separating structure, if any, is a smallest one.
LogicalEquivalence bounded_logical_equivalence(const Theory& left, const Theory& right,
                                               const Bound& bound);
/// "EquivalentUpToBound(<bound>)" or "Inequivalent".
std::string describe(const LogicalEquivalence& e);

struct MoritaWitness {
  Theory left;
  Theory right;
  std::vector<ExtensionStep> left_chain;
  std::vector<ExtensionStep> right_chain;
  /// From the witness file, when given.
  std::optional<int> bound;
};

// Witness files, paths relative to the witness file:
//   theory left = t1.th
//   theory right = t2.th
//   chain left = a.ext b.ext
//   chain right = c.ext
//   bound = 3
MoritaWitness parse_witness(std::string_view text, const std::filesystem::path& dir,
                            const std::string& file = {});
MoritaWitness load_witness(const std::filesystem::path& path);

struct WitnessReport {
  enum class Status { VerifiedUpToBound, Failed };
  struct Step {
    std::string side;
    int index = 0;
    ValidationReport validation;
    bool definitional = false;
  };

  Status status = Status::Failed;
  Bound bound;
  bool definitional_check = false;
  std::vector<Step> steps;
  bool signatures_match = false;
  bool same_sorts = true;
  std::optional<LogicalEquivalence> logical;
  std::vector<std::string> failures;
};

const char* to_string(WitnessReport::Status s);

/// Validates each step at the bound propagated along its chain, compares the
/// final signatures and checks the final theories for logical equivalence
/// with every sort capped at `bound`.
WitnessReport verify_morita_witness(const MoritaWitness& w, int bound);
/// Additionally requires every step to be definitional and both theories to
/// have the same sorts.
WitnessReport verify_definitional_witness(const MoritaWitness& w, int bound);

std::string render(const WitnessReport& r);

struct ChainFunctors {
  struct Step {
    std::string side;
    int index = 0;
    FunctorCheck check;
    std::size_t source_objects = 0;
    std::size_t target_objects = 0;
  };
  std::vector<Step> steps;
  /// Projections from the common extension at the uniform bound onto each
  /// theory, judged against the models whose chain expansion fits the bound.
  FunctorCheck left;
  FunctorCheck right;
  std::size_t common_objects = 0;
  std::size_t left_objects = 0;
  std::size_t right_objects = 0;
  Bound bound;

  bool equivalent() const {
    return left.equivalence() && right.equivalence() && left.preserves_structure &&
           right.preserves_structure;
  }
};

/// The projection functor of every step at the propagated bound, and the
/// composed equivalence Mod(left) ~ Mod(right) through the common extension.
/// Requires the final theories to have the same symbols.
ChainFunctors check_chain_functors(const MoritaWitness& w, int bound);
std::string render(const ChainFunctors& c);

}  // namespace morita
