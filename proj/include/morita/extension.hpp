#pragma once

// Explicit definitions and extension steps.
//
// Defining formulas use fixed parameter names: x1..xn for the arguments of a
// predicate or function, y for the value of a function or constant, x for a
// subsort and x1, x2 for a quotient.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "morita/enumerate.hpp"
#include "morita/syntax.hpp"

namespace morita {

struct PredicateDef {
  std::string name;
  std::vector<std::string> arity;
  Formula formula;  // x1..xn
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> domain;
  std::string codomain;
  Formula formula;  // x1..xn, y
};

struct ConstantDef {
  std::string name;
  std::string sort;
  Formula formula;  // y
};

struct ProductSortDef {
  std::string sort;
  std::string left, right;
  std::string proj1, proj2;
};

struct CoproductSortDef {
  std::string sort;
  std::string left, right;
  std::string inj1, inj2;
};

struct SubsortDef {
  std::string sort;
  std::string parent;
  std::string inclusion;
  Formula formula;  // x
};

struct QuotientSortDef {
  std::string sort;
  std::string parent;
  std::string projection;
  Formula formula;  // x1, x2
};

using ExplicitDefinition = std::variant<PredicateDef, FunctionDef, ConstantDef, ProductSortDef,
                                        CoproductSortDef, SubsortDef, QuotientSortDef>;

/// Symbols a definition introduces, the new sort first.
std::vector<std::string> introduced_symbols(const ExplicitDefinition& d);
/// Free variables the defining formula may use, in parameter order.
std::vector<Variable> parameters(const ExplicitDefinition& d);
/// The defining formula, if the definition has one.
const Formula* defining_formula(const ExplicitDefinition& d);
bool defines_sort(const ExplicitDefinition& d);

/// A batch of definitions over one base signature. Construction never throws
/// on ill-formed batches; problems() lists what is wrong and derived() refuses
/// to produce a signature until the list is empty.
class ExtensionStep {
 public:
  ExtensionStep(Signature base, std::vector<ExplicitDefinition> definitions);

  const Signature& base() const { return *base_; }
  const std::shared_ptr<const Signature>& base_ptr() const { return base_; }
  const std::vector<ExplicitDefinition>& definitions() const { return definitions_; }

  const std::vector<std::string>& problems() const { return problems_; }
  bool well_formed() const { return problems_.empty(); }

  /// Throws InvalidStep when not well formed.
  const Signature& derived() const;
  const std::shared_ptr<const Signature>& derived_ptr() const;

  /// Sorts added by this step, in definition order.
  std::vector<std::string> new_sorts() const;
  /// The definition introducing `symbol`, or null.
  const ExplicitDefinition* definition_of(std::string_view symbol) const;

 private:
  std::shared_ptr<const Signature> base_;
  std::vector<ExplicitDefinition> definitions_;
  std::vector<std::string> problems_;
  std::shared_ptr<const Signature> derived_;
};

/// The defining sentence over the extended signature. The sentence of a sort
/// is shared by its sort and function symbols.
Formula definition_sentence(const ExplicitDefinition& d);
/// Base-signature sentences the theory must entail for `d` to be legitimate.
std::vector<Formula> admissibility_conditions(const ExplicitDefinition& d);

bool is_definitional(const ExtensionStep& s);

struct Finding {
  enum class Kind { Syntax, StepMismatch, Admitted, Checked, Refuted };
  Kind kind;
  std::string definition;
  std::string message;
  std::optional<Formula> condition;
  std::optional<Entailment> verdict;
};

struct ValidationReport {
  enum class Status { Valid, ValidUpToBound, Invalid };
  Status status = Status::Valid;
  Bound bound;
  std::vector<Finding> findings;
};

std::string to_string(ValidationReport::Status s);
std::string render(const ValidationReport& r);

/// Admissibility conditions that are axioms of T count as established; the
/// rest are checked by bounded search over models of T.
ValidationReport validate_step(const Theory& T, const ExtensionStep& s, const Bound& bound);

/// T together with the defining sentences of s, one per definition. Throws
/// StepMismatch or InvalidStep.
Theory extend_theory(const Theory& T, const ExtensionStep& s);

/// Caps for the extended signature that admit every expansion of a model of
/// the base within `bound`: products b1*b2, coproducts b1+b2, subsorts and
/// quotients the parent cap.
Bound extended_bound(const ExtensionStep& s, const Bound& bound);

// Extension files:
//   define pred p : s1 x s2 := <formula in x1, x2>
//   define func f : s1 x s2 -> s := <formula in x1, x2, y>
//   define const c : s := <formula in y>
//   define sort s = product s1 s2 with p1 p2
//   define sort s = coproduct s1 s2 with r1 r2
//   define sort s = subsort s1 with i where <formula in x>
//   define sort s = quotient s1 with e where <formula in x1, x2>
ExtensionStep parse_extension(const Signature& base, std::string_view text,
                              const std::string& file = {});
ExtensionStep load_extension(const Signature& base, const std::string& path);
std::string print_extension(const ExtensionStep& s);

}  // namespace morita
