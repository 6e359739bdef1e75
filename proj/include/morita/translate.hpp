#pragma once

// Translation of extended-signature formulas back to the base signature.
//
// A code links each variable of a sort defined by the step to variables of
// base sorts: pi1(x)=y1 & pi2(x)=y2 for products, rho1(y)=x or rho2(y)=x for
// coproducts, i(x)=y for subsorts and eps(y)=x for quotients.

#include <string>
#include <vector>

#include "morita/extension.hpp"

namespace morita {

struct CodeEntry {
  enum class Kind { Product, Left, Right, Subsort, Quotient };
  Kind kind;
  Variable variable;
  /// Two for products, one otherwise.
  std::vector<Variable> links;

  friend bool operator==(const CodeEntry&, const CodeEntry&) = default;
};

/// No entries is the empty code, the tautology exists s x. x = x over the
/// first base sort.
struct Code {
  std::vector<CodeEntry> entries;

  bool empty() const { return entries.empty(); }
  /// Base-sorted link variables, in entry order.
  std::vector<Variable> links() const;

  friend bool operator==(const Code&, const Code&) = default;
};

/// Every code for `vars`: coproduct variables contribute a Left and a Right
/// alternative, so k of them give 2^k codes. Link variables come from `fresh`
/// left to right. Throws SortNotDefinedByStep.
std::vector<Code> codes_for(const std::vector<Variable>& vars, const ExtensionStep& step,
                            FreshNames& fresh);
std::vector<Code> codes_for(const std::vector<Variable>& vars, const ExtensionStep& step);

Formula code_formula(const Code& code, const ExtensionStep& step);

/// A base formula phi_t with: code -> (t = x <-> phi_t). When x has a new sort
/// the code must cover it and x itself does not occur in phi_t.
Formula translate_term(const Term& t, const Variable& x, const Code& code,
                       const ExtensionStep& step);

/// A base formula phi* with: code -> (phi <-> phi*). Throws CodeMismatch or
/// FreeVariableNotCovered.
Formula translate_formula(const Formula& f, const Code& code, const ExtensionStep& step);

/// translate_formula under the empty code.
Formula translate_sentence(const Formula& sentence, const ExtensionStep& step);

/// Translates through the steps from last to first.
Formula translate_through_chain(const Formula& sentence, const std::vector<ExtensionStep>& steps);

/// Removes the x = x and ~(x = x) atoms the translation introduces, folding
/// them through connectives and quantifiers.
Formula simplify(const Formula& f);

}  // namespace morita
