#pragma once

// Many-sorted first-order syntax: signatures, terms, formulas, theories.
//
// Terms and formulas are immutable trees with shared children, so copies are
// cheap and values can be shared freely between threads.

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morita/error.hpp"

namespace morita {

struct PredicateDecl {
  std::string name;
  std::vector<std::string> arity;

  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct FunctionDecl {
  std::string name;
  std::vector<std::string> domain;
  std::string codomain;

  friend bool operator==(const FunctionDecl&, const FunctionDecl&) = default;
};

struct ConstantDecl {
  std::string name;
  std::string sort;

  friend bool operator==(const ConstantDecl&, const ConstantDecl&) = default;
};

enum class SymbolKind { Sort, Predicate, Function, Constant };

/// Declarations in insertion order. Symbol ids are positions within each kind.
class Signature {
 public:
  Signature() = default;

  void add_sort(std::string name);
  void add_predicate(PredicateDecl decl);
  void add_function(FunctionDecl decl);
  void add_constant(ConstantDecl decl);

  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<PredicateDecl>& predicates() const { return predicates_; }
  const std::vector<FunctionDecl>& functions() const { return functions_; }
  const std::vector<ConstantDecl>& constants() const { return constants_; }

  std::optional<int> sort_id(std::string_view name) const;
  std::optional<int> predicate_id(std::string_view name) const;
  std::optional<int> function_id(std::string_view name) const;
  std::optional<int> constant_id(std::string_view name) const;
  std::optional<SymbolKind> kind_of(std::string_view name) const;

  bool has_sort(std::string_view name) const { return sort_id(name).has_value(); }
  bool has_symbol(std::string_view name) const { return kind_of(name).has_value(); }

  /// True iff every declaration of `other` occurs here with the same arity.
  bool contains(const Signature& other) const;
  /// Same declarations regardless of order.
  bool same_symbols(const Signature& other) const;

  /// Throws InvalidSignature when there is no sort.
  void require_nonempty() const;

  friend bool operator==(const Signature& a, const Signature& b);

 private:
  std::optional<int> lookup(std::string_view name, SymbolKind kind) const;
  void claim(const std::string& name, SymbolKind kind, int id);
  void require_sort(const std::string& sort, const std::string& owner) const;

  std::vector<std::string> sorts_;
  std::vector<PredicateDecl> predicates_;
  std::vector<FunctionDecl> functions_;
  std::vector<ConstantDecl> constants_;
  std::unordered_map<std::string, std::pair<SymbolKind, int>> index_;
};

/// A variable is a (name, sort) pair; equal names with different sorts are
/// different variables.
struct Variable {
  std::string name;
  std::string sort;

  friend auto operator<=>(const Variable&, const Variable&) = default;
};

class Term {
 public:
  enum class Kind { Var, Const, App };

  static Term var(Variable v);
  static Term var(std::string name, std::string sort);
  static Term constant(std::string name);
  static Term apply(std::string function, std::vector<Term> args);

  Kind kind() const;
  const Variable& variable() const;
  const std::string& symbol() const;
  const std::vector<Term>& args() const;

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class Formula {
 public:
  // ExistsUnique is the ∃=1 abbreviation. It only survives until
  // expand_unique_exists; evaluators and the translator reject it.
  enum class Kind { Eq, Pred, Not, And, Or, Implies, Iff, Forall, Exists, ExistsUnique };

  static Formula eq(Term lhs, Term rhs);
  static Formula pred(std::string name, std::vector<Term> args);
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula forall(Variable v, Formula body);
  static Formula exists(Variable v, Formula body);
  static Formula exists_unique(Variable v, Formula body);
  static Formula binary(Kind kind, Formula a, Formula b);
  static Formula quantified(Kind kind, Variable v, Formula body);

  /// Left-nested conjunction; requires at least one conjunct.
  static Formula conj_all(const std::vector<Formula>& parts);

  Kind kind() const;
  /// Eq: the two sides. Pred: the arguments.
  const std::vector<Term>& terms() const;
  /// Predicate name.
  const std::string& symbol() const;
  /// Not: one child. Binary connectives: two. Quantifiers: the body.
  const std::vector<Formula>& children() const;
  const Formula& lhs() const { return children()[0]; }
  const Formula& rhs() const { return children()[1]; }
  const Formula& body() const { return children()[0]; }
  const Variable& bound() const;

  bool is_binary() const;
  bool is_quantifier() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Theory {
  Signature signature;
  std::vector<Formula> axioms;

  friend bool operator==(const Theory&, const Theory&) = default;
};

// ---------------------------------------------------------------------------
// Reserved fresh-variable namespace: `_v0`, `_v1`, ...

bool is_reserved_name(std::string_view name);

class FreshNames {
 public:
  explicit FreshNames(int start = 0) : next_(start) {}

  /// A generator whose names do not occur anywhere in `f`.
  static FreshNames avoiding(const Formula& f);

  void avoid(const Formula& f);
  void avoid(const Term& t);
  void avoid(const Variable& v);

  Variable next(const std::string& sort);

 private:
  int next_;
};

// ---------------------------------------------------------------------------
// Sort checking.

using Context = std::set<Variable>;

/// Sort of `t`; every variable of `t` must be in `ctx`.
std::string sort_of_term(const Signature& sig, const Context& ctx, const Term& t);

/// Throws on the first error; variables free in `f` must be in `ctx`.
void check_formula(const Signature& sig, const Context& ctx, const Formula& f);

/// Well-formed closed formula over `sig`.
void check_sentence(const Signature& sig, const Formula& f);

/// Every axiom a sentence over the signature, which must have a sort.
void check_theory(const Theory& t);

// ---------------------------------------------------------------------------
// Traversals.

std::set<Variable> free_variables(const Formula& f);
std::set<Variable> variables_of(const Term& t);

/// Replaces each ∃=1 node by ∃y(φ(y) ∧ ∀z(φ(z) → y = z)) with z fresh.
Formula expand_unique_exists(const Formula& f);
Formula expand_unique_exists(const Formula& f, FreshNames& fresh);

bool contains_unique_exists(const Formula& f);

/// Capture-avoiding simultaneous substitution of free variables.
Formula substitute(const Formula& f, const std::map<Variable, Term>& subst, FreshNames& fresh);
Term substitute(const Term& t, const std::map<Variable, Term>& subst);

/// Structural equality up to renaming of bound variables.
bool alpha_equivalent(const Formula& a, const Formula& b);

/// Names of every predicate, function and constant symbol occurring in `f`.
std::set<std::string> symbols_of(const Formula& f);

/// Sorts of every variable (bound or free) occurring in `f`.
std::set<std::string> variable_sorts(const Formula& f);

std::size_t formula_size(const Formula& f);
int quantifier_depth(const Formula& f);

}  // namespace morita
