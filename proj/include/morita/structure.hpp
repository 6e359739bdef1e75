#pragma once

// Finite many-sorted structures and Tarski satisfaction.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "morita/syntax.hpp"

namespace morita {

/// A carrier element. Every element knows its sort, so carriers of distinct
/// sorts never share an element.
class Element {
 public:
  enum class Kind : std::uint8_t { Atom, Pair, InjL, InjR, Sub, Class };

  static Element atom(std::string sort, int index);
  static Element pair(std::string sort, Element first, Element second);
  static Element inj_left(std::string sort, Element value);
  static Element inj_right(std::string sort, Element value);
  static Element sub(std::string sort, Element value);
  /// `representative` is the least member of the class.
  static Element cls(std::string sort, Element representative);

  Kind kind() const { return kind_; }
  const std::string& sort() const { return sort_; }
  /// Atom only.
  int index() const { return index_; }
  /// Pair: two parts. InjL, InjR, Sub, Class: one.
  const std::vector<Element>& parts() const;
  const Element& first() const { return parts()[0]; }
  const Element& second() const { return parts()[1]; }

  /// Kind, then sort, then index or parts.
  friend std::strong_ordering operator<=>(const Element& a, const Element& b);
  friend bool operator==(const Element& a, const Element& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  Element(Kind kind, std::string sort, int index, std::vector<Element> parts);

  Kind kind_ = Kind::Atom;
  int index_ = 0;
  std::string sort_;
  std::shared_ptr<const std::vector<Element>> parts_;
};

using Assignment = std::map<Variable, Element>;

/// Interpretation of a signature over finite carriers. Elements are referred
/// to by their position in the carrier of their sort; tables are row-major
/// over argument positions.
class FiniteStructure {
 public:
  FiniteStructure(std::shared_ptr<const Signature> sig, std::vector<std::vector<Element>> carriers,
                  std::vector<std::vector<std::uint8_t>> predicates,
                  std::vector<std::vector<int>> functions, std::vector<int> constants);

  const Signature& signature() const { return *sig_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }

  int size(int sort) const { return static_cast<int>(carriers_[sort].size()); }
  int size(std::string_view sort) const;
  std::vector<int> sizes() const;
  const std::vector<Element>& carrier(int sort) const { return carriers_[sort]; }
  const std::vector<Element>& carrier(std::string_view sort) const;
  /// Position of `e` in the carrier of `sort`, or -1.
  int index_of(int sort, const Element& e) const;
  int index_of(const Element& e) const;

  bool holds(int predicate, std::span<const int> args) const;
  int apply(int function, std::span<const int> args) const;
  int constant(int c) const { return constants_[c]; }

  const std::vector<std::uint8_t>& predicate_table(int p) const { return predicates_[p]; }
  const std::vector<int>& function_table(int f) const { return functions_[f]; }
  const std::vector<int>& constant_table() const { return constants_; }

  /// Row-major cell number of an argument tuple.
  std::size_t predicate_cell(int p, std::span<const int> args) const;
  std::size_t function_cell(int f, std::span<const int> args) const;

  /// Element-level accessors.
  bool holds(const std::string& predicate, const std::vector<Element>& args) const;
  Element apply(const std::string& function, const std::vector<Element>& args) const;
  Element constant(const std::string& name) const;

  friend bool operator==(const FiniteStructure& a, const FiniteStructure& b);

 private:
  static std::size_t cell(const std::vector<int>& dims, std::span<const int> args);
  std::vector<int> indices(const std::vector<std::string>& sorts,
                           const std::vector<Element>& args) const;

  std::shared_ptr<const Signature> sig_;
  std::vector<std::vector<Element>> carriers_;
  std::vector<std::map<Element, int>> positions_;
  std::vector<std::vector<std::uint8_t>> predicates_;
  std::vector<std::vector<int>> functions_;
  std::vector<int> constants_;
  std::vector<std::vector<int>> predicate_dims_;
  std::vector<std::vector<int>> function_dims_;
};

/// Incremental construction by element. Every function cell and constant must
/// be set before build().
class StructureBuilder {
 public:
  explicit StructureBuilder(std::shared_ptr<const Signature> sig);
  explicit StructureBuilder(const Signature& sig);

  /// Carrier of `sort` made of Atom(sort, 0..n-1).
  void set_atoms(const std::string& sort, int n);
  void set_carrier(const std::string& sort, std::vector<Element> elements);

  void set_predicate(const std::string& p, const std::vector<Element>& args, bool value = true);
  void set_function(const std::string& f, const std::vector<Element>& args, const Element& value);
  void set_constant(const std::string& c, const Element& value);

  // Index-level setters; indices refer to carrier positions.
  void set_predicate(int p, std::span<const int> args, bool value = true);
  void set_function(int f, std::span<const int> args, int value);
  void set_constant(int c, int value);

  const Signature& signature() const { return *sig_; }
  int size(const std::string& sort) const;
  const std::vector<Element>& carrier(const std::string& sort) const;

  FiniteStructure build() const;

 private:
  void require_carriers() const;
  int sort_index(const std::string& sort) const;
  int position(int sort, const Element& e) const;
  std::size_t cell(const std::vector<std::string>& sorts, std::span<const int> args) const;
  void allocate();

  std::shared_ptr<const Signature> sig_;
  std::vector<std::vector<Element>> carriers_;
  std::vector<bool> carrier_set_;
  std::vector<std::map<Element, int>> positions_;
  bool allocated_ = false;
  std::vector<std::vector<std::uint8_t>> predicates_;
  std::vector<std::vector<int>> functions_;
  std::vector<int> constants_;
};

/// A formula compiled against a signature for repeated evaluation. Free
/// variables are supplied as carrier positions in `free_order`.
class Evaluator {
 public:
  Evaluator(const Signature& sig, const Formula& f, std::vector<Variable> free_order = {});
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;
  Evaluator& operator=(Evaluator&&) noexcept;

  bool operator()(const FiniteStructure& A, std::span<const int> free_values = {}) const;
  const std::vector<Variable>& free_order() const { return free_order_; }

 private:
  struct Program;
  std::unique_ptr<Program> program_;
  std::vector<Variable> free_order_;
};

/// Compiled term evaluation; returns the carrier position of the value.
class TermEvaluator {
 public:
  TermEvaluator(const Signature& sig, const Term& t, std::vector<Variable> free_order);
  ~TermEvaluator();
  TermEvaluator(TermEvaluator&&) noexcept;

  int operator()(const FiniteStructure& A, std::span<const int> free_values) const;

 private:
  struct Program;
  std::unique_ptr<Program> program_;
};

Element eval_term(const FiniteStructure& A, const Term& t, const Assignment& rho);
bool satisfies(const FiniteStructure& A, const Formula& f, const Assignment& rho = {});
/// Requires T's signature to be contained in A's.
bool is_model(const FiniteStructure& A, const Theory& T);
/// First axiom of T failing in A.
std::optional<Formula> failing_axiom(const FiniteStructure& A, const Theory& T);

/// Forgets the symbols outside `sig`; the result has exactly signature `sig`.
FiniteStructure reduct(const FiniteStructure& A, const Signature& sig);

// Model files:
//   carrier s = {e0, e1}
//   pred p = {(e0), (e1)}
//   func f = {(e0) -> e1, (e1) -> e0}
//   const c = e0
// Composite elements print as pair(a,b), inl(a), inr(b), sub(a), class(a).
std::string print_model(const FiniteStructure& A);
FiniteStructure parse_model(const Signature& sig, std::string_view text,
                            const std::string& file = {});
/// Model-file name of an element of `A`.
std::string element_name(const FiniteStructure& A, const Element& e);

}  // namespace morita
