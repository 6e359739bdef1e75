#include "morita/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>

namespace morita {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::FreeVariable: return "FreeVariable";
    case ErrorKind::DuplicateSymbol: return "DuplicateSymbol";
    case ErrorKind::InvalidSignature: return "InvalidSignature";
    case ErrorKind::MacroNotExpanded: return "MacroNotExpanded";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidStructure: return "InvalidStructure";
    case ErrorKind::NotSubsignature: return "NotSubsignature";
    case ErrorKind::NotElementary: return "NotElementary";
    case ErrorKind::InvalidStep: return "InvalidStep";
    case ErrorKind::StepMismatch: return "StepMismatch";
    case ErrorKind::AdmissibilityFailsInModel: return "AdmissibilityFailsInModel";
    case ErrorKind::SortNotDefinedByStep: return "SortNotDefinedByStep";
    case ErrorKind::CodeMismatch: return "CodeMismatch";
    case ErrorKind::FreeVariableNotCovered: return "FreeVariableNotCovered";
    case ErrorKind::BoundMismatch: return "BoundMismatch";
    case ErrorKind::NotDiscrete: return "NotDiscrete";
    case ErrorKind::SignatureMismatch: return "SignatureMismatch";
  }
  return "Error";
}

namespace {

std::string located(const std::string& file, int line, int column, const std::string& message) {
  std::string prefix = file.empty() ? std::string("<input>") : file;
  return prefix + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

}  // namespace

ParseError::ParseError(std::string file, int line, int column, const std::string& message)
    : Error(ErrorKind::ParseError, located(file, line, column, message)),
      file_(std::move(file)),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// Signature

std::optional<int> Signature::lookup(std::string_view name, SymbolKind kind) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end() || it->second.first != kind) return std::nullopt;
  return it->second.second;
}

std::optional<int> Signature::sort_id(std::string_view name) const {
  return lookup(name, SymbolKind::Sort);
}
std::optional<int> Signature::predicate_id(std::string_view name) const {
  return lookup(name, SymbolKind::Predicate);
}
std::optional<int> Signature::function_id(std::string_view name) const {
  return lookup(name, SymbolKind::Function);
}
std::optional<int> Signature::constant_id(std::string_view name) const {
  return lookup(name, SymbolKind::Constant);
}

std::optional<SymbolKind> Signature::kind_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second.first;
}

void Signature::claim(const std::string& name, SymbolKind kind, int id) {
  if (name.empty()) throw Error(ErrorKind::InvalidSignature, "empty symbol name");
  if (!index_.emplace(name, std::make_pair(kind, id)).second) {
    throw Error(ErrorKind::DuplicateSymbol, "symbol '" + name + "' declared twice");
  }
}

void Signature::require_sort(const std::string& sort, const std::string& owner) const {
  if (!has_sort(sort)) {
    throw Error(ErrorKind::UnknownSymbol,
                "unknown sort '" + sort + "' in declaration of '" + owner + "'");
  }
}

void Signature::add_sort(std::string name) {
  claim(name, SymbolKind::Sort, static_cast<int>(sorts_.size()));
  sorts_.push_back(std::move(name));
}

void Signature::add_predicate(PredicateDecl decl) {
  if (decl.arity.empty()) {
    throw Error(ErrorKind::InvalidSignature, "predicate '" + decl.name + "' needs an arity");
  }
  for (const auto& s : decl.arity) require_sort(s, decl.name);
  claim(decl.name, SymbolKind::Predicate, static_cast<int>(predicates_.size()));
  predicates_.push_back(std::move(decl));
}

void Signature::add_function(FunctionDecl decl) {
  if (decl.domain.empty()) {
    throw Error(ErrorKind::InvalidSignature,
                "function '" + decl.name + "' needs at least one argument sort");
  }
  for (const auto& s : decl.domain) require_sort(s, decl.name);
  require_sort(decl.codomain, decl.name);
  claim(decl.name, SymbolKind::Function, static_cast<int>(functions_.size()));
  functions_.push_back(std::move(decl));
}

void Signature::add_constant(ConstantDecl decl) {
  require_sort(decl.sort, decl.name);
  claim(decl.name, SymbolKind::Constant, static_cast<int>(constants_.size()));
  constants_.push_back(std::move(decl));
}

bool Signature::contains(const Signature& other) const {
  for (const auto& s : other.sorts_) {
    if (!has_sort(s)) return false;
  }
  for (const auto& p : other.predicates_) {
    auto id = predicate_id(p.name);
    if (!id || predicates_[*id] != p) return false;
  }
  for (const auto& f : other.functions_) {
    auto id = function_id(f.name);
    if (!id || functions_[*id] != f) return false;
  }
  for (const auto& c : other.constants_) {
    auto id = constant_id(c.name);
    if (!id || constants_[*id] != c) return false;
  }
  return true;
}

bool Signature::same_symbols(const Signature& other) const {
  return contains(other) && other.contains(*this);
}

void Signature::require_nonempty() const {
  if (sorts_.empty()) {
    throw Error(ErrorKind::InvalidSignature, "a signature must have at least one sort symbol");
  }
}

bool operator==(const Signature& a, const Signature& b) {
  return a.sorts_ == b.sorts_ && a.predicates_ == b.predicates_ &&
         a.functions_ == b.functions_ && a.constants_ == b.constants_;
}

// ---------------------------------------------------------------------------
// Terms

struct Term::Node {
  Kind kind;
  Variable var;
  std::string symbol;
  std::vector<Term> args;
};

Term Term::var(Variable v) {
  return Term(std::make_shared<const Node>(Node{Kind::Var, std::move(v), {}, {}}));
}

Term Term::var(std::string name, std::string sort) {
  return var(Variable{std::move(name), std::move(sort)});
}

Term Term::constant(std::string name) {
  return Term(std::make_shared<const Node>(Node{Kind::Const, {}, std::move(name), {}}));
}

Term Term::apply(std::string function, std::vector<Term> args) {
  return Term(std::make_shared<const Node>(
      Node{Kind::App, {}, std::move(function), std::move(args)}));
}

Term::Kind Term::kind() const { return node_->kind; }
const Variable& Term::variable() const { return node_->var; }
const std::string& Term::symbol() const { return node_->symbol; }
const std::vector<Term>& Term::args() const { return node_->args; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->kind != b.node_->kind) return false;
  switch (a.node_->kind) {
    case Term::Kind::Var: return a.node_->var == b.node_->var;
    case Term::Kind::Const: return a.node_->symbol == b.node_->symbol;
    case Term::Kind::App:
      return a.node_->symbol == b.node_->symbol && a.node_->args == b.node_->args;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Formulas

struct Formula::Node {
  Kind kind;
  std::vector<Term> terms;
  std::string symbol;
  std::vector<Formula> children;
  Variable bound;
};

Formula Formula::eq(Term lhs, Term rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Eq, {std::move(lhs), std::move(rhs)}, {}, {}, {}}));
}

Formula Formula::pred(std::string name, std::vector<Term> args) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Pred, std::move(args), std::move(name), {}, {}}));
}

Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, {}, {std::move(f)}, {}}));
}

Formula Formula::binary(Kind kind, Formula a, Formula b) {
  assert(kind == Kind::And || kind == Kind::Or || kind == Kind::Implies || kind == Kind::Iff);
  return Formula(
      std::make_shared<const Node>(Node{kind, {}, {}, {std::move(a), std::move(b)}, {}}));
}

Formula Formula::conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }
Formula Formula::implies(Formula a, Formula b) {
  return binary(Kind::Implies, std::move(a), std::move(b));
}
Formula Formula::iff(Formula a, Formula b) { return binary(Kind::Iff, std::move(a), std::move(b)); }

Formula Formula::quantified(Kind kind, Variable v, Formula body) {
  assert(kind == Kind::Forall || kind == Kind::Exists || kind == Kind::ExistsUnique);
  return Formula(
      std::make_shared<const Node>(Node{kind, {}, {}, {std::move(body)}, std::move(v)}));
}

Formula Formula::forall(Variable v, Formula body) {
  return quantified(Kind::Forall, std::move(v), std::move(body));
}
Formula Formula::exists(Variable v, Formula body) {
  return quantified(Kind::Exists, std::move(v), std::move(body));
}
Formula Formula::exists_unique(Variable v, Formula body) {
  return quantified(Kind::ExistsUnique, std::move(v), std::move(body));
}

Formula Formula::conj_all(const std::vector<Formula>& parts) {
  assert(!parts.empty());
  Formula result = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) result = conj(result, parts[i]);
  return result;
}

Formula::Kind Formula::kind() const { return node_->kind; }
const std::vector<Term>& Formula::terms() const { return node_->terms; }
const std::string& Formula::symbol() const { return node_->symbol; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
const Variable& Formula::bound() const { return node_->bound; }

bool Formula::is_binary() const {
  auto k = node_->kind;
  return k == Kind::And || k == Kind::Or || k == Kind::Implies || k == Kind::Iff;
}

bool Formula::is_quantifier() const {
  auto k = node_->kind;
  return k == Kind::Forall || k == Kind::Exists || k == Kind::ExistsUnique;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.symbol == y.symbol && x.bound == y.bound && x.terms == y.terms &&
         x.children == y.children;
}

// ---------------------------------------------------------------------------
// Fresh names

bool is_reserved_name(std::string_view name) {
  if (name.size() < 3 || name[0] != '_' || name[1] != 'v') return false;
  return std::all_of(name.begin() + 2, name.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void FreshNames::avoid(const Variable& v) {
  if (!is_reserved_name(v.name)) return;
  int index = 0;
  auto digits = std::string_view(v.name).substr(2);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec == std::errc()) next_ = std::max(next_, index + 1);
}

void FreshNames::avoid(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: avoid(t.variable()); break;
    case Term::Kind::Const: break;
    case Term::Kind::App:
      for (const auto& a : t.args()) avoid(a);
      break;
  }
}

void FreshNames::avoid(const Formula& f) {
  for (const auto& t : f.terms()) avoid(t);
  if (f.is_quantifier()) avoid(f.bound());
  for (const auto& c : f.children()) avoid(c);
}

FreshNames FreshNames::avoiding(const Formula& f) {
  FreshNames fresh;
  fresh.avoid(f);
  return fresh;
}

Variable FreshNames::next(const std::string& sort) {
  return Variable{"_v" + std::to_string(next_++), sort};
}

// ---------------------------------------------------------------------------
// Sort checking

std::string sort_of_term(const Signature& sig, const Context& ctx, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      const auto& v = t.variable();
      if (!sig.has_sort(v.sort)) {
        throw Error(ErrorKind::UnknownSymbol,
                    "variable '" + v.name + "' has unknown sort '" + v.sort + "'");
      }
      if (!ctx.contains(v)) {
        throw Error(ErrorKind::FreeVariable, "variable '" + v.name + "' is not bound");
      }
      return v.sort;
    }
    case Term::Kind::Const: {
      auto id = sig.constant_id(t.symbol());
      if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown constant '" + t.symbol() + "'");
      return sig.constants()[*id].sort;
    }
    case Term::Kind::App: {
      auto id = sig.function_id(t.symbol());
      if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown function '" + t.symbol() + "'");
      const auto& decl = sig.functions()[*id];
      if (decl.domain.size() != t.args().size()) {
        throw Error(ErrorKind::ArityMismatch,
                    "function '" + decl.name + "' expects " + std::to_string(decl.domain.size()) +
                        " arguments, got " + std::to_string(t.args().size()));
      }
      for (std::size_t i = 0; i < decl.domain.size(); ++i) {
        auto s = sort_of_term(sig, ctx, t.args()[i]);
        if (s != decl.domain[i]) {
          throw Error(ErrorKind::SortMismatch, "argument " + std::to_string(i + 1) + " of '" +
                                                   decl.name + "' has sort '" + s +
                                                   "', expected '" + decl.domain[i] + "'");
        }
      }
      return decl.codomain;
    }
  }
  return {};
}

void check_formula(const Signature& sig, const Context& ctx, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Eq: {
      auto a = sort_of_term(sig, ctx, f.terms()[0]);
      auto b = sort_of_term(sig, ctx, f.terms()[1]);
      if (a != b) {
        throw Error(ErrorKind::SortMismatch,
                    "equation between sorts '" + a + "' and '" + b + "'");
      }
      return;
    }
    case K::Pred: {
      auto id = sig.predicate_id(f.symbol());
      if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown predicate '" + f.symbol() + "'");
      const auto& decl = sig.predicates()[*id];
      if (decl.arity.size() != f.terms().size()) {
        throw Error(ErrorKind::ArityMismatch,
                    "predicate '" + decl.name + "' expects " + std::to_string(decl.arity.size()) +
                        " arguments, got " + std::to_string(f.terms().size()));
      }
      for (std::size_t i = 0; i < decl.arity.size(); ++i) {
        auto s = sort_of_term(sig, ctx, f.terms()[i]);
        if (s != decl.arity[i]) {
          throw Error(ErrorKind::SortMismatch, "argument " + std::to_string(i + 1) + " of '" +
                                                   decl.name + "' has sort '" + s +
                                                   "', expected '" + decl.arity[i] + "'");
        }
      }
      return;
    }
    case K::Not: check_formula(sig, ctx, f.body()); return;
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
      check_formula(sig, ctx, f.lhs());
      check_formula(sig, ctx, f.rhs());
      return;
    case K::Forall:
    case K::Exists:
    case K::ExistsUnique: {
      const auto& v = f.bound();
      if (!sig.has_sort(v.sort)) {
        throw Error(ErrorKind::UnknownSymbol,
                    "quantified variable '" + v.name + "' has unknown sort '" + v.sort + "'");
      }
      Context inner = ctx;
      inner.insert(v);
      check_formula(sig, inner, f.body());
      return;
    }
  }
}

void check_sentence(const Signature& sig, const Formula& f) { check_formula(sig, {}, f); }

void check_theory(const Theory& t) {
  t.signature.require_nonempty();
  for (const auto& a : t.axioms) check_sentence(t.signature, a);
}

// ---------------------------------------------------------------------------
// Traversals

namespace {

void collect_term_vars(const Term& t, std::set<Variable>& out) {
  switch (t.kind()) {
    case Term::Kind::Var: out.insert(t.variable()); break;
    case Term::Kind::Const: break;
    case Term::Kind::App:
      for (const auto& a : t.args()) collect_term_vars(a, out);
      break;
  }
}

void collect_free(const Formula& f, std::set<Variable>& out) {
  if (f.is_quantifier()) {
    std::set<Variable> inner;
    collect_free(f.body(), inner);
    inner.erase(f.bound());
    out.insert(inner.begin(), inner.end());
    return;
  }
  for (const auto& t : f.terms()) collect_term_vars(t, out);
  for (const auto& c : f.children()) collect_free(c, out);
}

}  // namespace

std::set<Variable> variables_of(const Term& t) {
  std::set<Variable> out;
  collect_term_vars(t, out);
  return out;
}

std::set<Variable> free_variables(const Formula& f) {
  std::set<Variable> out;
  collect_free(f, out);
  return out;
}

Term substitute(const Term& t, const std::map<Variable, Term>& subst) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = subst.find(t.variable());
      return it == subst.end() ? t : it->second;
    }
    case Term::Kind::Const: return t;
    case Term::Kind::App: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(substitute(a, subst));
      return Term::apply(t.symbol(), std::move(args));
    }
  }
  return t;
}

Formula substitute(const Formula& f, const std::map<Variable, Term>& subst, FreshNames& fresh) {
  using K = Formula::Kind;
  if (subst.empty()) return f;
  switch (f.kind()) {
    case K::Eq: return Formula::eq(substitute(f.terms()[0], subst), substitute(f.terms()[1], subst));
    case K::Pred: {
      std::vector<Term> args;
      for (const auto& a : f.terms()) args.push_back(substitute(a, subst));
      return Formula::pred(f.symbol(), std::move(args));
    }
    case K::Not: return Formula::negation(substitute(f.body(), subst, fresh));
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
      return Formula::binary(f.kind(), substitute(f.lhs(), subst, fresh),
                             substitute(f.rhs(), subst, fresh));
    case K::Forall:
    case K::Exists:
    case K::ExistsUnique: {
      const Variable& v = f.bound();
      std::map<Variable, Term> inner = subst;
      inner.erase(v);
      auto body_free = free_variables(f.body());
      bool captures = false;
      for (auto it = inner.begin(); it != inner.end();) {
        if (!body_free.contains(it->first)) {
          it = inner.erase(it);
          continue;
        }
        if (variables_of(it->second).contains(v)) captures = true;
        ++it;
      }
      if (inner.empty()) return f;
      if (!captures) return Formula::quantified(f.kind(), v, substitute(f.body(), inner, fresh));
      Variable renamed = fresh.next(v.sort);
      inner.emplace(v, Term::var(renamed));
      return Formula::quantified(f.kind(), renamed, substitute(f.body(), inner, fresh));
    }
  }
  return f;
}

bool contains_unique_exists(const Formula& f) {
  if (f.kind() == Formula::Kind::ExistsUnique) return true;
  return std::any_of(f.children().begin(), f.children().end(),
                     [](const Formula& c) { return contains_unique_exists(c); });
}

Formula expand_unique_exists(const Formula& f, FreshNames& fresh) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Eq:
    case K::Pred: return f;
    case K::Not: return Formula::negation(expand_unique_exists(f.body(), fresh));
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff:
      return Formula::binary(f.kind(), expand_unique_exists(f.lhs(), fresh),
                             expand_unique_exists(f.rhs(), fresh));
    case K::Forall:
    case K::Exists:
      return Formula::quantified(f.kind(), f.bound(), expand_unique_exists(f.body(), fresh));
    case K::ExistsUnique: {
      const Variable& y = f.bound();
      Formula body = expand_unique_exists(f.body(), fresh);
      Variable z = fresh.next(y.sort);
      Formula at_z = substitute(body, {{y, Term::var(z)}}, fresh);
      Formula unique =
          Formula::forall(z, Formula::implies(at_z, Formula::eq(Term::var(y), Term::var(z))));
      return Formula::exists(y, Formula::conj(body, unique));
    }
  }
  return f;
}

Formula expand_unique_exists(const Formula& f) {
  if (!contains_unique_exists(f)) return f;
  FreshNames fresh = FreshNames::avoiding(f);
  return expand_unique_exists(f, fresh);
}

namespace {

using BoundPairs = std::vector<std::pair<Variable, Variable>>;

bool alpha_terms(const Term& a, const Term& b, const BoundPairs& env) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool left = it->first == a.variable();
        bool right = it->second == b.variable();
        if (left || right) return left && right;
      }
      return a.variable() == b.variable();
    }
    case Term::Kind::Const: return a.symbol() == b.symbol();
    case Term::Kind::App: {
      if (a.symbol() != b.symbol() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (!alpha_terms(a.args()[i], b.args()[i], env)) return false;
      }
      return true;
    }
  }
  return false;
}

bool alpha_formulas(const Formula& a, const Formula& b, BoundPairs& env) {
  if (a.kind() != b.kind()) return false;
  if (a.symbol() != b.symbol() || a.terms().size() != b.terms().size()) return false;
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    if (!alpha_terms(a.terms()[i], b.terms()[i], env)) return false;
  }
  if (a.is_quantifier()) {
    if (a.bound().sort != b.bound().sort) return false;
    env.emplace_back(a.bound(), b.bound());
    bool same = alpha_formulas(a.body(), b.body(), env);
    env.pop_back();
    return same;
  }
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!alpha_formulas(a.children()[i], b.children()[i], env)) return false;
  }
  return true;
}

void collect_symbols(const Term& t, std::set<std::string>& out) {
  if (t.kind() == Term::Kind::Var) return;
  out.insert(t.symbol());
  for (const auto& a : t.args()) collect_symbols(a, out);
}

}  // namespace

bool alpha_equivalent(const Formula& a, const Formula& b) {
  BoundPairs env;
  return alpha_formulas(a, b, env);
}

std::set<std::string> symbols_of(const Formula& f) {
  std::set<std::string> out;
  if (f.kind() == Formula::Kind::Pred) out.insert(f.symbol());
  for (const auto& t : f.terms()) collect_symbols(t, out);
  for (const auto& c : f.children()) {
    auto inner = symbols_of(c);
    out.insert(inner.begin(), inner.end());
  }
  return out;
}

std::set<std::string> variable_sorts(const Formula& f) {
  std::set<std::string> out;
  for (const auto& t : f.terms()) {
    for (const auto& v : variables_of(t)) out.insert(v.sort);
  }
  if (f.is_quantifier()) out.insert(f.bound().sort);
  for (const auto& c : f.children()) {
    auto inner = variable_sorts(c);
    out.insert(inner.begin(), inner.end());
  }
  return out;
}

std::size_t formula_size(const Formula& f) {
  std::size_t n = 1 + f.terms().size();
  for (const auto& c : f.children()) n += formula_size(c);
  return n;
}

int quantifier_depth(const Formula& f) {
  int inner = 0;
  for (const auto& c : f.children()) inner = std::max(inner, quantifier_depth(c));
  return inner + (f.is_quantifier() ? 1 : 0);
}

}  // namespace morita
