#pragma once

// Formulas compiled to index form, evaluated in Kleene three-valued logic so
// the same code serves complete structures and the enumerator's partial ones.
//
// A model type provides:
//   int size(int sort) const;
//   int pred(int p, const int* args) const;   // 0, 1, or kUnknown
//   int func(int f, const int* args) const;   // position or -1
//   int constant(int c) const;                // position or -1

#include <algorithm>
#include <vector>

#include "morita/structure.hpp"

namespace morita::detail {

inline constexpr int kFalse = 0;
inline constexpr int kTrue = 1;
inline constexpr int kUnknown = 2;
inline constexpr int kMaxArity = 16;

struct CTerm {
  Term::Kind kind;
  int id;  // slot, constant or function id
  std::vector<CTerm> args;
};

struct CFormula {
  Formula::Kind kind;
  int id = -1;    // predicate id
  int slot = -1;  // quantifier slot
  int sort = -1;  // quantifier sort
  std::vector<CTerm> terms;
  std::vector<CFormula> kids;
};

struct Compiled {
  CFormula root;
  int slots = 0;
};

class Compiler {
 public:
  explicit Compiler(const Signature& sig) : sig_(sig) {}

  Compiled compile(const Formula& f, const std::vector<Variable>& free_order) {
    scope_.clear();
    for (std::size_t i = 0; i < free_order.size(); ++i) {
      scope_.push_back({free_order[i], static_cast<int>(i)});
    }
    max_slot_ = static_cast<int>(free_order.size());
    Compiled out{formula(f, max_slot_), 0};
    out.slots = max_slot_;
    return out;
  }

  CTerm compile_term(const Term& t, const std::vector<Variable>& free_order, int* slots) {
    scope_.clear();
    for (std::size_t i = 0; i < free_order.size(); ++i) {
      scope_.push_back({free_order[i], static_cast<int>(i)});
    }
    *slots = static_cast<int>(free_order.size());
    return term(t);
  }

 private:
  CTerm term(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
          if (it->first == t.variable()) return CTerm{Term::Kind::Var, it->second, {}};
        }
        throw Error(ErrorKind::FreeVariable,
                    "variable '" + t.variable().name + "' has no value");
      }
      case Term::Kind::Const: {
        auto id = sig_.constant_id(t.symbol());
        if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown constant '" + t.symbol() + "'");
        return CTerm{Term::Kind::Const, *id, {}};
      }
      case Term::Kind::App: {
        auto id = sig_.function_id(t.symbol());
        if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown function '" + t.symbol() + "'");
        if (t.args().size() > static_cast<std::size_t>(kMaxArity)) {
          throw Error(ErrorKind::ArityMismatch, "arity too large");
        }
        CTerm out{Term::Kind::App, *id, {}};
        for (const auto& a : t.args()) out.args.push_back(term(a));
        return out;
      }
    }
    return {};
  }

  CFormula formula(const Formula& f, int next_slot) {
    using K = Formula::Kind;
    CFormula out;
    out.kind = f.kind();
    switch (f.kind()) {
      case K::Eq:
        out.terms = {term(f.terms()[0]), term(f.terms()[1])};
        return out;
      case K::Pred: {
        auto id = sig_.predicate_id(f.symbol());
        if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown predicate '" + f.symbol() + "'");
        if (f.terms().size() > static_cast<std::size_t>(kMaxArity)) {
          throw Error(ErrorKind::ArityMismatch, "arity too large");
        }
        out.id = *id;
        for (const auto& a : f.terms()) out.terms.push_back(term(a));
        return out;
      }
      case K::Not:
      case K::And:
      case K::Or:
      case K::Implies:
      case K::Iff:
        for (const auto& c : f.children()) out.kids.push_back(formula(c, next_slot));
        return out;
      case K::Forall:
      case K::Exists: {
        auto sort = sig_.sort_id(f.bound().sort);
        if (!sort) throw Error(ErrorKind::UnknownSymbol, "unknown sort '" + f.bound().sort + "'");
        out.sort = *sort;
        out.slot = next_slot;
        max_slot_ = std::max(max_slot_, next_slot + 1);
        scope_.push_back({f.bound(), next_slot});
        out.kids.push_back(formula(f.body(), next_slot + 1));
        scope_.pop_back();
        return out;
      }
      case K::ExistsUnique:
        throw Error(ErrorKind::MacroNotExpanded, "exists1 must be expanded before evaluation");
    }
    return out;
  }

  const Signature& sig_;
  std::vector<std::pair<Variable, int>> scope_;
  int max_slot_ = 0;
};

template <class Model>
int eval_term(const CTerm& t, const Model& m, const int* env) {
  switch (t.kind) {
    case Term::Kind::Var: return env[t.id];
    case Term::Kind::Const: return m.constant(t.id);
    case Term::Kind::App: {
      int args[kMaxArity];
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        args[i] = eval_term(t.args[i], m, env);
        if (args[i] < 0) return -1;
      }
      return m.func(t.id, args);
    }
  }
  return -1;
}

template <class Model>
int eval(const CFormula& f, const Model& m, int* env) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Eq: {
      int a = eval_term(f.terms[0], m, env);
      if (a < 0) return kUnknown;
      int b = eval_term(f.terms[1], m, env);
      if (b < 0) return kUnknown;
      return a == b ? kTrue : kFalse;
    }
    case K::Pred: {
      int args[kMaxArity];
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        args[i] = eval_term(f.terms[i], m, env);
        if (args[i] < 0) return kUnknown;
      }
      return m.pred(f.id, args);
    }
    case K::Not: {
      int v = eval(f.kids[0], m, env);
      return v == kUnknown ? kUnknown : 1 - v;
    }
    case K::And: {
      int a = eval(f.kids[0], m, env);
      if (a == kFalse) return kFalse;
      int b = eval(f.kids[1], m, env);
      if (b == kFalse) return kFalse;
      return a == kTrue && b == kTrue ? kTrue : kUnknown;
    }
    case K::Or: {
      int a = eval(f.kids[0], m, env);
      if (a == kTrue) return kTrue;
      int b = eval(f.kids[1], m, env);
      if (b == kTrue) return kTrue;
      return a == kFalse && b == kFalse ? kFalse : kUnknown;
    }
    case K::Implies: {
      int a = eval(f.kids[0], m, env);
      if (a == kFalse) return kTrue;
      int b = eval(f.kids[1], m, env);
      if (b == kTrue) return kTrue;
      return a == kTrue && b == kFalse ? kFalse : kUnknown;
    }
    case K::Iff: {
      int a = eval(f.kids[0], m, env);
      if (a == kUnknown) return kUnknown;
      int b = eval(f.kids[1], m, env);
      if (b == kUnknown) return kUnknown;
      return a == b ? kTrue : kFalse;
    }
    case K::Forall: {
      int n = m.size(f.sort);
      int result = kTrue;
      for (int v = 0; v < n; ++v) {
        env[f.slot] = v;
        int r = eval(f.kids[0], m, env);
        if (r == kFalse) return kFalse;
        if (r == kUnknown) result = kUnknown;
      }
      return result;
    }
    case K::Exists: {
      int n = m.size(f.sort);
      int result = kFalse;
      for (int v = 0; v < n; ++v) {
        env[f.slot] = v;
        int r = eval(f.kids[0], m, env);
        if (r == kTrue) return kTrue;
        if (r == kUnknown) result = kUnknown;
      }
      return result;
    }
    case K::ExistsUnique: break;
  }
  return kUnknown;
}

/// Adapter giving a complete structure the model interface.
class FullModel {
 public:
  explicit FullModel(const FiniteStructure& A) : A_(A) {}
  int size(int sort) const { return A_.size(sort); }
  int pred(int p, const int* args) const {
    const auto& arity = A_.signature().predicates()[p].arity;
    return A_.predicate_table(p)[A_.predicate_cell(p, std::span<const int>(args, arity.size()))];
  }
  int func(int f, const int* args) const {
    const auto& domain = A_.signature().functions()[f].domain;
    return A_.function_table(f)[A_.function_cell(f, std::span<const int>(args, domain.size()))];
  }
  int constant(int c) const { return A_.constant(c); }

 private:
  const FiniteStructure& A_;
};

}  // namespace morita::detail
