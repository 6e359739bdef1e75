#include "morita/translate.hpp"

#include <map>

namespace morita {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

using EK = CodeEntry::Kind;
using Env = std::map<Variable, CodeEntry>;

Term v(const Variable& x) { return Term::var(x); }
Formula eq(const Variable& a, const Variable& b) { return Formula::eq(v(a), v(b)); }
Formula falsum(const Variable& y) { return Formula::negation(eq(y, y)); }

Formula exists_all(const std::vector<Variable>& vars, Formula body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = Formula::exists(*it, body);
  return body;
}

Formula quantify_all(Formula::Kind kind, const std::vector<Variable>& vars, Formula body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = Formula::quantified(kind, *it, body);
  return body;
}

const ExplicitDefinition& sort_definition(const ExtensionStep& step, const std::string& sort) {
  const ExplicitDefinition* d = step.definition_of(sort);
  if (!d || !defines_sort(*d) || introduced_symbols(*d).front() != sort) {
    throw Error(ErrorKind::SortNotDefinedByStep, "sort '" + sort + "' is not defined by the step");
  }
  return *d;
}

class Translator {
  using Entry = CodeEntry;

 public:
  Translator(const ExtensionStep& step, FreshNames fresh)
      : step_(step), base_(step.base()), sig_(step.derived()), fresh_(fresh) {
    for (const auto& d : step.definitions()) {
      if (const Formula* f = defining_formula(d)) fresh_.avoid(*f);
    }
  }

  Formula formula(const Formula& f, const Env& env) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::Eq: return equality(f.terms()[0], f.terms()[1], env);
      case K::Pred: return predicate(f, env);
      case K::Not: return Formula::negation(formula(f.body(), env));
      case K::And:
      case K::Or:
      case K::Implies:
      case K::Iff: return Formula::binary(f.kind(), formula(f.lhs(), env), formula(f.rhs(), env));
      case K::Forall:
      case K::Exists: return quantifier(f, env);
      case K::ExistsUnique:
        throw Error(ErrorKind::MacroNotExpanded, "exists1 must be expanded before translation");
    }
    return f;
  }

  Formula term(const Term& t, const Variable& x, const Env& env) {
    switch (t.kind()) {
      case Term::Kind::Var: return variable(t.variable(), x, env);
      case Term::Kind::Const: {
        const auto* d = step_.definition_of(t.symbol());
        if (!d) return Formula::eq(v(x), t);
        const auto& c = std::get<ConstantDef>(*d);
        return instantiate(c.formula, parameters(c), {v(x)});
      }
      case Term::Kind::App: return application(t, x, env);
    }
    return Formula::eq(v(x), t);
  }

  Entry entry_for(const Variable& x, const Env& env) {
    auto it = env.find(x);
    if (it == env.end()) {
      throw Error(ErrorKind::FreeVariableNotCovered,
                  "variable '" + x.name + "' of sort '" + x.sort + "' is not covered by the code");
    }
    return it->second;
  }

  /// Fresh entries for a new variable of a defined sort; coproducts give two.
  std::vector<CodeEntry> fresh_entries(const Variable& x) {
    const ExplicitDefinition& d = sort_definition(step_, x.sort);
    return std::visit(
        Overloaded{
            [&](const ProductSortDef& p) {
              Variable y1 = fresh_.next(p.left);
              Variable y2 = fresh_.next(p.right);
              return std::vector<CodeEntry>{{EK::Product, x, {y1, y2}}};
            },
            [&](const CoproductSortDef& p) {
              Variable y1 = fresh_.next(p.left);
              Variable y2 = fresh_.next(p.right);
              return std::vector<CodeEntry>{{EK::Left, x, {y1}}, {EK::Right, x, {y2}}};
            },
            [&](const SubsortDef& p) {
              return std::vector<CodeEntry>{{EK::Subsort, x, {fresh_.next(p.parent)}}};
            },
            [&](const QuotientSortDef& p) {
              return std::vector<CodeEntry>{{EK::Quotient, x, {fresh_.next(p.parent)}}};
            },
            [](const auto&) { return std::vector<CodeEntry>{}; },
        },
        d);
  }

 private:
  bool is_base(const std::string& sort) const { return base_.has_sort(sort); }

  std::string sort_of(const Term& t) const {
    switch (t.kind()) {
      case Term::Kind::Var: return t.variable().sort;
      case Term::Kind::Const: return sig_.constants()[*sig_.constant_id(t.symbol())].sort;
      case Term::Kind::App: return sig_.functions()[*sig_.function_id(t.symbol())].codomain;
    }
    return {};
  }

  Formula instantiate(const Formula& f, const std::vector<Variable>& params,
                      const std::vector<Term>& values) {
    std::map<Variable, Term> subst;
    for (std::size_t i = 0; i < params.size(); ++i) subst.emplace(params[i], values[i]);
    return substitute(f, subst, fresh_);
  }

  void require(const Entry& e, std::initializer_list<EK> kinds, const ExplicitDefinition& d) {
    for (EK k : kinds) {
      if (e.kind == k) {
        std::size_t want = k == EK::Product ? 2 : 1;
        if (e.links.size() == want) return;
      }
    }
    throw Error(ErrorKind::CodeMismatch, "code entry for '" + e.variable.name +
                                             "' does not match the definition of sort '" +
                                             introduced_symbols(d).front() + "'");
  }

  Formula variable(const Variable& u, const Variable& x, const Env& env) {
    if (is_base(u.sort)) return eq(x, u);
    Entry eu = entry_for(u, env);
    Entry ex = entry_for(x, env);
    const ExplicitDefinition& d = sort_definition(step_, u.sort);
    return std::visit(
        Overloaded{
            [&](const ProductSortDef&) {
              require(eu, {EK::Product}, d);
              require(ex, {EK::Product}, d);
              return Formula::conj(eq(ex.links[0], eu.links[0]), eq(ex.links[1], eu.links[1]));
            },
            [&](const CoproductSortDef&) {
              require(eu, {EK::Left, EK::Right}, d);
              require(ex, {EK::Left, EK::Right}, d);
              if (eu.kind != ex.kind) return falsum(ex.links[0]);
              return eq(ex.links[0], eu.links[0]);
            },
            [&](const SubsortDef&) {
              require(eu, {EK::Subsort}, d);
              require(ex, {EK::Subsort}, d);
              return eq(ex.links[0], eu.links[0]);
            },
            [&](const QuotientSortDef& q) {
              require(eu, {EK::Quotient}, d);
              require(ex, {EK::Quotient}, d);
              return instantiate(q.formula, parameters(q), {v(ex.links[0]), v(eu.links[0])});
            },
            [&](const auto&) -> Formula {
              throw Error(ErrorKind::SortNotDefinedByStep, "sort '" + u.sort + "' is not defined");
            },
        },
        d);
  }

  Formula application(const Term& t, const Variable& x, const Env& env) {
    const std::string& f = t.symbol();
    const ExplicitDefinition* d = step_.definition_of(f);
    if (!d || std::holds_alternative<FunctionDef>(*d)) {
      const auto& decl = sig_.functions()[*sig_.function_id(f)];
      std::vector<Variable> zs;
      std::vector<Formula> parts;
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        zs.push_back(fresh_.next(decl.domain[i]));
        parts.push_back(term(t.args()[i], zs.back(), env));
      }
      std::vector<Term> zt;
      for (const auto& z : zs) zt.push_back(v(z));
      if (!d) {
        parts.push_back(Formula::eq(Term::apply(f, zt), v(x)));
      } else {
        const auto& def = std::get<FunctionDef>(*d);
        zt.push_back(v(x));
        parts.push_back(instantiate(def.formula, parameters(def), zt));
      }
      return exists_all(zs, Formula::conj_all(parts));
    }
    const Term& arg = t.args().at(0);
    auto linked_variable = [&]() -> Entry {
      if (arg.kind() != Term::Kind::Var) {
        throw Error(ErrorKind::CodeMismatch, "argument of '" + f + "' must be a variable");
      }
      return entry_for(arg.variable(), env);
    };
    return std::visit(
        Overloaded{
            [&](const ProductSortDef& p) {
              Entry e = linked_variable();
              require(e, {EK::Product}, *d);
              return eq(e.links[f == p.proj1 ? 0 : 1], x);
            },
            [&](const SubsortDef&) {
              Entry e = linked_variable();
              require(e, {EK::Subsort}, *d);
              return eq(e.links[0], x);
            },
            [&](const QuotientSortDef& q) {
              Entry ex = entry_for(x, env);
              require(ex, {EK::Quotient}, *d);
              Variable z = fresh_.next(q.parent);
              Formula psi = instantiate(q.formula, parameters(q), {v(ex.links[0]), v(z)});
              return Formula::exists(z, Formula::conj(term(arg, z, env), psi));
            },
            [&](const CoproductSortDef& c) {
              Entry ex = entry_for(x, env);
              require(ex, {EK::Left, EK::Right}, *d);
              bool left = f == c.inj1;
              if ((ex.kind == EK::Left) != left) return falsum(ex.links[0]);
              Variable z = fresh_.next(left ? c.left : c.right);
              return Formula::exists(z, Formula::conj(term(arg, z, env), eq(ex.links[0], z)));
            },
            [&](const auto&) -> Formula {
              throw Error(ErrorKind::UnknownSymbol, "'" + f + "' is not a function");
            },
        },
        *d);
  }

  Formula equality(const Term& t, const Term& s, const Env& env) {
    std::string sort = sort_of(t);
    if (is_base(sort)) {
      Variable x = fresh_.next(sort);
      return Formula::exists(x, Formula::conj(term(t, x, env), term(s, x, env)));
    }
    Variable x = fresh_.next(sort);
    auto entries = fresh_entries(x);
    if (entries.size() == 1) {
      Env inner = env;
      inner.insert_or_assign(x, entries[0]);
      return exists_all(entries[0].links,
                        Formula::conj(term(t, x, inner), term(s, x, inner)));
    }
    Env left = env, right = env;
    left.insert_or_assign(x, entries[0]);
    right.insert_or_assign(x, entries[1]);
    Formula l = Formula::conj(term(t, x, left), term(s, x, left));
    Formula r = Formula::conj(term(t, x, right), term(s, x, right));
    return exists_all({entries[0].links[0], entries[1].links[0]}, Formula::disj(l, r));
  }

  Formula predicate(const Formula& f, const Env& env) {
    const auto& decl = sig_.predicates()[*sig_.predicate_id(f.symbol())];
    std::vector<Variable> zs;
    std::vector<Formula> parts;
    std::vector<Term> zt;
    for (std::size_t i = 0; i < f.terms().size(); ++i) {
      zs.push_back(fresh_.next(decl.arity[i]));
      zt.push_back(v(zs.back()));
      parts.push_back(term(f.terms()[i], zs.back(), env));
    }
    if (const auto* d = step_.definition_of(f.symbol())) {
      const auto& def = std::get<PredicateDef>(*d);
      parts.push_back(instantiate(def.formula, parameters(def), zt));
    } else {
      parts.push_back(Formula::pred(f.symbol(), zt));
    }
    return exists_all(zs, Formula::conj_all(parts));
  }

  Formula quantifier(const Formula& f, const Env& env) {
    const Variable& u = f.bound();
    bool universal = f.kind() == Formula::Kind::Forall;
    if (is_base(u.sort)) {
      return Formula::quantified(f.kind(), u, formula(f.body(), env));
    }
    auto entries = fresh_entries(u);
    const ExplicitDefinition& d = sort_definition(step_, u.sort);
    if (entries.size() == 2) {
      Env left = env, right = env;
      left.insert_or_assign(u, entries[0]);
      right.insert_or_assign(u, entries[1]);
      Formula l = formula(f.body(), left);
      Formula r = formula(f.body(), right);
      return quantify_all(f.kind(), {entries[0].links[0], entries[1].links[0]},
                          universal ? Formula::conj(l, r) : Formula::disj(l, r));
    }
    Env inner = env;
    inner.insert_or_assign(u, entries[0]);
    Formula body = formula(f.body(), inner);
    if (const auto* sub = std::get_if<SubsortDef>(&d)) {
      const Variable& y = entries[0].links[0];
      Formula guard = instantiate(sub->formula, parameters(*sub), {v(y)});
      return Formula::quantified(f.kind(), y,
                                 universal ? Formula::implies(guard, body)
                                           : Formula::conj(guard, body));
    }
    return quantify_all(f.kind(), entries[0].links, body);
  }

  const ExtensionStep& step_;
  const Signature& base_;
  const Signature& sig_;
  FreshNames fresh_;
};

Env env_of(const Code& code, const ExtensionStep& step) {
  Env env;
  for (const auto& e : code.entries) {
    const ExplicitDefinition& d = sort_definition(step, e.variable.sort);
    bool ok = std::visit(Overloaded{
                             [&](const ProductSortDef& p) {
                               return e.kind == EK::Product && e.links.size() == 2 &&
                                      e.links[0].sort == p.left && e.links[1].sort == p.right;
                             },
                             [&](const CoproductSortDef& p) {
                               return e.links.size() == 1 &&
                                      ((e.kind == EK::Left && e.links[0].sort == p.left) ||
                                       (e.kind == EK::Right && e.links[0].sort == p.right));
                             },
                             [&](const SubsortDef& p) {
                               return e.kind == EK::Subsort && e.links.size() == 1 &&
                                      e.links[0].sort == p.parent;
                             },
                             [&](const QuotientSortDef& p) {
                               return e.kind == EK::Quotient && e.links.size() == 1 &&
                                      e.links[0].sort == p.parent;
                             },
                             [](const auto&) { return false; },
                         },
                         d);
    if (!ok) {
      throw Error(ErrorKind::CodeMismatch,
                  "code entry for '" + e.variable.name + "' does not match its sort's definition");
    }
    env.insert_or_assign(e.variable, e);
  }
  return env;
}

FreshNames fresh_for(const Code& code) {
  FreshNames fresh;
  for (const auto& e : code.entries) {
    fresh.avoid(e.variable);
    for (const auto& y : e.links) fresh.avoid(y);
  }
  return fresh;
}

}  // namespace

std::vector<Variable> Code::links() const {
  std::vector<Variable> out;
  for (const auto& e : entries) out.insert(out.end(), e.links.begin(), e.links.end());
  return out;
}

std::vector<Code> codes_for(const std::vector<Variable>& vars, const ExtensionStep& step,
                            FreshNames& fresh) {
  std::vector<Code> codes{Code{}};
  for (const auto& x : vars) {
    const ExplicitDefinition& d = sort_definition(step, x.sort);
    std::vector<CodeEntry> options = std::visit(
        Overloaded{
            [&](const ProductSortDef& p) {
              Variable y1 = fresh.next(p.left);
              Variable y2 = fresh.next(p.right);
              return std::vector<CodeEntry>{{EK::Product, x, {y1, y2}}};
            },
            [&](const CoproductSortDef& p) {
              Variable y1 = fresh.next(p.left);
              Variable y2 = fresh.next(p.right);
              return std::vector<CodeEntry>{{EK::Left, x, {y1}}, {EK::Right, x, {y2}}};
            },
            [&](const SubsortDef& p) {
              return std::vector<CodeEntry>{{EK::Subsort, x, {fresh.next(p.parent)}}};
            },
            [&](const QuotientSortDef& p) {
              return std::vector<CodeEntry>{{EK::Quotient, x, {fresh.next(p.parent)}}};
            },
            [](const auto&) { return std::vector<CodeEntry>{}; },
        },
        d);
    std::vector<Code> next;
    for (const auto& c : codes) {
      for (const auto& e : options) {
        Code extended = c;
        extended.entries.push_back(e);
        next.push_back(std::move(extended));
      }
    }
    codes = std::move(next);
  }
  return codes;
}

std::vector<Code> codes_for(const std::vector<Variable>& vars, const ExtensionStep& step) {
  FreshNames fresh;
  for (const auto& x : vars) fresh.avoid(x);
  return codes_for(vars, step, fresh);
}

Formula code_formula(const Code& code, const ExtensionStep& step) {
  if (code.empty()) {
    Variable x{"x", step.base().sorts().front()};
    return Formula::exists(x, eq(x, x));
  }
  std::vector<Formula> parts;
  for (const auto& e : code.entries) {
    const ExplicitDefinition& d = sort_definition(step, e.variable.sort);
    Term x = v(e.variable);
    std::visit(Overloaded{
                   [&](const ProductSortDef& p) {
                     parts.push_back(Formula::eq(Term::apply(p.proj1, {x}), v(e.links.at(0))));
                     parts.push_back(Formula::eq(Term::apply(p.proj2, {x}), v(e.links.at(1))));
                   },
                   [&](const CoproductSortDef& p) {
                     const std::string& inj = e.kind == EK::Left ? p.inj1 : p.inj2;
                     parts.push_back(Formula::eq(Term::apply(inj, {v(e.links.at(0))}), x));
                   },
                   [&](const SubsortDef& p) {
                     parts.push_back(Formula::eq(Term::apply(p.inclusion, {x}), v(e.links.at(0))));
                   },
                   [&](const QuotientSortDef& p) {
                     parts.push_back(Formula::eq(Term::apply(p.projection, {v(e.links.at(0))}), x));
                   },
                   [](const auto&) {},
               },
               d);
  }
  return Formula::conj_all(parts);
}

Formula translate_term(const Term& t, const Variable& x, const Code& code,
                       const ExtensionStep& step) {
  FreshNames fresh = fresh_for(code);
  fresh.avoid(t);
  fresh.avoid(x);
  Translator tr(step, fresh);
  Env env = env_of(code, step);
  if (!step.base().has_sort(x.sort) && !env.contains(x)) {
    throw Error(ErrorKind::FreeVariableNotCovered, "result variable '" + x.name + "' has no code");
  }
  return tr.term(t, x, env);
}

Formula translate_formula(const Formula& f, const Code& code, const ExtensionStep& step) {
  FreshNames fresh = fresh_for(code);
  fresh.avoid(f);
  Translator tr(step, fresh);
  return tr.formula(f, env_of(code, step));
}

Formula translate_sentence(const Formula& sentence, const ExtensionStep& step) {
  return translate_formula(sentence, Code{}, step);
}

Formula translate_through_chain(const Formula& sentence, const std::vector<ExtensionStep>& steps) {
  Formula out = sentence;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) out = translate_sentence(out, *it);
  return out;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

/// Truth constant of f if known, with a formula of the same truth value and
/// the same free variables to stand for it when it cannot be removed.
struct Folded {
  enum class Value { Unknown, True, False } value = Value::Unknown;
  Formula formula;
};

bool is_reflexive(const Formula& f) {
  return f.kind() == Formula::Kind::Eq && f.terms()[0] == f.terms()[1];
}

void conjuncts(const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == Formula::Kind::And) {
    conjuncts(f.lhs(), out);
    conjuncts(f.rhs(), out);
  } else {
    out.push_back(f);
  }
}

/// The variable other than v that an equation v = w or w = v pins v to.
std::optional<Variable> pinned(const Formula& f, const Variable& v) {
  if (f.kind() != Formula::Kind::Eq) return std::nullopt;
  const auto& a = f.terms()[0];
  const auto& b = f.terms()[1];
  if (a.kind() != Term::Kind::Var || b.kind() != Term::Kind::Var) return std::nullopt;
  if (a.variable() == v && b.variable() != v) return b.variable();
  if (b.variable() == v && a.variable() != v) return a.variable();
  return std::nullopt;
}

/// exists v (.. & v = w & ..) and forall v (v = w -> ..) without the quantifier.
std::optional<Formula> one_point(Formula::Kind kind, const Variable& v, const Formula& body) {
  std::vector<Formula> parts;
  std::optional<Formula> rest;
  if (kind == Formula::Kind::Exists) {
    conjuncts(body, parts);
  } else if (kind == Formula::Kind::Forall && body.kind() == Formula::Kind::Implies) {
    conjuncts(body.lhs(), parts);
    rest = body.rhs();
  } else {
    return std::nullopt;
  }
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto w = pinned(parts[k], v);
    if (!w) continue;
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(k));
    std::optional<Formula> g;
    if (!parts.empty()) g = Formula::conj_all(parts);
    if (rest) g = g ? Formula::implies(*g, *rest) : *rest;
    if (!g) return Formula::eq(Term::var(*w), Term::var(*w));
    FreshNames fresh = FreshNames::avoiding(*g);
    fresh.avoid(*w);
    return substitute(*g, {{v, Term::var(*w)}}, fresh);
  }
  return std::nullopt;
}

Folded fold(const Formula& f) {
  using K = Formula::Kind;
  using V = Folded::Value;
  switch (f.kind()) {
    case K::Eq:
      if (is_reflexive(f)) return {V::True, f};
      return {V::Unknown, f};
    case K::Pred: return {V::Unknown, f};
    case K::Not: {
      Folded b = fold(f.body());
      Formula g = Formula::negation(b.formula);
      if (b.value == V::True) return {V::False, g};
      if (b.value == V::False) return {V::True, g};
      return {V::Unknown, g};
    }
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff: {
      Folded a = fold(f.lhs());
      Folded b = fold(f.rhs());
      auto known = [](const Folded& x) { return x.value != V::Unknown; };
      bool at = a.value == V::True, bt = b.value == V::True;
      auto negated = [](const Folded& x) {
        V value = x.value == V::True ? V::False : x.value == V::False ? V::True : V::Unknown;
        return Folded{value, Formula::negation(x.formula)};
      };
      if (f.kind() == K::And) {
        if (known(a)) return at ? b : Folded{V::False, a.formula};
        if (known(b)) return bt ? a : Folded{V::False, b.formula};
      }
      if (f.kind() == K::Or) {
        if (known(a)) return at ? Folded{V::True, a.formula} : b;
        if (known(b)) return bt ? Folded{V::True, b.formula} : a;
      }
      if (f.kind() == K::Implies) {
        if (known(a)) return at ? b : Folded{V::True, Formula::negation(a.formula)};
        if (known(b)) return bt ? Folded{V::True, b.formula} : negated(a);
      }
      if (f.kind() == K::Iff) {
        if (known(a)) return at ? b : negated(b);
        if (known(b)) return bt ? a : negated(a);
      }
      return {V::Unknown, Formula::binary(f.kind(), a.formula, b.formula)};
    }
    case K::Forall:
    case K::Exists:
    case K::ExistsUnique: {
      Folded b = fold(f.body());
      Formula g = Formula::quantified(f.kind(), f.bound(), b.formula);
      if (b.value == V::Unknown && f.kind() != K::ExistsUnique) {
        if (!free_variables(b.formula).contains(f.bound())) return b;
        if (auto h = one_point(f.kind(), f.bound(), b.formula)) return fold(*h);
      }
      if (b.value != V::Unknown && f.kind() != K::ExistsUnique) {
        // Carriers are nonempty, so quantifying a constant changes nothing.
        bool binds = free_variables(b.formula).contains(f.bound());
        return {b.value, binds ? g : b.formula};
      }
      return {V::Unknown, g};
    }
  }
  return {V::Unknown, f};
}

}  // namespace

Formula simplify(const Formula& f) { return fold(f).formula; }

}  // namespace morita
