#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "morita/expansion.hpp"
#include "morita/text.hpp"

namespace morita::testing {

std::filesystem::path corpus_path(const std::string& name) {
  std::filesystem::path dir(MORITA_CORPUS_DIR);
  return name.empty() ? dir : dir / name;
}

namespace {

struct CaseLine {
  std::string name;
  std::string theory;
  std::vector<std::string> steps;
};

std::vector<CaseLine> case_lines() {
  std::ifstream in(corpus_path("cases.txt"));
  if (!in) throw std::runtime_error("cannot open cases.txt");
  std::vector<CaseLine> out;
  for (std::string line; std::getline(in, line);) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    CaseLine c;
    if (!(words >> c.name >> c.theory)) continue;
    for (std::string w; words >> w;) c.steps.push_back(w);
    if (c.steps.empty()) throw std::runtime_error("case without a step: " + c.name);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::vector<CorpusCase> load_cases(int bound) {
  std::vector<CorpusCase> out;
  for (const auto& line : case_lines()) {
    Theory T = load_theory(corpus_path(line.theory));
    Bound b(bound);
    std::vector<ExtensionStep> prefix;
    for (std::size_t k = 0; k + 1 < line.steps.size(); ++k) {
      prefix.push_back(load_extension(T.signature, corpus_path(line.steps[k]).string()));
      b = extended_bound(prefix.back(), b);
      T = extend_theory(T, prefix.back());
    }
    auto step = load_extension(T.signature, corpus_path(line.steps.back()).string());
    out.push_back({line.name, T, prefix, step, b});
  }
  return out;
}

std::map<std::string, Theory> corpus_theories() {
  std::map<std::string, Theory> out;
  for (const auto& line : case_lines()) {
    if (!out.count(line.theory)) out.emplace(line.theory, load_theory(corpus_path(line.theory)));
  }
  return out;
}

// ---------------------------------------------------------------------------

int naive_term(const FiniteStructure& A, const Term& t, const NaiveAssignment& rho) {
  const Signature& sig = A.signature();
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = rho.find(t.variable());
      if (it == rho.end()) throw std::logic_error("unassigned variable " + t.variable().name);
      return it->second;
    }
    case Term::Kind::Const:
      return A.constant(*sig.constant_id(t.symbol()));
    case Term::Kind::App: {
      std::vector<int> args;
      for (const auto& a : t.args()) args.push_back(naive_term(A, a, rho));
      return A.apply(*sig.function_id(t.symbol()), args);
    }
  }
  return -1;
}

bool naive_holds(const FiniteStructure& A, const Formula& f, const NaiveAssignment& rho) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Eq:
      return naive_term(A, f.terms()[0], rho) == naive_term(A, f.terms()[1], rho);
    case K::Pred: {
      std::vector<int> args;
      for (const auto& a : f.terms()) args.push_back(naive_term(A, a, rho));
      return A.holds(*A.signature().predicate_id(f.symbol()), args);
    }
    case K::Not:
      return !naive_holds(A, f.body(), rho);
    case K::And:
      return naive_holds(A, f.lhs(), rho) && naive_holds(A, f.rhs(), rho);
    case K::Or:
      return naive_holds(A, f.lhs(), rho) || naive_holds(A, f.rhs(), rho);
    case K::Implies:
      return !naive_holds(A, f.lhs(), rho) || naive_holds(A, f.rhs(), rho);
    case K::Iff:
      return naive_holds(A, f.lhs(), rho) == naive_holds(A, f.rhs(), rho);
    case K::Forall:
    case K::Exists:
    case K::ExistsUnique: {
      int count = 0;
      NaiveAssignment inner = rho;
      int n = A.size(f.bound().sort);
      for (int i = 0; i < n; ++i) {
        inner[f.bound()] = i;
        if (naive_holds(A, f.body(), inner)) ++count;
      }
      if (f.kind() == K::Forall) return count == n;
      if (f.kind() == K::Exists) return count > 0;
      return count == 1;
    }
  }
  return false;
}

bool naive_model(const FiniteStructure& A, const Theory& T) {
  for (const auto& ax : T.axioms) {
    if (!naive_holds(A, ax)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

int product(const std::vector<int>& v) {
  return std::accumulate(v.begin(), v.end(), 1, std::multiplies<>());
}

std::vector<int> dims_of(const Signature& sig, const std::vector<std::string>& sorts,
                         const std::vector<int>& sizes) {
  std::vector<int> out;
  for (const auto& s : sorts) out.push_back(sizes[*sig.sort_id(s)]);
  return out;
}

/// Calls f on every tuple of the mixed-radix space `dims`.
template <class F>
void for_each_tuple(const std::vector<int>& dims, F f) {
  std::vector<int> t(dims.size(), 0);
  if (product(dims) == 0) return;
  while (true) {
    f(t);
    std::size_t k = dims.size();
    while (k > 0) {
      --k;
      if (++t[k] < dims[k]) break;
      t[k] = 0;
      if (k == 0) return;
    }
    if (dims.empty()) return;
  }
}

}  // namespace

void for_each_labeled(const std::shared_ptr<const Signature>& sig, const std::vector<int>& sizes,
                      const std::function<void(const FiniteStructure&)>& visit) {
  std::vector<std::vector<Element>> carriers;
  for (std::size_t s = 0; s < sig->sorts().size(); ++s) {
    std::vector<Element> c;
    for (int i = 0; i < sizes[s]; ++i) c.push_back(Element::atom(sig->sorts()[s], i));
    carriers.push_back(std::move(c));
  }
  // Every cell of every table as one digit.
  std::vector<int> radix;
  std::vector<int> pred_len, func_len;
  for (const auto& p : sig->predicates()) {
    pred_len.push_back(product(dims_of(*sig, p.arity, sizes)));
    radix.insert(radix.end(), pred_len.back(), 2);
  }
  for (const auto& f : sig->functions()) {
    func_len.push_back(product(dims_of(*sig, f.domain, sizes)));
    radix.insert(radix.end(), func_len.back(), sizes[*sig->sort_id(f.codomain)]);
  }
  for (const auto& c : sig->constants()) radix.push_back(sizes[*sig->sort_id(c.sort)]);

  auto emit = [&](const std::vector<int>& digits) {
    std::size_t k = 0;
    std::vector<std::vector<std::uint8_t>> preds;
    for (int len : pred_len) {
      preds.emplace_back(digits.begin() + k, digits.begin() + k + len);
      k += len;
    }
    std::vector<std::vector<int>> funcs;
    for (int len : func_len) {
      funcs.emplace_back(digits.begin() + k, digits.begin() + k + len);
      k += len;
    }
    std::vector<int> consts(digits.begin() + k, digits.end());
    visit(FiniteStructure(sig, carriers, std::move(preds), std::move(funcs), std::move(consts)));
  };
  if (radix.empty()) {
    emit({});
    return;
  }
  for_each_tuple(radix, emit);
}

std::vector<int> orbit_key(const FiniteStructure& A) {
  const Signature& sig = A.signature();
  std::size_t n = sig.sorts().size();
  std::vector<std::vector<int>> perm(n);
  for (std::size_t s = 0; s < n; ++s) {
    perm[s].resize(A.size(static_cast<int>(s)));
    std::iota(perm[s].begin(), perm[s].end(), 0);
  }
  auto sort_ids = [&](const std::vector<std::string>& sorts) {
    std::vector<int> out;
    for (const auto& s : sorts) out.push_back(*sig.sort_id(s));
    return out;
  };

  // key of the structure with element i of sort s renamed perm[s][i]
  auto encode = [&]() {
    std::vector<int> key;
    for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
      auto ids = sort_ids(sig.predicates()[p].arity);
      std::vector<int> dims;
      for (int id : ids) dims.push_back(A.size(id));
      std::vector<int> table(product(dims));
      for_each_tuple(dims, [&](const std::vector<int>& args) {
        std::vector<int> image;
        for (std::size_t k = 0; k < args.size(); ++k) image.push_back(perm[ids[k]][args[k]]);
        table[A.predicate_cell(static_cast<int>(p), image)] = A.holds(static_cast<int>(p), args);
      });
      key.insert(key.end(), table.begin(), table.end());
    }
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      auto ids = sort_ids(sig.functions()[f].domain);
      int cod = *sig.sort_id(sig.functions()[f].codomain);
      std::vector<int> dims;
      for (int id : ids) dims.push_back(A.size(id));
      std::vector<int> table(product(dims));
      for_each_tuple(dims, [&](const std::vector<int>& args) {
        std::vector<int> image;
        for (std::size_t k = 0; k < args.size(); ++k) image.push_back(perm[ids[k]][args[k]]);
        table[A.function_cell(static_cast<int>(f), image)] =
            perm[cod][A.apply(static_cast<int>(f), args)];
      });
      key.insert(key.end(), table.begin(), table.end());
    }
    for (std::size_t c = 0; c < sig.constants().size(); ++c) {
      key.push_back(perm[*sig.sort_id(sig.constants()[c].sort)][A.constant(static_cast<int>(c))]);
    }
    return key;
  };

  std::optional<std::vector<int>> best;
  std::function<void(std::size_t)> walk = [&](std::size_t s) {
    if (s == n) {
      auto key = encode();
      if (!best || key < *best) best = std::move(key);
      return;
    }
    std::sort(perm[s].begin(), perm[s].end());
    do {
      walk(s + 1);
    } while (std::next_permutation(perm[s].begin(), perm[s].end()));
  };
  walk(0);
  std::vector<int> out = A.sizes();
  out.insert(out.end(), best->begin(), best->end());
  return out;
}

long long orbit_count(const Theory& T, const std::vector<int>& sizes) {
  auto sig = std::make_shared<const Signature>(T.signature);
  std::set<std::vector<int>> keys;
  for_each_labeled(sig, sizes, [&](const FiniteStructure& A) {
    if (naive_model(A, T)) keys.insert(orbit_key(A));
  });
  return static_cast<long long>(keys.size());
}

long long orbit_count_up_to(const Theory& T, int cap) {
  std::vector<int> dims(T.signature.sorts().size(), cap);
  long long total = 0;
  for_each_tuple(dims, [&](const std::vector<int>& t) {
    std::vector<int> sizes;
    for (int v : t) sizes.push_back(v + 1);
    total += orbit_count(T, sizes);
  });
  return total;
}

int group_count(int n) {
  if (n == 1) return 1;
  std::vector<std::vector<int>> t(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i) t[0][i] = t[i][0] = i;
  std::set<std::vector<int>> classes;

  auto associative = [&] {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (t[t[a][b]][c] != t[a][t[b][c]]) return false;
    return true;
  };
  auto key = [&] {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best;
    do {
      if (perm[0] != 0) continue;
      std::vector<int> k(n * n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) k[perm[a] * n + perm[b]] = perm[t[a][b]];
      if (best.empty() || k < best) best = k;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  };
  std::function<void(int)> fill = [&](int cell) {
    if (cell == (n - 1) * (n - 1)) {
      if (associative()) classes.insert(key());
      return;
    }
    int a = 1 + cell / (n - 1), b = 1 + cell % (n - 1);
    for (int v = 0; v < n; ++v) {
      bool clash = false;
      for (int k = 0; k < b; ++k) clash = clash || t[a][k] == v;
      for (int k = 0; k < a; ++k) clash = clash || t[k][b] == v;
      if (clash) continue;
      t[a][b] = v;
      fill(cell + 1);
      t[a][b] = -1;
    }
  };
  fill(0);
  return static_cast<int>(classes.size());
}

// ---------------------------------------------------------------------------

namespace {

bool same_atomic_type(const FiniteStructure& M, const std::vector<Pebble>& a,
                      const FiniteStructure& N, const std::vector<Pebble>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[i].sort != a[j].sort) continue;
      if ((a[i].index == a[j].index) != (b[i].index == b[j].index)) return false;
    }
  }
  const Signature& sig = M.signature();
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    std::vector<int> sorts;
    for (const auto& s : sig.predicates()[p].arity) sorts.push_back(*sig.sort_id(s));
    std::vector<int> dims(sorts.size(), static_cast<int>(a.size()));
    bool ok = true;
    for_each_tuple(dims, [&](const std::vector<int>& picks) {
      if (!ok) return;
      std::vector<int> x, y;
      for (std::size_t k = 0; k < picks.size(); ++k) {
        if (a[picks[k]].sort != sorts[k]) return;
        x.push_back(a[picks[k]].index);
        y.push_back(b[picks[k]].index);
      }
      if (M.holds(static_cast<int>(p), x) != N.holds(*N.signature().predicate_id(
                                                         sig.predicates()[p].name),
                                                     y)) {
        ok = false;
      }
    });
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool duplicator_wins(const FiniteStructure& M, std::vector<Pebble> a, const FiniteStructure& N,
                     std::vector<Pebble> b, int rounds) {
  const Signature& sig = M.signature();
  if (!sig.functions().empty() || !sig.constants().empty()) {
    throw std::logic_error("the game oracle handles relational signatures only");
  }
  if (!same_atomic_type(M, a, N, b)) return false;
  if (rounds == 0) return true;
  for (std::size_t s = 0; s < sig.sorts().size(); ++s) {
    int ms = M.size(static_cast<int>(s));
    int ns = N.size(sig.sorts()[s]);
    int ns_id = *N.signature().sort_id(sig.sorts()[s]);
    for (int side = 0; side < 2; ++side) {
      int spoiler_n = side == 0 ? ms : ns;
      int reply_n = side == 0 ? ns : ms;
      for (int c = 0; c < spoiler_n; ++c) {
        bool answered = false;
        for (int d = 0; d < reply_n && !answered; ++d) {
          auto a2 = a;
          auto b2 = b;
          a2.push_back({static_cast<int>(s), side == 0 ? c : d});
          b2.push_back({ns_id, side == 0 ? d : c});
          answered = duplicator_wins(M, a2, N, b2, rounds - 1);
        }
        if (!answered) return false;
      }
    }
  }
  return true;
}

bool preserves_to_depth(const Morphism& h, int depth, int free) {
  const FiniteStructure& M = h.source;
  const Signature& sig = M.signature();
  std::vector<Pebble> all;
  for (std::size_t s = 0; s < sig.sorts().size(); ++s) {
    for (int i = 0; i < M.size(static_cast<int>(s)); ++i) all.push_back({static_cast<int>(s), i});
  }
  auto image = [&](const std::vector<Pebble>& a) {
    std::vector<Pebble> b;
    for (const auto& p : a) {
      int t = *h.target.signature().sort_id(sig.sorts()[p.sort]);
      b.push_back({t, h.maps[p.sort][p.index]});
    }
    return b;
  };
  for (int len = 0; len <= free; ++len) {
    bool ok = true;
    for_each_tuple(std::vector<int>(len, static_cast<int>(all.size())),
                   [&](const std::vector<int>& picks) {
                     if (!ok) return;
                     std::vector<Pebble> a;
                     for (int k : picks) a.push_back(all[k]);
                     ok = duplicator_wins(M, a, h.target, image(a), depth);
                   });
    if (!ok) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

FormulaGenerator::FormulaGenerator(const Signature& sig, std::uint64_t seed)
    : sig_(sig), rng_(seed) {}

bool FormulaGenerator::chance(int percent) {
  return std::uniform_int_distribution<int>(0, 99)(rng_) < percent;
}

std::optional<Term> FormulaGenerator::term(const std::string& sort, int depth,
                                           const std::vector<Variable>& scope) {
  std::vector<Variable> vars;
  for (const auto& v : scope) {
    if (v.sort == sort) vars.push_back(v);
  }
  if (!vars.empty() && chance(55)) return Term::var(pick(vars));
  std::vector<int> options;  // -1 - k: constant k, k >= 0: function k
  for (std::size_t c = 0; c < sig_.constants().size(); ++c) {
    if (sig_.constants()[c].sort == sort) options.push_back(-1 - static_cast<int>(c));
  }
  if (depth > 0) {
    for (std::size_t f = 0; f < sig_.functions().size(); ++f) {
      if (sig_.functions()[f].codomain == sort) options.push_back(static_cast<int>(f));
    }
  }
  std::shuffle(options.begin(), options.end(), rng_);
  for (int o : options) {
    if (o < 0) return Term::constant(sig_.constants()[-1 - o].name);
    const auto& decl = sig_.functions()[o];
    std::vector<Term> args;
    for (const auto& s : decl.domain) {
      auto a = term(s, depth - 1, scope);
      if (!a) break;
      args.push_back(*a);
    }
    if (args.size() == decl.domain.size()) return Term::apply(decl.name, std::move(args));
  }
  if (!vars.empty()) return Term::var(pick(vars));
  return std::nullopt;
}

Formula FormulaGenerator::atom(const std::vector<Variable>& scope) {
  std::vector<std::string> sorts;
  for (const auto& s : sig_.sorts()) {
    if (term(s, 1, scope)) sorts.push_back(s);
  }
  std::vector<const PredicateDecl*> preds;
  for (const auto& p : sig_.predicates()) {
    bool ok = std::all_of(p.arity.begin(), p.arity.end(), [&](const std::string& s) {
      return std::find(sorts.begin(), sorts.end(), s) != sorts.end();
    });
    if (ok) preds.push_back(&p);
  }
  if (!preds.empty() && (sorts.empty() || chance(60))) {
    const PredicateDecl& p = *pick(preds);
    std::vector<Term> args;
    for (const auto& s : p.arity) args.push_back(*term(s, 1, scope));
    return Formula::pred(p.name, std::move(args));
  }
  if (!sorts.empty()) {
    const std::string& s = pick(sorts);
    return Formula::eq(*term(s, 1, scope), *term(s, 1, scope));
  }
  Variable v{"u" + std::to_string(counter_++), sig_.sorts().front()};
  return Formula::forall(v, Formula::eq(Term::var(v), Term::var(v)));
}

Formula FormulaGenerator::formula(int depth, const std::vector<Variable>& scope) {
  bool closed_terms = std::any_of(sig_.sorts().begin(), sig_.sorts().end(),
                                  [&](const std::string& s) { return term(s, 1, scope).has_value(); });
  int roll = std::uniform_int_distribution<int>(0, 99)(rng_);
  if (depth == 0 || (closed_terms && roll < 20)) return atom(scope);
  if (!closed_terms || roll >= 65) {
    Variable v{"u" + std::to_string(counter_++), pick(sig_.sorts())};
    auto inner = scope;
    inner.push_back(v);
    auto body = formula(depth - 1, inner);
    return Formula::quantified(chance(50) ? Formula::Kind::Forall : Formula::Kind::Exists, v, body);
  }
  if (roll < 32) return Formula::negation(formula(depth - 1, scope));
  static const Formula::Kind kinds[] = {Formula::Kind::And, Formula::Kind::Or,
                                        Formula::Kind::Implies, Formula::Kind::Iff};
  auto kind = kinds[std::uniform_int_distribution<int>(0, 3)(rng_)];
  auto a = formula(depth - 1, scope);
  auto b = formula(depth - 1, scope);
  return Formula::binary(kind, a, b);
}

std::vector<Variable> one_variable_per_sort(const Signature& sig) {
  std::vector<Variable> out;
  for (const auto& s : sig.sorts()) out.push_back({"x_" + s, s});
  return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Base-sorted positions a code entry may link to, read off the expansion.
std::vector<std::vector<int>> link_candidates(const FiniteStructure& plus, const ExtensionStep& step,
                                              const CodeEntry& e, int x) {
  const Signature& sig = plus.signature();
  const ExplicitDefinition* d = step.definition_of(e.variable.sort);
  auto fn = [&](const std::string& name) { return *sig.function_id(name); };
  auto preimages = [&](const std::string& f, const std::string& sort) {
    std::vector<std::vector<int>> out;
    for (int y = 0; y < plus.size(sort); ++y) {
      int arg[] = {y};
      if (plus.apply(fn(f), arg) == x) out.push_back({y});
    }
    return out;
  };
  int arg[] = {x};
  switch (e.kind) {
    case CodeEntry::Kind::Product: {
      const auto& p = std::get<ProductSortDef>(*d);
      return {{plus.apply(fn(p.proj1), arg), plus.apply(fn(p.proj2), arg)}};
    }
    case CodeEntry::Kind::Left: {
      const auto& p = std::get<CoproductSortDef>(*d);
      return preimages(p.inj1, p.left);
    }
    case CodeEntry::Kind::Right: {
      const auto& p = std::get<CoproductSortDef>(*d);
      return preimages(p.inj2, p.right);
    }
    case CodeEntry::Kind::Subsort: {
      const auto& p = std::get<SubsortDef>(*d);
      return {{plus.apply(fn(p.inclusion), arg)}};
    }
    case CodeEntry::Kind::Quotient: {
      const auto& p = std::get<QuotientSortDef>(*d);
      return preimages(p.projection, p.parent);
    }
  }
  return {};
}

bool leaks(const Formula& f, const Signature& base) {
  for (const auto& s : symbols_of(f)) {
    if (!base.has_symbol(s)) return true;
  }
  for (const auto& s : variable_sorts(f)) {
    if (!base.has_sort(s)) return true;
  }
  return false;
}

}  // namespace

SweepResult translation_sweep(const CorpusCase& c, const std::vector<FiniteStructure>& models,
                              int formulas, int depth, std::uint64_t seed) {
  const Signature& base = c.step.base();
  const Signature& plus_sig = c.step.derived();
  auto new_sorts = c.step.new_sorts();
  auto is_new = [&](const std::string& s) {
    return std::find(new_sorts.begin(), new_sorts.end(), s) != new_sorts.end();
  };

  std::vector<FiniteStructure> pluses, bases;
  for (const auto& M : models) {
    pluses.push_back(expand_model(M, c.theory, c.step));
    bases.push_back(reduct(pluses.back(), base));
  }

  SweepResult r;
  FormulaGenerator gen(plus_sig, seed);
  auto scope = one_variable_per_sort(plus_sig);
  for (int n = 0; n < formulas; ++n) {
    Formula phi = gen.formula(depth, scope);
    ++r.formulas;
    auto free_set = free_variables(phi);
    std::vector<Variable> free(free_set.begin(), free_set.end());
    std::vector<Variable> coded, plain;
    for (const auto& v : free) (is_new(v.sort) ? coded : plain).push_back(v);
    Evaluator direct(plus_sig, phi, free);

    for (const auto& code : codes_for(coded, c.step)) {
      ++r.codes;
      Formula star = translate_formula(phi, code, c.step);
      if (leaks(star, base)) {
        ++r.leaks;
        if (r.first_problem.empty()) r.first_problem = "leak: " + print_formula(star);
        continue;
      }
      std::vector<Variable> order = plain;
      for (const auto& l : code.links()) order.push_back(l);
      Evaluator translated(base, star, order);

      for (std::size_t m = 0; m < pluses.size(); ++m) {
        const auto& P = pluses[m];
        std::vector<int> dims;
        for (const auto& v : free) dims.push_back(P.size(v.sort));
        for_each_tuple(dims, [&](const std::vector<int>& values) {
          bool expected = direct(P, values);
          std::vector<int> base_values;
          for (std::size_t k = 0; k < free.size(); ++k) {
            if (!is_new(free[k].sort)) base_values.push_back(values[k]);
          }
          // Code-satisfying link choices, entry by entry.
          std::vector<std::vector<std::vector<int>>> choices;
          for (const auto& e : code.entries) {
            int slot = static_cast<int>(std::find(free.begin(), free.end(), e.variable) - free.begin());
            choices.push_back(link_candidates(P, c.step, e, values[slot]));
          }
          std::vector<int> radix;
          for (const auto& ch : choices) radix.push_back(static_cast<int>(ch.size()));
          auto check = [&](const std::vector<int>& pick) {
            std::vector<int> env = base_values;
            for (std::size_t k = 0; k < pick.size(); ++k) {
              const auto& links = choices[k][pick[k]];
              env.insert(env.end(), links.begin(), links.end());
            }
            ++r.checks;
            if (translated(bases[m], env) != expected) {
              ++r.disagreements;
              if (r.first_problem.empty()) {
                r.first_problem = "disagreement: " + print_formula(phi) + "  vs  " +
                                  print_formula(star);
              }
            }
          };
          if (radix.empty()) {
            check({});
          } else {
            for_each_tuple(radix, check);
          }
        });
      }
    }
  }
  return r;
}

}  // namespace morita::testing
