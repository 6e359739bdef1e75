// Mace-style model search. Cells are filled in a fixed order with Kleene
// evaluation of the axioms after each assignment. Symmetry is cut two ways:
// the least-number heuristic on values, and sorted rows for sorts that are
// only ever function or predicate arguments. Survivors are deduplicated by
// canonical form.

#include <algorithm>
#include <set>

#include "compiled.hpp"
#include "morita/enumerate.hpp"

namespace morita {

Bound::Bound(int default_cap) : default_cap_(default_cap) {
  if (default_cap < 1) throw Error(ErrorKind::BoundMismatch, "bound must be at least 1");
}

Bound& Bound::set(const std::string& sort, int cap) {
  if (cap < 1) throw Error(ErrorKind::BoundMismatch, "bound must be at least 1");
  overrides_[sort] = cap;
  return *this;
}

int Bound::cap(const std::string& sort) const {
  auto it = overrides_.find(sort);
  return it == overrides_.end() ? default_cap_ : it->second;
}

std::string Bound::describe() const {
  std::string out = std::to_string(default_cap_);
  if (overrides_.empty()) return out;
  out += " (";
  bool first = true;
  for (const auto& [sort, cap] : overrides_) {
    if (!first) out += ", ";
    first = false;
    out += sort + "<=" + std::to_string(cap);
  }
  return out + ")";
}

namespace {

thread_local EnumerationStats g_stats;

using detail::kFalse;
using detail::kTrue;
using detail::kUnknown;

struct Cell {
  int kind;  // 0 predicate, 1 function, 2 constant
  int symbol;
  std::size_t index;  // position in the symbol's table
  std::vector<int> args;
  std::vector<int> arg_sorts;
  int value_sort = -1;
  int row_sort = -1;  // row-sorted sort owning this cell
  int row = -1;
  int row_length = 0;
  int column = 0;
};

class PartialModel {
 public:
  PartialModel(const Signature& sig, const std::vector<int>& sizes) : sig_(sig), sizes_(sizes) {
    for (const auto& p : sig.predicates()) {
      predicates_.emplace_back(table_size(p.arity), static_cast<signed char>(-1));
      pred_dims_.push_back(dims(p.arity));
    }
    for (const auto& f : sig.functions()) {
      functions_.emplace_back(table_size(f.domain), -1);
      func_dims_.push_back(dims(f.domain));
    }
    constants_.assign(sig.constants().size(), -1);
  }

  int size(int sort) const { return sizes_[sort]; }
  int pred(int p, const int* args) const {
    signed char v = predicates_[p][cell(pred_dims_[p], args)];
    return v < 0 ? kUnknown : v;
  }
  int func(int f, const int* args) const { return functions_[f][cell(func_dims_[f], args)]; }
  int constant(int c) const { return constants_[c]; }

  void set(const Cell& c, int value) {
    if (c.kind == 0) {
      predicates_[c.symbol][c.index] = static_cast<signed char>(value);
    } else if (c.kind == 1) {
      functions_[c.symbol][c.index] = value;
    } else {
      constants_[c.symbol] = value;
    }
  }

  std::size_t table_size(const std::vector<std::string>& sorts) const {
    std::size_t n = 1;
    for (const auto& s : sorts) n *= static_cast<std::size_t>(sizes_[*sig_.sort_id(s)]);
    return n;
  }

  FiniteStructure freeze(const std::shared_ptr<const Signature>& sig,
                         const std::vector<std::vector<Element>>& carriers) const {
    std::vector<std::vector<std::uint8_t>> preds;
    for (const auto& t : predicates_) preds.emplace_back(t.begin(), t.end());
    return FiniteStructure(sig, carriers, std::move(preds), functions_, constants_);
  }

 private:
  std::vector<int> dims(const std::vector<std::string>& sorts) const {
    std::vector<int> out;
    for (const auto& s : sorts) out.push_back(sizes_[*sig_.sort_id(s)]);
    return out;
  }
  static std::size_t cell(const std::vector<int>& dims, const int* args) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) c = c * dims[i] + static_cast<std::size_t>(args[i]);
    return c;
  }

  const Signature& sig_;
  std::vector<int> sizes_;
  std::vector<std::vector<signed char>> predicates_;
  std::vector<std::vector<int>> functions_;
  std::vector<int> constants_;
  std::vector<std::vector<int>> pred_dims_;
  std::vector<std::vector<int>> func_dims_;
};

/// Sorts that never occur as a value and occur at most once among the
/// arguments of any symbol. Permuting such a sort only permutes rows.
std::vector<bool> row_sortable(const Signature& sig) {
  std::vector<bool> ok(sig.sorts().size(), true);
  for (const auto& f : sig.functions()) ok[*sig.sort_id(f.codomain)] = false;
  for (const auto& c : sig.constants()) ok[*sig.sort_id(c.sort)] = false;
  bool changed = true;
  auto check = [&](const std::vector<std::string>& sorts) {
    int hits = 0;
    for (const auto& s : sorts) hits += ok[*sig.sort_id(s)];
    if (hits <= 1) return;
    for (const auto& s : sorts) {
      int id = *sig.sort_id(s);
      if (ok[id]) {
        ok[id] = false;
        changed = true;
      }
    }
  };
  while (changed) {
    changed = false;
    for (const auto& p : sig.predicates()) check(p.arity);
    for (const auto& f : sig.functions()) check(f.domain);
  }
  return ok;
}

class Search {
 public:
  Search(const Theory& T, const std::vector<int>& sizes, const std::vector<bool>& sortable,
         const std::vector<detail::Compiled>& axioms,
         const std::vector<std::vector<int>>& axioms_by_symbol, const std::vector<int>& symbolless)
      : T_(T),
        sig_(T.signature),
        sizes_(sizes),
        sortable_(sortable),
        axioms_(axioms),
        axioms_by_symbol_(axioms_by_symbol),
        symbolless_(symbolless),
        model_(T.signature, sizes) {
    build_cells();
    status_.assign(axioms.size(), kUnknown);
    int slots = 0;
    for (const auto& a : axioms) slots = std::max(slots, a.slots);
    env_.assign(std::max(slots, 1), 0);
  }

  /// Collects every complete model reachable under the symmetry cuts.
  template <class Leaf>
  void run(Leaf&& leaf) {
    for (int a : symbolless_) {
      int v = detail::eval(axioms_[a].root, model_, env_.data());
      if (v == kFalse) return;
      status_[a] = v;
    }
    values_.assign(cells_.size(), -1);
    value_max_.assign(sizes_.size(), -1);
    dfs(0, leaf);
  }

 private:
  int symbol_key(const Cell& c) const {
    int base = c.kind == 0 ? 0
               : c.kind == 1 ? static_cast<int>(sig_.predicates().size())
                             : static_cast<int>(sig_.predicates().size() + sig_.functions().size());
    return base + c.symbol;
  }

  void build_cells() {
    std::vector<Cell> plain;
    std::vector<Cell> rows;
    auto add_cells = [&](int kind, int symbol, const std::vector<std::string>& domain, int value_sort) {
      std::vector<int> arg_sorts;
      std::vector<int> dims;
      std::size_t total = 1;
      for (const auto& s : domain) {
        arg_sorts.push_back(*sig_.sort_id(s));
        dims.push_back(sizes_[arg_sorts.back()]);
        total *= static_cast<std::size_t>(dims.back());
      }
      std::vector<int> args(dims.size(), 0);
      for (std::size_t index = 0; index < total; ++index) {
        Cell c;
        c.kind = kind;
        c.symbol = symbol;
        c.index = index;
        c.args = args;
        c.arg_sorts = arg_sorts;
        c.value_sort = value_sort;
        for (std::size_t i = 0; i < args.size(); ++i) {
          if (sortable_[arg_sorts[i]]) {
            c.row_sort = arg_sorts[i];
            c.row = args[i];
          }
        }
        (c.row_sort >= 0 ? rows : plain).push_back(std::move(c));
        for (std::size_t i = args.size(); i-- > 0;) {
          if (++args[i] < dims[i]) break;
          args[i] = 0;
        }
      }
    };
    for (std::size_t c = 0; c < sig_.constants().size(); ++c) {
      add_cells(2, static_cast<int>(c), {}, *sig_.sort_id(sig_.constants()[c].sort));
    }
    for (std::size_t p = 0; p < sig_.predicates().size(); ++p) {
      add_cells(0, static_cast<int>(p), sig_.predicates()[p].arity, -1);
    }
    for (std::size_t f = 0; f < sig_.functions().size(); ++f) {
      const auto& decl = sig_.functions()[f];
      add_cells(1, static_cast<int>(f), decl.domain, *sig_.sort_id(decl.codomain));
    }
    auto max_arg = [](const Cell& c) {
      int m = -1;
      for (int a : c.args) m = std::max(m, a);
      return m;
    };
    std::stable_sort(plain.begin(), plain.end(), [&](const Cell& a, const Cell& b) {
      int ma = max_arg(a);
      int mb = max_arg(b);
      if (ma != mb) return ma < mb;
      return symbol_key(a) < symbol_key(b);
    });
    std::stable_sort(rows.begin(), rows.end(), [&](const Cell& a, const Cell& b) {
      if (a.row_sort != b.row_sort) return a.row_sort < b.row_sort;
      if (a.row != b.row) return a.row < b.row;
      if (symbol_key(a) != symbol_key(b)) return symbol_key(a) < symbol_key(b);
      return a.args < b.args;
    });
    // Row geometry: every row of a sort has the same columns in the same order.
    for (std::size_t i = 0; i < rows.size();) {
      std::size_t j = i;
      while (j < rows.size() && rows[j].row_sort == rows[i].row_sort && rows[j].row == rows[i].row) ++j;
      for (std::size_t k = i; k < j; ++k) {
        rows[k].row_length = static_cast<int>(j - i);
        rows[k].column = static_cast<int>(k - i);
      }
      i = j;
    }
    // Rows go first: they usually carry the tightest constraints, and their
    // values only ever widen the least-number limit of the plain cells.
    row_count_ = rows.size();
    cells_ = std::move(rows);
    cells_.insert(cells_.end(), std::make_move_iterator(plain.begin()),
                  std::make_move_iterator(plain.end()));
    // Sorts used as row columns are mentioned in full before any plain cell.
    std::vector<int> running(sizes_.size(), -1);
    for (std::size_t k = 0; k < row_count_; ++k) {
      for (std::size_t i = 0; i < cells_[k].args.size(); ++i) {
        int s = cells_[k].arg_sorts[i];
        if (s != cells_[k].row_sort) running[s] = sizes_[s] - 1;
      }
    }
    // Largest argument index of each sort mentioned by cells up to k.
    mentioned_.assign(cells_.size(), running);
    for (std::size_t k = row_count_; k < cells_.size(); ++k) {
      for (std::size_t i = 0; i < cells_[k].args.size(); ++i) {
        int s = cells_[k].arg_sorts[i];
        running[s] = std::max(running[s], cells_[k].args[i]);
      }
      mentioned_[k] = running;
    }
  }

  template <class Leaf>
  void dfs(std::size_t k, Leaf& leaf) {
    ++g_stats.nodes;
    if (stop_) return;
    if (k == cells_.size()) {
      for (std::size_t a = 0; a < axioms_.size(); ++a) {
        if (status_[a] != kTrue &&
            detail::eval(axioms_[a].root, model_, env_.data()) != kTrue) {
          return;
        }
      }
      ++g_stats.leaves;
      if (!leaf(model_)) stop_ = true;
      return;
    }
    const Cell& c = cells_[k];
    int lo = 0;
    int hi = c.kind == 0 ? 1 : sizes_[c.value_sort] - 1;
    if (k >= row_count_ && c.kind != 0) {
      int limit = std::max(mentioned_[k][c.value_sort], value_max_[c.value_sort]) + 1;
      hi = std::min(hi, limit);
    }
    if (c.row > 0) {
      std::size_t start = k - static_cast<std::size_t>(c.column);
      bool tied = true;
      for (std::size_t j = start; j < k && tied; ++j) tied = values_[j] == values_[j - c.row_length];
      if (tied) lo = values_[k - c.row_length];
    }
    const auto& watch = axioms_by_symbol_[symbol_key(c)];
    for (int v = lo; v <= hi; ++v) {
      model_.set(c, v);
      values_[k] = v;
      int saved_max = c.value_sort >= 0 ? value_max_[c.value_sort] : 0;
      if (c.value_sort >= 0) value_max_[c.value_sort] = std::max(saved_max, v);
      std::size_t undo = settled_.size();
      bool dead = false;
      for (int a : watch) {
        if (status_[a] == kTrue) continue;
        int r = detail::eval(axioms_[a].root, model_, env_.data());
        if (r == kFalse) {
          dead = true;
          break;
        }
        if (r == kTrue) {
          status_[a] = kTrue;
          settled_.push_back(a);
        }
      }
      if (!dead) dfs(k + 1, leaf);
      while (settled_.size() > undo) {
        status_[settled_.back()] = kUnknown;
        settled_.pop_back();
      }
      if (c.value_sort >= 0) value_max_[c.value_sort] = saved_max;
      if (stop_) break;
    }
    model_.set(c, -1);
    values_[k] = -1;
  }

  const Theory& T_;
  const Signature& sig_;
  std::vector<int> sizes_;
  const std::vector<bool>& sortable_;
  const std::vector<detail::Compiled>& axioms_;
  const std::vector<std::vector<int>>& axioms_by_symbol_;
  const std::vector<int>& symbolless_;
  PartialModel model_;
  std::vector<Cell> cells_;
  std::size_t row_count_ = 0;
  std::vector<std::vector<int>> mentioned_;
  std::vector<int> values_;
  std::vector<int> value_max_;
  std::vector<int> status_;
  std::vector<int> settled_;
  std::vector<int> env_;
  bool stop_ = false;
};

}  // namespace

EnumerationStats last_enumeration_stats() { return g_stats; }

void enumerate_models(const Theory& T, const Bound& bound, const ModelVisitor& visit) {
  const Signature& sig = T.signature;
  sig.require_nonempty();
  g_stats = {};
  auto sig_ptr = std::make_shared<const Signature>(sig);

  detail::Compiler compiler(sig);
  std::vector<detail::Compiled> axioms;
  std::size_t symbol_count = sig.predicates().size() + sig.functions().size() + sig.constants().size();
  std::vector<std::vector<int>> by_symbol(symbol_count);
  std::vector<int> symbolless;
  for (std::size_t a = 0; a < T.axioms.size(); ++a) {
    axioms.push_back(compiler.compile(T.axioms[a], {}));
    auto symbols = symbols_of(T.axioms[a]);
    if (symbols.empty()) symbolless.push_back(static_cast<int>(a));
    for (const auto& name : symbols) {
      int key = -1;
      if (auto p = sig.predicate_id(name)) key = *p;
      else if (auto f = sig.function_id(name)) key = static_cast<int>(sig.predicates().size()) + *f;
      else if (auto c = sig.constant_id(name)) {
        key = static_cast<int>(sig.predicates().size() + sig.functions().size()) + *c;
      }
      if (key < 0) throw Error(ErrorKind::UnknownSymbol, "unknown symbol '" + name + "'");
      by_symbol[key].push_back(static_cast<int>(a));
    }
  }
  std::vector<bool> sortable = row_sortable(sig);

  std::size_t n = sig.sorts().size();
  std::vector<int> caps;
  for (const auto& s : sig.sorts()) caps.push_back(bound.cap(s));
  std::vector<int> sizes(n, 1);
  bool stop = false;
  while (!stop) {
    std::vector<std::vector<Element>> carriers(n);
    for (std::size_t s = 0; s < n; ++s) {
      for (int i = 0; i < sizes[s]; ++i) carriers[s].push_back(Element::atom(sig.sorts()[s], i));
    }
    std::map<std::vector<int>, FiniteStructure> found;
    Search search(T, sizes, sortable, axioms, by_symbol, symbolless);
    search.run([&](const PartialModel& m) {
      FiniteStructure A = m.freeze(sig_ptr, carriers);
      Canonization c = canonize(A);
      if (!found.contains(c.form.code)) {
        FiniteStructure B = relabel(A, c.labeling);
        std::vector<std::vector<std::uint8_t>> preds;
        std::vector<std::vector<int>> funcs;
        for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
          preds.push_back(B.predicate_table(static_cast<int>(p)));
        }
        for (std::size_t f = 0; f < sig.functions().size(); ++f) {
          funcs.push_back(B.function_table(static_cast<int>(f)));
        }
        found.emplace(std::move(c.form.code),
                      FiniteStructure(sig_ptr, carriers, std::move(preds), std::move(funcs),
                                      B.constant_table()));
      }
      return true;
    });
    for (auto& [code, A] : found) {
      ++g_stats.emitted;
      if (!visit(A)) {
        stop = true;
        break;
      }
    }
    std::size_t k = n;
    while (k-- > 0) {
      if (++sizes[k] <= caps[k]) break;
      sizes[k] = 1;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
}

std::vector<FiniteStructure> enumerate_models(const Theory& T, const Bound& bound) {
  std::vector<FiniteStructure> out;
  enumerate_models(T, bound, [&](const FiniteStructure& A) {
    out.push_back(A);
    return true;
  });
  return out;
}

Entailment bounded_entails(const std::vector<FiniteStructure>& models, const Formula& sentence,
                           const Bound& bound) {
  Entailment out{std::nullopt, bound};
  if (models.empty()) return out;
  Evaluator ev(models.front().signature(), sentence);
  for (const auto& A : models) {
    if (!ev(A)) {
      out.countermodel = A;
      break;
    }
  }
  return out;
}

Entailment bounded_entails(const Theory& T, const Formula& sentence, const Bound& bound) {
  check_sentence(T.signature, sentence);
  Entailment out{std::nullopt, bound};
  Evaluator ev(T.signature, sentence);
  enumerate_models(T, bound, [&](const FiniteStructure& A) {
    if (ev(A)) return true;
    out.countermodel = A;
    return false;
  });
  return out;
}

std::string describe(const Entailment& e) {
  if (e.refuted()) return "Refuted";
  return "NoCountermodelUpTo(" + e.bound.describe() + ")";
}

}  // namespace morita
