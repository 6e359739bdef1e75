// Canonical labeling by individualization and refinement.

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "morita/enumerate.hpp"

namespace morita {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return mix(h ^ mix(v)); }

/// A symbol table flattened into vertex ids.
struct Table {
  int kind;    // 0 predicate, 1 function, 2 constant
  int symbol;
  std::vector<int> arg_offsets;  // vertex offset of each argument sort
  std::vector<int> dims;
  int value_offset = 0;          // functions and constants
  const std::vector<std::uint8_t>* truth = nullptr;
  const std::vector<int>* values = nullptr;
};

class Canonizer {
 public:
  explicit Canonizer(const FiniteStructure& A) : A_(A) {
    const Signature& sig = A.signature();
    int v = 0;
    for (std::size_t s = 0; s < sig.sorts().size(); ++s) {
      offsets_.push_back(v);
      for (int i = 0; i < A.size(static_cast<int>(s)); ++i) sort_of_.push_back(static_cast<int>(s));
      v += A.size(static_cast<int>(s));
    }
    vertices_ = v;
    auto offsets_of = [&](const std::vector<std::string>& sorts, std::vector<int>& dims) {
      std::vector<int> out;
      for (const auto& s : sorts) {
        int id = *sig.sort_id(s);
        out.push_back(offsets_[id]);
        dims.push_back(A.size(id));
      }
      return out;
    };
    for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
      Table t{0, static_cast<int>(p), {}, {}};
      t.arg_offsets = offsets_of(sig.predicates()[p].arity, t.dims);
      t.truth = &A.predicate_table(static_cast<int>(p));
      tables_.push_back(std::move(t));
    }
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      Table t{1, static_cast<int>(f), {}, {}};
      t.arg_offsets = offsets_of(sig.functions()[f].domain, t.dims);
      t.value_offset = offsets_[*sig.sort_id(sig.functions()[f].codomain)];
      t.values = &A.function_table(static_cast<int>(f));
      tables_.push_back(std::move(t));
    }
    for (std::size_t c = 0; c < sig.constants().size(); ++c) {
      Table t{2, static_cast<int>(c), {}, {}};
      t.value_offset = offsets_[*sig.sort_id(sig.constants()[c].sort)];
      tables_.push_back(std::move(t));
    }
  }

  Canonization run() {
    std::vector<int> colour(sort_of_.begin(), sort_of_.end());
    refine(colour);
    std::vector<int> prefix;
    search(colour, prefix);
    Canonization out;
    out.form.sizes = A_.sizes();
    out.form.code = best_code_;
    out.labeling = labeling_of(best_leaf_);
    return out;
  }

 private:
  /// Iterated colour refinement until the partition is stable.
  void refine(std::vector<int>& colour) const {
    int classes = count_classes(colour);
    std::vector<std::uint64_t> acc(vertices_);
    std::vector<int> args;
    while (true) {
      std::fill(acc.begin(), acc.end(), 0);
      for (const Table& t : tables_) {
        std::size_t arity = t.dims.size();
        args.assign(arity, 0);
        std::size_t cells = 1;
        for (int d : t.dims) cells *= static_cast<std::size_t>(d);
        for (std::size_t cell = 0; cell < cells; ++cell) {
          std::uint64_t h = combine(static_cast<std::uint64_t>(t.kind) * 1000003ULL, t.symbol);
          for (std::size_t i = 0; i < arity; ++i) h = combine(h, colour[t.arg_offsets[i] + args[i]]);
          int value_vertex = -1;
          if (t.kind == 0) {
            h = combine(h, (*t.truth)[cell]);
          } else {
            int value = t.kind == 1 ? (*t.values)[cell] : A_.constant(t.symbol);
            value_vertex = t.value_offset + value;
            h = combine(h, colour[value_vertex]);
          }
          for (std::size_t i = 0; i < arity; ++i) acc[t.arg_offsets[i] + args[i]] += combine(h, i + 1);
          if (value_vertex >= 0) acc[value_vertex] += combine(h, 0);
          for (std::size_t i = arity; i-- > 0;) {
            if (++args[i] < t.dims[i]) break;
            args[i] = 0;
          }
        }
      }
      std::vector<std::pair<std::pair<int, std::uint64_t>, int>> keyed(vertices_);
      for (int v = 0; v < vertices_; ++v) keyed[v] = {{colour[v], acc[v]}, v};
      std::sort(keyed.begin(), keyed.end());
      int rank = -1;
      for (int i = 0; i < vertices_; ++i) {
        if (i == 0 || keyed[i].first != keyed[i - 1].first) ++rank;
        colour[keyed[i].second] = rank;
      }
      int now = rank + 1;
      if (now == classes) return;
      classes = now;
    }
  }

  int count_classes(const std::vector<int>& colour) const {
    std::vector<int> c(colour);
    std::sort(c.begin(), c.end());
    return static_cast<int>(std::unique(c.begin(), c.end()) - c.begin());
  }

  /// Target cell: members of the smallest colour shared by several vertices.
  std::vector<int> target_cell(const std::vector<int>& colour) const {
    std::vector<int> count(vertices_ + 1, 0);
    for (int c : colour) ++count[c];
    int best = -1;
    for (int c = 0; c <= vertices_; ++c) {
      if (count[c] > 1) {
        best = c;
        break;
      }
    }
    std::vector<int> out;
    if (best < 0) return out;
    for (int v = 0; v < vertices_; ++v) {
      if (colour[v] == best) out.push_back(v);
    }
    return out;
  }

  void search(const std::vector<int>& colour, std::vector<int>& prefix) {
    std::vector<int> cell = target_cell(colour);
    if (cell.empty()) {
      leaf(colour);
      return;
    }
    std::vector<int> tried;
    for (int v : cell) {
      if (in_orbit_of(v, tried, prefix)) continue;
      tried.push_back(v);
      std::vector<int> child(colour.size());
      for (int u = 0; u < vertices_; ++u) child[u] = 2 * colour[u] + (colour[u] == colour[v] && u != v);
      refine(child);
      prefix.push_back(v);
      search(child, prefix);
      prefix.pop_back();
    }
  }

  bool in_orbit_of(int v, const std::vector<int>& tried, const std::vector<int>& prefix) const {
    if (tried.empty() || automorphisms_.empty()) return false;
    std::vector<int> parent(vertices_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& g : automorphisms_) {
      bool fixes = std::all_of(prefix.begin(), prefix.end(), [&](int p) { return g[p] == p; });
      if (!fixes) continue;
      for (int u = 0; u < vertices_; ++u) parent[find(u)] = find(g[u]);
    }
    int root = find(v);
    return std::any_of(tried.begin(), tried.end(), [&](int t) { return find(t) == root; });
  }

  std::vector<std::vector<int>> labeling_of(const std::vector<int>& colour) const {
    std::vector<std::vector<int>> out(offsets_.size());
    for (std::size_t s = 0; s < offsets_.size(); ++s) {
      int n = A_.size(static_cast<int>(s));
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return colour[offsets_[s] + a] < colour[offsets_[s] + b];
      });
      out[s].assign(n, 0);
      for (int k = 0; k < n; ++k) out[s][order[k]] = k;
    }
    return out;
  }

  std::vector<int> encode(const std::vector<std::vector<int>>& label) const {
    const Signature& sig = A_.signature();
    std::vector<int> code;
    std::vector<int> args;
    for (const Table& t : tables_) {
      if (t.kind == 2) {
        int s = *sig.sort_id(sig.constants()[t.symbol].sort);
        code.push_back(label[s][A_.constant(t.symbol)]);
        continue;
      }
      std::size_t cells = 1;
      for (int d : t.dims) cells *= static_cast<std::size_t>(d);
      std::vector<int> row(cells);
      std::vector<int> arg_sorts;
      for (int off : t.arg_offsets) arg_sorts.push_back(sort_of_[off]);
      int value_sort = t.kind == 1 ? sort_of_[t.value_offset] : -1;
      args.assign(t.dims.size(), 0);
      for (std::size_t cell = 0; cell < cells; ++cell) {
        std::size_t target = 0;
        for (std::size_t i = 0; i < args.size(); ++i) {
          target = target * t.dims[i] + label[arg_sorts[i]][args[i]];
        }
        row[target] = t.kind == 0 ? (*t.truth)[cell] : label[value_sort][(*t.values)[cell]];
        for (std::size_t i = args.size(); i-- > 0;) {
          if (++args[i] < t.dims[i]) break;
          args[i] = 0;
        }
      }
      code.insert(code.end(), row.begin(), row.end());
    }
    return code;
  }

  void leaf(const std::vector<int>& colour) {
    auto label = labeling_of(colour);
    std::vector<int> code = encode(label);
    if (!have_best_ || code < best_code_) {
      have_best_ = true;
      best_code_ = std::move(code);
      best_leaf_ = colour;
      best_label_ = std::move(label);
      return;
    }
    if (code == best_code_) {
      // label_best^-1 . label_this is an automorphism.
      std::vector<int> g(vertices_);
      for (std::size_t s = 0; s < offsets_.size(); ++s) {
        int n = A_.size(static_cast<int>(s));
        std::vector<int> inverse_best(n);
        for (int i = 0; i < n; ++i) inverse_best[best_label_[s][i]] = i;
        for (int i = 0; i < n; ++i) g[offsets_[s] + i] = offsets_[s] + inverse_best[label[s][i]];
      }
      automorphisms_.push_back(std::move(g));
    }
  }

  const FiniteStructure& A_;
  std::vector<int> offsets_;
  std::vector<int> sort_of_;
  int vertices_ = 0;
  std::vector<Table> tables_;
  bool have_best_ = false;
  std::vector<int> best_code_;
  std::vector<int> best_leaf_;
  std::vector<std::vector<int>> best_label_;
  std::vector<std::vector<int>> automorphisms_;
};

}  // namespace

Canonization canonize(const FiniteStructure& A) { return Canonizer(A).run(); }

CanonicalForm canonical_form(const FiniteStructure& A) { return canonize(A).form; }

FiniteStructure relabel(const FiniteStructure& A, const std::vector<std::vector<int>>& perm) {
  const Signature& sig = A.signature();
  std::vector<std::vector<Element>> carriers(sig.sorts().size());
  for (std::size_t s = 0; s < carriers.size(); ++s) {
    const auto& old = A.carrier(static_cast<int>(s));
    carriers[s].resize(old.size(), old.front());
    for (std::size_t i = 0; i < old.size(); ++i) carriers[s][perm[s][i]] = old[i];
  }
  auto move_table = [&](const std::vector<std::string>& sorts, auto&& old_value, auto& out) {
    std::vector<int> dims;
    std::vector<int> ids;
    std::size_t cells = 1;
    for (const auto& s : sorts) {
      ids.push_back(*sig.sort_id(s));
      dims.push_back(A.size(ids.back()));
      cells *= static_cast<std::size_t>(dims.back());
    }
    std::vector<int> args(dims.size(), 0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t target = 0;
      for (std::size_t i = 0; i < args.size(); ++i) target = target * dims[i] + perm[ids[i]][args[i]];
      out[target] = old_value(cell);
      for (std::size_t i = args.size(); i-- > 0;) {
        if (++args[i] < dims[i]) break;
        args[i] = 0;
      }
    }
  };
  std::vector<std::vector<std::uint8_t>> predicates;
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    const auto& old = A.predicate_table(static_cast<int>(p));
    std::vector<std::uint8_t> out(old.size());
    move_table(sig.predicates()[p].arity, [&](std::size_t c) { return old[c]; }, out);
    predicates.push_back(std::move(out));
  }
  std::vector<std::vector<int>> functions;
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& old = A.function_table(static_cast<int>(f));
    int cod = *sig.sort_id(sig.functions()[f].codomain);
    std::vector<int> out(old.size());
    move_table(sig.functions()[f].domain, [&](std::size_t c) { return perm[cod][old[c]]; }, out);
    functions.push_back(std::move(out));
  }
  std::vector<int> constants;
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    int s = *sig.sort_id(sig.constants()[c].sort);
    constants.push_back(perm[s][A.constant(static_cast<int>(c))]);
  }
  return FiniteStructure(A.signature_ptr(), std::move(carriers), std::move(predicates),
                         std::move(functions), std::move(constants));
}

}  // namespace morita
