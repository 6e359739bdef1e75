#include "morita/morphism.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "lexer.hpp"
#include "morita/text.hpp"

namespace morita {

const std::vector<int>& Morphism::map(std::string_view sort) const {
  auto id = source.signature().sort_id(sort);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "morphism has no sort '" + std::string(sort) + "'");
  return maps[*id];
}

Element Morphism::operator()(const Element& e) const {
  int i = source.index_of(e);
  if (i < 0) throw Error(ErrorKind::InvalidStructure, "element is not in the source");
  return target.carrier(e.sort())[map(e.sort())[i]];
}

Morphism identity(const FiniteStructure& A) {
  std::vector<std::vector<int>> maps;
  for (int s = 0; s < static_cast<int>(A.signature().sorts().size()); ++s) {
    std::vector<int> m(A.size(s));
    for (int i = 0; i < A.size(s); ++i) m[i] = i;
    maps.push_back(std::move(m));
  }
  return {A, A, std::move(maps)};
}

Morphism compose(const Morphism& g, const Morphism& h) {
  std::vector<std::vector<int>> maps;
  const auto& sorts = h.source.signature().sorts();
  for (std::size_t s = 0; s < sorts.size(); ++s) {
    if (!g.source.signature().has_sort(sorts[s])) {
      throw Error(ErrorKind::SignatureMismatch, "cannot compose: sort '" + sorts[s] + "' missing");
    }
    const auto& gm = g.map(sorts[s]);
    std::vector<int> m;
    for (int j : h.maps[s]) {
      if (j < 0 || j >= static_cast<int>(gm.size())) {
        throw Error(ErrorKind::SignatureMismatch, "cannot compose: carriers differ");
      }
      m.push_back(gm[j]);
    }
    maps.push_back(std::move(m));
  }
  return {h.source, g.target, std::move(maps)};
}

Morphism inverse(const Morphism& h) {
  std::vector<std::vector<int>> maps;
  for (const auto& sort : h.target.signature().sorts()) {
    const auto& m = h.map(sort);
    std::vector<int> inv(h.target.size(sort), -1);
    for (std::size_t i = 0; i < m.size(); ++i) inv.at(m[i]) = static_cast<int>(i);
    for (int x : inv) {
      if (x < 0) throw Error(ErrorKind::InvalidStructure, "morphism is not bijective");
    }
    maps.push_back(std::move(inv));
  }
  return {h.target, h.source, std::move(maps)};
}

bool well_typed(const Morphism& h) {
  const auto& sorts = h.source.signature().sorts();
  if (h.maps.size() != sorts.size()) return false;
  for (std::size_t s = 0; s < sorts.size(); ++s) {
    if (!h.target.signature().has_sort(sorts[s])) return false;
    if (static_cast<int>(h.maps[s].size()) != h.source.size(static_cast<int>(s))) return false;
    int n = h.target.size(sorts[s]);
    for (int j : h.maps[s]) {
      if (j < 0 || j >= n) return false;
    }
  }
  return true;
}

namespace {

/// Calls fn on every tuple over dims; stops early when fn returns false.
bool all_tuples(const std::vector<int>& dims, const std::function<bool(const std::vector<int>&)>& fn) {
  std::vector<int> idx(dims.size(), 0);
  for (int d : dims) {
    if (d == 0) return true;
  }
  while (true) {
    if (!fn(idx)) return false;
    int k = static_cast<int>(dims.size()) - 1;
    while (k >= 0 && ++idx[k] == dims[k]) idx[k--] = 0;
    if (k < 0) return true;
  }
}

std::vector<int> sort_ids(const Signature& sig, const std::vector<std::string>& sorts) {
  std::vector<int> out;
  for (const auto& s : sorts) out.push_back(*sig.sort_id(s));
  return out;
}

std::vector<int> dims(const FiniteStructure& A, const std::vector<int>& ids) {
  std::vector<int> out;
  for (int s : ids) out.push_back(A.size(s));
  return out;
}

/// Backtracking search for isomorphisms; maps are index-level and use the
/// common signature's sort ids.
class IsoSearch {
 public:
  IsoSearch(const FiniteStructure& M, const FiniteStructure& N) : M_(M), N_(N) {
    const Signature& sig = M.signature();
    int ns = static_cast<int>(sig.sorts().size());
    map_.resize(ns);
    used_.resize(ns);
    for (int s = 0; s < ns; ++s) {
      map_[s].assign(M.size(s), -1);
      used_[s].assign(N.size(s), false);
    }
    for (const auto& p : sig.predicates()) preds_.push_back(sort_ids(sig, p.arity));
    for (const auto& f : sig.functions()) {
      auto ids = sort_ids(sig, f.domain);
      ids.push_back(*sig.sort_id(f.codomain));
      funcs_.push_back(std::move(ids));
    }
    for (const auto& c : sig.constants()) consts_.push_back(*sig.sort_id(c.sort));
    for (int s = 0; s < ns; ++s) {
      for (int i = 0; i < M.size(s); ++i) order_.push_back({s, i});
    }
  }

  void run(const std::function<bool(const std::vector<std::vector<int>>&)>& emit) {
    emit_ = &emit;
    stopped_ = false;
    dfs(0);
  }

 private:
  bool mentions(const std::vector<int>& sorts, const std::vector<int>& tuple, int s, int i) const {
    for (std::size_t k = 0; k < sorts.size(); ++k) {
      if (sorts[k] == s && tuple[k] == i) return true;
    }
    return false;
  }

  bool assigned(const std::vector<int>& sorts, const std::vector<int>& tuple,
                std::vector<int>& image) const {
    image.resize(tuple.size());
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      image[k] = map_[sorts[k]][tuple[k]];
      if (image[k] < 0) return false;
    }
    return true;
  }

  /// Every fully mapped cell touching (s, i) is preserved.
  bool consistent(int s, int i) const {
    std::vector<int> image;
    for (std::size_t p = 0; p < preds_.size(); ++p) {
      const auto& sorts = preds_[p];
      if (std::find(sorts.begin(), sorts.end(), s) == sorts.end()) continue;
      bool ok = all_tuples(dims(M_, sorts), [&](const std::vector<int>& t) {
        if (!mentions(sorts, t, s, i) || !assigned(sorts, t, image)) return true;
        return M_.holds(static_cast<int>(p), t) == N_.holds(static_cast<int>(p), image);
      });
      if (!ok) return false;
    }
    for (std::size_t f = 0; f < funcs_.size(); ++f) {
      const auto& sorts = funcs_[f];
      if (std::find(sorts.begin(), sorts.end(), s) == sorts.end()) continue;
      std::vector<int> domain(sorts.begin(), sorts.end() - 1);
      int cod = sorts.back();
      bool ok = all_tuples(dims(M_, domain), [&](const std::vector<int>& t) {
        int value = M_.apply(static_cast<int>(f), t);
        bool touches = mentions(domain, t, s, i) || (cod == s && value == i);
        if (!touches || !assigned(domain, t, image)) return true;
        int hv = map_[cod][value];
        return hv < 0 || N_.apply(static_cast<int>(f), image) == hv;
      });
      if (!ok) return false;
    }
    for (std::size_t c = 0; c < consts_.size(); ++c) {
      if (consts_[c] != s || M_.constant(static_cast<int>(c)) != i) continue;
      if (map_[s][i] != N_.constant(static_cast<int>(c))) return false;
    }
    return true;
  }

  void dfs(std::size_t k) {
    if (stopped_) return;
    if (k == order_.size()) {
      if (!(*emit_)(map_)) stopped_ = true;
      return;
    }
    auto [s, i] = order_[k];
    for (int j = 0; j < N_.size(s) && !stopped_; ++j) {
      if (used_[s][j]) continue;
      map_[s][i] = j;
      used_[s][j] = true;
      if (consistent(s, i)) dfs(k + 1);
      used_[s][j] = false;
      map_[s][i] = -1;
    }
  }

  const FiniteStructure& M_;
  const FiniteStructure& N_;
  std::vector<std::vector<int>> preds_, funcs_;
  std::vector<int> consts_;
  std::vector<std::pair<int, int>> order_;
  std::vector<std::vector<int>> map_;
  std::vector<std::vector<bool>> used_;
  const std::function<bool(const std::vector<std::vector<int>>&)>* emit_ = nullptr;
  bool stopped_ = false;
};

bool comparable(const FiniteStructure& M, const FiniteStructure& N) {
  if (!(M.signature() == N.signature())) {
    throw Error(ErrorKind::SignatureMismatch, "structures have different signatures");
  }
  return M.sizes() == N.sizes();
}

}  // namespace

bool is_isomorphism(const Morphism& h) {
  if (!well_typed(h) || !(h.source.signature() == h.target.signature())) return false;
  if (h.source.sizes() != h.target.sizes()) return false;
  for (const auto& m : h.maps) {
    std::vector<bool> hit(m.size(), false);
    for (int j : m) {
      if (hit[j]) return false;
      hit[j] = true;
    }
  }
  const FiniteStructure& M = h.source;
  const FiniteStructure& N = h.target;
  const Signature& sig = M.signature();
  std::vector<int> image;
  auto mapped = [&](const std::vector<int>& sorts, const std::vector<int>& t) {
    image.resize(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) image[k] = h.maps[sorts[k]][t[k]];
  };
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    auto sorts = sort_ids(sig, sig.predicates()[p].arity);
    bool ok = all_tuples(dims(M, sorts), [&](const std::vector<int>& t) {
      mapped(sorts, t);
      return M.holds(static_cast<int>(p), t) == N.holds(static_cast<int>(p), image);
    });
    if (!ok) return false;
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    auto sorts = sort_ids(sig, sig.functions()[f].domain);
    int cod = *sig.sort_id(sig.functions()[f].codomain);
    bool ok = all_tuples(dims(M, sorts), [&](const std::vector<int>& t) {
      mapped(sorts, t);
      return h.maps[cod][M.apply(static_cast<int>(f), t)] == N.apply(static_cast<int>(f), image);
    });
    if (!ok) return false;
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    int s = *sig.sort_id(sig.constants()[c].sort);
    if (h.maps[s][M.constant(static_cast<int>(c))] != N.constant(static_cast<int>(c))) {
      return false;
    }
  }
  return true;
}

bool is_elementary_embedding(const Morphism& h) { return is_isomorphism(h); }

std::vector<Morphism> enumerate_isomorphisms(const FiniteStructure& M, const FiniteStructure& N) {
  std::vector<Morphism> out;
  if (!comparable(M, N)) return out;
  IsoSearch(M, N).run([&](const std::vector<std::vector<int>>& maps) {
    out.push_back({M, N, maps});
    return true;
  });
  return out;
}

std::optional<Morphism> find_isomorphism(const FiniteStructure& M, const FiniteStructure& N) {
  std::optional<Morphism> out;
  if (!comparable(M, N)) return out;
  if (canonical_form(M) != canonical_form(N)) return out;
  IsoSearch(M, N).run([&](const std::vector<std::vector<int>>& maps) {
    out = Morphism{M, N, maps};
    return false;
  });
  return out;
}

bool isomorphic(const FiniteStructure& M, const FiniteStructure& N) {
  return comparable(M, N) && canonical_form(M) == canonical_form(N);
}

Morphism reduct_morphism(const Morphism& h, const Signature& sig) {
  FiniteStructure source = reduct(h.source, sig);
  FiniteStructure target = reduct(h.target, sig);
  std::vector<std::vector<int>> maps;
  for (const auto& s : sig.sorts()) maps.push_back(h.map(s));
  return {std::move(source), std::move(target), std::move(maps)};
}

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

int unary(const FiniteStructure& A, const std::string& f, int arg) {
  int id = *A.signature().function_id(f);
  int args[1] = {arg};
  return A.apply(id, args);
}

[[noreturn]] void not_elementary(const std::string& sort, const std::string& why) {
  throw Error(ErrorKind::NotElementary, "cannot lift to sort '" + sort + "': " + why);
}

}  // namespace

Morphism lift_morphism(const Morphism& h, const FiniteStructure& M, const FiniteStructure& N,
                       const ExtensionStep& step) {
  const Signature& sig = step.derived();
  if (!(M.signature() == sig) || !(N.signature() == sig)) {
    throw Error(ErrorKind::SignatureMismatch, "lifted structures must have the extended signature");
  }
  std::vector<std::vector<int>> maps(sig.sorts().size());
  for (const auto& s : step.base().sorts()) {
    const auto& m = h.map(s);
    if (static_cast<int>(m.size()) != M.size(s)) {
      throw Error(ErrorKind::SignatureMismatch, "morphism does not match the carrier of '" + s + "'");
    }
    maps[*sig.sort_id(s)] = m;
  }
  auto base_map = [&](const std::string& s, int i) { return h.map(s)[i]; };
  for (const auto& d : step.definitions()) {
    std::visit(
        Overloaded{
            [&](const ProductSortDef& p) {
              auto& out = maps[*sig.sort_id(p.sort)];
              for (int m = 0; m < M.size(p.sort); ++m) {
                int a = base_map(p.left, unary(M, p.proj1, m));
                int b = base_map(p.right, unary(M, p.proj2, m));
                int found = -1;
                for (int n = 0; n < N.size(p.sort); ++n) {
                  if (unary(N, p.proj1, n) != a || unary(N, p.proj2, n) != b) continue;
                  if (found >= 0) not_elementary(p.sort, "pair is not unique");
                  found = n;
                }
                if (found < 0) not_elementary(p.sort, "no pair with the mapped components");
                out.push_back(found);
              }
            },
            [&](const CoproductSortDef& p) {
              auto& out = maps[*sig.sort_id(p.sort)];
              for (int m = 0; m < M.size(p.sort); ++m) {
                int found = -1;
                for (int a = 0; a < M.size(p.left) && found < 0; ++a) {
                  if (unary(M, p.inj1, a) == m) found = unary(N, p.inj1, base_map(p.left, a));
                }
                for (int b = 0; b < M.size(p.right) && found < 0; ++b) {
                  if (unary(M, p.inj2, b) == m) found = unary(N, p.inj2, base_map(p.right, b));
                }
                if (found < 0) not_elementary(p.sort, "element is in neither summand");
                out.push_back(found);
              }
            },
            [&](const SubsortDef& p) {
              auto& out = maps[*sig.sort_id(p.sort)];
              for (int m = 0; m < M.size(p.sort); ++m) {
                int a = base_map(p.parent, unary(M, p.inclusion, m));
                int found = -1;
                for (int n = 0; n < N.size(p.sort); ++n) {
                  if (unary(N, p.inclusion, n) != a) continue;
                  if (found >= 0) not_elementary(p.sort, "inclusion is not injective");
                  found = n;
                }
                if (found < 0) not_elementary(p.sort, "image is outside the subsort");
                out.push_back(found);
              }
            },
            [&](const QuotientSortDef& p) {
              auto& out = maps[*sig.sort_id(p.sort)];
              for (int m = 0; m < M.size(p.sort); ++m) {
                int found = -1;
                for (int a = 0; a < M.size(p.parent) && found < 0; ++a) {
                  if (unary(M, p.projection, a) == m) {
                    found = unary(N, p.projection, base_map(p.parent, a));
                  }
                }
                if (found < 0) not_elementary(p.sort, "class has no member");
                out.push_back(found);
              }
            },
            [](const auto&) {},
        },
        d);
  }
  return {M, N, std::move(maps)};
}

std::string print_morphism(const Morphism& h) {
  std::string out;
  const auto& sorts = h.source.signature().sorts();
  for (std::size_t s = 0; s < sorts.size(); ++s) {
    const auto& carrier = h.source.carrier(static_cast<int>(s));
    for (std::size_t i = 0; i < carrier.size(); ++i) {
      out += "map " + sorts[s] + ": " + element_name(h.source, carrier[i]) + " -> " +
             element_name(h.target, h.target.carrier(sorts[s])[h.maps[s][i]]) + "\n";
    }
  }
  return out;
}

namespace {

using detail::Token;
using detail::TokenStream;

std::string element_text(TokenStream& in) {
  std::string out = in.ident("an element");
  if (in.accept("(")) {
    out += "(";
    bool first = true;
    do {
      if (!first) out += ",";
      first = false;
      out += element_text(in);
    } while (in.accept(","));
    in.expect(")");
    out += ")";
  }
  return out;
}

std::map<std::string, int> names_of(const FiniteStructure& A, int sort) {
  std::map<std::string, int> out;
  const auto& carrier = A.carrier(sort);
  for (std::size_t i = 0; i < carrier.size(); ++i) {
    out[element_name(A, carrier[i])] = static_cast<int>(i);
  }
  return out;
}

}  // namespace

Morphism parse_morphism(const FiniteStructure& source, const FiniteStructure& target,
                        std::string_view text, const std::string& file) {
  TokenStream in(detail::tokenize(text, file), file);
  const Signature& sig = source.signature();
  std::vector<std::vector<int>> maps;
  for (int s = 0; s < static_cast<int>(sig.sorts().size()); ++s) {
    maps.emplace_back(source.size(s), -1);
  }
  while (!in.at_end()) {
    in.expect("map");
    const Token& at = in.peek();
    std::string sort = in.ident("a sort");
    auto sid = sig.sort_id(sort);
    if (!sid) in.fail_at(at, "unknown sort '" + sort + "'");
    auto tid = target.signature().sort_id(sort);
    if (!tid) in.fail_at(at, "target has no sort '" + sort + "'");
    in.expect(":");
    const Token& from_at = in.peek();
    std::string from = element_text(in);
    in.expect("->");
    const Token& to_at = in.peek();
    std::string to = element_text(in);
    auto src = names_of(source, *sid);
    auto dst = names_of(target, *tid);
    auto i = src.find(from);
    if (i == src.end()) in.fail_at(from_at, "unknown source element '" + from + "'");
    auto j = dst.find(to);
    if (j == dst.end()) in.fail_at(to_at, "unknown target element '" + to + "'");
    if (maps[*sid][i->second] >= 0) in.fail_at(from_at, "element '" + from + "' mapped twice");
    maps[*sid][i->second] = j->second;
  }
  for (std::size_t s = 0; s < maps.size(); ++s) {
    for (std::size_t i = 0; i < maps[s].size(); ++i) {
      if (maps[s][i] < 0) {
        throw ParseError(file, in.peek().line, in.peek().column,
                         "no image for '" +
                             element_name(source, source.carrier(static_cast<int>(s))[i]) + "'");
      }
    }
  }
  return {source, target, std::move(maps)};
}

}  // namespace morita
