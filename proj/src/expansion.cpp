#include "morita/expansion.hpp"

#include <algorithm>
#include <map>

#include "morita/text.hpp"

namespace morita {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

template <class Fn>
void for_each_tuple(const std::vector<int>& dims, Fn fn) {
  std::vector<int> idx(dims.size(), 0);
  for (int d : dims) {
    if (d == 0) return;
  }
  while (true) {
    fn(idx);
    int k = static_cast<int>(dims.size()) - 1;
    while (k >= 0 && ++idx[k] == dims[k]) idx[k--] = 0;
    if (k < 0) return;
  }
}

class Expander {
 public:
  Expander(const FiniteStructure& M, const ExtensionStep& step)
      : M_(M), step_(step), sig_(step.derived_ptr()) {
    for (int s = 0; s < static_cast<int>(M.signature().sorts().size()); ++s) {
      carriers_.push_back(M.carrier(s));
    }
    for (std::size_t p = 0; p < M.signature().predicates().size(); ++p) {
      preds_.push_back(M.predicate_table(static_cast<int>(p)));
    }
    for (std::size_t f = 0; f < M.signature().functions().size(); ++f) {
      funcs_.push_back(M.function_table(static_cast<int>(f)));
    }
    consts_ = M.constant_table();
    preds_.resize(sig_->predicates().size());
    funcs_.resize(sig_->functions().size());
    consts_.resize(sig_->constants().size(), -1);
    carriers_.resize(sig_->sorts().size());
  }

  FiniteStructure run() {
    for (const auto& d : step_.definitions()) {
      std::visit(Overloaded{[&](const PredicateDef& p) { predicate(p); },
                            [&](const FunctionDef& f) { function(f); },
                            [&](const ConstantDef& c) { constant(c); },
                            [&](const ProductSortDef& p) { product(p); },
                            [&](const CoproductSortDef& p) { coproduct(p); },
                            [&](const SubsortDef& p) { subsort(p); },
                            [&](const QuotientSortDef& p) { quotient(p); }},
                 d);
    }
    return FiniteStructure(sig_, std::move(carriers_), std::move(preds_), std::move(funcs_),
                           std::move(consts_));
  }

 private:
  int sort(const std::string& s) const { return *sig_->sort_id(s); }
  int func(const std::string& f) const { return *sig_->function_id(f); }

  std::vector<int> dims(const std::vector<std::string>& sorts) const {
    std::vector<int> out;
    for (const auto& s : sorts) out.push_back(M_.size(s));
    return out;
  }

  std::string tuple_text(const std::vector<std::string>& sorts, const std::vector<int>& t) const {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += ", ";
      out += element_name(M_, M_.carrier(sorts[i])[t[i]]);
    }
    return out + ")";
  }

  [[noreturn]] void fail(const std::string& name, const std::string& condition,
                         const std::string& witness) const {
    throw Error(ErrorKind::AdmissibilityFailsInModel,
                name + ": " + condition + (witness.empty() ? "" : " at " + witness));
  }

  void predicate(const PredicateDef& p) {
    Evaluator phi(M_.signature(), p.formula, parameters(p));
    auto& table = preds_[*sig_->predicate_id(p.name)];
    for_each_tuple(dims(p.arity), [&](const std::vector<int>& t) {
      table.push_back(phi(M_, t) ? 1 : 0);
    });
  }

  /// The unique y with phi(args, y), or an admissibility failure.
  int witness(const std::string& name, const Evaluator& phi, std::vector<int> args,
              const std::string& sort, const std::string& where) const {
    int found = -1;
    args.push_back(0);
    for (int y = 0; y < M_.size(sort); ++y) {
      args.back() = y;
      if (!phi(M_, args)) continue;
      if (found >= 0) fail(name, "more than one value", where);
      found = y;
    }
    if (found < 0) fail(name, "no value", where);
    return found;
  }

  void function(const FunctionDef& f) {
    Evaluator phi(M_.signature(), f.formula, parameters(f));
    auto& table = funcs_[func(f.name)];
    for_each_tuple(dims(f.domain), [&](const std::vector<int>& t) {
      table.push_back(witness(f.name, phi, t, f.codomain, tuple_text(f.domain, t)));
    });
  }

  void constant(const ConstantDef& c) {
    Evaluator phi(M_.signature(), c.formula, parameters(c));
    consts_[*sig_->constant_id(c.name)] = witness(c.name, phi, {}, c.sort, "");
  }

  void product(const ProductSortDef& p) {
    auto& carrier = carriers_[sort(p.sort)];
    auto& pi1 = funcs_[func(p.proj1)];
    auto& pi2 = funcs_[func(p.proj2)];
    const auto& left = M_.carrier(p.left);
    const auto& right = M_.carrier(p.right);
    for (std::size_t a = 0; a < left.size(); ++a) {
      for (std::size_t b = 0; b < right.size(); ++b) {
        carrier.push_back(Element::pair(p.sort, left[a], right[b]));
        pi1.push_back(static_cast<int>(a));
        pi2.push_back(static_cast<int>(b));
      }
    }
  }

  void coproduct(const CoproductSortDef& p) {
    auto& carrier = carriers_[sort(p.sort)];
    auto& rho1 = funcs_[func(p.inj1)];
    auto& rho2 = funcs_[func(p.inj2)];
    for (const auto& a : M_.carrier(p.left)) {
      rho1.push_back(static_cast<int>(carrier.size()));
      carrier.push_back(Element::inj_left(p.sort, a));
    }
    for (const auto& b : M_.carrier(p.right)) {
      rho2.push_back(static_cast<int>(carrier.size()));
      carrier.push_back(Element::inj_right(p.sort, b));
    }
  }

  void subsort(const SubsortDef& p) {
    Evaluator phi(M_.signature(), p.formula, parameters(p));
    auto& carrier = carriers_[sort(p.sort)];
    auto& inc = funcs_[func(p.inclusion)];
    const auto& parent = M_.carrier(p.parent);
    for (int a = 0; a < static_cast<int>(parent.size()); ++a) {
      int args[1] = {a};
      if (!phi(M_, args)) continue;
      carrier.push_back(Element::sub(p.sort, parent[a]));
      inc.push_back(a);
    }
    if (carrier.empty()) fail(p.sort, "subsort is empty", "");
  }

  void quotient(const QuotientSortDef& p) {
    Evaluator phi(M_.signature(), p.formula, parameters(p));
    const auto& parent = M_.carrier(p.parent);
    int n = static_cast<int>(parent.size());
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n));
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        int args[2] = {a, b};
        rel[a][b] = phi(M_, args);
      }
    }
    auto name = [&](int a) { return element_name(M_, parent[a]); };
    for (int a = 0; a < n; ++a) {
      if (!rel[a][a]) fail(p.sort, "not reflexive", "(" + name(a) + ")");
      for (int b = 0; b < n; ++b) {
        if (rel[a][b] && !rel[b][a]) {
          fail(p.sort, "not symmetric", "(" + name(a) + ", " + name(b) + ")");
        }
        for (int c = 0; c < n; ++c) {
          if (rel[a][b] && rel[b][c] && !rel[a][c]) {
            fail(p.sort, "not transitive", "(" + name(a) + ", " + name(b) + ", " + name(c) + ")");
          }
        }
      }
    }
    std::vector<int> least(n);
    for (int a = 0; a < n; ++a) {
      least[a] = a;
      for (int b = 0; b < n; ++b) {
        if (rel[a][b] && parent[b] < parent[least[a]]) least[a] = b;
      }
    }
    std::map<Element, int> reps;
    for (int a = 0; a < n; ++a) reps.emplace(parent[least[a]], 0);
    auto& carrier = carriers_[sort(p.sort)];
    for (auto& [rep, index] : reps) {
      index = static_cast<int>(carrier.size());
      carrier.push_back(Element::cls(p.sort, rep));
    }
    auto& eps = funcs_[func(p.projection)];
    for (int a = 0; a < n; ++a) eps.push_back(reps.at(parent[least[a]]));
  }

  const FiniteStructure& M_;
  const ExtensionStep& step_;
  std::shared_ptr<const Signature> sig_;
  std::vector<std::vector<Element>> carriers_;
  std::vector<std::vector<std::uint8_t>> preds_;
  std::vector<std::vector<int>> funcs_;
  std::vector<int> consts_;
};

}  // namespace

FiniteStructure expand_model(const FiniteStructure& M, const Theory& T, const ExtensionStep& step) {
  if (!(step.base() == T.signature) || !(M.signature() == step.base())) {
    throw Error(ErrorKind::StepMismatch, "model, theory and step signatures differ");
  }
  if (auto axiom = failing_axiom(M, T)) {
    throw Error(ErrorKind::InvalidStructure,
                "not a model of the theory: fails " + print_formula(*axiom));
  }
  return Expander(M, step).run();
}

FiniteStructure expand_chain(const FiniteStructure& M, const Theory& T,
                             const std::vector<ExtensionStep>& steps) {
  FiniteStructure current = M;
  Theory theory = T;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    try {
      current = expand_model(current, theory, steps[k]);
      theory = extend_theory(theory, steps[k]);
    } catch (const Error& e) {
      throw Error(e.kind(), "step " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return current;
}

Theory extend_chain(const Theory& T, const std::vector<ExtensionStep>& steps) {
  Theory out = T;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    try {
      out = extend_theory(out, steps[k]);
    } catch (const Error& e) {
      throw Error(e.kind(), "step " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace morita
