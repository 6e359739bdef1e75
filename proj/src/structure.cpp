#include "morita/structure.hpp"

#include <algorithm>
#include <set>

#include "compiled.hpp"

namespace morita {

// ---------------------------------------------------------------------------
// Element

Element::Element(Kind kind, std::string sort, int index, std::vector<Element> parts)
    : kind_(kind), index_(index), sort_(std::move(sort)) {
  if (!parts.empty()) parts_ = std::make_shared<const std::vector<Element>>(std::move(parts));
}

Element Element::atom(std::string sort, int index) {
  return Element(Kind::Atom, std::move(sort), index, {});
}
Element Element::pair(std::string sort, Element first, Element second) {
  return Element(Kind::Pair, std::move(sort), 0, {std::move(first), std::move(second)});
}
Element Element::inj_left(std::string sort, Element value) {
  return Element(Kind::InjL, std::move(sort), 0, {std::move(value)});
}
Element Element::inj_right(std::string sort, Element value) {
  return Element(Kind::InjR, std::move(sort), 0, {std::move(value)});
}
Element Element::sub(std::string sort, Element value) {
  return Element(Kind::Sub, std::move(sort), 0, {std::move(value)});
}
Element Element::cls(std::string sort, Element representative) {
  return Element(Kind::Class, std::move(sort), 0, {std::move(representative)});
}

const std::vector<Element>& Element::parts() const {
  static const std::vector<Element> none;
  return parts_ ? *parts_ : none;
}

std::strong_ordering operator<=>(const Element& a, const Element& b) {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  if (auto c = a.sort_ <=> b.sort_; c != 0) return c;
  if (a.kind_ == Element::Kind::Atom) return a.index_ <=> b.index_;
  if (a.parts_ == b.parts_) return std::strong_ordering::equal;
  const auto& x = a.parts();
  const auto& y = b.parts();
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (auto c = x[i] <=> y[i]; c != 0) return c;
  }
  return x.size() <=> y.size();
}

// ---------------------------------------------------------------------------
// FiniteStructure

namespace {

std::size_t table_size(const Signature& sig, const std::vector<std::vector<Element>>& carriers,
                       const std::vector<std::string>& sorts) {
  std::size_t n = 1;
  for (const auto& s : sorts) n *= carriers[*sig.sort_id(s)].size();
  return n;
}

}  // namespace

FiniteStructure::FiniteStructure(std::shared_ptr<const Signature> sig,
                                 std::vector<std::vector<Element>> carriers,
                                 std::vector<std::vector<std::uint8_t>> predicates,
                                 std::vector<std::vector<int>> functions,
                                 std::vector<int> constants)
    : sig_(std::move(sig)),
      carriers_(std::move(carriers)),
      predicates_(std::move(predicates)),
      functions_(std::move(functions)),
      constants_(std::move(constants)) {
  const Signature& s = *sig_;
  auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidStructure, m); };
  if (carriers_.size() != s.sorts().size()) bad("wrong number of carriers");
  positions_.resize(carriers_.size());
  for (std::size_t i = 0; i < carriers_.size(); ++i) {
    if (carriers_[i].empty()) bad("carrier of sort '" + s.sorts()[i] + "' is empty");
    for (std::size_t j = 0; j < carriers_[i].size(); ++j) {
      const Element& e = carriers_[i][j];
      if (e.sort() != s.sorts()[i]) {
        bad("element of sort '" + e.sort() + "' in carrier of '" + s.sorts()[i] + "'");
      }
      if (!positions_[i].emplace(e, static_cast<int>(j)).second) {
        bad("duplicate element in carrier of '" + s.sorts()[i] + "'");
      }
    }
  }
  if (predicates_.size() != s.predicates().size()) bad("wrong number of predicate tables");
  for (std::size_t p = 0; p < predicates_.size(); ++p) {
    if (predicates_[p].size() != table_size(s, carriers_, s.predicates()[p].arity)) {
      bad("predicate table of '" + s.predicates()[p].name + "' has the wrong size");
    }
  }
  if (functions_.size() != s.functions().size()) bad("wrong number of function tables");
  for (std::size_t f = 0; f < functions_.size(); ++f) {
    const auto& decl = s.functions()[f];
    if (functions_[f].size() != table_size(s, carriers_, decl.domain)) {
      bad("function table of '" + decl.name + "' has the wrong size");
    }
    int n = size(*s.sort_id(decl.codomain));
    for (int v : functions_[f]) {
      if (v < 0 || v >= n) bad("function '" + decl.name + "' is not total on its carrier");
    }
  }
  auto dims = [&](const std::vector<std::string>& sorts) {
    std::vector<int> out;
    for (const auto& name : sorts) out.push_back(size(*s.sort_id(name)));
    return out;
  };
  for (const auto& p : s.predicates()) predicate_dims_.push_back(dims(p.arity));
  for (const auto& f : s.functions()) function_dims_.push_back(dims(f.domain));
  if (constants_.size() != s.constants().size()) bad("wrong number of constants");
  for (std::size_t c = 0; c < constants_.size(); ++c) {
    int n = size(*s.sort_id(s.constants()[c].sort));
    if (constants_[c] < 0 || constants_[c] >= n) {
      bad("constant '" + s.constants()[c].name + "' has no value");
    }
  }
}

int FiniteStructure::size(std::string_view sort) const {
  return static_cast<int>(carrier(sort).size());
}

std::vector<int> FiniteStructure::sizes() const {
  std::vector<int> out;
  for (const auto& c : carriers_) out.push_back(static_cast<int>(c.size()));
  return out;
}

const std::vector<Element>& FiniteStructure::carrier(std::string_view sort) const {
  auto id = sig_->sort_id(sort);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown sort '" + std::string(sort) + "'");
  return carriers_[*id];
}

int FiniteStructure::index_of(int sort, const Element& e) const {
  auto it = positions_[sort].find(e);
  return it == positions_[sort].end() ? -1 : it->second;
}

int FiniteStructure::index_of(const Element& e) const {
  auto id = sig_->sort_id(e.sort());
  return id ? index_of(*id, e) : -1;
}

std::size_t FiniteStructure::cell(const std::vector<int>& dims, std::span<const int> args) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    c = c * static_cast<std::size_t>(dims[i]) + static_cast<std::size_t>(args[i]);
  }
  return c;
}

std::size_t FiniteStructure::predicate_cell(int p, std::span<const int> args) const {
  return cell(predicate_dims_[p], args);
}

std::size_t FiniteStructure::function_cell(int f, std::span<const int> args) const {
  return cell(function_dims_[f], args);
}

bool FiniteStructure::holds(int predicate, std::span<const int> args) const {
  return predicates_[predicate][predicate_cell(predicate, args)] != 0;
}

int FiniteStructure::apply(int function, std::span<const int> args) const {
  return functions_[function][function_cell(function, args)];
}

std::vector<int> FiniteStructure::indices(const std::vector<std::string>& sorts,
                                          const std::vector<Element>& args) const {
  if (args.size() != sorts.size()) throw Error(ErrorKind::ArityMismatch, "wrong number of arguments");
  std::vector<int> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    int k = index_of(*sig_->sort_id(sorts[i]), args[i]);
    if (k < 0) throw Error(ErrorKind::SortMismatch, "element not in the carrier of '" + sorts[i] + "'");
    out.push_back(k);
  }
  return out;
}

bool FiniteStructure::holds(const std::string& predicate, const std::vector<Element>& args) const {
  auto id = sig_->predicate_id(predicate);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown predicate '" + predicate + "'");
  return holds(*id, indices(sig_->predicates()[*id].arity, args));
}

Element FiniteStructure::apply(const std::string& function, const std::vector<Element>& args) const {
  auto id = sig_->function_id(function);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown function '" + function + "'");
  const auto& decl = sig_->functions()[*id];
  return carriers_[*sig_->sort_id(decl.codomain)][apply(*id, indices(decl.domain, args))];
}

Element FiniteStructure::constant(const std::string& name) const {
  auto id = sig_->constant_id(name);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown constant '" + name + "'");
  return carriers_[*sig_->sort_id(sig_->constants()[*id].sort)][constants_[*id]];
}

bool operator==(const FiniteStructure& a, const FiniteStructure& b) {
  return *a.sig_ == *b.sig_ && a.carriers_ == b.carriers_ && a.predicates_ == b.predicates_ &&
         a.functions_ == b.functions_ && a.constants_ == b.constants_;
}

// ---------------------------------------------------------------------------
// StructureBuilder

StructureBuilder::StructureBuilder(std::shared_ptr<const Signature> sig) : sig_(std::move(sig)) {
  carriers_.resize(sig_->sorts().size());
  carrier_set_.assign(sig_->sorts().size(), false);
  positions_.resize(sig_->sorts().size());
}

StructureBuilder::StructureBuilder(const Signature& sig)
    : StructureBuilder(std::make_shared<const Signature>(sig)) {}

int StructureBuilder::sort_index(const std::string& sort) const {
  auto id = sig_->sort_id(sort);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown sort '" + sort + "'");
  return *id;
}

void StructureBuilder::set_atoms(const std::string& sort, int n) {
  std::vector<Element> elements;
  for (int i = 0; i < n; ++i) elements.push_back(Element::atom(sort, i));
  set_carrier(sort, std::move(elements));
}

void StructureBuilder::set_carrier(const std::string& sort, std::vector<Element> elements) {
  if (allocated_) throw Error(ErrorKind::InvalidStructure, "carriers fixed after first interpretation");
  int s = sort_index(sort);
  positions_[s].clear();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i].sort() != sort) {
      throw Error(ErrorKind::InvalidStructure,
                  "element of sort '" + elements[i].sort() + "' in carrier of '" + sort + "'");
    }
    if (!positions_[s].emplace(elements[i], static_cast<int>(i)).second) {
      throw Error(ErrorKind::InvalidStructure, "duplicate element in carrier of '" + sort + "'");
    }
  }
  carriers_[s] = std::move(elements);
  carrier_set_[s] = true;
}

int StructureBuilder::size(const std::string& sort) const {
  return static_cast<int>(carriers_[sort_index(sort)].size());
}

const std::vector<Element>& StructureBuilder::carrier(const std::string& sort) const {
  return carriers_[sort_index(sort)];
}

void StructureBuilder::require_carriers() const {
  for (std::size_t i = 0; i < carriers_.size(); ++i) {
    if (!carrier_set_[i] || carriers_[i].empty()) {
      throw Error(ErrorKind::InvalidStructure,
                  "carrier of sort '" + sig_->sorts()[i] + "' is missing or empty");
    }
  }
}

void StructureBuilder::allocate() {
  if (allocated_) return;
  require_carriers();
  auto size_of = [&](const std::vector<std::string>& sorts) {
    std::size_t n = 1;
    for (const auto& s : sorts) n *= carriers_[sort_index(s)].size();
    return n;
  };
  for (const auto& p : sig_->predicates()) predicates_.emplace_back(size_of(p.arity), 0);
  for (const auto& f : sig_->functions()) functions_.emplace_back(size_of(f.domain), -1);
  constants_.assign(sig_->constants().size(), -1);
  allocated_ = true;
}

int StructureBuilder::position(int sort, const Element& e) const {
  auto it = positions_[sort].find(e);
  if (it == positions_[sort].end()) {
    throw Error(ErrorKind::InvalidStructure,
                "element is not in the carrier of '" + sig_->sorts()[sort] + "'");
  }
  return it->second;
}

std::size_t StructureBuilder::cell(const std::vector<std::string>& sorts,
                                   std::span<const int> args) const {
  if (args.size() != sorts.size()) throw Error(ErrorKind::ArityMismatch, "wrong number of arguments");
  std::size_t c = 0;
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    const auto& carrier = carriers_[sort_index(sorts[i])];
    if (args[i] < 0 || static_cast<std::size_t>(args[i]) >= carrier.size()) {
      throw Error(ErrorKind::InvalidStructure, "argument out of range");
    }
    c = c * carrier.size() + static_cast<std::size_t>(args[i]);
  }
  return c;
}

void StructureBuilder::set_predicate(int p, std::span<const int> args, bool value) {
  allocate();
  predicates_[p][cell(sig_->predicates()[p].arity, args)] = value ? 1 : 0;
}

void StructureBuilder::set_function(int f, std::span<const int> args, int value) {
  allocate();
  const auto& decl = sig_->functions()[f];
  if (value < 0 || value >= static_cast<int>(carriers_[sort_index(decl.codomain)].size())) {
    throw Error(ErrorKind::InvalidStructure, "function value out of range");
  }
  functions_[f][cell(decl.domain, args)] = value;
}

void StructureBuilder::set_constant(int c, int value) {
  allocate();
  const auto& decl = sig_->constants()[c];
  if (value < 0 || value >= static_cast<int>(carriers_[sort_index(decl.sort)].size())) {
    throw Error(ErrorKind::InvalidStructure, "constant value out of range");
  }
  constants_[c] = value;
}

void StructureBuilder::set_predicate(const std::string& p, const std::vector<Element>& args,
                                     bool value) {
  auto id = sig_->predicate_id(p);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown predicate '" + p + "'");
  const auto& arity = sig_->predicates()[*id].arity;
  if (args.size() != arity.size()) throw Error(ErrorKind::ArityMismatch, "wrong number of arguments");
  std::vector<int> idx;
  for (std::size_t i = 0; i < args.size(); ++i) idx.push_back(position(sort_index(arity[i]), args[i]));
  set_predicate(*id, idx, value);
}

void StructureBuilder::set_function(const std::string& f, const std::vector<Element>& args,
                                    const Element& value) {
  auto id = sig_->function_id(f);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown function '" + f + "'");
  const auto& decl = sig_->functions()[*id];
  if (args.size() != decl.domain.size()) {
    throw Error(ErrorKind::ArityMismatch, "wrong number of arguments");
  }
  std::vector<int> idx;
  for (std::size_t i = 0; i < args.size(); ++i) {
    idx.push_back(position(sort_index(decl.domain[i]), args[i]));
  }
  set_function(*id, idx, position(sort_index(decl.codomain), value));
}

void StructureBuilder::set_constant(const std::string& c, const Element& value) {
  auto id = sig_->constant_id(c);
  if (!id) throw Error(ErrorKind::UnknownSymbol, "unknown constant '" + c + "'");
  set_constant(*id, position(sort_index(sig_->constants()[*id].sort), value));
}

FiniteStructure StructureBuilder::build() const {
  const_cast<StructureBuilder*>(this)->allocate();
  for (std::size_t f = 0; f < functions_.size(); ++f) {
    if (std::find(functions_[f].begin(), functions_[f].end(), -1) != functions_[f].end()) {
      throw Error(ErrorKind::InvalidStructure,
                  "function '" + sig_->functions()[f].name + "' is not total");
    }
  }
  for (std::size_t c = 0; c < constants_.size(); ++c) {
    if (constants_[c] < 0) {
      throw Error(ErrorKind::InvalidStructure,
                  "constant '" + sig_->constants()[c].name + "' has no value");
    }
  }
  return FiniteStructure(sig_, carriers_, predicates_, functions_, constants_);
}

// ---------------------------------------------------------------------------
// Evaluation

struct Evaluator::Program {
  detail::Compiled compiled;
};

Evaluator::Evaluator(const Signature& sig, const Formula& f, std::vector<Variable> free_order)
    : program_(std::make_unique<Program>()), free_order_(std::move(free_order)) {
  detail::Compiler compiler(sig);
  program_->compiled = compiler.compile(f, free_order_);
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

bool Evaluator::operator()(const FiniteStructure& A, std::span<const int> free_values) const {
  int small[32];
  std::vector<int> big;
  int* env = small;
  if (program_->compiled.slots > 32) {
    big.resize(program_->compiled.slots);
    env = big.data();
  }
  for (std::size_t i = 0; i < free_order_.size(); ++i) env[i] = free_values[i];
  detail::FullModel model(A);
  return detail::eval(program_->compiled.root, model, env) == detail::kTrue;
}

struct TermEvaluator::Program {
  detail::CTerm term;
  int slots = 0;
};

TermEvaluator::TermEvaluator(const Signature& sig, const Term& t, std::vector<Variable> free_order)
    : program_(std::make_unique<Program>()) {
  detail::Compiler compiler(sig);
  program_->term = compiler.compile_term(t, free_order, &program_->slots);
}

TermEvaluator::~TermEvaluator() = default;
TermEvaluator::TermEvaluator(TermEvaluator&&) noexcept = default;

int TermEvaluator::operator()(const FiniteStructure& A, std::span<const int> free_values) const {
  detail::FullModel model(A);
  return detail::eval_term(program_->term, model, free_values.data());
}

namespace {

std::pair<std::vector<Variable>, std::vector<int>> unpack(const FiniteStructure& A,
                                                          const Assignment& rho) {
  std::vector<Variable> vars;
  std::vector<int> values;
  for (const auto& [v, e] : rho) {
    auto sort = A.signature().sort_id(v.sort);
    if (!sort) throw Error(ErrorKind::UnknownSymbol, "unknown sort '" + v.sort + "'");
    int k = A.index_of(*sort, e);
    if (k < 0) {
      throw Error(ErrorKind::SortMismatch,
                  "value of '" + v.name + "' is not in the carrier of '" + v.sort + "'");
    }
    vars.push_back(v);
    values.push_back(k);
  }
  return {vars, values};
}

}  // namespace

Element eval_term(const FiniteStructure& A, const Term& t, const Assignment& rho) {
  auto [vars, values] = unpack(A, rho);
  std::string sort = sort_of_term(A.signature(), Context(vars.begin(), vars.end()), t);
  TermEvaluator ev(A.signature(), t, vars);
  return A.carrier(sort)[ev(A, values)];
}

bool satisfies(const FiniteStructure& A, const Formula& f, const Assignment& rho) {
  auto [vars, values] = unpack(A, rho);
  Evaluator ev(A.signature(), f, vars);
  return ev(A, values);
}

std::optional<Formula> failing_axiom(const FiniteStructure& A, const Theory& T) {
  if (!A.signature().contains(T.signature)) {
    throw Error(ErrorKind::SignatureMismatch, "structure does not interpret the theory's signature");
  }
  for (const auto& axiom : T.axioms) {
    if (!Evaluator(A.signature(), axiom)(A)) return axiom;
  }
  return std::nullopt;
}

bool is_model(const FiniteStructure& A, const Theory& T) { return !failing_axiom(A, T); }

FiniteStructure reduct(const FiniteStructure& A, const Signature& sig) {
  const Signature& full = A.signature();
  if (!full.contains(sig)) {
    throw Error(ErrorKind::NotSubsignature, "reduct signature is not contained in the structure's");
  }
  std::vector<std::vector<Element>> carriers;
  for (const auto& s : sig.sorts()) carriers.push_back(A.carrier(s));
  std::vector<std::vector<std::uint8_t>> predicates;
  for (const auto& p : sig.predicates()) predicates.push_back(A.predicate_table(*full.predicate_id(p.name)));
  std::vector<std::vector<int>> functions;
  for (const auto& f : sig.functions()) functions.push_back(A.function_table(*full.function_id(f.name)));
  std::vector<int> constants;
  for (const auto& c : sig.constants()) constants.push_back(A.constant(*full.constant_id(c.name)));
  return FiniteStructure(std::make_shared<const Signature>(sig), std::move(carriers),
                         std::move(predicates), std::move(functions), std::move(constants));
}

}  // namespace morita
