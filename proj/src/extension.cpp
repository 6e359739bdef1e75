#include "morita/extension.hpp"

#include <set>

#include "parser.hpp"

namespace morita {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

Term v(const Variable& x) { return Term::var(x); }
Term app(const std::string& f, std::vector<Term> args) { return Term::apply(f, std::move(args)); }

std::vector<Variable> numbered(const std::vector<std::string>& sorts) {
  std::vector<Variable> out;
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    out.push_back({"x" + std::to_string(i + 1), sorts[i]});
  }
  return out;
}

std::vector<Term> as_terms(const std::vector<Variable>& vars) {
  std::vector<Term> out;
  for (const auto& x : vars) out.push_back(v(x));
  return out;
}

Formula forall_all(const std::vector<Variable>& vars, Formula body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = Formula::forall(*it, body);
  return body;
}

Formula instantiate(const Formula& f, const std::vector<Variable>& params,
                    const std::vector<Term>& values) {
  std::map<Variable, Term> subst;
  FreshNames fresh = FreshNames::avoiding(f);
  for (std::size_t i = 0; i < params.size(); ++i) {
    subst.emplace(params[i], values[i]);
    fresh.avoid(values[i]);
  }
  return substitute(f, subst, fresh);
}

}  // namespace

std::vector<std::string> introduced_symbols(const ExplicitDefinition& d) {
  return std::visit(
      Overloaded{
          [](const PredicateDef& p) { return std::vector<std::string>{p.name}; },
          [](const FunctionDef& f) { return std::vector<std::string>{f.name}; },
          [](const ConstantDef& c) { return std::vector<std::string>{c.name}; },
          [](const ProductSortDef& s) { return std::vector<std::string>{s.sort, s.proj1, s.proj2}; },
          [](const CoproductSortDef& s) {
            return std::vector<std::string>{s.sort, s.inj1, s.inj2};
          },
          [](const SubsortDef& s) { return std::vector<std::string>{s.sort, s.inclusion}; },
          [](const QuotientSortDef& s) { return std::vector<std::string>{s.sort, s.projection}; },
      },
      d);
}

std::vector<Variable> parameters(const ExplicitDefinition& d) {
  return std::visit(
      Overloaded{
          [](const PredicateDef& p) { return numbered(p.arity); },
          [](const FunctionDef& f) {
            auto out = numbered(f.domain);
            out.push_back({"y", f.codomain});
            return out;
          },
          [](const ConstantDef& c) { return std::vector<Variable>{{"y", c.sort}}; },
          [](const ProductSortDef&) { return std::vector<Variable>{}; },
          [](const CoproductSortDef&) { return std::vector<Variable>{}; },
          [](const SubsortDef& s) { return std::vector<Variable>{{"x", s.parent}}; },
          [](const QuotientSortDef& s) {
            return std::vector<Variable>{{"x1", s.parent}, {"x2", s.parent}};
          },
      },
      d);
}

const Formula* defining_formula(const ExplicitDefinition& d) {
  return std::visit(Overloaded{
                        [](const PredicateDef& p) -> const Formula* { return &p.formula; },
                        [](const FunctionDef& f) -> const Formula* { return &f.formula; },
                        [](const ConstantDef& c) -> const Formula* { return &c.formula; },
                        [](const ProductSortDef&) -> const Formula* { return nullptr; },
                        [](const CoproductSortDef&) -> const Formula* { return nullptr; },
                        [](const SubsortDef& s) -> const Formula* { return &s.formula; },
                        [](const QuotientSortDef& s) -> const Formula* { return &s.formula; },
                    },
                    d);
}

bool defines_sort(const ExplicitDefinition& d) { return d.index() >= 3; }

namespace {

std::vector<std::string> referenced_sorts(const ExplicitDefinition& d) {
  return std::visit(
      Overloaded{
          [](const PredicateDef& p) { return p.arity; },
          [](const FunctionDef& f) {
            auto out = f.domain;
            out.push_back(f.codomain);
            return out;
          },
          [](const ConstantDef& c) { return std::vector<std::string>{c.sort}; },
          [](const ProductSortDef& s) { return std::vector<std::string>{s.left, s.right}; },
          [](const CoproductSortDef& s) { return std::vector<std::string>{s.left, s.right}; },
          [](const SubsortDef& s) { return std::vector<std::string>{s.parent}; },
          [](const QuotientSortDef& s) { return std::vector<std::string>{s.parent}; },
      },
      d);
}

void declare(Signature& sig, const ExplicitDefinition& d) {
  std::visit(Overloaded{
                 [&](const PredicateDef& p) { sig.add_predicate({p.name, p.arity}); },
                 [&](const FunctionDef& f) { sig.add_function({f.name, f.domain, f.codomain}); },
                 [&](const ConstantDef& c) { sig.add_constant({c.name, c.sort}); },
                 [&](const ProductSortDef& s) {
                   sig.add_sort(s.sort);
                   sig.add_function({s.proj1, {s.sort}, s.left});
                   sig.add_function({s.proj2, {s.sort}, s.right});
                 },
                 [&](const CoproductSortDef& s) {
                   sig.add_sort(s.sort);
                   sig.add_function({s.inj1, {s.left}, s.sort});
                   sig.add_function({s.inj2, {s.right}, s.sort});
                 },
                 [&](const SubsortDef& s) {
                   sig.add_sort(s.sort);
                   sig.add_function({s.inclusion, {s.sort}, s.parent});
                 },
                 [&](const QuotientSortDef& s) {
                   sig.add_sort(s.sort);
                   sig.add_function({s.projection, {s.parent}, s.sort});
                 },
             },
             d);
}

}  // namespace

ExtensionStep::ExtensionStep(Signature base, std::vector<ExplicitDefinition> definitions)
    : base_(std::make_shared<const Signature>(std::move(base))),
      definitions_(std::move(definitions)) {
  std::set<std::string> taken;
  for (const auto& d : definitions_) {
    const std::string owner = introduced_symbols(d).front();
    for (const auto& name : introduced_symbols(d)) {
      if (name.empty() || name[0] == '_' || detail::is_keyword(name)) {
        problems_.push_back("'" + name + "' is not a valid symbol name");
      } else if (base_->has_symbol(name) || base_->has_sort(name) || !taken.insert(name).second) {
        problems_.push_back("'" + name + "' is already declared");
      }
    }
    if (defines_sort(d) && owner == "x") problems_.push_back("'x' cannot name a sort");
    bool sorts_ok = true;
    for (const auto& s : referenced_sorts(d)) {
      if (!base_->has_sort(s)) {
        problems_.push_back(owner + ": '" + s + "' is not a sort of the base signature");
        sorts_ok = false;
      }
    }
    const Formula* f = defining_formula(d);
    if (!f || !sorts_ok) continue;
    auto params = parameters(d);
    Context ctx(params.begin(), params.end());
    try {
      if (contains_unique_exists(*f)) throw Error(ErrorKind::MacroNotExpanded, "unexpanded exists1");
      check_formula(*base_, ctx, *f);
      for (const auto& x : free_variables(*f)) {
        if (!ctx.contains(x)) {
          throw Error(ErrorKind::FreeVariable, "free variable '" + x.name + "' is not a parameter");
        }
      }
    } catch (const Error& e) {
      problems_.push_back(owner + ": " + e.what());
    }
  }
  if (!problems_.empty()) return;
  Signature sig = *base_;
  try {
    for (const auto& d : definitions_) declare(sig, d);
    derived_ = std::make_shared<const Signature>(std::move(sig));
  } catch (const Error& e) {
    problems_.push_back(e.what());
  }
}

const std::shared_ptr<const Signature>& ExtensionStep::derived_ptr() const {
  if (!derived_) {
    throw Error(ErrorKind::InvalidStep,
                "ill-formed extension step: " + (problems_.empty() ? "" : problems_.front()));
  }
  return derived_;
}

const Signature& ExtensionStep::derived() const { return *derived_ptr(); }

std::vector<std::string> ExtensionStep::new_sorts() const {
  std::vector<std::string> out;
  for (const auto& d : definitions_) {
    if (defines_sort(d)) out.push_back(introduced_symbols(d).front());
  }
  return out;
}

const ExplicitDefinition* ExtensionStep::definition_of(std::string_view symbol) const {
  for (const auto& d : definitions_) {
    for (const auto& name : introduced_symbols(d)) {
      if (name == symbol) return &d;
    }
  }
  return nullptr;
}

Formula definition_sentence(const ExplicitDefinition& d) {
  return std::visit(
      Overloaded{
          [](const PredicateDef& p) {
            auto xs = numbered(p.arity);
            return forall_all(xs, Formula::iff(Formula::pred(p.name, as_terms(xs)), p.formula));
          },
          [](const FunctionDef& f) {
            auto xs = numbered(f.domain);
            Variable y{"y", f.codomain};
            Formula body = Formula::iff(Formula::eq(app(f.name, as_terms(xs)), v(y)), f.formula);
            xs.push_back(y);
            return forall_all(xs, body);
          },
          [](const ConstantDef& c) {
            Variable y{"y", c.sort};
            return Formula::forall(
                y, Formula::iff(Formula::eq(v(y), Term::constant(c.name)), c.formula));
          },
          [](const ProductSortDef& s) {
            Variable x{"x", s.left}, y{"y", s.right}, z{"z", s.sort};
            Formula body = Formula::conj(Formula::eq(app(s.proj1, {v(z)}), v(x)),
                                         Formula::eq(app(s.proj2, {v(z)}), v(y)));
            return expand_unique_exists(
                Formula::forall(x, Formula::forall(y, Formula::exists_unique(z, body))));
          },
          [](const CoproductSortDef& s) {
            Variable x{"x", s.left}, y{"y", s.right}, z{"z", s.sort};
            Formula covers = Formula::forall(
                z, Formula::disj(
                       Formula::exists_unique(x, Formula::eq(app(s.inj1, {v(x)}), v(z))),
                       Formula::exists_unique(y, Formula::eq(app(s.inj2, {v(y)}), v(z)))));
            Formula disjoint = Formula::forall(
                x, Formula::forall(y, Formula::negation(Formula::eq(app(s.inj1, {v(x)}),
                                                                    app(s.inj2, {v(y)})))));
            return expand_unique_exists(Formula::conj(covers, disjoint));
          },
          [](const SubsortDef& s) {
            Variable x{"x", s.parent}, z{"z", s.sort}, z1{"z1", s.sort}, z2{"z2", s.sort};
            Formula image = Formula::forall(
                x, Formula::iff(s.formula,
                                Formula::exists(z, Formula::eq(app(s.inclusion, {v(z)}), v(x)))));
            Formula injective = Formula::forall(
                z1, Formula::forall(
                        z2, Formula::implies(Formula::eq(app(s.inclusion, {v(z1)}),
                                                         app(s.inclusion, {v(z2)})),
                                             Formula::eq(v(z1), v(z2)))));
            return Formula::conj(image, injective);
          },
          [](const QuotientSortDef& s) {
            Variable x1{"x1", s.parent}, x2{"x2", s.parent}, x{"x", s.parent}, z{"z", s.sort};
            Formula kernel = Formula::forall(
                x1, Formula::forall(
                        x2, Formula::iff(Formula::eq(app(s.projection, {v(x1)}),
                                                     app(s.projection, {v(x2)})),
                                         s.formula)));
            Formula onto = Formula::forall(
                z, Formula::exists(x, Formula::eq(app(s.projection, {v(x)}), v(z))));
            return Formula::conj(kernel, onto);
          },
      },
      d);
}

std::vector<Formula> admissibility_conditions(const ExplicitDefinition& d) {
  return std::visit(
      Overloaded{
          [](const PredicateDef&) { return std::vector<Formula>{}; },
          [](const FunctionDef& f) {
            auto xs = numbered(f.domain);
            Variable y{"y", f.codomain};
            return std::vector<Formula>{
                expand_unique_exists(forall_all(xs, Formula::exists_unique(y, f.formula)))};
          },
          [](const ConstantDef& c) {
            Variable y{"y", c.sort};
            return std::vector<Formula>{expand_unique_exists(Formula::exists_unique(y, c.formula))};
          },
          [](const ProductSortDef&) { return std::vector<Formula>{}; },
          [](const CoproductSortDef&) { return std::vector<Formula>{}; },
          [](const SubsortDef& s) {
            return std::vector<Formula>{Formula::exists({"x", s.parent}, s.formula)};
          },
          [](const QuotientSortDef& s) {
            Variable x1{"x1", s.parent}, x2{"x2", s.parent}, x3{"x3", s.parent};
            std::vector<Variable> ps{x1, x2};
            auto at = [&](const Variable& a, const Variable& b) {
              return instantiate(s.formula, ps, {v(a), v(b)});
            };
            Formula refl = Formula::forall(x1, at(x1, x1));
            Formula symm =
                forall_all({x1, x2}, Formula::implies(at(x1, x2), at(x2, x1)));
            Formula trans = forall_all(
                {x1, x2, x3},
                Formula::implies(Formula::conj(at(x1, x2), at(x2, x3)), at(x1, x3)));
            return std::vector<Formula>{refl, symm, trans};
          },
      },
      d);
}

bool is_definitional(const ExtensionStep& s) { return s.new_sorts().empty(); }

std::string to_string(ValidationReport::Status s) {
  switch (s) {
    case ValidationReport::Status::Valid: return "Valid";
    case ValidationReport::Status::ValidUpToBound: return "ValidUpToBound";
    case ValidationReport::Status::Invalid: return "Invalid";
  }
  return {};
}

std::string render(const ValidationReport& r) {
  std::string out = to_string(r.status);
  if (r.status == ValidationReport::Status::ValidUpToBound) out += "(" + r.bound.describe() + ")";
  out += "\n";
  for (const auto& f : r.findings) {
    out += "  ";
    if (!f.definition.empty()) out += f.definition + ": ";
    out += f.message;
    if (f.condition) out += ": " + print_formula(*f.condition);
    out += "\n";
    if (f.verdict && f.verdict->countermodel) {
      std::string model = print_model(*f.verdict->countermodel);
      std::size_t start = 0;
      while (start < model.size()) {
        std::size_t end = model.find('\n', start);
        out += "    " + model.substr(start, end - start) + "\n";
        start = end + 1;
      }
    }
  }
  return out;
}

ValidationReport validate_step(const Theory& T, const ExtensionStep& s, const Bound& bound) {
  using Status = ValidationReport::Status;
  ValidationReport report;
  report.bound = bound;
  if (!(s.base() == T.signature)) {
    report.findings.push_back({Finding::Kind::StepMismatch, "",
                               "step base signature differs from the theory's signature", {}, {}});
    report.status = Status::Invalid;
    return report;
  }
  for (const auto& p : s.problems()) {
    report.findings.push_back({Finding::Kind::Syntax, "", p, {}, {}});
  }
  if (!s.well_formed()) {
    report.status = Status::Invalid;
    return report;
  }
  std::optional<std::vector<FiniteStructure>> models;
  bool bounded = false, refuted = false;
  for (const auto& d : s.definitions()) {
    std::string owner = introduced_symbols(d).front();
    for (const auto& cond : admissibility_conditions(d)) {
      bool axiom = std::any_of(T.axioms.begin(), T.axioms.end(),
                               [&](const Formula& a) { return alpha_equivalent(a, cond); });
      if (axiom) {
        report.findings.push_back({Finding::Kind::Admitted, owner, "axiom", cond, {}});
        continue;
      }
      if (!models) models = enumerate_models(T, bound);
      Entailment e = bounded_entails(*models, cond, bound);
      if (e.refuted()) {
        refuted = true;
        report.findings.push_back({Finding::Kind::Refuted, owner, "refuted", cond, e});
      } else {
        bounded = true;
        report.findings.push_back({Finding::Kind::Checked, owner, describe(e), cond, e});
      }
    }
  }
  report.status = refuted ? Status::Invalid : bounded ? Status::ValidUpToBound : Status::Valid;
  return report;
}

Theory extend_theory(const Theory& T, const ExtensionStep& s) {
  if (!(s.base() == T.signature)) {
    throw Error(ErrorKind::StepMismatch, "step base signature differs from the theory's signature");
  }
  Theory out{s.derived(), T.axioms};
  for (const auto& d : s.definitions()) out.axioms.push_back(definition_sentence(d));
  return out;
}

Bound extended_bound(const ExtensionStep& s, const Bound& bound) {
  Bound out = bound;
  for (const auto& d : s.definitions()) {
    std::visit(Overloaded{
                   [&](const ProductSortDef& p) {
                     out.set(p.sort, out.cap(p.left) * out.cap(p.right));
                   },
                   [&](const CoproductSortDef& p) {
                     out.set(p.sort, out.cap(p.left) + out.cap(p.right));
                   },
                   [&](const SubsortDef& p) { out.set(p.sort, out.cap(p.parent)); },
                   [&](const QuotientSortDef& p) { out.set(p.sort, out.cap(p.parent)); },
                   [](const auto&) {},
               },
               d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

namespace {

using detail::Token;
using detail::TokenStream;

VariableScope scope_of(const std::vector<Variable>& params) {
  VariableScope out;
  for (const auto& p : params) out[p.name] = p.sort;
  return out;
}

class ExtensionParser {
 public:
  ExtensionParser(const Signature& base, std::string_view text, const std::string& file)
      : in_(detail::tokenize(text, file), file), base_(base) {}

  ExtensionStep parse() {
    std::vector<ExplicitDefinition> defs;
    while (!in_.at_end()) {
      in_.expect("define");
      const Token& start = in_.peek();
      ExplicitDefinition d = definition();
      for (const auto& name : introduced_symbols(d)) {
        if (base_.has_symbol(name) || !taken_.insert(name).second) {
          in_.fail_at(start, "'" + name + "' is already declared");
        }
      }
      defs.push_back(std::move(d));
    }
    ExtensionStep step(base_, std::move(defs));
    if (!step.well_formed()) throw ParseError(in_.file(), 1, 1, step.problems().front());
    return step;
  }

 private:
  std::string name() {
    const Token& at = in_.peek();
    std::string n = in_.ident("a symbol name");
    detail::check_symbol_name(in_, at, n);
    return n;
  }

  ExplicitDefinition definition() {
    const Token& kw = in_.peek();
    std::string word = in_.ident("'pred', 'func', 'const' or 'sort'");
    if (word == "pred") {
      std::string n = name();
      in_.expect(":");
      auto arity = detail::parse_sort_list(in_, base_);
      in_.expect(":=");
      Formula f = body(numbered(arity));
      return PredicateDef{n, std::move(arity), f};
    }
    if (word == "func") {
      std::string n = name();
      in_.expect(":");
      auto domain = detail::parse_sort_list(in_, base_);
      in_.expect("->");
      std::string codomain = detail::parse_sort(in_, base_);
      in_.expect(":=");
      auto params = numbered(domain);
      params.push_back({"y", codomain});
      Formula f = body(params);
      return FunctionDef{n, std::move(domain), codomain, f};
    }
    if (word == "const") {
      std::string n = name();
      in_.expect(":");
      std::string sort = detail::parse_sort(in_, base_);
      in_.expect(":=");
      Formula f = body({{"y", sort}});
      return ConstantDef{n, sort, f};
    }
    if (word != "sort") in_.fail_at(kw, "expected 'pred', 'func', 'const' or 'sort'");
    const Token& at = in_.peek();
    std::string sort = name();
    if (sort == "x") in_.fail_at(at, "'x' cannot name a sort");
    in_.expect("=");
    const Token& ck = in_.peek();
    std::string construction = in_.ident("'product', 'coproduct', 'subsort' or 'quotient'");
    if (construction == "product" || construction == "coproduct") {
      std::string left = detail::parse_sort(in_, base_);
      std::string right = detail::parse_sort(in_, base_);
      in_.expect("with");
      std::string f1 = name();
      std::string f2 = name();
      if (construction == "product") return ProductSortDef{sort, left, right, f1, f2};
      return CoproductSortDef{sort, left, right, f1, f2};
    }
    if (construction == "subsort" || construction == "quotient") {
      std::string parent = detail::parse_sort(in_, base_);
      in_.expect("with");
      std::string fn = name();
      in_.expect("where");
      if (construction == "subsort") return SubsortDef{sort, parent, fn, body({{"x", parent}})};
      return QuotientSortDef{sort, parent, fn, body({{"x1", parent}, {"x2", parent}})};
    }
    in_.fail_at(ck, "expected 'product', 'coproduct', 'subsort' or 'quotient'");
  }

  Formula body(const std::vector<Variable>& params) {
    return detail::parse_formula(in_, base_, scope_of(params));
  }

  TokenStream in_;
  const Signature& base_;
  std::set<std::string> taken_;
};

}  // namespace

ExtensionStep parse_extension(const Signature& base, std::string_view text,
                              const std::string& file) {
  return ExtensionParser(base, text, file).parse();
}

ExtensionStep load_extension(const Signature& base, const std::string& path) {
  return parse_extension(base, read_file(path), path);
}

std::string print_extension(const ExtensionStep& s) {
  auto sorts = [](const std::vector<std::string>& list) {
    std::string out;
    for (std::size_t i = 0; i < list.size(); ++i) out += (i ? " x " : "") + list[i];
    return out;
  };
  std::string out;
  for (const auto& d : s.definitions()) {
    out += "define ";
    out += std::visit(
        Overloaded{
            [&](const PredicateDef& p) {
              return "pred " + p.name + " : " + sorts(p.arity) + " := " + print_formula(p.formula);
            },
            [&](const FunctionDef& f) {
              return "func " + f.name + " : " + sorts(f.domain) + " -> " + f.codomain +
                     " := " + print_formula(f.formula);
            },
            [&](const ConstantDef& c) {
              return "const " + c.name + " : " + c.sort + " := " + print_formula(c.formula);
            },
            [&](const ProductSortDef& p) {
              return "sort " + p.sort + " = product " + p.left + " " + p.right + " with " +
                     p.proj1 + " " + p.proj2;
            },
            [&](const CoproductSortDef& p) {
              return "sort " + p.sort + " = coproduct " + p.left + " " + p.right + " with " +
                     p.inj1 + " " + p.inj2;
            },
            [&](const SubsortDef& p) {
              return "sort " + p.sort + " = subsort " + p.parent + " with " + p.inclusion +
                     " where " + print_formula(p.formula);
            },
            [&](const QuotientSortDef& p) {
              return "sort " + p.sort + " = quotient " + p.parent + " with " + p.projection +
                     " where " + print_formula(p.formula);
            },
        },
        d);
    out += "\n";
  }
  return out;
}

}  // namespace morita
