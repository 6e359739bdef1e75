#include "morita/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <ostream>

#include "morita/category.hpp"
#include "morita/equivalence.hpp"
#include "morita/expansion.hpp"
#include "morita/morphism.hpp"
#include "morita/text.hpp"
#include "morita/translate.hpp"

namespace morita {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A verdict that failed; the report is already written.
struct Failed {};

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::vector<ExtensionStep> load_chain(const Theory& T, const std::vector<std::string>& paths) {
  std::vector<ExtensionStep> steps;
  Signature sig = T.signature;
  for (const auto& path : paths) {
    steps.push_back(load_extension(sig, path));
    const auto& s = steps.back();
    if (!s.well_formed()) {
      std::string msg = path + ": ill-formed step";
      for (const auto& p : s.problems()) msg += "\n  " + p;
      throw Error(ErrorKind::InvalidStep, msg);
    }
    sig = s.derived();
  }
  return steps;
}

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

Json model_json(const FiniteStructure& A) {
  const Signature& sig = A.signature();
  auto name = [&](const std::string& sort, int i) { return element_name(A, A.carrier(sort)[i]); };
  auto dims = [&](const std::vector<std::string>& sorts) {
    std::vector<int> out;
    for (const auto& s : sorts) out.push_back(A.size(s));
    return out;
  };
  auto names = [&](const std::vector<std::string>& sorts, const std::vector<int>& t) {
    Json out = Json::array();
    for (std::size_t k = 0; k < t.size(); ++k) out.push_back(name(sorts[k], t[k]));
    return out;
  };
  Json j;
  j["carriers"] = Json::object();
  for (const auto& s : sig.sorts()) {
    Json c = Json::array();
    for (int i = 0; i < A.size(s); ++i) c.push_back(name(s, i));
    j["carriers"][s] = c;
  }
  j["predicates"] = Json::object();
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    const auto& decl = sig.predicates()[p];
    Json rows = Json::array();
    for_each_tuple(dims(decl.arity), [&](const std::vector<int>& t) {
      if (A.holds(static_cast<int>(p), t)) rows.push_back(names(decl.arity, t));
    });
    j["predicates"][decl.name] = rows;
  }
  j["functions"] = Json::object();
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& decl = sig.functions()[f];
    Json rows = Json::array();
    for_each_tuple(dims(decl.domain), [&](const std::vector<int>& t) {
      rows.push_back({{"args", names(decl.domain, t)},
                      {"value", name(decl.codomain, A.apply(static_cast<int>(f), t))}});
    });
    j["functions"][decl.name] = rows;
  }
  j["constants"] = Json::object();
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    const auto& decl = sig.constants()[c];
    j["constants"][decl.name] = name(decl.sort, A.constant(static_cast<int>(c)));
  }
  return j;
}

const char* finding_kind(Finding::Kind k) {
  switch (k) {
    case Finding::Kind::Syntax: return "syntax";
    case Finding::Kind::StepMismatch: return "step-mismatch";
    case Finding::Kind::Admitted: return "admitted";
    case Finding::Kind::Checked: return "checked";
    case Finding::Kind::Refuted: return "refuted";
  }
  return "";
}

Json validation_json(const ValidationReport& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["bound"] = r.bound.describe();
  j["findings"] = Json::array();
  for (const auto& f : r.findings) {
    Json g;
    g["kind"] = finding_kind(f.kind);
    g["definition"] = f.definition;
    g["message"] = f.message;
    if (f.condition) g["condition"] = print_formula(*f.condition);
    if (f.verdict && f.verdict->countermodel) g["countermodel"] = model_json(*f.verdict->countermodel);
    j["findings"].push_back(g);
  }
  return j;
}

Json functor_json(const FunctorCheck& c) {
  return {{"full", c.full},
          {"faithful", c.faithful},
          {"essentially_surjective", c.essentially_surjective}};
}

std::string indent(const std::string& text) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    out += "  " + text.substr(start, end - start) + "\n";
    start = end + 1;
  }
  return out;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int main(const std::vector<std::string>& args) {
    CLI::App app{"Many-sorted theories, their definitional and Morita extensions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "morita 1.0");
    setup(app);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out_, err_) == 0 ? 0 : 2;
    }
    for (auto* o : bound_options_) bound_given_ = bound_given_ || o->count() > 0;
    if (format_ != "text" && format_ != "structured") {
      err_ << "error: --format must be text or structured\n";
      return 2;
    }
    try {
      action_();
      return 0;
    } catch (const Failed&) {
      return 1;
    } catch (const UsageError& e) {
      err_ << "error: " << e.what() << "\n";
      return 2;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << "\n";
      return e.kind() == ErrorKind::AdmissibilityFailsInModel ||
                     e.kind() == ErrorKind::NotElementary
                 ? 1
                 : 2;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return 2;
    }
  }

 private:
  bool structured() const { return format_ == "structured"; }
  void emit(const Json& j) { out_ << j.dump(2) << "\n"; }

  void common(CLI::App* sub) {
    bound_options_.push_back(
        sub->add_option("--bound", bound_, "Carrier size cap per sort")->check(CLI::Range(1, 64)));
    sub->add_option("--format", format_, "Output format: text or structured");
  }

  void setup(CLI::App& app) {
    auto* check = app.add_subcommand("check", "Parse a theory and validate extension steps");
    check->add_option("theory", theory_, "Theory file")->required();
    check->add_option("--step", steps_, "Extension files, applied in order");
    common(check);
    check->callback([this] { action_ = [this] { do_check(); }; });

    auto* models = app.add_subcommand("models", "List the models of a theory up to isomorphism");
    models->add_option("theory", theory_, "Theory file")->required();
    models->add_option("--step", steps_, "Extension files, applied in order");
    common(models);
    models->callback([this] { action_ = [this] { do_models(); }; });

    auto* expand = app.add_subcommand("expand", "Expand models along extension steps");
    expand->add_option("theory", theory_, "Theory file")->required();
    expand->add_option("--step", steps_, "Extension files, applied in order")->required();
    expand->add_option("--model", model_, "Model file; all bounded models when omitted");
    common(expand);
    expand->callback([this] { action_ = [this] { do_expand(); }; });

    auto* translate = app.add_subcommand("translate", "Translate a formula back to the base signature");
    translate->add_option("--theory", theory_, "Theory file")->required();
    translate->add_option("--step", steps_, "Extension files, applied in order")->required();
    translate->add_option("--formula", formula_, "Formula over the extended signature")->required();
    translate->add_option("--var", vars_, "Free variable as name:sort");
    translate->add_option("--code", code_, "Only the code with this number")->check(CLI::PositiveNumber);
    translate->add_flag("--simplify", simplify_, "Fold trivial equalities");
    translate->add_option("--max-formula-depth", max_depth_, "Reject deeper formulas")
        ->check(CLI::NonNegativeNumber);
    common(translate);
    translate->callback([this] { action_ = [this] { do_translate(); }; });

    auto* witness = app.add_subcommand("verify-witness", "Verify an equivalence witness");
    witness->add_option("witness", witness_, "Witness file")->required();
    witness->add_flag("--definitional", definitional_, "Require a definitional witness");
    common(witness);
    witness->callback([this] { action_ = [this] { do_witness(); }; });

    auto* category = app.add_subcommand("category", "Summarize a bounded category of models");
    category->add_option("theory", theory_, "Theory file");
    category->add_option("--truncation", truncation_, "Compare the discrete pair over N predicates")
        ->check(CLI::Range(1, 12));
    common(category);
    category->callback([this] { action_ = [this] { do_category(); }; });

    auto* pi = app.add_subcommand("check-pi", "Check projection functors along a chain or witness");
    pi->add_option("--theory", theory_, "Theory file");
    pi->add_option("--step", steps_, "Extension files, applied in order");
    pi->add_option("--witness", witness_, "Witness file");
    common(pi);
    pi->callback([this] { action_ = [this] { do_check_pi(); }; });

    auto* morphism = app.add_subcommand("check-morphism", "Check a map between two models");
    morphism->add_option("--theory", theory_, "Theory file")->required();
    morphism->add_option("--source", source_, "Source model file")->required();
    morphism->add_option("--target", target_, "Target model file")->required();
    morphism->add_option("--morphism", morphism_, "Morphism file")->required();
    morphism->add_option("--step", steps_, "Lift along this extension step");
    common(morphism);
    morphism->callback([this] { action_ = [this] { do_check_morphism(); }; });
  }

  void do_check() {
    Theory T = load_theory(theory_);
    auto steps = load_chain(T, steps_);
    Json j;
    const Signature& sig = T.signature;
    j["sorts"] = sig.sorts().size();
    j["predicates"] = sig.predicates().size();
    j["functions"] = sig.functions().size();
    j["constants"] = sig.constants().size();
    j["axioms"] = T.axioms.size();
    j["steps"] = Json::array();
    std::string text = theory_ + ": " + std::to_string(sig.sorts().size()) + " sorts, " +
                       std::to_string(sig.predicates().size()) + " predicates, " +
                       std::to_string(sig.functions().size()) + " functions, " +
                       std::to_string(sig.constants().size()) + " constants, " +
                       std::to_string(T.axioms.size()) + " axioms\n";
    bool ok = true;
    Theory current = T;
    Bound b(bound_);
    for (std::size_t k = 0; k < steps.size(); ++k) {
      auto report = validate_step(current, steps[k], b);
      ok = ok && report.status != ValidationReport::Status::Invalid;
      text += "step " + std::to_string(k + 1) + ": " + render(report);
      Json s = validation_json(report);
      s["definitional"] = is_definitional(steps[k]);
      j["steps"].push_back(s);
      if (!ok) break;
      b = extended_bound(steps[k], b);
      current = extend_theory(current, steps[k]);
    }
    if (structured()) emit(j);
    else out_ << text;
    if (!ok) throw Failed{};
  }

  /// The theory extended along the steps, with its propagated bound.
  std::pair<Theory, Bound> extended(const Theory& T, const std::vector<ExtensionStep>& steps) {
    Theory current = T;
    Bound b(bound_);
    for (const auto& s : steps) {
      b = extended_bound(s, b);
      current = extend_theory(current, s);
    }
    return {current, b};
  }

  void do_models() {
    Theory T = load_theory(theory_);
    auto [theory, b] = extended(T, load_chain(T, steps_));
    auto models = enumerate_models(theory, b);
    if (structured()) {
      Json j;
      j["bound"] = b.describe();
      j["count"] = models.size();
      j["models"] = Json::array();
      for (const auto& M : models) j["models"].push_back(model_json(M));
      emit(j);
      return;
    }
    out_ << "models up to bound " << b.describe() << ": " << models.size() << "\n";
    for (std::size_t i = 0; i < models.size(); ++i) {
      out_ << "model " << i + 1 << ":\n" << indent(print_model(models[i]));
    }
  }

  void do_expand() {
    Theory T = load_theory(theory_);
    auto steps = load_chain(T, steps_);
    std::vector<FiniteStructure> models;
    if (!model_.empty()) {
      models.push_back(parse_model(T.signature, read_file(model_), model_));
    } else {
      models = enumerate_models(T, Bound(bound_));
    }
    Json j = Json::array();
    for (std::size_t i = 0; i < models.size(); ++i) {
      auto E = expand_chain(models[i], T, steps);
      if (structured()) {
        j.push_back(model_json(E));
      } else if (models.size() == 1) {
        out_ << print_model(E);
      } else {
        out_ << "expansion " << i + 1 << ":\n" << indent(print_model(E));
      }
    }
    if (structured()) emit(j);
  }

  void do_translate() {
    Theory T = load_theory(theory_);
    auto steps = load_chain(T, steps_);
    const Signature& sig = steps.back().derived();
    VariableScope scope;
    for (const auto& v : vars_) {
      auto colon = v.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == v.size()) {
        throw UsageError("--var expects name:sort, got '" + v + "'");
      }
      scope[v.substr(0, colon)] = v.substr(colon + 1);
    }
    Formula f = parse_formula(sig, formula_, scope, "<formula>");
    if (max_depth_ >= 0 && quantifier_depth(f) > max_depth_) {
      throw UsageError("formula is deeper than --max-formula-depth");
    }
    auto free = free_variables(f);
    std::vector<Variable> coded;
    bool foreign = false;
    for (const auto& x : free) {
      if (!T.signature.has_sort(x.sort)) foreign = true;
      for (const auto& s : steps.back().new_sorts()) {
        if (x.sort == s) coded.push_back(x);
      }
    }
    if (foreign && steps.size() > 1) {
      throw UsageError("free variables of defined sorts need a single step");
    }

    std::vector<std::pair<Code, Formula>> results;
    if (free.empty()) {
      results.push_back({Code{}, translate_through_chain(f, steps)});
    } else if (steps.size() == 1) {
      auto codes = codes_for(coded, steps.back());
      if (code_ && (code_ < 1 || code_ > static_cast<int>(codes.size()))) {
        throw UsageError("--code must be between 1 and " + std::to_string(codes.size()));
      }
      for (std::size_t k = 0; k < codes.size(); ++k) {
        if (code_ && static_cast<int>(k) + 1 != code_) continue;
        results.push_back({codes[k], translate_formula(f, codes[k], steps.back())});
      }
    } else {
      Formula g = f;
      for (std::size_t k = steps.size(); k-- > 0;) g = translate_formula(g, Code{}, steps[k]);
      results.push_back({Code{}, g});
    }

    Json j;
    j["formula"] = print_formula(f);
    j["translations"] = Json::array();
    for (std::size_t k = 0; k < results.size(); ++k) {
      auto& [code, phi] = results[k];
      if (simplify_) phi = simplify(phi);
      std::size_t number = code_ ? static_cast<std::size_t>(code_) : k + 1;
      Json t;
      if (!code.empty()) {
        t["code"] = number;
        t["code_formula"] = print_formula(code_formula(code, steps.back()));
        t["links"] = Json::array();
        for (const auto& v : code.links()) t["links"].push_back(v.name + ":" + v.sort);
        if (!structured()) {
          out_ << "code " << number << ": " << print_formula(code_formula(code, steps.back()))
               << "\n";
        }
      }
      t["translation"] = print_formula(phi);
      if (!structured()) out_ << print_formula(phi) << "\n";
      j["translations"].push_back(t);
    }
    if (structured()) emit(j);
  }

  Json witness_json(const WitnessReport& r) {
    Json j;
    j["status"] = to_string(r.status);
    j["bound"] = r.bound.describe();
    j["definitional"] = r.definitional_check;
    j["steps"] = Json::array();
    for (const auto& s : r.steps) {
      Json t = validation_json(s.validation);
      t["side"] = s.side;
      t["index"] = s.index;
      t["definitional"] = s.definitional;
      j["steps"].push_back(t);
    }
    j["signatures_match"] = r.signatures_match;
    if (r.definitional_check) j["same_sorts"] = r.same_sorts;
    if (r.logical) {
      Json l;
      l["verdict"] = describe(*r.logical);
      if (r.logical->separating) {
        l["separating_model"] = model_json(*r.logical->separating);
        l["models"] = r.logical->models_side == 0 ? "left" : "right";
      }
      j["logical_equivalence"] = l;
    }
    j["failures"] = r.failures;
    return j;
  }

  void do_witness() {
    auto w = load_witness(witness_);
    int b = bound_set() ? bound_ : w.bound.value_or(bound_);
    auto r = definitional_ ? verify_definitional_witness(w, b) : verify_morita_witness(w, b);
    if (structured()) emit(witness_json(r));
    else out_ << render(r);
    if (r.status != WitnessReport::Status::VerifiedUpToBound) throw Failed{};
  }

  Json category_json(const BoundedModelCategory& C) {
    Json j;
    j["bound"] = C.bound.describe();
    j["objects"] = C.objects.size();
    j["arrows"] = C.arrow_count();
    j["automorphism_group_sizes"] = Json::array();
    for (const auto& a : C.automorphisms) j["automorphism_group_sizes"].push_back(a.size());
    j["discrete"] = is_discrete(C);
    return j;
  }

  void do_category() {
    if (truncation_ > 0) {
      auto [left, right] = truncated_discrete_pair(truncation_);
      auto C = build_category(left, Bound(bound_));
      auto D = build_category(right, Bound(bound_));
      auto verdict = discrete_equivalence_verdict(C, D);
      std::string note =
          "with infinitely many predicates both categories are discrete with continuum many "
          "objects, hence equivalent; no finite truncation shows this, since the counts are "
          "2^N and 2^(N-1)+1";
      if (structured()) {
        Json j;
        j["truncation"] = truncation_;
        j["left"] = category_json(C);
        j["right"] = category_json(D);
        j["verdict"] = describe(verdict);
        j["note"] = note;
        emit(j);
      } else {
        out_ << "left theory, " << truncation_ << " predicates:\n" << indent(render(C));
        out_ << "right theory, " << truncation_ << " predicates:\n" << indent(render(D));
        out_ << "verdict: " << describe(verdict) << "\n";
        out_ << "note: " << note << "\n";
      }
      if (!verdict.equivalent) throw Failed{};
      return;
    }
    if (theory_.empty()) throw UsageError("category needs a theory file or --truncation");
    auto C = build_category(load_theory(theory_), Bound(bound_));
    if (structured()) emit(category_json(C));
    else out_ << render(C);
  }

  void do_check_pi() {
    if (!witness_.empty()) {
      auto w = load_witness(witness_);
      int b = bound_set() ? bound_ : w.bound.value_or(bound_);
      auto c = check_chain_functors(w, b);
      bool ok = c.equivalent();
      for (const auto& s : c.steps) ok = ok && s.check.equivalence() && s.check.preserves_structure;
      if (structured()) {
        Json j;
        j["bound"] = c.bound.describe();
        j["steps"] = Json::array();
        for (const auto& s : c.steps) {
          Json t = functor_json(s.check);
          t["side"] = s.side;
          t["index"] = s.index;
          t["source_objects"] = s.source_objects;
          t["target_objects"] = s.target_objects;
          j["steps"].push_back(t);
        }
        j["common_objects"] = c.common_objects;
        j["left"] = functor_json(c.left);
        j["right"] = functor_json(c.right);
        j["equivalent"] = c.equivalent();
        emit(j);
      } else {
        out_ << render(c);
      }
      if (!ok) throw Failed{};
      return;
    }
    if (theory_.empty() || steps_.empty()) {
      throw UsageError("check-pi needs --theory with --step, or --witness");
    }
    Theory T = load_theory(theory_);
    auto steps = load_chain(T, steps_);
    Theory current = T;
    Bound b(bound_);
    bool ok = true;
    Json j = Json::array();
    for (std::size_t k = 0; k < steps.size(); ++k) {
      auto F = projection_functor(current, steps[k], b);
      auto c = check_functor(F);
      ok = ok && c.equivalence() && c.preserves_structure;
      if (structured()) {
        Json t = functor_json(c);
        t["step"] = k + 1;
        t["bound"] = b.describe();
        t["source_objects"] = F.source->objects.size();
        t["target_objects"] = F.target->objects.size();
        j.push_back(t);
      } else {
        out_ << "step " << k + 1 << " at bound " << b.describe() << ": "
             << F.source->objects.size() << " -> " << F.target->objects.size() << " objects\n"
             << indent(describe(c));
      }
      b = extended_bound(steps[k], b);
      current = extend_theory(current, steps[k]);
    }
    if (structured()) emit(j);
    if (!ok) throw Failed{};
  }

  void do_check_morphism() {
    Theory T = load_theory(theory_);
    auto M = parse_model(T.signature, read_file(source_), source_);
    auto N = parse_model(T.signature, read_file(target_), target_);
    auto h = parse_morphism(M, N, read_file(morphism_), morphism_);
    bool elementary = is_elementary_embedding(h);
    Json j;
    j["well_typed"] = well_typed(h);
    j["elementary_embedding"] = elementary;
    j["isomorphism"] = is_isomorphism(h);
    std::string text = std::string("well typed: ") + yes_no(well_typed(h)) +
                       "\nelementary embedding: " + yes_no(elementary) +
                       "\nisomorphism: " + yes_no(is_isomorphism(h)) + "\n";
    if (steps_.size() > 1) throw UsageError("check-morphism lifts along one step");
    if (!steps_.empty() && elementary) {
      auto steps = load_chain(T, steps_);
      auto EM = expand_model(M, T, steps[0]);
      auto EN = expand_model(N, T, steps[0]);
      auto lifted = lift_morphism(h, EM, EN, steps[0]);
      j["lifted"] = print_morphism(lifted);
      j["lifted_elementary_embedding"] = is_elementary_embedding(lifted);
      text += "lifted:\n" + indent(print_morphism(lifted)) +
              "lifted elementary embedding: " + yes_no(is_elementary_embedding(lifted)) + "\n";
    }
    if (structured()) emit(j);
    else out_ << text;
    if (!elementary) throw Failed{};
  }

  bool bound_set() const { return bound_given_; }

  std::ostream& out_;
  std::ostream& err_;
  std::function<void()> action_;
  int bound_ = 3;
  bool bound_given_ = false;
  std::vector<CLI::Option*> bound_options_;
  int max_depth_ = -1;
  std::string format_ = "text";
  std::string theory_;
  std::vector<std::string> steps_;
  std::string model_;
  std::string formula_;
  std::vector<std::string> vars_;
  int code_ = 0;
  bool simplify_ = false;
  std::string witness_;
  bool definitional_ = false;
  int truncation_ = 0;
  std::string source_, target_, morphism_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).main(args);
}

}  // namespace morita
