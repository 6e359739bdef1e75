#include "morita/equivalence.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "morita/expansion.hpp"
#include "morita/text.hpp"

namespace morita {

namespace {

int total_size(const FiniteStructure& A) {
  int n = 0;
  for (const auto& s : A.signature().sorts()) n += A.size(s);
  return n;
}

std::optional<FiniteStructure> first_outside(const Theory& T, const Theory& other,
                                             const Bound& bound) {
  std::optional<FiniteStructure> found;
  enumerate_models(T, bound, [&](const FiniteStructure& A) {
    if (is_model(A, other)) return true;
    found = A;
    return false;
  });
  return found;
}

std::string indent(const std::string& text, const std::string& pad) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    out += pad + text.substr(start, end - start) + "\n";
    start = end + 1;
  }
  return out;
}

std::set<std::string> sort_set(const Signature& sig) {
  return {sig.sorts().begin(), sig.sorts().end()};
}

}  // namespace

LogicalEquivalence bounded_logical_equivalence(const Theory& left, const Theory& right,
                                               const Bound& bound) {
  if (!left.signature.same_symbols(right.signature)) {
    throw Error(ErrorKind::SignatureMismatch, "theories have different signatures");
  }
  LogicalEquivalence out;
  out.bound = bound;
  auto a = first_outside(left, right, bound);
  auto b = first_outside(right, left, bound);
  if (a && (!b || total_size(*a) <= total_size(*b))) {
    out.separating = std::move(a);
    out.models_side = 0;
  } else if (b) {
    out.separating = std::move(b);
    out.models_side = 1;
  }
  return out;
}

std::string describe(const LogicalEquivalence& e) {
  if (e.equivalent()) return "EquivalentUpToBound(" + e.bound.describe() + ")";
  return "Inequivalent";
}

MoritaWitness parse_witness(std::string_view text, const std::filesystem::path& dir,
                            const std::string& file) {
  std::optional<Theory> left, right;
  std::vector<std::string> chains[2];
  bool chain_seen[2] = {false, false};
  std::optional<int> bound;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto fail = [&](int col, const std::string& msg) -> ParseError {
    return ParseError(file, line_no, col, msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    std::istringstream head(line.substr(0, eq == std::string::npos ? line.size() : eq));
    std::vector<std::string> words;
    for (std::string w; head >> w;) words.push_back(w);
    if (words.empty() && eq == std::string::npos) continue;
    if (eq == std::string::npos) throw fail(1, "expected '='");
    std::istringstream tail(line.substr(eq + 1));
    std::vector<std::string> values;
    for (std::string w; tail >> w;) values.push_back(w);
    int value_col = static_cast<int>(eq) + 2;

    if (words.size() == 1 && words[0] == "bound") {
      if (values.size() != 1) throw fail(value_col, "expected one number");
      try {
        std::size_t used = 0;
        int n = std::stoi(values[0], &used);
        if (used != values[0].size() || n < 1) throw std::invalid_argument("bound");
        bound = n;
      } catch (const std::logic_error&) {
        throw fail(value_col, "bound must be a positive integer");
      }
      continue;
    }
    if (words.size() != 2 || (words[1] != "left" && words[1] != "right")) {
      throw fail(1, "expected 'theory left|right', 'chain left|right' or 'bound'");
    }
    int side = words[1] == "left" ? 0 : 1;
    if (words[0] == "theory") {
      if (values.size() != 1) throw fail(value_col, "expected one theory file");
      auto& slot = side == 0 ? left : right;
      if (slot) throw fail(1, "duplicate theory " + words[1]);
      slot = load_theory(dir / values[0]);
    } else if (words[0] == "chain") {
      if (chain_seen[side]) throw fail(1, "duplicate chain " + words[1]);
      chain_seen[side] = true;
      chains[side] = values;
    } else {
      throw fail(1, "unknown entry '" + words[0] + "'");
    }
  }
  if (!left || !right) throw ParseError(file, line_no, 0, "witness needs both theories");

  MoritaWitness w{*left, *right, {}, {}, bound};
  for (int side = 0; side < 2; ++side) {
    Signature sig = side == 0 ? w.left.signature : w.right.signature;
    auto& out = side == 0 ? w.left_chain : w.right_chain;
    for (const auto& name : chains[side]) {
      out.push_back(load_extension(sig, (dir / name).string()));
      if (!out.back().well_formed()) break;
      sig = out.back().derived();
    }
  }
  return w;
}

MoritaWitness load_witness(const std::filesystem::path& path) {
  return parse_witness(read_file(path), path.parent_path(), path.string());
}

const char* to_string(WitnessReport::Status s) {
  return s == WitnessReport::Status::VerifiedUpToBound ? "VerifiedUpToBound" : "Failed";
}

namespace {

std::optional<Theory> verify_chain(const std::string& side, const Theory& T,
                                   const std::vector<ExtensionStep>& chain, int bound,
                                   WitnessReport& r) {
  Theory theory = T;
  Bound b(bound);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto& step = chain[k];
    WitnessReport::Step entry{side, static_cast<int>(k + 1), validate_step(theory, step, b),
                              step.well_formed() && is_definitional(step)};
    bool ok = entry.validation.status != ValidationReport::Status::Invalid;
    r.steps.push_back(std::move(entry));
    if (!ok) {
      r.failures.push_back(side + " step " + std::to_string(k + 1) + " is invalid");
      return std::nullopt;
    }
    b = extended_bound(step, b);
    theory = extend_theory(theory, step);
  }
  return theory;
}

WitnessReport verify(const MoritaWitness& w, int bound, bool definitional) {
  WitnessReport r;
  r.bound = Bound(bound);
  r.definitional_check = definitional;
  auto left = verify_chain("left", w.left, w.left_chain, bound, r);
  auto right = verify_chain("right", w.right, w.right_chain, bound, r);
  if (left && right) {
    r.signatures_match = left->signature.same_symbols(right->signature);
    if (!r.signatures_match) {
      r.failures.push_back("SignatureMismatch: final signatures differ");
    } else {
      r.logical = bounded_logical_equivalence(*left, *right, Bound(bound));
      if (!r.logical->equivalent()) {
        r.failures.push_back(std::string("final theories are inequivalent: a model of the ") +
                             (r.logical->models_side == 0 ? "left" : "right") +
                             " theory fails the other");
      }
    }
  }
  if (definitional) {
    r.same_sorts = sort_set(w.left.signature) == sort_set(w.right.signature);
    if (!r.same_sorts) r.failures.push_back("theories have different sort symbols");
    for (const auto& s : r.steps) {
      if (!s.definitional) {
        r.failures.push_back(s.side + " step " + std::to_string(s.index) + " is not definitional");
      }
    }
  }
  r.status = r.failures.empty() ? WitnessReport::Status::VerifiedUpToBound
                                : WitnessReport::Status::Failed;
  return r;
}

}  // namespace

WitnessReport verify_morita_witness(const MoritaWitness& w, int bound) {
  return verify(w, bound, false);
}

WitnessReport verify_definitional_witness(const MoritaWitness& w, int bound) {
  return verify(w, bound, true);
}

std::string render(const WitnessReport& r) {
  std::ostringstream out;
  for (const auto& s : r.steps) {
    out << s.side << " step " << s.index << ": " << render(s.validation);
  }
  if (r.logical || !r.signatures_match) {
    out << "final signatures: " << (r.signatures_match ? "match" : "differ") << "\n";
  }
  if (r.logical) {
    out << "logical equivalence: " << describe(*r.logical) << "\n";
    if (r.logical->separating) out << indent(print_model(*r.logical->separating), "  ");
  }
  if (r.definitional_check) {
    out << "same sorts: " << (r.same_sorts ? "yes" : "no") << "\n";
  }
  if (r.status == WitnessReport::Status::VerifiedUpToBound) {
    out << "verdict: VerifiedUpToBound(" << r.bound.describe() << ")\n";
  } else {
    out << "verdict: Failed\n";
    for (const auto& f : r.failures) out << "  " << f << "\n";
  }
  return out.str();
}

namespace {

void chain_steps(const std::string& side, const Theory& T, const std::vector<ExtensionStep>& chain,
                 int bound, ChainFunctors& out) {
  Theory theory = T;
  Bound b(bound);
  auto base = std::make_shared<const BoundedModelCategory>(build_category(theory, b));
  for (std::size_t k = 0; k < chain.size(); ++k) {
    theory = extend_theory(theory, chain[k]);
    b = extended_bound(chain[k], b);
    auto plus = std::make_shared<const BoundedModelCategory>(build_category(theory, b));
    auto F = projection_functor(plus, base);
    out.steps.push_back({side, static_cast<int>(k + 1), check_functor(F), plus->objects.size(),
                         base->objects.size()});
    base = plus;
  }
}

std::vector<bool> fitting(const BoundedModelCategory& C, const std::vector<ExtensionStep>& chain,
                          int bound) {
  std::vector<bool> out;
  for (const auto& A : C.objects) {
    auto E = expand_chain(A, C.theory, chain);
    bool fits = true;
    for (const auto& s : E.signature().sorts()) fits = fits && E.size(s) <= bound;
    out.push_back(fits);
  }
  return out;
}

}  // namespace

ChainFunctors check_chain_functors(const MoritaWitness& w, int bound) {
  ChainFunctors out;
  out.bound = Bound(bound);
  chain_steps("left", w.left, w.left_chain, bound, out);
  chain_steps("right", w.right, w.right_chain, bound, out);

  auto final_left = extend_chain(w.left, w.left_chain);
  auto final_right = extend_chain(w.right, w.right_chain);
  if (!final_left.signature.same_symbols(final_right.signature)) {
    throw Error(ErrorKind::SignatureMismatch, "final signatures differ");
  }
  auto common = std::make_shared<const BoundedModelCategory>(build_category(final_left, Bound(bound)));
  auto left = std::make_shared<const BoundedModelCategory>(build_category(w.left, Bound(bound)));
  auto right = std::make_shared<const BoundedModelCategory>(build_category(w.right, Bound(bound)));
  auto left_fit = fitting(*left, w.left_chain, bound);
  auto right_fit = fitting(*right, w.right_chain, bound);
  out.left = check_functor(projection_functor(common, left), left_fit);
  out.right = check_functor(projection_functor(common, right), right_fit);
  out.common_objects = common->objects.size();
  out.left_objects = static_cast<std::size_t>(std::count(left_fit.begin(), left_fit.end(), true));
  out.right_objects =
      static_cast<std::size_t>(std::count(right_fit.begin(), right_fit.end(), true));
  return out;
}

std::string render(const ChainFunctors& c) {
  auto triple = [](const FunctorCheck& f) {
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    return std::string("full: ") + yn(f.full) + ", faithful: " + yn(f.faithful) +
           ", essentially surjective: " + yn(f.essentially_surjective);
  };
  std::ostringstream out;
  for (const auto& s : c.steps) {
    out << s.side << " step " << s.index << ": " << s.source_objects << " -> "
        << s.target_objects << " objects; " << triple(s.check) << "\n";
  }
  out << "common extension at bound " << c.bound.describe() << ": " << c.common_objects
      << " objects\n";
  out << "onto left (" << c.left_objects << " objects): " << triple(c.left) << "\n";
  out << "onto right (" << c.right_objects << " objects): " << triple(c.right) << "\n";
  out << "composed equivalence: "
      << (c.equivalent() ? "EquivalentAtBound(" + c.bound.describe() + ")"
                         : "NotEquivalentAtBound(" + c.bound.describe() + ")")
      << "\n";
  return out.str();
}

}  // namespace morita
