// Acceptance run: one line per criterion, nonzero exit when any fails.

#include <array>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "morita/category.hpp"
#include "morita/cli.hpp"
#include "morita/equivalence.hpp"
#include "morita/expansion.hpp"
#include "morita/text.hpp"
#include "support.hpp"

using namespace morita;
using namespace morita::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct CaseData {
  CorpusCase c;
  Theory plus;
  std::vector<FiniteStructure> base_models;
  std::vector<FiniteStructure> plus_models;
};

std::vector<CaseData>& corpus() {
  static std::vector<CaseData> data = [] {
    std::vector<CaseData> out;
    for (auto& c : load_cases(3)) {
      CaseData d{c, extend_theory(c.theory, c.step), {}, {}};
      d.base_models = enumerate_models(c.theory, c.bound);
      d.plus_models = enumerate_models(d.plus, extended_bound(c.step, c.bound));
      out.push_back(std::move(d));
    }
    return out;
  }();
  return data;
}

int cli(const std::vector<std::string>& args, std::string& out) {
  std::ostringstream o, e;
  int code = run(args, o, e);
  out = o.str();
  return code;
}

Outcome witness_example() {
  std::string path = corpus_path("partition.wit").string();
  auto w = load_witness(path);
  auto report = verify_morita_witness(w, 3);
  std::string text;
  int code = cli({"verify-witness", path, "--bound", "3"}, text);
  bool cli_ok = code == 0 && text.find("verdict: VerifiedUpToBound(3)") != std::string::npos;

  auto left = extend_chain(w.left, w.left_chain);
  auto right = extend_chain(w.right, w.right_chain);
  std::set<CanonicalForm> lf, rf;
  for (const auto& A : enumerate_models(left, Bound(3))) lf.insert(canonical_form(A));
  for (const auto& A : enumerate_models(right, Bound(3))) {
    rf.insert(canonical_form(reduct(A, left.signature)));
  }

  std::map<int, int> by_size;
  for (const auto& A : enumerate_models(w.left, Bound(4))) ++by_size[A.size("s1")];
  bool counts = by_size[2] == 1 && by_size[3] == 2 && by_size[4] == 3;

  std::ostringstream d;
  d << "witness " << to_string(report.status) << ", cli exit " << code << ", "
    << lf.size() << "/" << rf.size() << " classes after the chains ("
    << (lf == rf ? "identical" : "different") << "), T1 counts at sizes 2,3,4: " << by_size[2]
    << "," << by_size[3] << "," << by_size[4];
  return {report.status == WitnessReport::Status::VerifiedUpToBound && cli_ok && lf == rf &&
              counts,
          d.str()};
}

Outcome expansions() {
  std::set<std::string> kinds;
  long long failures = 0, checked = 0;
  std::string first;
  for (auto& d : corpus()) {
    for (const auto& def : d.c.step.definitions()) {
      static const char* names[] = {"pred", "func", "const", "product", "coproduct", "subsort",
                                    "quotient"};
      kinds.insert(names[def.index()]);
    }
    std::map<CanonicalForm, FiniteStructure> expanded;
    for (const auto& M : d.base_models) {
      try {
        auto E = expand_model(M, d.c.theory, d.c.step);
        if (!is_model(E, d.plus)) throw std::runtime_error("expansion is not a model");
        expanded.emplace(canonical_form(M), E);
      } catch (const std::exception& e) {
        ++failures;
        if (first.empty()) first = d.c.name + ": " + e.what();
      }
    }
    for (const auto& N : d.plus_models) {
      ++checked;
      auto it = expanded.find(canonical_form(reduct(N, d.c.step.base())));
      if (it == expanded.end() || !isomorphic(it->second, N)) {
        ++failures;
        if (first.empty()) first = d.c.name + ": a model of the extension is not an expansion";
      }
    }
    if (d.plus_models.size() != d.base_models.size()) {
      ++failures;
      if (first.empty()) first = d.c.name + ": class counts differ";
    }
  }
  std::ostringstream out;
  out << corpus().size() << " cases, " << kinds.size() << " definition kinds, " << checked
      << " extension models matched, " << failures << " failures";
  if (!first.empty()) out << " (" << first << ")";
  return {failures == 0 && corpus().size() >= 12 && kinds.size() == 7, out.str()};
}

Outcome conservativity() {
  long long sentences = 0, mismatches = 0;
  std::string first;
  for (auto& d : corpus()) {
    FormulaGenerator gen(d.c.theory.signature, 0xc0ffee + sentences);
    Bound plus_bound = extended_bound(d.c.step, d.c.bound);
    for (int n = 0; n < 100; ++n) {
      Formula s = gen.sentence(3);
      ++sentences;
      bool base = bounded_entails(d.base_models, s, d.c.bound).refuted();
      bool plus = bounded_entails(d.plus_models, s, plus_bound).refuted();
      if (base != plus) {
        ++mismatches;
        if (first.empty()) first = d.c.name + ": " + print_formula(s);
      }
    }
  }
  std::ostringstream out;
  out << sentences << " sentences, " << mismatches << " verdict mismatches";
  if (!first.empty()) out << " (" << first << ")";
  return {mismatches == 0, out.str()};
}

Outcome translation() {
  SweepResult total;
  bool each_checked = true;
  std::string first;
  std::uint64_t seed = 17;
  for (auto& d : corpus()) {
    auto r = translation_sweep(d.c, d.base_models, 500, 4, seed++);
    total.formulas += r.formulas;
    total.codes += r.codes;
    total.checks += r.checks;
    total.disagreements += r.disagreements;
    total.leaks += r.leaks;
    each_checked = each_checked && r.checks > 0;
    if (first.empty() && !r.first_problem.empty()) first = d.c.name + ": " + r.first_problem;
  }
  std::ostringstream out;
  out << total.formulas << " formulas, " << total.codes << " codes, " << total.checks
      << " assignments, " << total.disagreements << " disagreements, " << total.leaks
      << " leaks";
  if (!first.empty()) out << " (" << first << ")";
  return {total.disagreements == 0 && total.leaks == 0 && each_checked, out.str()};
}

Outcome functors() {
  int passed = 0;
  std::string first;
  for (auto& d : corpus()) {
    auto F = projection_functor(d.c.theory, d.c.step, d.c.bound);
    auto check = check_functor(F);
    if (check.equivalence() && check.preserves_structure) {
      ++passed;
    } else if (first.empty()) {
      first = d.c.name + ": " + describe(check);
    }
  }
  auto chain = check_chain_functors(load_witness(corpus_path("partition.wit")), 3);
  std::ostringstream out;
  out << passed << "/" << corpus().size() << " projections are equivalences, composed "
      << (chain.equivalent() ? "EquivalentAtBound(3)" : "NotEquivalentAtBound(3)");
  if (!first.empty()) out << " (" << first << ")";
  return {passed == static_cast<int>(corpus().size()) && chain.equivalent(), out.str()};
}

Outcome truncation() {
  auto [left, right] = truncated_discrete_pair(4);
  auto C = build_category(left, Bound(1));
  auto D = build_category(right, Bound(1));
  std::string text;
  int code = cli({"category", "--truncation", "4", "--bound", "1"}, text);
  bool note = text.find("infinitely many predicates") != std::string::npos;
  std::ostringstream out;
  out << "discrete " << (is_discrete(C) && is_discrete(D) ? "yes" : "no") << ", "
      << C.objects.size() << " vs " << D.objects.size() << " objects, cli exit " << code
      << (note ? ", report notes that the full claim needs infinitely many predicates"
               : ", infinite-signature note missing");
  return {is_discrete(C) && is_discrete(D) && C.objects.size() == 16 && D.objects.size() == 9 &&
              note,
          out.str()};
}

Outcome classics() {
  auto group = load_witness(corpus_path("group.wit"));
  auto order = load_witness(corpus_path("order.wit"));
  auto g1 = verify_morita_witness(group, 4);
  auto g2 = verify_definitional_witness(group, 4);
  auto o1 = verify_morita_witness(order, 4);
  auto o2 = verify_definitional_witness(order, 4);
  int expected = 0;
  for (int n = 1; n <= 4; ++n) expected += group_count(n);
  auto unit = enumerate_models(group.left, Bound(4)).size();
  auto inverse = enumerate_models(group.right, Bound(4)).size();
  auto ok = [](const WitnessReport& r) {
    return r.status == WitnessReport::Status::VerifiedUpToBound;
  };
  std::ostringstream out;
  out << "groups " << to_string(g1.status) << "/" << to_string(g2.status) << " with " << unit
      << " and " << inverse << " classes (Cayley tables: " << expected << "), orders "
      << to_string(o1.status) << "/" << to_string(o2.status);
  return {ok(g1) && ok(g2) && ok(o1) && ok(o2) && expected == 5 &&
              unit == static_cast<std::size_t>(expected) &&
              inverse == static_cast<std::size_t>(expected),
          out.str()};
}

// Truth values of formulas in x, y, w over every model, as bit vectors.
using Bits = std::array<std::uint64_t, 2>;

struct BitsHash {
  std::size_t operator()(const Bits& b) const { return b[0] * 0x9e3779b97f4a7c15ULL ^ b[1]; }
};

Outcome no_code_free_equivalent() {
  auto T = load_theory(corpus_path("exists_p.th"));
  auto step = load_extension(T.signature, corpus_path("exists_p_subsort.ext").string());
  auto plus = extend_theory(T, step);
  std::vector<FiniteStructure> pluses;
  for (const auto& M : enumerate_models(T, Bound(3))) pluses.push_back(expand_model(M, T, step));

  // Bit layout: model blocks of n^3 assignments (x, y, w).
  std::vector<int> offset, size;
  int bits = 0;
  for (const auto& P : pluses) {
    offset.push_back(bits);
    size.push_back(P.size("s"));
    bits += size.back() * size.back() * size.back();
  }
  if (bits > 128) return {false, "bit budget exceeded"};
  auto set = [](Bits& b, int k) { b[k / 64] |= std::uint64_t{1} << (k % 64); };
  auto get = [](const Bits& b, int k) { return (b[k / 64] >> (k % 64)) & 1; };
  auto index = [&](int m, int x, int y, int w) {
    int n = size[m];
    return offset[m] + (x * n + y) * n + w;
  };
  auto tabulate = [&](auto pred) {
    Bits b{0, 0};
    for (std::size_t m = 0; m < pluses.size(); ++m)
      for (int x = 0; x < size[m]; ++x)
        for (int y = 0; y < size[m]; ++y)
          for (int w = 0; w < size[m]; ++w)
            if (pred(pluses[m], x, y, w)) set(b, index(static_cast<int>(m), x, y, w));
    return b;
  };
  int p = *pluses[0].signature().predicate_id("p");
  auto holds = [&](const FiniteStructure& P, int e) {
    int a[] = {e};
    return P.holds(p, a);
  };
  Bits full = tabulate([](const FiniteStructure&, int, int, int) { return true; });

  std::vector<Bits> level;
  std::unordered_set<Bits, BitsHash> seen;
  auto add = [&](const Bits& b) {
    if (seen.insert(b).second) level.push_back(b);
  };
  add(tabulate([&](const FiniteStructure& P, int x, int, int) { return holds(P, x); }));
  add(tabulate([&](const FiniteStructure& P, int, int y, int) { return holds(P, y); }));
  add(tabulate([&](const FiniteStructure& P, int, int, int w) { return holds(P, w); }));
  add(tabulate([](const FiniteStructure&, int x, int y, int) { return x == y; }));
  add(tabulate([](const FiniteStructure&, int x, int, int w) { return x == w; }));
  add(tabulate([](const FiniteStructure&, int, int y, int w) { return y == w; }));
  add(full);

  auto quantify = [&](const Bits& b, int var, bool exists) {
    Bits out{0, 0};
    for (std::size_t m = 0; m < pluses.size(); ++m) {
      int n = size[m];
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          for (int w = 0; w < n; ++w) {
            bool acc = !exists;
            for (int v = 0; v < n; ++v) {
              int a[3] = {x, y, w};
              a[var] = v;
              bool bit = get(b, index(static_cast<int>(m), a[0], a[1], a[2]));
              acc = exists ? (acc || bit) : (acc && bit);
            }
            if (acc) set(out, index(static_cast<int>(m), x, y, w));
          }
    }
    return out;
  };
  auto neg = [&](const Bits& b) { return Bits{~b[0] & full[0], ~b[1] & full[1]}; };

  // Target: i(z) = x, one vector per (model, z); a match must agree with all.
  int incl = *pluses[0].signature().function_id("i");
  std::vector<std::pair<Bits, Bits>> targets;  // (mask of the model, truth)
  for (std::size_t m = 0; m < pluses.size(); ++m) {
    Bits mask = tabulate([&](const FiniteStructure& P, int, int, int) { return &P == &pluses[m]; });
    for (int z = 0; z < pluses[m].size("sp"); ++z) {
      int a[] = {z};
      int iz = pluses[m].apply(incl, a);
      Bits truth = tabulate([&](const FiniteStructure& P, int x, int, int) {
        return &P == &pluses[m] && x == iz;
      });
      targets.push_back({mask, truth});
    }
  }
  auto matches = [&](const Bits& b) {
    for (const auto& [mask, truth] : targets) {
      if ((b[0] & mask[0]) != truth[0] || (b[1] & mask[1]) != truth[1]) return false;
    }
    return true;
  };

  long long examined = 0, found = 0;
  auto consider = [&](const Bits& b) {
    ++examined;
    if (matches(b)) ++found;
  };
  for (const auto& b : level) consider(b);
  for (int depth = 1; depth <= 3; ++depth) {
    std::vector<Bits> prev = level;
    bool last = depth == 3;
    auto emit = [&](const Bits& b) {
      if (last) {
        consider(b);
      } else if (seen.insert(b).second) {
        level.push_back(b);
        consider(b);
      }
    };
    for (const auto& a : prev) {
      emit(neg(a));
      for (int v = 0; v < 3; ++v) {
        emit(quantify(a, v, true));
        emit(quantify(a, v, false));
      }
      for (const auto& b : prev) {
        emit({a[0] & b[0], a[1] & b[1]});
        emit({a[0] | b[0], a[1] | b[1]});
        emit({(neg(a)[0] | b[0]), (neg(a)[1] | b[1])});
        Bits x{a[0] ^ b[0], a[1] ^ b[1]};
        emit(neg(x));
      }
    }
  }

  // The code-relative translation, checked on every expansion.
  Variable x{"x", "s"}, z{"z", "sp"};
  auto phi = parse_formula(plus.signature, "i(z) = x", {{"x", "s"}, {"z", "sp"}});
  auto codes = codes_for({z}, step);
  auto star = simplify(translate_formula(phi, codes.at(0), step));
  Evaluator direct(plus.signature, phi, {x, z});
  std::vector<Variable> order{x, codes[0].links()[0]};
  Evaluator translated(T.signature, star, order);
  bool verified = true;
  for (const auto& P : pluses) {
    for (int zi = 0; zi < P.size("sp"); ++zi) {
      int a[] = {zi};
      int link = P.apply(incl, a);
      for (int xi = 0; xi < P.size("s"); ++xi) {
        int d[] = {xi, zi};
        int t[] = {xi, link};
        verified = verified && direct(P, d) == translated(reduct(P, T.signature), t);
      }
    }
  }
  std::ostringstream out;
  out << examined << " formulas of depth <= 3 in x, y, w examined (" << seen.size()
      << " distinct below depth 3), " << found << " equivalent to i(z) = x; under the code "
      << print_formula(code_formula(codes[0], step)) << " it translates to "
      << print_formula(star) << (verified ? " and agrees everywhere" : " and DISAGREES");
  return {found == 0 && verified, out.str()};
}

Outcome enumeration_soundness() {
  auto theories = corpus_theories();
  std::vector<std::string> names;
  for (const auto& [name, T] : theories) names.push_back(name);
  std::mt19937_64 rng(std::random_device{}());
  std::shuffle(names.begin(), names.end(), rng);
  bool ok = true;
  std::ostringstream out;
  for (int k = 0; k < 2; ++k) {
    const Theory& T = theories.at(names[k]);
    auto emitted = enumerate_models(T, Bound(2)).size();
    auto brute = orbit_count_up_to(T, 2);
    ok = ok && static_cast<long long>(emitted) == brute;
    out << (k ? ", " : "") << names[k] << " " << emitted << " vs " << brute;
  }
  return {ok, out.str()};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"partition witness", witness_example},
      {"expansions exist and are unique", expansions},
      {"conservativity", conservativity},
      {"translation", translation},
      {"projection functors", functors},
      {"truncated discrete pair", truncation},
      {"groups and orders", classics},
      {"no code-free equivalent", no_code_free_equivalent},
      {"enumeration soundness", enumeration_soundness},
  };
  int failed = 0;
  int number = 1;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s - %s [%.2fs]\n", number++, c.name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
