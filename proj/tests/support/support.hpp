#pragma once

// Oracles, generators and corpus access shared by the test binaries.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "morita/enumerate.hpp"
#include "morita/extension.hpp"
#include "morita/morphism.hpp"
#include "morita/structure.hpp"
#include "morita/syntax.hpp"
#include "morita/translate.hpp"

namespace morita::testing {

std::filesystem::path corpus_path(const std::string& name = {});

/// One line of corpus/cases.txt. `theory` already includes the prefix steps
/// and `bound` is the base bound propagated through them.
struct CorpusCase {
  std::string name;
  Theory theory;
  std::vector<ExtensionStep> prefix;
  ExtensionStep step;
  Bound bound;
};

std::vector<CorpusCase> load_cases(int bound = 3);
/// The distinct base theories of the corpus, by file name.
std::map<std::string, Theory> corpus_theories();

// ---------------------------------------------------------------------------
// Naive Tarski semantics straight from the definition.

using NaiveAssignment = std::map<Variable, int>;
int naive_term(const FiniteStructure& A, const Term& t, const NaiveAssignment& rho);
bool naive_holds(const FiniteStructure& A, const Formula& f, const NaiveAssignment& rho = {});
bool naive_model(const FiniteStructure& A, const Theory& T);

// ---------------------------------------------------------------------------
// Brute-force enumeration of labeled structures.

/// Calls `visit` on every structure over `sig` with carrier sizes `sizes`.
void for_each_labeled(const std::shared_ptr<const Signature>& sig, const std::vector<int>& sizes,
                      const std::function<void(const FiniteStructure&)>& visit);
/// Least table encoding over all per-sort permutations.
std::vector<int> orbit_key(const FiniteStructure& A);
/// Isomorphism classes of models of T with the given sizes, counted as
/// permutation orbits of labeled models.
long long orbit_count(const Theory& T, const std::vector<int>& sizes);
/// Sum of orbit_count over all size vectors with every sort in 1..cap.
long long orbit_count_up_to(const Theory& T, int cap);

/// Groups of order n up to isomorphism, from Cayley tables.
int group_count(int n);

// ---------------------------------------------------------------------------
// Ehrenfeucht-Fraisse games on relational structures (predicates only).

struct Pebble {
  int sort;
  int index;
};
bool duplicator_wins(const FiniteStructure& M, std::vector<Pebble> a, const FiniteStructure& N,
                     std::vector<Pebble> b, int rounds);
/// h preserves every formula of quantifier depth <= depth with at most
/// `free` free variables.
bool preserves_to_depth(const Morphism& h, int depth, int free);

// ---------------------------------------------------------------------------
// Random syntax.

class FormulaGenerator {
 public:
  FormulaGenerator(const Signature& sig, std::uint64_t seed);

  /// Free variables of the result are drawn from `scope`.
  Formula formula(int depth, const std::vector<Variable>& scope);
  Formula sentence(int depth) { return formula(depth, {}); }
  /// A term of `sort` of at most `depth` function applications, if any exists.
  std::optional<Term> term(const std::string& sort, int depth, const std::vector<Variable>& scope);

  std::mt19937_64& rng() { return rng_; }

 private:
  Formula atom(const std::vector<Variable>& scope);
  bool chance(int percent);
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
  }

  const Signature& sig_;
  std::mt19937_64 rng_;
  int counter_ = 0;
};

/// One variable per sort of `sig`, named after the sort.
std::vector<Variable> one_variable_per_sort(const Signature& sig);

// ---------------------------------------------------------------------------
// Translation sweep: phi against phi* over expansions of the models of T.

struct SweepResult {
  long long formulas = 0;
  long long codes = 0;
  long long checks = 0;
  long long disagreements = 0;
  long long leaks = 0;
  std::string first_problem;
};

/// `models` are models of the case theory; each is expanded along the step.
SweepResult translation_sweep(const CorpusCase& c, const std::vector<FiniteStructure>& models,
                              int formulas, int depth, std::uint64_t seed);

}  // namespace morita::testing
