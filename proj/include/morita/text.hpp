#pragma once

// Text syntax for formulas and theory files.
//
//   sort s
//   pred p : s x s
//   func f : s x s -> s
//   const c : s
//   axiom forall s x. exists s y. f(x, y) = c & ~p(x, y)
//
// Binding strength, loosest first: quantifiers, <->, ->, |, &, ~.
// `exists1` is expanded on parse.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "morita/syntax.hpp"

namespace morita {

/// Free variables allowed in a parsed formula: name -> sort.
using VariableScope = std::map<std::string, std::string>;

Formula parse_formula(const Signature& sig, std::string_view text,
                      const VariableScope& free = {}, const std::string& file = {});
Term parse_term(const Signature& sig, std::string_view text, const VariableScope& free = {},
                const std::string& file = {});
Theory parse_theory(std::string_view text, const std::string& file = {});

std::string print_term(const Term& t);
std::string print_formula(const Formula& f);
std::string print_signature(const Signature& sig);
std::string print_theory(const Theory& t);

std::string read_file(const std::filesystem::path& path);
Theory load_theory(const std::filesystem::path& path);

}  // namespace morita
