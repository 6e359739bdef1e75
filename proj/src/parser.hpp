#pragma once

#include "lexer.hpp"
#include "morita/text.hpp"

namespace morita::detail {

bool is_keyword(std::string_view name);

/// Rejects reserved and keyword names for declared symbols.
void check_symbol_name(TokenStream& in, const Token& at, const std::string& name);

/// Parses one formula, stopping before the first token that cannot extend it.
Formula parse_formula(TokenStream& in, const Signature& sig, const VariableScope& free);
Term parse_term(TokenStream& in, const Signature& sig, const VariableScope& free);

/// `s1 x s2 x ...` (also accepts `*`).
std::vector<std::string> parse_sort_list(TokenStream& in, const Signature& sig);
std::string parse_sort(TokenStream& in, const Signature& sig);

/// One `sort`/`pred`/`func`/`const` declaration whose keyword is the next
/// token. Returns false if the next token is not a declaration keyword.
bool parse_declaration(TokenStream& in, Signature& sig);

}  // namespace morita::detail
