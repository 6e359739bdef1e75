#include <fstream>
#include <sstream>

#include "parser.hpp"

namespace morita {

namespace detail {

namespace {

class FormulaParser {
 public:
  FormulaParser(TokenStream& in, const Signature& sig, const VariableScope& free)
      : in_(in), sig_(sig) {
    for (const auto& [name, sort] : free) {
      if (!name.empty() && name[0] == '_') {
        in_.fail("variable name '" + name + "' is reserved");
      }
      if (!sig.has_sort(sort)) in_.fail("unknown sort '" + sort + "' for variable '" + name + "'");
      scope_.push_back(Variable{name, sort});
    }
  }

  Formula formula() {
    if (is_quantifier_keyword()) return quantifier();
    return iff();
  }

  Term term() {
    const Token& start = in_.peek();
    std::string name = in_.ident("a term");
    if (in_.accept("(")) {
      auto kind = sig_.kind_of(name);
      if (kind != SymbolKind::Function) in_.fail_at(start, "unknown function symbol '" + name + "'");
      std::vector<Term> args;
      do {
        args.push_back(term());
      } while (in_.accept(","));
      in_.expect(")");
      Term t = Term::apply(name, std::move(args));
      sort_of(start, t);
      return t;
    }
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->name == name) return Term::var(*it);
    }
    if (sig_.constant_id(name)) return Term::constant(name);
    if (sig_.function_id(name)) in_.fail_at(start, "function '" + name + "' needs arguments");
    in_.fail_at(start, "unknown identifier '" + name + "'");
  }

 private:
  bool is_quantifier_keyword() const {
    return in_.peek().kind == Token::Kind::Ident &&
           (in_.is("forall") || in_.is("exists") || in_.is("exists1"));
  }

  std::string sort_of(const Token& at, const Term& t) {
    try {
      return sort_of_term(sig_, Context(scope_.begin(), scope_.end()), t);
    } catch (const Error& e) {
      in_.fail_at(at, e.what());
    }
  }

  Formula quantifier() {
    const Token& kw = in_.next();
    Formula::Kind kind = kw.text == "forall"   ? Formula::Kind::Forall
                         : kw.text == "exists" ? Formula::Kind::Exists
                                               : Formula::Kind::ExistsUnique;
    std::string sort = parse_sort(in_, sig_);
    const Token& var_token = in_.peek();
    std::string name = in_.ident("a variable name");
    if (is_keyword(name)) in_.fail_at(var_token, "'" + name + "' is a keyword");
    if (!name.empty() && name[0] == '_' && !is_reserved_name(name)) {
      in_.fail_at(var_token, "variable name '" + name + "' is reserved");
    }
    in_.expect(".");
    Variable v{name, sort};
    scope_.push_back(v);
    Formula body = formula();
    scope_.pop_back();
    return Formula::quantified(kind, v, body);
  }

  Formula iff() {
    Formula lhs = implication();
    if (in_.accept("<->")) return Formula::iff(lhs, operand_or_quantifier(&FormulaParser::iff));
    return lhs;
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (in_.accept("->")) {
      return Formula::implies(lhs, operand_or_quantifier(&FormulaParser::implication));
    }
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (in_.accept("|")) lhs = Formula::disj(lhs, operand_or_quantifier(&FormulaParser::conjunction));
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (in_.accept("&")) lhs = Formula::conj(lhs, operand_or_quantifier(&FormulaParser::unary));
    return lhs;
  }

  Formula operand_or_quantifier(Formula (FormulaParser::*rule)()) {
    if (is_quantifier_keyword()) return quantifier();
    return (this->*rule)();
  }

  Formula unary() {
    if (in_.accept("~")) return Formula::negation(operand_or_quantifier(&FormulaParser::unary));
    if (in_.accept("(")) {
      Formula f = formula();
      in_.expect(")");
      return f;
    }
    if (is_quantifier_keyword()) return quantifier();
    return atom();
  }

  Formula atom() {
    const Token& start = in_.peek();
    if (start.kind != Token::Kind::Ident) in_.fail("expected a formula");
    if (sig_.predicate_id(start.text) && in_.peek(1).text == "(") {
      std::string name = in_.next().text;
      in_.expect("(");
      std::vector<Term> args;
      do {
        args.push_back(term());
      } while (in_.accept(","));
      in_.expect(")");
      Formula f = Formula::pred(name, std::move(args));
      check(start, f);
      return f;
    }
    if (sig_.predicate_id(start.text)) in_.fail_at(start, "predicate '" + start.text + "' needs arguments");
    Term lhs = term();
    in_.expect("=");
    Term rhs = term();
    Formula f = Formula::eq(lhs, rhs);
    check(start, f);
    return f;
  }

  void check(const Token& at, const Formula& f) {
    try {
      check_formula(sig_, Context(scope_.begin(), scope_.end()), f);
    } catch (const Error& e) {
      in_.fail_at(at, e.what());
    }
  }

  TokenStream& in_;
  const Signature& sig_;
  std::vector<Variable> scope_;
};

const char* const kKeywords[] = {"forall", "exists", "exists1", "sort", "pred", "func",
                                 "const",  "axiom",  "define"};

}  // namespace

bool is_keyword(std::string_view name) {
  for (const char* k : kKeywords) {
    if (name == k) return true;
  }
  return false;
}

void check_symbol_name(TokenStream& in, const Token& at, const std::string& name) {
  if (is_keyword(name)) in.fail_at(at, "'" + name + "' is a keyword");
  if (!name.empty() && name[0] == '_') in.fail_at(at, "symbol name '" + name + "' is reserved");
}

Formula parse_formula(TokenStream& in, const Signature& sig, const VariableScope& free) {
  FormulaParser p(in, sig, free);
  Formula f = p.formula();
  return expand_unique_exists(f);
}

Term parse_term(TokenStream& in, const Signature& sig, const VariableScope& free) {
  FormulaParser p(in, sig, free);
  return p.term();
}

std::string parse_sort(TokenStream& in, const Signature& sig) {
  const Token& at = in.peek();
  std::string s = in.ident("a sort");
  if (!sig.has_sort(s)) in.fail_at(at, "unknown sort '" + s + "'");
  return s;
}

std::vector<std::string> parse_sort_list(TokenStream& in, const Signature& sig) {
  std::vector<std::string> out{parse_sort(in, sig)};
  while (in.accept("x") || in.accept("*")) out.push_back(parse_sort(in, sig));
  return out;
}

bool parse_declaration(TokenStream& in, Signature& sig) {
  const Token& kw = in.peek();
  if (kw.kind != Token::Kind::Ident) return false;
  if (kw.text != "sort" && kw.text != "pred" && kw.text != "func" && kw.text != "const") {
    return false;
  }
  in.next();
  const Token& at = in.peek();
  std::string name = in.ident("a symbol name");
  check_symbol_name(in, at, name);
  if (kw.text == "sort" && name == "x") in.fail_at(at, "'x' cannot name a sort");
  try {
    if (kw.text == "sort") {
      sig.add_sort(name);
    } else if (kw.text == "pred") {
      in.expect(":");
      sig.add_predicate({name, parse_sort_list(in, sig)});
    } else if (kw.text == "func") {
      in.expect(":");
      auto domain = parse_sort_list(in, sig);
      in.expect("->");
      sig.add_function({name, std::move(domain), parse_sort(in, sig)});
    } else {
      in.expect(":");
      sig.add_constant({name, parse_sort(in, sig)});
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    in.fail_at(at, e.what());
  }
  return true;
}

}  // namespace detail

using detail::Token;
using detail::TokenStream;

Formula parse_formula(const Signature& sig, std::string_view text, const VariableScope& free,
                      const std::string& file) {
  TokenStream in(detail::tokenize(text, file), file);
  Formula f = detail::parse_formula(in, sig, free);
  if (!in.at_end()) in.fail("unexpected '" + in.peek().text + "' after formula");
  return f;
}

Term parse_term(const Signature& sig, std::string_view text, const VariableScope& free,
                const std::string& file) {
  TokenStream in(detail::tokenize(text, file), file);
  Term t = detail::parse_term(in, sig, free);
  if (!in.at_end()) in.fail("unexpected '" + in.peek().text + "' after term");
  return t;
}

Theory parse_theory(std::string_view text, const std::string& file) {
  TokenStream in(detail::tokenize(text, file), file);
  Theory t;
  while (!in.at_end()) {
    if (detail::parse_declaration(in, t.signature)) continue;
    if (in.accept("axiom")) {
      if (t.signature.sorts().empty()) in.fail("axiom before any sort declaration");
      t.axioms.push_back(detail::parse_formula(in, t.signature, {}));
      continue;
    }
    in.fail("expected 'sort', 'pred', 'func', 'const' or 'axiom', found '" + in.peek().text + "'");
  }
  if (t.signature.sorts().empty()) throw ParseError(file, 1, 1, "theory declares no sort");
  return t;
}

// ---------------------------------------------------------------------------
// Printing

std::string print_term(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.variable().name;
    case Term::Kind::Const: return t.symbol();
    case Term::Kind::App: {
      std::string out = t.symbol() + "(";
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) out += ", ";
        out += print_term(t.args()[i]);
      }
      return out + ")";
    }
  }
  return {};
}

namespace {

int precedence(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
    case Formula::Kind::ExistsUnique: return 0;
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Or: return 3;
    case Formula::Kind::And: return 4;
    case Formula::Kind::Not: return 5;
    default: return 6;
  }
}

const char* op_text(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::And: return " & ";
    case Formula::Kind::Or: return " | ";
    case Formula::Kind::Implies: return " -> ";
    case Formula::Kind::Iff: return " <-> ";
    default: return "";
  }
}

void print_into(const Formula& f, std::string& out);

void print_operand(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(f, out);
  if (parens) out += ')';
}

void print_into(const Formula& f, std::string& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Eq:
      out += print_term(f.terms()[0]);
      out += " = ";
      out += print_term(f.terms()[1]);
      return;
    case K::Pred: {
      out += f.symbol();
      out += '(';
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i) out += ", ";
        out += print_term(f.terms()[i]);
      }
      out += ')';
      return;
    }
    case K::Not:
      out += '~';
      print_operand(f.body(), precedence(f.body()) < 5, out);
      return;
    case K::And:
    case K::Or:
    case K::Implies:
    case K::Iff: {
      int p = precedence(f);
      bool right_assoc = f.kind() == K::Implies || f.kind() == K::Iff;
      int lp = precedence(f.lhs());
      int rp = precedence(f.rhs());
      print_operand(f.lhs(), lp < p || (lp == p && right_assoc) || lp == 0, out);
      out += op_text(f.kind());
      print_operand(f.rhs(), rp < p || (rp == p && !right_assoc) || rp == 0, out);
      return;
    }
    case K::Forall:
    case K::Exists:
    case K::ExistsUnique:
      out += f.kind() == K::Forall ? "forall " : f.kind() == K::Exists ? "exists " : "exists1 ";
      out += f.bound().sort;
      out += ' ';
      out += f.bound().name;
      out += ". ";
      print_into(f.body(), out);
      return;
  }
}

}  // namespace

std::string print_formula(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

std::string print_signature(const Signature& sig) {
  std::string out;
  auto list = [](const std::vector<std::string>& sorts) {
    std::string s;
    for (std::size_t i = 0; i < sorts.size(); ++i) {
      if (i) s += " x ";
      s += sorts[i];
    }
    return s;
  };
  for (const auto& s : sig.sorts()) out += "sort " + s + "\n";
  for (const auto& p : sig.predicates()) out += "pred " + p.name + " : " + list(p.arity) + "\n";
  for (const auto& f : sig.functions()) {
    out += "func " + f.name + " : " + list(f.domain) + " -> " + f.codomain + "\n";
  }
  for (const auto& c : sig.constants()) out += "const " + c.name + " : " + c.sort + "\n";
  return out;
}

std::string print_theory(const Theory& t) {
  std::string out = print_signature(t.signature);
  for (const auto& a : t.axioms) out += "axiom " + print_formula(a) + "\n";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Theory load_theory(const std::filesystem::path& path) {
  return parse_theory(read_file(path), path.string());
}

}  // namespace morita
