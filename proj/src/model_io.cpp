#include <map>

#include "lexer.hpp"
#include "morita/structure.hpp"

namespace morita {

namespace {

std::map<std::string, int> atom_offsets(const FiniteStructure& A) {
  std::map<std::string, int> out;
  int running = 0;
  for (std::size_t s = 0; s < A.signature().sorts().size(); ++s) {
    out[A.signature().sorts()[s]] = running;
    int top = 0;
    for (const auto& e : A.carrier(static_cast<int>(s))) {
      if (e.kind() == Element::Kind::Atom) top = std::max(top, e.index() + 1);
    }
    running += top;
  }
  return out;
}

std::string name_with(const std::map<std::string, int>& offsets, const Element& e) {
  switch (e.kind()) {
    case Element::Kind::Atom: {
      auto it = offsets.find(e.sort());
      if (it == offsets.end()) return e.sort() + "_" + std::to_string(e.index());
      return "e" + std::to_string(it->second + e.index());
    }
    case Element::Kind::Pair:
      return "pair(" + name_with(offsets, e.first()) + "," + name_with(offsets, e.second()) + ")";
    case Element::Kind::InjL: return "inl(" + name_with(offsets, e.first()) + ")";
    case Element::Kind::InjR: return "inr(" + name_with(offsets, e.first()) + ")";
    case Element::Kind::Sub: return "sub(" + name_with(offsets, e.first()) + ")";
    case Element::Kind::Class: return "class(" + name_with(offsets, e.first()) + ")";
  }
  return {};
}

std::string tuple_text(const std::map<std::string, int>& offsets, const FiniteStructure& A,
                       const std::vector<std::string>& sorts, const std::vector<int>& idx) {
  std::string out = "(";
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ", ";
    out += name_with(offsets, A.carrier(sorts[i])[idx[i]]);
  }
  return out + ")";
}

/// Calls `fn` with every argument tuple over `dims`, in row-major order.
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

std::vector<int> dims_of(const FiniteStructure& A, const std::vector<std::string>& sorts) {
  std::vector<int> out;
  for (const auto& s : sorts) out.push_back(A.size(s));
  return out;
}

}  // namespace

std::string element_name(const FiniteStructure& A, const Element& e) {
  return name_with(atom_offsets(A), e);
}

std::string print_model(const FiniteStructure& A) {
  const Signature& sig = A.signature();
  auto offsets = atom_offsets(A);
  std::string out;
  for (std::size_t s = 0; s < sig.sorts().size(); ++s) {
    out += "carrier " + sig.sorts()[s] + " = {";
    const auto& carrier = A.carrier(static_cast<int>(s));
    for (std::size_t i = 0; i < carrier.size(); ++i) {
      if (i) out += ", ";
      out += name_with(offsets, carrier[i]);
    }
    out += "}\n";
  }
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    const auto& decl = sig.predicates()[p];
    out += "pred " + decl.name + " = {";
    bool first = true;
    for_each_tuple(dims_of(A, decl.arity), [&](const std::vector<int>& idx) {
      if (!A.holds(static_cast<int>(p), idx)) return;
      if (!first) out += ", ";
      first = false;
      out += tuple_text(offsets, A, decl.arity, idx);
    });
    out += "}\n";
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& decl = sig.functions()[f];
    out += "func " + decl.name + " = {";
    bool first = true;
    for_each_tuple(dims_of(A, decl.domain), [&](const std::vector<int>& idx) {
      if (!first) out += ", ";
      first = false;
      out += tuple_text(offsets, A, decl.domain, idx) + " -> " +
             name_with(offsets, A.carrier(decl.codomain)[A.apply(static_cast<int>(f), idx)]);
    });
    out += "}\n";
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    const auto& decl = sig.constants()[c];
    out += "const " + decl.name + " = " +
           name_with(offsets, A.carrier(decl.sort)[A.constant(static_cast<int>(c))]) + "\n";
  }
  return out;
}

namespace {

using detail::Token;
using detail::TokenStream;

class ModelParser {
 public:
  ModelParser(const Signature& sig, std::string_view text, const std::string& file)
      : in_(detail::tokenize(text, file), file), builder_(sig) {}

  FiniteStructure parse() {
    const Signature& sig = builder_.signature();
    std::vector<bool> seen(sig.sorts().size(), false);
    // Carriers come first so every later reference resolves.
    while (in_.is("carrier")) {
      in_.next();
      const Token& at = in_.peek();
      std::string sort = in_.ident("a sort");
      auto id = sig.sort_id(sort);
      if (!id) in_.fail_at(at, "unknown sort '" + sort + "'");
      if (seen[*id]) in_.fail_at(at, "carrier of '" + sort + "' given twice");
      seen[*id] = true;
      in_.expect("=");
      in_.expect("{");
      std::vector<Element> elements;
      if (!in_.is("}")) {
        do {
          elements.push_back(declare(sort, static_cast<int>(elements.size())));
        } while (in_.accept(","));
      }
      in_.expect("}");
      if (elements.empty()) in_.fail_at(at, "carrier of '" + sort + "' is empty");
      builder_.set_carrier(sort, std::move(elements));
    }
    for (std::size_t s = 0; s < seen.size(); ++s) {
      if (!seen[s]) in_.fail("missing carrier for sort '" + sig.sorts()[s] + "'");
    }
    while (!in_.at_end()) {
      const Token& kw = in_.peek();
      std::string word = in_.ident("'pred', 'func' or 'const'");
      const Token& at = in_.peek();
      std::string name = in_.ident("a symbol");
      in_.expect("=");
      try {
        if (word == "pred") {
          if (!sig.predicate_id(name)) in_.fail_at(at, "unknown predicate '" + name + "'");
          in_.expect("{");
          if (!in_.is("}")) {
            do {
              builder_.set_predicate(name, tuple());
            } while (in_.accept(","));
          }
          in_.expect("}");
        } else if (word == "func") {
          if (!sig.function_id(name)) in_.fail_at(at, "unknown function '" + name + "'");
          in_.expect("{");
          if (!in_.is("}")) {
            do {
              auto args = tuple();
              in_.expect("->");
              builder_.set_function(name, args, element());
            } while (in_.accept(","));
          }
          in_.expect("}");
        } else if (word == "const") {
          if (!sig.constant_id(name)) in_.fail_at(at, "unknown constant '" + name + "'");
          builder_.set_constant(name, element());
        } else {
          in_.fail_at(kw, "expected 'pred', 'func' or 'const'");
        }
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        in_.fail_at(at, e.what());
      }
    }
    try {
      return builder_.build();
    } catch (const Error& e) {
      throw ParseError(in_.file(), in_.peek().line, in_.peek().column, e.what());
    }
  }

 private:
  struct Expr {
    std::string head;
    std::vector<Expr> args;
    bool composite = false;
    std::string text() const {
      if (!composite) return head;
      std::string out = head + "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ",";
        out += args[i].text();
      }
      return out + ")";
    }
  };

  Expr expr() {
    Expr e;
    e.head = in_.ident("an element");
    if (in_.accept("(")) {
      e.composite = true;
      do {
        e.args.push_back(expr());
      } while (in_.accept(","));
      in_.expect(")");
    }
    return e;
  }

  const Element& lookup(const Token& at, const Expr& e) {
    auto it = names_.find(e.text());
    if (it == names_.end()) in_.fail_at(at, "unknown element '" + e.text() + "'");
    return it->second;
  }

  Element declare(const std::string& sort, int position) {
    const Token& at = in_.peek();
    Expr e = expr();
    Element value = Element::atom(sort, position);
    if (e.composite) {
      auto part = [&](std::size_t i) { return lookup(at, e.args[i]); };
      std::size_t want = e.head == "pair" ? 2 : 1;
      if (e.args.size() != want) in_.fail_at(at, "wrong number of parts in '" + e.text() + "'");
      if (e.head == "pair") {
        value = Element::pair(sort, part(0), part(1));
      } else if (e.head == "inl") {
        value = Element::inj_left(sort, part(0));
      } else if (e.head == "inr") {
        value = Element::inj_right(sort, part(0));
      } else if (e.head == "sub") {
        value = Element::sub(sort, part(0));
      } else if (e.head == "class") {
        value = Element::cls(sort, part(0));
      } else {
        in_.fail_at(at, "unknown element constructor '" + e.head + "'");
      }
    }
    if (!names_.emplace(e.text(), value).second) {
      in_.fail_at(at, "element '" + e.text() + "' declared twice");
    }
    return value;
  }

  Element element() {
    const Token& at = in_.peek();
    return lookup(at, expr());
  }

  std::vector<Element> tuple() {
    std::vector<Element> out;
    in_.expect("(");
    do {
      out.push_back(element());
    } while (in_.accept(","));
    in_.expect(")");
    return out;
  }

  TokenStream in_;
  StructureBuilder builder_;
  std::map<std::string, Element> names_;
};

}  // namespace

FiniteStructure parse_model(const Signature& sig, std::string_view text, const std::string& file) {
  return ModelParser(sig, text, file).parse();
}

}  // namespace morita
