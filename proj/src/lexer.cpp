#include "lexer.hpp"

#include <cctype>

namespace morita::detail {

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = column;
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    static const char* multi[] = {"<->", "->", ":="};
    bool matched = false;
    for (const char* m : multi) {
      std::string_view mv(m);
      if (text.substr(i, mv.size()) == mv) {
        t.kind = Token::Kind::Punct;
        t.text = std::string(mv);
        advance(mv.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      static const std::string_view single = "().,:=~&|{}*";
      if (single.find(c) == std::string_view::npos) {
        throw ParseError(file, line, column, std::string("unexpected character '") + c + "'");
      }
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.column = column;
  out.push_back(end);
  return out;
}

}  // namespace morita::detail
