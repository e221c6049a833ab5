#include "ci/parse.hpp"

#include <cctype>

namespace ci {

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "' at offset " +
                       std::to_string(pos) + " in \"" + text + "\"");
  }

  bool ident_ahead() {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }

  bool digit_ahead() { return std::isdigit(static_cast<unsigned char>(peek())); }

  long integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '.')
      throw ParseError("floating-point literal at offset " + std::to_string(pos) +
                       "; exact expressions take rationals like 1/2");
    return std::stol(text.substr(start, pos - start));
  }
};

class Parser {
 public:
  Parser(const std::string& text, const SymbolTable& tab) : lex_(text), tab_(tab) {}

  Expr run() {
    Expr e = expr();
    lex_.skip_ws();
    if (lex_.pos != lex_.text.size())
      throw ParseError("trailing input at offset " + std::to_string(lex_.pos) +
                       " in \"" + lex_.text + "\"");
    return e;
  }

 private:
  Expr expr() {
    Expr e = term();
    while (true) {
      if (lex_.accept('+')) e = add(e, term(), tab_);
      else if (lex_.accept('-')) e = sub(e, term(), tab_);
      else return e;
    }
  }

  Expr term() {
    Expr e = factor();
    while (true) {
      if (lex_.accept('*')) {
        e = mul(e, factor(), tab_);
      } else if (lex_.accept('/')) {
        Expr d = factor();
        if (d.is_zero())
          throw ParseError("division by an expression that is identically zero");
        if (d.is_scalar()) e = scale(Scalar(1) / d.as_scalar(), e);
        else e = mul(e, pow(d, -1, tab_), tab_);
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    bool negate = false;
    while (true) {
      if (lex_.accept('-')) negate = !negate;
      else if (lex_.accept('+')) continue;
      else break;
    }
    Expr e = power();
    return negate ? neg(e) : e;
  }

  Expr power() {
    Expr base = atom();
    if (lex_.accept('^')) {
      bool negexp = lex_.accept('-');
      if (!lex_.digit_ahead()) throw ParseError("expected integer exponent");
      long n = lex_.integer();
      base = pow(base, negexp ? -n : n, tab_);
    }
    return base;
  }

  Expr atom() {
    if (lex_.accept('(')) {
      Expr e = expr();
      lex_.expect(')');
      return e;
    }
    if (lex_.digit_ahead()) return Expr::scalar(Scalar(lex_.integer()));
    if (lex_.ident_ahead()) {
      std::string id = lex_.ident();
      if (id == "i") return Expr::scalar(Scalar::i());
      if (id == "sin" || id == "cos" || id == "exp") {
        lex_.expect('(');
        Expr arg = expr();
        lex_.expect(')');
        if (id == "sin") return sin_of(arg, tab_);
        if (id == "cos") return cos_of(arg, tab_);
        return exp_of(arg, tab_);
      }
      return Expr::atom(tab_.require(id));
    }
    throw ParseError("unexpected character at offset " + std::to_string(lex_.pos) +
                     " in \"" + lex_.text + "\"");
  }

  Lexer lex_;
  const SymbolTable& tab_;
};

}  // namespace

Expr parse(const std::string& text, const SymbolTable& tab) {
  return Parser(text, tab).run();
}

}  // namespace ci
