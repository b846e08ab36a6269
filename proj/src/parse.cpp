#include "mkl/parse.hpp"

#include <cctype>

namespace mkl {

SyntaxError::SyntaxError(const std::string& what, size_t p)
    : std::runtime_error(what + " (at offset " + std::to_string(p) + ")"), pos(p) {}

namespace {

struct Parser {
  const std::string& src;
  size_t pos = 0;
  Lang lang;

  explicit Parser(const std::string& s, Lang l) : src(s), lang(l) {}

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos); }

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) pos++;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool eat(char c) {
    if (peek() == c) {
      pos++;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  // Identifier starting at the current position, or empty if none.
  std::string peek_ident() {
    skip_ws();
    size_t i = pos;
    if (i >= src.size()) return {};
    char c = src[i];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return {};
    std::string out;
    while (i < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
      out += src[i++];
    }
    return out;
  }

  // True if the identifier is immediately followed by '(' (call form).
  bool call_follows(const std::string& ident) {
    size_t i = pos + ident.size();
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) i++;
    return i < src.size() && src[i] == '(';
  }

  FPtr postfix(FPtr f) {
    while (peek() == '^') {
      size_t at = pos;
      pos++;
      char c = pos < src.size() ? src[pos] : '\0';
      if (c != '*' && c != '#') {
        pos = at;
        fail("expected '*' or '#' after '^'");
      }
      pos++;
      if (lang == Lang::Multi) {
        pos = at;
        fail("stars do not belong to the multi-type language");
      }
      f = c == '*' ? star(f) : dstar(f);
    }
    return f;
  }

  FPtr formula() {
    skip_ws();
    size_t at = pos;
    char c = peek();
    if (c == '1') {
      pos++;
      return postfix(one());
    }
    if (c == '0') {
      pos++;
      return postfix(zero());
    }
    if (c == '(') {
      pos++;
      FPtr l = formula();
      char op = peek();
      if (op == '+' || op == '.') {
        pos++;
        FPtr r = formula();
        expect(')');
        return postfix(op == '+' ? funion(l, r) : fcomp(l, r));
      }
      expect(')');
      return postfix(l);  // plain grouping
    }
    std::string id = peek_ident();
    if (id.empty()) fail("expected a formula");
    if ((id == "box" || id == "fdia" || id == "bbox") && call_follows(id)) {
      if (lang == Lang::Single)
        fail(id + " does not belong to the single-type language");
      pos += id.size();
      expect('(');
      FPtr arg = formula();
      expect(')');
      try {
        FPtr f = id == "box" ? fbox(arg) : id == "fdia" ? fdia(arg) : bbox(arg);
        return postfix(f);
      } catch (const TypeError& e) {
        pos = at;
        fail(e.what());
      }
    }
    if (id == "I") fail("'I' is a structure, not a formula");
    pos += id.size();
    return postfix(atom(id));
  }

  PowIdx pow_index() {
    skip_ws();
    if (peek_ident() == "n") {
      pos += 1;
      return PowIdx{true, 0};
    }
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected pow index (n or an integer)");
    int k = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
      k = k * 10 + (src[pos] - '0');
      if (k > 1000000) fail("pow index out of range");
      pos++;
    }
    if (k < 1) fail("pow index must be >= 1");
    return PowIdx{false, k};
  }

  SPtr wrap(FPtr f) { return leaf(std::move(f)); }

  SPtr structure() {
    skip_ws();
    size_t at = pos;
    char c = peek();
    std::string id = peek_ident();
    try {
      if (id == "I") {
        pos += 1;
        return phi();
      }
      if ((id == "o" || id == "b" || id == "pow") && call_follows(id)) {
        pos += id.size();
        expect('(');
        SPtr arg = structure();
        if (id == "pow") {
          expect(',');
          PowIdx idx = pow_index();
          expect(')');
          return pow(arg, idx);
        }
        expect(')');
        return id == "o" ? circ(arg) : bullet(arg);
      }
      if (c == '(') {
        pos++;
        SPtr l = structure();
        char op = peek();
        if (op == ',' || op == '<' || op == '>') {
          pos++;
          SPtr r = structure();
          expect(')');
          return op == ',' ? odot(l, r) : op == '<' ? lres(l, r) : rres(l, r);
        }
        if (op == '+' || op == '.') {
          // a binary formula in leaf position; both operands must be formulas
          if (l->tag != Structure::Tag::Leaf)
            fail("'+'/'.' take formulas, not structures");
          pos++;
          FPtr r = formula();
          expect(')');
          FPtr f = op == '+' ? funion(l->fml, r) : fcomp(l->fml, r);
          return wrap(postfix(f));
        }
        expect(')');
        if (l->tag == Structure::Tag::Leaf && peek() == '^')
          return wrap(postfix(l->fml));
        return l;
      }
      return wrap(formula());
    } catch (const KindError& e) {
      pos = at;
      fail(e.what());
    } catch (const TypeError& e) {
      pos = at;
      fail(e.what());
    }
  }

  void expect_end() {
    skip_ws();
    if (pos != src.size()) fail("trailing input");
  }

  bool eat_turnstile() {
    skip_ws();
    if (pos + 1 < src.size() && src[pos] == '|' && src[pos + 1] == '-') {
      pos += 2;
      return true;
    }
    return false;
  }
};

}  // namespace

FPtr parse_formula(const std::string& text, Lang lang) {
  Parser p(text, lang);
  FPtr f = p.formula();
  p.expect_end();
  return f;
}

SPtr parse_structure(const std::string& text) {
  Parser p(text, Lang::Multi);
  SPtr s = p.structure();
  p.expect_end();
  return s;
}

Sequent parse_sequent(const std::string& text) {
  Parser p(text, Lang::Multi);
  SPtr lhs = p.structure();
  if (!p.eat_turnstile()) p.fail("expected '|-'");
  size_t at = p.pos;
  SPtr rhs = p.structure();
  p.expect_end();
  try {
    return sequent(lhs, rhs);
  } catch (const KindError& e) {
    throw SyntaxError(e.what(), at);
  }
}

}  // namespace mkl
