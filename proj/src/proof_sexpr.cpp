#include "mkl/proof_sexpr.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "mkl/parse.hpp"

namespace mkl {

// ---------- writing ----------

static void write_into(const DPtr& d, std::string& out, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  if (d->rule == "hyp") {
    out += pad + "(hyp)";
    return;
  }
  out += pad + "(" + d->rule + " \"" + render(d->conclusion) + "\"";
  if (d->family) {
    out += "\n" + pad + "  (family \"" + render(d->family->family_seq) + "\"\n";
    out += pad + "    (base\n";
    write_into(d->family->base, out, indent + 3);
    out += ")\n" + pad + "    (step\n";
    write_into(d->family->step, out, indent + 3);
    out += "))";
  }
  for (const auto& c : d->children) {
    out += "\n";
    write_into(c, out, indent + 1);
  }
  out += ")";
}

std::string write_proof(const DPtr& d) {
  std::string out;
  write_into(d, out, 0);
  out += "\n";
  return out;
}

// ---------- reading ----------

namespace {

struct Reader {
  const std::string& src;
  size_t pos = 0;

  explicit Reader(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ProofError(msg + " (at offset " + std::to_string(pos) + ")");
  }

  void skip_ws() {
    while (pos < src.size()) {
      if (std::isspace(static_cast<unsigned char>(src[pos]))) {
        pos++;
      } else if (src[pos] == ';') {  // comment to end of line
        while (pos < src.size() && src[pos] != '\n') pos++;
      } else {
        break;
      }
    }
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    pos++;
  }

  std::string symbol() {
    skip_ws();
    std::string out;
    while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
      out += src[pos++];
    }
    if (out.empty()) fail("expected a rule name");
    return out;
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (pos < src.size() && src[pos] != '"') out += src[pos++];
    if (pos >= src.size()) fail("unterminated string");
    pos++;
    return out;
  }

  Sequent seq_string() {
    size_t at = pos;
    std::string s = quoted();
    try {
      return parse_sequent(s);
    } catch (const SyntaxError& e) {
      pos = at;
      fail(std::string("bad sequent: ") + e.what());
    }
  }

  DPtr tree(const Sequent* hyp) {
    expect('(');
    std::string rule = symbol();
    if (rule == "hyp") {
      if (!hyp) fail("(hyp) outside a family step");
      expect(')');
      return hyp_node(*hyp);
    }
    Sequent concl = seq_string();
    if (rule == "omega") {
      expect('(');
      if (symbol() != "family") fail("omega expects a (family ...) child");
      Sequent fs = seq_string();
      expect('(');
      if (symbol() != "base") fail("family expects (base ...)");
      DPtr base = tree(nullptr);
      expect(')');
      expect('(');
      if (symbol() != "step") fail("family expects (step ...)");
      DPtr step = tree(&fs);
      expect(')');
      expect(')');
      expect(')');
      return omega_node(std::move(concl), family(std::move(fs), std::move(base), std::move(step)));
    }
    std::vector<DPtr> kids;
    while (peek() == '(') kids.push_back(tree(hyp));
    expect(')');
    return node(std::move(rule), std::move(concl), std::move(kids));
  }
};

}  // namespace

DPtr parse_proof(const std::string& text) {
  Reader r(text);
  DPtr d = r.tree(nullptr);
  r.skip_ws();
  if (r.pos != text.size()) r.fail("trailing input after proof");
  return d;
}

DPtr load_proof_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProofError("cannot open proof file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_proof(ss.str());
}

}  // namespace mkl
