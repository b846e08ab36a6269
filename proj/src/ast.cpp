#include "mkl/ast.hpp"

#include <algorithm>
#include <set>

namespace mkl {

const char* kind_name(Kind k) {
  return k == Kind::General ? "general" : "special";
}

// ---------- formula constructors ----------

using FTag = Formula::Tag;

static FPtr mkf(FTag t, std::string name, FPtr a, FPtr b) {
  auto f = std::make_shared<Formula>();
  f->tag = t;
  f->name = std::move(name);
  f->a = std::move(a);
  f->b = std::move(b);
  return f;
}

static void want_general(const FPtr& f, const char* where) {
  if (f->kind() != Kind::General)
    throw TypeError(std::string(where) + ": general operand required, got special");
}

FPtr atom(const std::string& name) { return mkf(FTag::Atom, name, nullptr, nullptr); }
FPtr one() { return mkf(FTag::One, "", nullptr, nullptr); }
FPtr zero() { return mkf(FTag::Zero, "", nullptr, nullptr); }

FPtr funion(FPtr l, FPtr r) {
  want_general(l, "+");
  want_general(r, "+");
  return mkf(FTag::Union, "", std::move(l), std::move(r));
}

FPtr fcomp(FPtr l, FPtr r) {
  want_general(l, ".");
  want_general(r, ".");
  return mkf(FTag::Comp, "", std::move(l), std::move(r));
}

FPtr star(FPtr x) {
  want_general(x, "^*");
  return mkf(FTag::Star, "", std::move(x), nullptr);
}

FPtr dstar(FPtr x) {
  want_general(x, "^#");
  return mkf(FTag::DualStar, "", std::move(x), nullptr);
}

FPtr fbox(FPtr xi) {
  if (xi->kind() != Kind::Special)
    throw TypeError("box: special operand required, got general");
  return mkf(FTag::Box, "", std::move(xi), nullptr);
}

FPtr fdia(FPtr x) {
  want_general(x, "fdia");
  return mkf(FTag::FDia, "", std::move(x), nullptr);
}

FPtr bbox(FPtr x) {
  want_general(x, "bbox");
  return mkf(FTag::BBox, "", std::move(x), nullptr);
}

bool eq(const FPtr& x, const FPtr& y) {
  if (x.get() == y.get()) return true;
  if (!x || !y) return false;
  if (x->tag != y->tag) return false;
  switch (x->tag) {
    case FTag::Atom: return x->name == y->name;
    case FTag::One:
    case FTag::Zero: return true;
    case FTag::Union:
    case FTag::Comp: return eq(x->a, y->a) && eq(x->b, y->b);
    default: return eq(x->a, y->a);
  }
}

int depth(const FPtr& f) {
  switch (f->tag) {
    case FTag::Atom:
    case FTag::One:
    case FTag::Zero: return 1;
    case FTag::Union:
    case FTag::Comp: return 1 + std::max(depth(f->a), depth(f->b));
    default: return 1 + depth(f->a);
  }
}

bool in_lang(const FPtr& f, Lang lang) {
  switch (f->tag) {
    case FTag::Atom:
    case FTag::One:
    case FTag::Zero: return true;
    case FTag::Union:
    case FTag::Comp: return in_lang(f->a, lang) && in_lang(f->b, lang);
    case FTag::Star:
    case FTag::DualStar: return lang == Lang::Single && in_lang(f->a, lang);
    case FTag::Box:
    case FTag::FDia:
    case FTag::BBox: return lang == Lang::Multi && in_lang(f->a, lang);
  }
  return false;
}

static void atoms_into(const FPtr& f, std::set<std::string>& out) {
  if (f->tag == FTag::Atom) {
    out.insert(f->name);
    return;
  }
  if (f->a) atoms_into(f->a, out);
  if (f->b) atoms_into(f->b, out);
}

std::vector<std::string> atoms(const FPtr& f) {
  std::set<std::string> s;
  atoms_into(f, s);
  return {s.begin(), s.end()};
}

// ---------- structure constructors ----------

using STag = Structure::Tag;

static SPtr mks(STag t, FPtr f, SPtr a, SPtr b, PowIdx idx = {}) {
  auto s = std::make_shared<Structure>();
  s->tag = t;
  s->fml = std::move(f);
  s->a = std::move(a);
  s->b = std::move(b);
  s->idx = idx;
  return s;
}

static void want_skind(const SPtr& s, Kind k, const char* where) {
  if (s->kind() != k)
    throw KindError(std::string(where) + ": " + kind_name(k) + " substructure required, got " +
                    kind_name(s->kind()));
}

SPtr leaf(FPtr f) { return mks(STag::Leaf, std::move(f), nullptr, nullptr); }
SPtr phi() { return mks(STag::Phi, nullptr, nullptr, nullptr); }

SPtr odot(SPtr l, SPtr r) {
  want_skind(l, Kind::General, ",");
  want_skind(r, Kind::General, ",");
  return mks(STag::Odot, nullptr, std::move(l), std::move(r));
}

SPtr lres(SPtr l, SPtr r) {
  want_skind(l, Kind::General, "<");
  want_skind(r, Kind::General, "<");
  return mks(STag::LRes, nullptr, std::move(l), std::move(r));
}

SPtr rres(SPtr l, SPtr r) {
  want_skind(l, Kind::General, ">");
  want_skind(r, Kind::General, ">");
  return mks(STag::RRes, nullptr, std::move(l), std::move(r));
}

SPtr circ(SPtr p) {
  want_skind(p, Kind::Special, "o");
  return mks(STag::Circ, nullptr, std::move(p), nullptr);
}

SPtr bullet(SPtr g) {
  want_skind(g, Kind::General, "b");
  return mks(STag::Bullet, nullptr, std::move(g), nullptr);
}

SPtr pow(SPtr g, PowIdx idx) {
  want_skind(g, Kind::General, "pow");
  if (!idx.symbolic && idx.k < 1) throw KindError("pow: literal index must be >= 1");
  return mks(STag::Pow, nullptr, std::move(g), nullptr, idx);
}

SPtr pow_n(SPtr g) { return pow(std::move(g), PowIdx{true, 0}); }
SPtr pow_k(SPtr g, int k) { return pow(std::move(g), PowIdx{false, k}); }

bool eq(const SPtr& x, const SPtr& y) {
  if (x.get() == y.get()) return true;
  if (!x || !y) return false;
  if (x->tag != y->tag) return false;
  switch (x->tag) {
    case STag::Leaf: return eq(x->fml, y->fml);
    case STag::Phi: return true;
    case STag::Odot:
    case STag::LRes:
    case STag::RRes: return eq(x->a, y->a) && eq(x->b, y->b);
    case STag::Circ:
    case STag::Bullet: return eq(x->a, y->a);
    case STag::Pow:
      if (x->idx.symbolic != y->idx.symbolic) return false;
      if (!x->idx.symbolic && x->idx.k != y->idx.k) return false;
      return eq(x->a, y->a);
  }
  return false;
}

SPtr normalize(const SPtr& s) {
  switch (s->tag) {
    case STag::Leaf:
    case STag::Phi: return s;
    case STag::Odot: return odot(normalize(s->a), normalize(s->b));
    case STag::LRes: return lres(normalize(s->a), normalize(s->b));
    case STag::RRes: return rres(normalize(s->a), normalize(s->b));
    case STag::Circ: return circ(normalize(s->a));
    case STag::Bullet: return bullet(normalize(s->a));
    case STag::Pow: {
      SPtr base = normalize(s->a);
      if (s->idx.symbolic) return pow(base, s->idx);
      SPtr acc = base;
      for (int i = 1; i < s->idx.k; i++) acc = odot(base, acc);
      return acc;
    }
  }
  return s;
}

bool has_symbolic_pow(const SPtr& s) {
  if (s->tag == STag::Pow && s->idx.symbolic) return true;
  if (s->a && has_symbolic_pow(s->a)) return true;
  if (s->b && has_symbolic_pow(s->b)) return true;
  return false;
}

static void atoms_into(const SPtr& s, std::set<std::string>& out) {
  if (s->tag == STag::Leaf) {
    atoms_into(s->fml, out);
    return;
  }
  if (s->a) atoms_into(s->a, out);
  if (s->b) atoms_into(s->b, out);
}

std::vector<std::string> atoms(const SPtr& s) {
  std::set<std::string> acc;
  atoms_into(s, acc);
  return {acc.begin(), acc.end()};
}

// ---------- sequents ----------

Sequent sequent(SPtr lhs, SPtr rhs) {
  if (lhs->kind() != rhs->kind())
    throw KindError(std::string("sequent mixes a ") + kind_name(lhs->kind()) +
                    " precedent with a " + kind_name(rhs->kind()) + " succedent");
  Kind k = lhs->kind();
  return Sequent{std::move(lhs), std::move(rhs), k};
}

bool eq(const Sequent& x, const Sequent& y) { return eq(x.lhs, y.lhs) && eq(x.rhs, y.rhs); }

std::vector<std::string> atoms(const Sequent& s) {
  std::set<std::string> acc;
  atoms_into(s.lhs, acc);
  atoms_into(s.rhs, acc);
  return {acc.begin(), acc.end()};
}

// ---------- rendering ----------

static void render_into(const FPtr& f, std::string& out) {
  switch (f->tag) {
    case FTag::Atom: out += f->name; return;
    case FTag::One: out += '1'; return;
    case FTag::Zero: out += '0'; return;
    case FTag::Union:
    case FTag::Comp:
      out += '(';
      render_into(f->a, out);
      out += f->tag == FTag::Union ? " + " : " . ";
      render_into(f->b, out);
      out += ')';
      return;
    case FTag::Star:
    case FTag::DualStar:
      render_into(f->a, out);
      out += f->tag == FTag::Star ? "^*" : "^#";
      return;
    case FTag::Box: out += "box("; render_into(f->a, out); out += ')'; return;
    case FTag::FDia: out += "fdia("; render_into(f->a, out); out += ')'; return;
    case FTag::BBox: out += "bbox("; render_into(f->a, out); out += ')'; return;
  }
}

static void render_into(const SPtr& s, std::string& out) {
  switch (s->tag) {
    case STag::Leaf: render_into(s->fml, out); return;
    case STag::Phi: out += 'I'; return;
    case STag::Odot:
    case STag::LRes:
    case STag::RRes: {
      out += '(';
      render_into(s->a, out);
      out += s->tag == STag::Odot ? " , " : (s->tag == STag::LRes ? " < " : " > ");
      render_into(s->b, out);
      out += ')';
      return;
    }
    case STag::Circ: out += "o("; render_into(s->a, out); out += ')'; return;
    case STag::Bullet: out += "b("; render_into(s->a, out); out += ')'; return;
    case STag::Pow:
      // literal powers never reach this point, normalize() unfolds them
      out += "pow(";
      render_into(s->a, out);
      out += ", n)";
      return;
  }
}

std::string render(const FPtr& f) {
  std::string out;
  render_into(f, out);
  return out;
}

std::string render(const SPtr& s) {
  std::string out;
  render_into(normalize(s), out);
  return out;
}

std::string render(const Sequent& s) {
  return render(s.lhs) + " |- " + render(s.rhs);
}

// ---------- translation ----------

FPtr translate(const FPtr& f) {
  switch (f->tag) {
    case FTag::Atom:
    case FTag::One:
    case FTag::Zero: return f;
    case FTag::Union: return funion(translate(f->a), translate(f->b));
    case FTag::Comp: return fcomp(translate(f->a), translate(f->b));
    case FTag::Star: return fbox(fdia(translate(f->a)));
    case FTag::DualStar: return fbox(bbox(translate(f->a)));
    case FTag::Box:
    case FTag::FDia:
    case FTag::BBox:
      throw TypeError("translate: input must be a single-type formula");
  }
  return f;
}

}  // namespace mkl
