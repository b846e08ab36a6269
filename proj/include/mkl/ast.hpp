#pragma once
// Terms of the object language.  Formulas come in two types: general ones
// (Kleene expressions, star-free in the multi-type language, plus box) and
// special ones (fdia/bbox images).  On top of formulas sit the structures
// that sequents are made of.  Everything is an immutable shared tree.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mkl {

enum class Kind { General, Special };

const char* kind_name(Kind k);

// Raised when a connective gets a child of the wrong formula type.
struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when structures of different types meet in one sequent, or a
// structural connective gets a child of the wrong type.
struct KindError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Which language we are parsing / checking.  The single-type language has
// the two stars and no modalities; the multi-type language is star-free but
// has box/fdia/bbox.
enum class Lang { Single, Multi };

// ---------- formulas ----------

struct Formula;
using FPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Tag { Atom, One, Zero, Union, Comp, Star, DualStar, Box, FDia, BBox };
  Tag tag;
  std::string name;  // Atom only
  FPtr a, b;         // children where the tag has any

  Kind kind() const {
    return (tag == Tag::FDia || tag == Tag::BBox) ? Kind::Special : Kind::General;
  }
};

FPtr atom(const std::string& name);
FPtr one();
FPtr zero();
FPtr funion(FPtr l, FPtr r);  // l + r
FPtr fcomp(FPtr l, FPtr r);   // l . r
FPtr star(FPtr x);            // x^*
FPtr dstar(FPtr x);           // x^#
FPtr fbox(FPtr xi);           // box(xi), xi special
FPtr fdia(FPtr x);            // fdia(x), x general
FPtr bbox(FPtr x);            // bbox(x), x general

bool eq(const FPtr& x, const FPtr& y);

// Depth with leaves at 1, so depth(a) = 1, depth((a + b)) = 2.
int depth(const FPtr& f);

// True when f stays inside the given language (stars vs modalities).
bool in_lang(const FPtr& f, Lang lang);

// Sorted, deduplicated atom names.
std::vector<std::string> atoms(const FPtr& f);

// ---------- structures ----------

struct Structure;
using SPtr = std::shared_ptr<const Structure>;

// Index of a Pow node: either a literal k >= 1 or the symbolic n used by
// omega premise families.
struct PowIdx {
  bool symbolic = false;
  int k = 0;
};

struct Structure {
  enum class Tag { Leaf, Phi, Odot, LRes, RRes, Circ, Bullet, Pow };
  Tag tag;
  FPtr fml;   // Leaf
  SPtr a, b;  // children
  PowIdx idx; // Pow

  Kind kind() const {
    if (tag == Tag::Leaf) return fml->kind();
    if (tag == Tag::Bullet) return Kind::Special;
    return Kind::General;
  }
};

SPtr leaf(FPtr f);
SPtr phi();
SPtr odot(SPtr l, SPtr r);  // (l , r)   both general
SPtr lres(SPtr l, SPtr r);  // (l < r)   both general
SPtr rres(SPtr l, SPtr r);  // (l > r)   both general
SPtr circ(SPtr p);          // o(p)      p special
SPtr bullet(SPtr g);        // b(g)      g general
SPtr pow(SPtr g, PowIdx idx);
SPtr pow_n(SPtr g);           // pow(g, n)
SPtr pow_k(SPtr g, int k);    // pow(g, k), k >= 1

bool eq(const SPtr& x, const SPtr& y);

// Unfolds literal Pow nodes: pow(G,1) = G, pow(G,k+1) = (G , pow(G,k)).
// Symbolic Pow stays put.
SPtr normalize(const SPtr& s);

// True if any symbolic Pow occurs in s.
bool has_symbolic_pow(const SPtr& s);

std::vector<std::string> atoms(const SPtr& s);

// ---------- sequents ----------

struct Sequent {
  SPtr lhs, rhs;
  Kind kind;
};

// Throws KindError unless both sides have the same type.
Sequent sequent(SPtr lhs, SPtr rhs);

bool eq(const Sequent& x, const Sequent& y);
std::vector<std::string> atoms(const Sequent& s);

// ---------- rendering ----------

// Concrete syntax, re-parseable.  Binary nodes always get parentheses,
// postfix ^* / ^# bind to the preceding item.  Literal powers are printed
// unfolded; symbolic ones as pow(G, n).
std::string render(const FPtr& f);
std::string render(const SPtr& s);
std::string render(const Sequent& s);

// ---------- translation ----------

// The single-type to multi-type map: homomorphic on atoms, constants, + and .,
// and  x^* |-> box(fdia(x)),  x^# |-> box(bbox(x)).
FPtr translate(const FPtr& f);

}  // namespace mkl
