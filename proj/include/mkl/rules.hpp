#pragma once
// The directed rule catalog.  Every rule of the calculus is stored as one or
// two directed schemas (double-line rules get _fwd and _bwd variants); a
// schema is a conclusion pattern plus premise patterns over metavariables.
// The metavariables of a conclusion always cover those of the premises, so a
// rule instance is determined by matching the conclusion.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mkl/ast.hpp"

namespace mkl {

struct Pat;
using PPtr = std::shared_ptr<const Pat>;

struct Pat {
  enum class Tag {
    MetaG,     // any general structure
    MetaS,     // any special structure
    MetaFG,    // any general formula (leaf position)
    MetaFS,    // any special formula
    MetaAtom,  // any atom
    Phi,
    Odot,
    LRes,
    RRes,
    Circ,
    Bullet,
    FOne,   // the formula 1
    FZero,  // the formula 0
    FUnion,
    FComp,
    FBox,
    FFDia,
    FBBox,
  };
  Tag tag;
  std::string name;  // metavariables
  PPtr a, b;
};

PPtr meta_g(const std::string& n);
PPtr meta_s(const std::string& n);
PPtr meta_fg(const std::string& n);
PPtr meta_fs(const std::string& n);
PPtr meta_atom(const std::string& n);
PPtr p_phi();
PPtr p_odot(PPtr l, PPtr r);
PPtr p_lres(PPtr l, PPtr r);
PPtr p_rres(PPtr l, PPtr r);
PPtr p_circ(PPtr x);
PPtr p_bullet(PPtr x);
PPtr p_one();
PPtr p_zero();
PPtr p_union(PPtr l, PPtr r);
PPtr p_comp(PPtr l, PPtr r);
PPtr p_box(PPtr x);
PPtr p_fdia(PPtr x);
PPtr p_bbox(PPtr x);

struct SeqPat {
  PPtr lhs, rhs;
};

struct Binding {
  std::map<std::string, SPtr> s;  // structure metavariables
  std::map<std::string, FPtr> f;  // formula/atom metavariables
};

// One-way matching of a pattern against a concrete structure / sequent.
// Repeated metavariables must bind equal subjects.
bool match(const PPtr& pat, const SPtr& subject, Binding& b);
bool match(const SeqPat& pat, const Sequent& subject, Binding& b);

// Builds the concrete structure / sequent for a fully bound pattern.
SPtr instantiate(const PPtr& pat, const Binding& b);
Sequent instantiate(const SeqPat& pat, const Binding& b);

struct RuleSchema {
  std::string name;
  std::vector<SeqPat> premises;
  SeqPat conclusion;
  bool is_omega = false;  // premise family handled outside the schema
  bool axiom() const { return premises.empty() && !is_omega; }
};

// All forty directed names, in catalog order.
const std::vector<RuleSchema>& rule_catalog();

// Null when the name is not in the catalog.
const RuleSchema* find_rule(const std::string& name);

// Metavariable sorts, for semantic sweeps over rule schemas.
enum class MetaSort { GStruct, SStruct, GFormula, SFormula, Atom };
std::map<std::string, MetaSort> metavars(const RuleSchema& r);

}  // namespace mkl
