#include "mkl/rules.hpp"

namespace mkl {

using PT = Pat::Tag;

static PPtr mkp(PT t, std::string n, PPtr a = nullptr, PPtr b = nullptr) {
  auto p = std::make_shared<Pat>();
  p->tag = t;
  p->name = std::move(n);
  p->a = std::move(a);
  p->b = std::move(b);
  return p;
}

PPtr meta_g(const std::string& n) { return mkp(PT::MetaG, n); }
PPtr meta_s(const std::string& n) { return mkp(PT::MetaS, n); }
PPtr meta_fg(const std::string& n) { return mkp(PT::MetaFG, n); }
PPtr meta_fs(const std::string& n) { return mkp(PT::MetaFS, n); }
PPtr meta_atom(const std::string& n) { return mkp(PT::MetaAtom, n); }
PPtr p_phi() { return mkp(PT::Phi, ""); }
PPtr p_odot(PPtr l, PPtr r) { return mkp(PT::Odot, "", std::move(l), std::move(r)); }
PPtr p_lres(PPtr l, PPtr r) { return mkp(PT::LRes, "", std::move(l), std::move(r)); }
PPtr p_rres(PPtr l, PPtr r) { return mkp(PT::RRes, "", std::move(l), std::move(r)); }
PPtr p_circ(PPtr x) { return mkp(PT::Circ, "", std::move(x)); }
PPtr p_bullet(PPtr x) { return mkp(PT::Bullet, "", std::move(x)); }
PPtr p_one() { return mkp(PT::FOne, ""); }
PPtr p_zero() { return mkp(PT::FZero, ""); }
PPtr p_union(PPtr l, PPtr r) { return mkp(PT::FUnion, "", std::move(l), std::move(r)); }
PPtr p_comp(PPtr l, PPtr r) { return mkp(PT::FComp, "", std::move(l), std::move(r)); }
PPtr p_box(PPtr x) { return mkp(PT::FBox, "", std::move(x)); }
PPtr p_fdia(PPtr x) { return mkp(PT::FFDia, "", std::move(x)); }
PPtr p_bbox(PPtr x) { return mkp(PT::FBBox, "", std::move(x)); }

// ---------- matching ----------

static bool bind_s(Binding& b, const std::string& n, const SPtr& v) {
  auto it = b.s.find(n);
  if (it != b.s.end()) return eq(it->second, v);
  b.s.emplace(n, v);
  return true;
}

static bool bind_f(Binding& b, const std::string& n, const FPtr& v) {
  auto it = b.f.find(n);
  if (it != b.f.end()) return eq(it->second, v);
  b.f.emplace(n, v);
  return true;
}

// match at formula level (inside a leaf)
static bool match_f(const PPtr& pat, const FPtr& f, Binding& b) {
  switch (pat->tag) {
    case PT::MetaFG: return f->kind() == Kind::General && bind_f(b, pat->name, f);
    case PT::MetaFS: return f->kind() == Kind::Special && bind_f(b, pat->name, f);
    case PT::MetaAtom: return f->tag == Formula::Tag::Atom && bind_f(b, pat->name, f);
    case PT::FOne: return f->tag == Formula::Tag::One;
    case PT::FZero: return f->tag == Formula::Tag::Zero;
    case PT::FUnion:
      return f->tag == Formula::Tag::Union && match_f(pat->a, f->a, b) && match_f(pat->b, f->b, b);
    case PT::FComp:
      return f->tag == Formula::Tag::Comp && match_f(pat->a, f->a, b) && match_f(pat->b, f->b, b);
    case PT::FBox: return f->tag == Formula::Tag::Box && match_f(pat->a, f->a, b);
    case PT::FFDia: return f->tag == Formula::Tag::FDia && match_f(pat->a, f->a, b);
    case PT::FBBox: return f->tag == Formula::Tag::BBox && match_f(pat->a, f->a, b);
    default: return false;  // structural patterns never sit at formula level
  }
}

bool match(const PPtr& pat, const SPtr& subject, Binding& b) {
  using ST = Structure::Tag;
  switch (pat->tag) {
    case PT::MetaG:
      return subject->kind() == Kind::General && bind_s(b, pat->name, subject);
    case PT::MetaS:
      return subject->kind() == Kind::Special && bind_s(b, pat->name, subject);
    case PT::Phi: return subject->tag == ST::Phi;
    case PT::Odot:
      return subject->tag == ST::Odot && match(pat->a, subject->a, b) && match(pat->b, subject->b, b);
    case PT::LRes:
      return subject->tag == ST::LRes && match(pat->a, subject->a, b) && match(pat->b, subject->b, b);
    case PT::RRes:
      return subject->tag == ST::RRes && match(pat->a, subject->a, b) && match(pat->b, subject->b, b);
    case PT::Circ: return subject->tag == ST::Circ && match(pat->a, subject->a, b);
    case PT::Bullet: return subject->tag == ST::Bullet && match(pat->a, subject->a, b);
    default:
      return subject->tag == ST::Leaf && match_f(pat, subject->fml, b);
  }
}

bool match(const SeqPat& pat, const Sequent& subject, Binding& b) {
  return match(pat.lhs, subject.lhs, b) && match(pat.rhs, subject.rhs, b);
}

// ---------- instantiation ----------

static FPtr instantiate_f(const PPtr& pat, const Binding& b) {
  switch (pat->tag) {
    case PT::MetaFG:
    case PT::MetaFS:
    case PT::MetaAtom: {
      auto it = b.f.find(pat->name);
      if (it == b.f.end()) throw TypeError("unbound formula metavariable " + pat->name);
      return it->second;
    }
    case PT::FOne: return one();
    case PT::FZero: return zero();
    case PT::FUnion: return funion(instantiate_f(pat->a, b), instantiate_f(pat->b, b));
    case PT::FComp: return fcomp(instantiate_f(pat->a, b), instantiate_f(pat->b, b));
    case PT::FBox: return fbox(instantiate_f(pat->a, b));
    case PT::FFDia: return fdia(instantiate_f(pat->a, b));
    case PT::FBBox: return bbox(instantiate_f(pat->a, b));
    default: throw TypeError("structural pattern in formula position");
  }
}

SPtr instantiate(const PPtr& pat, const Binding& b) {
  switch (pat->tag) {
    case PT::MetaG:
    case PT::MetaS: {
      auto it = b.s.find(pat->name);
      if (it == b.s.end()) throw KindError("unbound structure metavariable " + pat->name);
      return it->second;
    }
    case PT::Phi: return phi();
    case PT::Odot: return odot(instantiate(pat->a, b), instantiate(pat->b, b));
    case PT::LRes: return lres(instantiate(pat->a, b), instantiate(pat->b, b));
    case PT::RRes: return rres(instantiate(pat->a, b), instantiate(pat->b, b));
    case PT::Circ: return circ(instantiate(pat->a, b));
    case PT::Bullet: return bullet(instantiate(pat->a, b));
    default: return leaf(instantiate_f(pat, b));
  }
}

Sequent instantiate(const SeqPat& pat, const Binding& b) {
  return sequent(instantiate(pat.lhs, b), instantiate(pat.rhs, b));
}

// ---------- the catalog ----------

static std::vector<RuleSchema> build_catalog() {
  std::vector<RuleSchema> out;
  auto rule = [&](const std::string& name, std::vector<SeqPat> prem, SeqPat concl) {
    out.push_back(RuleSchema{name, std::move(prem), std::move(concl), false});
  };
  auto sp = [](PPtr l, PPtr r) { return SeqPat{std::move(l), std::move(r)}; };

  PPtr G = meta_g("G"), D = meta_g("D"), T = meta_g("T");
  PPtr G1 = meta_g("G1"), G2 = meta_g("G2"), G3 = meta_g("G3");
  PPtr P = meta_s("P"), X = meta_s("X"), S = meta_s("S");
  PPtr al = meta_fg("al"), be = meta_fg("be"), a1 = meta_fg("a1"), a2 = meta_fg("a2");
  PPtr xi = meta_fs("xi");
  PPtr at = meta_atom("a");

  // identity and cuts
  rule("Id", {}, sp(at, at));
  rule("Cut_g", {sp(G, al), sp(al, D)}, sp(G, D));
  rule("Cut_s", {sp(P, xi), sp(xi, X)}, sp(P, X));

  // display rules for the residuals
  rule("res1_fwd", {sp(p_odot(G, D), T)}, sp(D, p_rres(G, T)));
  rule("res1_bwd", {sp(D, p_rres(G, T))}, sp(p_odot(G, D), T));
  rule("res2_fwd", {sp(p_odot(G, D), T)}, sp(G, p_lres(T, D)));
  rule("res2_bwd", {sp(G, p_lres(T, D))}, sp(p_odot(G, D), T));

  // display rules for the adjoint pair
  rule("adj1_fwd", {sp(G, p_circ(X))}, sp(p_bullet(G), X));
  rule("adj1_bwd", {sp(p_bullet(G), X)}, sp(G, p_circ(X)));
  rule("adj2_fwd", {sp(p_circ(X), G)}, sp(X, p_bullet(G)));
  rule("adj2_bwd", {sp(X, p_bullet(G))}, sp(p_circ(X), G));

  // structural unit and associativity
  rule("PhiL_fwd", {sp(G, D)}, sp(p_odot(p_phi(), G), D));
  rule("PhiL_bwd", {sp(p_odot(p_phi(), G), D)}, sp(G, D));
  rule("PhiR_fwd", {sp(G, D)}, sp(p_odot(G, p_phi()), D));
  rule("PhiR_bwd", {sp(p_odot(G, p_phi()), D)}, sp(G, D));
  rule("assoc_fwd", {sp(p_odot(p_odot(G1, G2), G3), D)}, sp(p_odot(G1, p_odot(G2, G3)), D));
  rule("assoc_bwd", {sp(p_odot(G1, p_odot(G2, G3)), D)}, sp(p_odot(p_odot(G1, G2), G3), D));

  // weakening from Phi, and the special axioms
  rule("PhiW", {sp(G, p_phi())}, sp(G, D));
  rule("one", {}, sp(p_phi(), p_circ(P)));
  rule("abs", {sp(G, p_circ(P)), sp(D, p_circ(P))}, sp(p_odot(G, D), p_circ(P)));
  rule("b_bal", {sp(P, S)}, sp(p_bullet(p_circ(P)), p_bullet(p_circ(S))));
  rule("w_bal_fwd", {sp(P, X)}, sp(p_circ(P), p_circ(X)));
  rule("w_bal_bwd", {sp(p_circ(P), p_circ(X))}, sp(P, X));

  // the omega rule; its premise family is checked by the derivation checker
  {
    RuleSchema om;
    om.name = "omega";
    om.conclusion = sp(p_circ(p_bullet(G)), D);
    om.is_omega = true;
    out.push_back(om);
  }

  rule("circC", {sp(p_odot(p_circ(P), p_circ(P)), D)}, sp(p_circ(P), D));

  // operational rules
  rule("one_L", {sp(p_phi(), D)}, sp(p_one(), D));
  rule("one_R", {}, sp(p_phi(), p_one()));
  rule("zero_L", {}, sp(p_zero(), p_phi()));
  rule("zero_R", {sp(G, p_phi())}, sp(G, p_zero()));
  rule("cup_L", {sp(a1, D), sp(a2, D)}, sp(p_union(a1, a2), D));
  rule("cup_R1", {sp(G, a1)}, sp(G, p_union(a1, a2)));
  rule("cup_R2", {sp(G, a2)}, sp(G, p_union(a1, a2)));
  rule("cdot_L", {sp(p_odot(al, be), D)}, sp(p_comp(al, be), D));
  rule("cdot_R", {sp(G, al), sp(D, be)}, sp(p_odot(G, D), p_comp(al, be)));
  rule("fdia_L", {sp(p_bullet(al), P)}, sp(p_fdia(al), P));
  rule("fdia_R", {sp(G, al)}, sp(p_bullet(G), p_fdia(al)));
  rule("bbox_L", {sp(al, G)}, sp(p_bbox(al), p_bullet(G)));
  rule("bbox_R", {sp(P, p_bullet(al))}, sp(P, p_bbox(al)));
  rule("box_L", {sp(p_circ(xi), G)}, sp(p_box(xi), G));
  rule("box_R", {sp(G, p_circ(xi))}, sp(G, p_box(xi)));

  return out;
}

const std::vector<RuleSchema>& rule_catalog() {
  static const std::vector<RuleSchema> catalog = build_catalog();
  return catalog;
}

const RuleSchema* find_rule(const std::string& name) {
  for (const auto& r : rule_catalog())
    if (r.name == name) return &r;
  return nullptr;
}

static void collect_meta(const PPtr& p, std::map<std::string, MetaSort>& out) {
  switch (p->tag) {
    case PT::MetaG: out.emplace(p->name, MetaSort::GStruct); break;
    case PT::MetaS: out.emplace(p->name, MetaSort::SStruct); break;
    case PT::MetaFG: out.emplace(p->name, MetaSort::GFormula); break;
    case PT::MetaFS: out.emplace(p->name, MetaSort::SFormula); break;
    case PT::MetaAtom: out.emplace(p->name, MetaSort::Atom); break;
    default:
      if (p->a) collect_meta(p->a, out);
      if (p->b) collect_meta(p->b, out);
  }
}

std::map<std::string, MetaSort> metavars(const RuleSchema& r) {
  std::map<std::string, MetaSort> out;
  collect_meta(r.conclusion.lhs, out);
  collect_meta(r.conclusion.rhs, out);
  for (const auto& pr : r.premises) {
    collect_meta(pr.lhs, out);
    collect_meta(pr.rhs, out);
  }
  return out;
}

}  // namespace mkl
