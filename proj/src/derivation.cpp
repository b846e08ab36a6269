#include "mkl/derivation.hpp"

namespace mkl {

DPtr node(std::string rule, Sequent conclusion, std::vector<DPtr> children) {
  auto d = std::make_shared<Derivation>();
  d->rule = std::move(rule);
  d->conclusion = std::move(conclusion);
  d->children = std::move(children);
  return d;
}

DPtr omega_node(Sequent conclusion, FamPtr fam) {
  auto d = std::make_shared<Derivation>();
  d->rule = "omega";
  d->conclusion = std::move(conclusion);
  d->family = std::move(fam);
  return d;
}

DPtr hyp_node(Sequent s) { return node("hyp", std::move(s)); }

FamPtr family(Sequent family_seq, DPtr base, DPtr step) {
  auto f = std::make_shared<PremiseFamily>();
  f->family_seq = std::move(family_seq);
  f->base = std::move(base);
  f->step = std::move(step);
  return f;
}

size_t count_nodes(const DPtr& d) {
  size_t n = 1;
  for (const auto& c : d->children) n += count_nodes(c);
  if (d->family) n += count_nodes(d->family->base) + count_nodes(d->family->step);
  return n;
}

// ---------- family instances ----------

static int count_sym_pow(const SPtr& s) {
  int n = (s->tag == Structure::Tag::Pow && s->idx.symbolic) ? 1 : 0;
  if (s->a) n += count_sym_pow(s->a);
  if (s->b) n += count_sym_pow(s->b);
  return n;
}

// replace every symbolic pow(G, n) by f(G)
template <typename F>
static SPtr map_sym_pow(const SPtr& s, const F& f) {
  using ST = Structure::Tag;
  switch (s->tag) {
    case ST::Leaf:
    case ST::Phi: return s;
    case ST::Odot: return odot(map_sym_pow(s->a, f), map_sym_pow(s->b, f));
    case ST::LRes: return lres(map_sym_pow(s->a, f), map_sym_pow(s->b, f));
    case ST::RRes: return rres(map_sym_pow(s->a, f), map_sym_pow(s->b, f));
    case ST::Circ: return circ(map_sym_pow(s->a, f));
    case ST::Bullet: return bullet(map_sym_pow(s->a, f));
    case ST::Pow:
      if (s->idx.symbolic) return f(s->a);
      return pow(map_sym_pow(s->a, f), s->idx);
  }
  return s;
}

Sequent family_at_one(const Sequent& fs) {
  auto f = [](const SPtr& g) { return g; };
  return sequent(map_sym_pow(fs.lhs, f), map_sym_pow(fs.rhs, f));
}

Sequent family_at_succ(const Sequent& fs) {
  auto f = [](const SPtr& g) { return odot(g, pow_n(g)); };
  return sequent(map_sym_pow(fs.lhs, f), map_sym_pow(fs.rhs, f));
}

// ---------- checking ----------

namespace {

struct Ctx {
  const Sequent* hyp = nullptr;  // available hypothesis inside a step template
  int hyp_seen = 0;
};

struct Failure {
  std::string where, reason;
};

bool check_node(const DPtr& d, const std::string& path, Ctx& ctx, Failure& out);

bool check_family(const PremiseFamily& fam, const std::string& path, Failure& out) {
  int lp = count_sym_pow(fam.family_seq.lhs);
  int rp = count_sym_pow(fam.family_seq.rhs);
  if (lp != 1 || rp != 0) {
    out = {path, "family sequent needs exactly one symbolic pow, in the precedent"};
    return false;
  }
  Ctx closed;
  if (!check_node(fam.base, path + ".base", closed, out)) return false;
  Sequent at1 = family_at_one(fam.family_seq);
  if (!eq(fam.base->conclusion, at1)) {
    out = {path + ".base", "base concludes " + render(fam.base->conclusion) +
                                ", family instance at 1 is " + render(at1)};
    return false;
  }
  // the step may use the hypothesis any number of times, including none
  Ctx stepctx;
  stepctx.hyp = &fam.family_seq;
  if (!check_node(fam.step, path + ".step", stepctx, out)) return false;
  Sequent succ = family_at_succ(fam.family_seq);
  if (!eq(fam.step->conclusion, succ)) {
    out = {path + ".step", "step concludes " + render(fam.step->conclusion) +
                                ", family instance at n + 1 is " + render(succ)};
    return false;
  }
  return true;
}

bool check_node(const DPtr& d, const std::string& path, Ctx& ctx, Failure& out) {
  if (d->rule == "hyp") {
    if (!ctx.hyp) {
      out = {path, "(hyp) outside a step template"};
      return false;
    }
    if (!eq(d->conclusion, *ctx.hyp)) {
      out = {path, "(hyp) states " + render(d->conclusion) + ", hypothesis is " + render(*ctx.hyp)};
      return false;
    }
    if (!d->children.empty()) {
      out = {path, "(hyp) must be a leaf"};
      return false;
    }
    ctx.hyp_seen++;
    return true;
  }

  const RuleSchema* r = find_rule(d->rule);
  if (!r) {
    out = {path, "unknown rule " + d->rule};
    return false;
  }

  if (r->is_omega) {
    if (!d->family || !d->children.empty()) {
      out = {path, "omega node needs a premise family and no ordinary children"};
      return false;
    }
    Binding b;
    if (!match(r->conclusion, d->conclusion, b)) {
      out = {path, "conclusion " + render(d->conclusion) + " does not fit omega, wants o(b(G)) |- D"};
      return false;
    }
    SPtr g = b.s.at("G");
    SPtr delta = b.s.at("D");
    const Sequent& fs = d->family->family_seq;
    // the premises are exactly pow(G, n) |- Delta
    bool shape = fs.lhs->tag == Structure::Tag::Pow && fs.lhs->idx.symbolic &&
                 eq(fs.lhs->a, g) && eq(fs.rhs, delta);
    if (!shape) {
      out = {path, "omega family must be pow(" + render(g) + ", n) |- " + render(delta) +
                       ", got " + render(fs)};
      return false;
    }
    return check_family(*d->family, path + ".family", out);
  }

  if (d->family) {
    out = {path, "only omega nodes carry a premise family"};
    return false;
  }

  Binding b;
  if (!match(r->conclusion, d->conclusion, b)) {
    out = {path, "conclusion " + render(d->conclusion) + " is not an instance of " + d->rule};
    return false;
  }
  if (d->children.size() != r->premises.size()) {
    out = {path, d->rule + " expects " + std::to_string(r->premises.size()) + " premises, got " +
                     std::to_string(d->children.size())};
    return false;
  }
  for (size_t i = 0; i < r->premises.size(); i++) {
    // match instead of instantiate: cut premises carry the cut formula,
    // which the conclusion does not determine.  Matching binds it at the
    // first premise and forces the second to repeat it.
    Binding before = b;
    if (!match(r->premises[i], d->children[i]->conclusion, b)) {
      std::string msg = "premise " + std::to_string(i) + " of " + d->rule + " cannot be " +
                        render(d->children[i]->conclusion);
      try {
        msg = "premise should be " + render(instantiate(r->premises[i], before)) +
              ", subderivation concludes " + render(d->children[i]->conclusion);
      } catch (const std::exception&) {
        // premise not determined by what is bound so far; keep the short form
      }
      out = {path + "." + std::to_string(i), msg};
      return false;
    }
    if (!check_node(d->children[i], path + "." + std::to_string(i), ctx, out)) return false;
  }
  return true;
}

}  // namespace

CheckResult check_derivation(const DPtr& d) {
  Ctx ctx;
  Failure f;
  if (check_node(d, "root", ctx, f)) return {};
  return {false, f.where, f.reason};
}

CheckResult verify_omega_family(const PremiseFamily& fam) {
  Failure f;
  if (check_family(fam, "family", f)) return {};
  return {false, f.where, f.reason};
}

namespace {

// step template with the symbolic power pinned to level k and (hyp) leaves
// replaced by the already-built instance derivation
DPtr unroll_step(const DPtr& d, int k, const DPtr& prev, bool& nested) {
  if (d->family) {
    nested = true;
    return d;
  }
  auto at_k = [k](const SPtr& g) { return normalize(pow_k(g, k)); };
  Sequent c = sequent(map_sym_pow(d->conclusion.lhs, at_k), map_sym_pow(d->conclusion.rhs, at_k));
  if (d->rule == "hyp") return prev;
  std::vector<DPtr> kids;
  kids.reserve(d->children.size());
  for (const DPtr& ch : d->children) {
    kids.push_back(unroll_step(ch, k, prev, nested));
    if (nested) return d;
  }
  auto out = std::make_shared<Derivation>();
  out->rule = d->rule;
  out->conclusion = c;
  out->children = std::move(kids);
  return out;
}

}  // namespace

CheckResult verify_omega_family_bounded(const PremiseFamily& fam, int n_max) {
  if (n_max < 1) return {false, "family", "bounded check needs n_max >= 1"};
  if (count_sym_pow(fam.family_seq.lhs) != 1 || count_sym_pow(fam.family_seq.rhs) != 0)
    return {false, "family", "family sequent needs exactly one symbolic pow, in the precedent"};
  DPtr inst = fam.base;
  CheckResult c = check_derivation(inst);
  if (!c.ok) return {false, "family.base", c.reason};
  if (!eq(inst->conclusion, family_at_one(fam.family_seq)))
    return {false, "family.base", "base concludes " + render(inst->conclusion) +
                                      ", family instance at 1 is " +
                                      render(family_at_one(fam.family_seq))};
  for (int n = 1; n < n_max; ++n) {
    bool nested = false;
    DPtr next = unroll_step(fam.step, n, inst, nested);
    if (nested)
      return {false, "family.step", "bounded mode cannot unroll a nested omega family"};
    auto at_k = [k = n + 1](const SPtr& g) { return normalize(pow_k(g, k)); };
    Sequent want = sequent(map_sym_pow(fam.family_seq.lhs, at_k),
                           map_sym_pow(fam.family_seq.rhs, at_k));
    if (!eq(next->conclusion, want))
      return {false, "family.step", "unrolled instance concludes " + render(next->conclusion) +
                                        ", wanted " + render(want)};
    c = check_derivation(next);
    if (!c.ok)
      return {false, "family.step", "instance at n = " + std::to_string(n + 1) +
                                        " does not check: " + c.reason};
    inst = next;
  }
  return {true, "", "unsound-bounded: only instances n <= " + std::to_string(n_max) +
                        " were checked"};
}

// ---------- identity derivations ----------

DPtr derive_identity(const FPtr& f) {
  using FT = Formula::Tag;
  SPtr l = leaf(f);
  switch (f->tag) {
    case FT::Atom: return node("Id", sequent(l, l));
    case FT::One:
      return node("one_L", sequent(l, l), {node("one_R", sequent(phi(), l))});
    case FT::Zero:
      return node("zero_R", sequent(l, l), {node("zero_L", sequent(l, phi()))});
    case FT::Union: {
      SPtr x = leaf(f->a), y = leaf(f->b);
      DPtr dx = derive_identity(f->a), dy = derive_identity(f->b);
      return node("cup_L", sequent(l, l),
                  {node("cup_R1", sequent(x, l), {dx}), node("cup_R2", sequent(y, l), {dy})});
    }
    case FT::Comp: {
      SPtr x = leaf(f->a), y = leaf(f->b);
      DPtr dx = derive_identity(f->a), dy = derive_identity(f->b);
      return node("cdot_L", sequent(l, l), {node("cdot_R", sequent(odot(x, y), l), {dx, dy})});
    }
    case FT::Box: {
      DPtr dxi = derive_identity(f->a);
      SPtr oxi = circ(leaf(f->a));
      return node("box_R", sequent(l, l),
                  {node("box_L", sequent(l, oxi),
                        {node("w_bal_fwd", sequent(oxi, oxi), {dxi})})});
    }
    case FT::FDia: {
      DPtr dx = derive_identity(f->a);
      return node("fdia_L", sequent(l, l),
                  {node("fdia_R", sequent(bullet(leaf(f->a)), l), {dx})});
    }
    case FT::BBox: {
      DPtr dx = derive_identity(f->a);
      return node("bbox_R", sequent(l, l),
                  {node("bbox_L", sequent(l, bullet(leaf(f->a))), {dx})});
    }
    case FT::Star:
    case FT::DualStar:
      throw TypeError("derive_identity wants a multi-type formula");
  }
  throw TypeError("unreachable");
}

// ---------- omega lift ----------

FamPtr omega_lift(const DPtr& d, bool side_left) {
  const Sequent& c = d->conclusion;
  using ST = Structure::Tag;
  if (c.lhs->tag != ST::Odot || c.lhs->a->tag != ST::Leaf || c.lhs->b->tag != ST::Leaf ||
      c.rhs->tag != ST::Leaf)
    throw ShapeError("omega_lift wants (x , y) |- y with formula leaves, got " + render(c));
  FPtr x = side_left ? c.lhs->a->fml : c.lhs->b->fml;  // the iterated formula
  FPtr y = side_left ? c.lhs->b->fml : c.lhs->a->fml;  // the invariant one
  if (!eq(c.rhs->fml, y))
    throw ShapeError("omega_lift: succedent must repeat the invariant side, got " + render(c));
  CheckResult chk = check_derivation(d);
  if (!chk) throw ShapeError("omega_lift: input does not check: " + chk.reason);

  SPtr lx = leaf(x), ly = leaf(y), pw = pow_n(lx);
  FPtr xy_f = side_left ? fcomp(x, y) : fcomp(y, x);
  // x . y |- y, from the input by cdot_L; supplies the cut formula of the step
  DPtr dcomp = node("cdot_L", sequent(leaf(xy_f), ly), {d});

  if (side_left) {
    Sequent fs = sequent(odot(pw, ly), ly);
    DPtr h = hyp_node(fs);
    DPtr s1 = node("cdot_R", sequent(odot(lx, odot(pw, ly)), leaf(xy_f)),
                   {derive_identity(x), h});
    DPtr s2 = node("assoc_bwd", sequent(odot(odot(lx, pw), ly), leaf(xy_f)), {s1});
    DPtr s3 = node("Cut_g", sequent(odot(odot(lx, pw), ly), ly), {s2, dcomp});
    return family(fs, d, s3);
  }

  Sequent fs = sequent(odot(ly, pw), ly);
  DPtr h = hyp_node(fs);
  DPtr s1 = node("res2_fwd", sequent(ly, lres(ly, pw)), {h});
  DPtr s2 = node("Cut_g", sequent(odot(ly, lx), lres(ly, pw)), {d, s1});
  DPtr s3 = node("res2_bwd", sequent(odot(odot(ly, lx), pw), ly), {s2});
  DPtr s4 = node("assoc_fwd", sequent(odot(ly, odot(lx, pw)), ly), {s3});
  return family(fs, d, s4);
}

// ---------- principal cut reduction ----------

static FPtr leaf_formula(const SPtr& s) {
  return s->tag == Structure::Tag::Leaf ? s->fml : nullptr;
}

DPtr reduce_principal_cut(const DPtr& d) {
  if (d->rule != "Cut_g" && d->rule != "Cut_s")
    throw NotPrincipal("root is " + d->rule + ", not a cut");
  CheckResult chk = check_derivation(d);
  if (!chk) throw NotPrincipal("input does not check at " + chk.where + ": " + chk.reason);
  const DPtr& d1 = d->children[0];
  const DPtr& d2 = d->children[1];
  FPtr f = leaf_formula(d1->conclusion.rhs);
  if (!f) throw NotPrincipal("cut formula is not a formula leaf");

  using FT = Formula::Tag;
  auto bad = [&](const char* side, const DPtr& p) -> NotPrincipal {
    return NotPrincipal(std::string("cut formula ") + render(f) + " is not principal on the " +
                        side + " (last rule " + p->rule + ")");
  };

  switch (f->tag) {
    case FT::Atom:
      if (d1->rule != "Id") throw bad("left", d1);
      if (d2->rule != "Id") throw bad("right", d2);
      return node("Id", d->conclusion);

    case FT::One:
      // Cut(one_R, one_L(p)) collapses to p
      if (d1->rule != "one_R") throw bad("left", d1);
      if (d2->rule != "one_L") throw bad("right", d2);
      return d2->children[0];

    case FT::Zero:
      if (d1->rule != "zero_R") throw bad("left", d1);
      if (d2->rule != "zero_L") throw bad("right", d2);
      return d1->children[0];

    case FT::Union: {
      if (d1->rule != "cup_R1" && d1->rule != "cup_R2") throw bad("left", d1);
      if (d2->rule != "cup_L") throw bad("right", d2);
      DPtr pg = d1->children[0];                                  // G |- a_i
      DPtr pi = d2->children[d1->rule == "cup_R1" ? 0 : 1];       // a_i |- D
      return node("Cut_g", sequent(pg->conclusion.lhs, pi->conclusion.rhs), {pg, pi});
    }

    case FT::Comp: {
      // extrapolated from the fdia case by the displayed symmetric pattern
      if (d1->rule != "cdot_R") throw bad("left", d1);
      if (d2->rule != "cdot_L") throw bad("right", d2);
      DPtr pa = d1->children[0];  // G |- x
      DPtr pb = d1->children[1];  // D |- y
      DPtr sg = d2->children[0];  // (x , y) |- T
      SPtr lx = leaf(f->a), ly = leaf(f->b);
      SPtr G = pa->conclusion.lhs, D = pb->conclusion.lhs, T = sg->conclusion.rhs;
      DPtr t1 = node("res2_fwd", sequent(lx, lres(T, ly)), {sg});
      DPtr t2 = node("Cut_g", sequent(G, lres(T, ly)), {pa, t1});
      DPtr t3 = node("res2_bwd", sequent(odot(G, ly), T), {t2});
      DPtr t4 = node("res1_fwd", sequent(ly, rres(G, T)), {t3});
      DPtr t5 = node("Cut_g", sequent(D, rres(G, T)), {pb, t4});
      return node("res1_bwd", sequent(odot(G, D), T), {t5});
    }

    case FT::FDia: {
      if (d1->rule != "fdia_R") throw bad("left", d1);
      if (d2->rule != "fdia_L") throw bad("right", d2);
      DPtr p1 = d1->children[0];  // G |- x
      DPtr p2 = d2->children[0];  // b(x) |- X
      SPtr G = p1->conclusion.lhs, X = p2->conclusion.rhs, lx = leaf(f->a);
      DPtr t1 = node("adj1_bwd", sequent(lx, circ(X)), {p2});
      DPtr t2 = node("Cut_g", sequent(G, circ(X)), {p1, t1});
      return node("adj1_fwd", sequent(bullet(G), X), {t2});
    }

    case FT::BBox: {
      // extrapolated, mirror of the fdia case
      if (d1->rule != "bbox_R") throw bad("left", d1);
      if (d2->rule != "bbox_L") throw bad("right", d2);
      DPtr p1 = d1->children[0];  // P |- b(x)
      DPtr p2 = d2->children[0];  // x |- G
      SPtr P = p1->conclusion.lhs, G = p2->conclusion.rhs, lx = leaf(f->a);
      DPtr t1 = node("adj2_bwd", sequent(circ(P), lx), {p1});
      DPtr t2 = node("Cut_g", sequent(circ(P), G), {t1, p2});
      return node("adj2_fwd", sequent(P, bullet(G)), {t2});
    }

    case FT::Box: {
      if (d1->rule != "box_R") throw bad("left", d1);
      if (d2->rule != "box_L") throw bad("right", d2);
      // the left introduction enters through w_bal, as in the displayed case
      if (d2->children[0]->rule != "w_bal_fwd")
        throw NotPrincipal("box cut: left introduction does not come from w_bal");
      DPtr p1 = d1->children[0];                 // G |- o(xi)
      DPtr sg = d2->children[0]->children[0];    // xi |- X
      SPtr G = p1->conclusion.lhs, X = sg->conclusion.rhs, lxi = leaf(f->a);
      DPtr t1 = node("adj1_fwd", sequent(bullet(G), lxi), {p1});
      DPtr t2 = node("Cut_s", sequent(bullet(G), X), {t1, sg});
      return node("adj1_bwd", sequent(G, circ(X)), {t2});
    }

    default:
      throw NotPrincipal("no reduction for cut formula " + render(f));
  }
}

static void cuts_into(const DPtr& d, std::vector<FPtr>& out) {
  if (d->rule == "Cut_g" || d->rule == "Cut_s") out.push_back(d->children[0]->conclusion.rhs->fml);
  for (const auto& c : d->children) cuts_into(c, out);
  if (d->family) {
    cuts_into(d->family->base, out);
    cuts_into(d->family->step, out);
  }
}

std::vector<FPtr> cut_formulas(const DPtr& d) {
  std::vector<FPtr> out;
  cuts_into(d, out);
  return out;
}

}  // namespace mkl
