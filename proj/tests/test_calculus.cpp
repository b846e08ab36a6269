#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "mkl/ast.hpp"
#include "mkl/derivation.hpp"
#include "mkl/parse.hpp"
#include "mkl/proof_sexpr.hpp"
#include "mkl/rules.hpp"

using namespace mkl;

namespace {

SPtr S(const std::string& t) { return parse_structure(t); }
Sequent Q(const std::string& t) { return parse_sequent(t); }

// forward rule application, as the corpus builder does it
DPtr by(const std::string& rule, std::vector<DPtr> kids, const Binding& extra = {}) {
  const RuleSchema* r = find_rule(rule);
  REQUIRE(r);
  REQUIRE(kids.size() == r->premises.size());
  Binding b = extra;
  for (size_t i = 0; i < kids.size(); ++i) {
    INFO(rule << " premise " << i << " vs " << render(kids[i]->conclusion));
    REQUIRE(match(r->premises[i], kids[i]->conclusion, b));
  }
  return node(rule, instantiate(r->conclusion, b), std::move(kids));
}

Binding sbind(const std::string& n, const std::string& text) {
  Binding b;
  b.s[n] = S(text);
  return b;
}

Binding fbind(const std::string& n, const std::string& text) {
  Binding b;
  b.f[n] = parse_formula(text);
  return b;
}

DPtr ida(const std::string& at = "a") { return by("Id", {}, fbind("a", at)); }

// box(fdia(a)) |- o(fdia(a)), the one-step unfolding used all over the corpus
DPtr unfold_star() {
  return by("box_L", {by("w_bal_fwd", {by("fdia_L", {by("fdia_R", {ida()})})})});
}

// (0 , b) |- b
DPtr zero_absorbs() {
  return by("res2_bwd", {by("PhiW", {by("zero_L", {})}, sbind("D", "(b < b)"))});
}

// the full omega derivation of box(fdia(1)) |- 1
DPtr star_one_tree() {
  Sequent fam = Q("pow(I, n) |- 1");
  DPtr om = omega_node(Q("o(b(I)) |- 1"),
                       family(fam, by("one_R", {}), by("PhiL_fwd", {hyp_node(fam)})));
  DPtr lifted = by("adj1_fwd", {by("one_L", {by("adj1_bwd", {by("adj2_fwd", {om})})})});
  return by("box_L", {by("adj2_bwd", {by("fdia_L", {lifted})})});
}

bool eq_deriv(const DPtr& x, const DPtr& y) {
  if (x->rule != y->rule || !eq(x->conclusion, y->conclusion)) return false;
  if (x->children.size() != y->children.size()) return false;
  for (size_t i = 0; i < x->children.size(); ++i)
    if (!eq_deriv(x->children[i], y->children[i])) return false;
  if (!!x->family != !!y->family) return false;
  if (x->family) {
    if (!eq(x->family->family_seq, y->family->family_seq)) return false;
    if (!eq_deriv(x->family->base, y->family->base)) return false;
    if (!eq_deriv(x->family->step, y->family->step)) return false;
  }
  return true;
}

struct FGen {
  std::mt19937 rng;
  explicit FGen(unsigned seed) : rng(seed) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  FPtr general(int depth) {
    if (depth <= 1) {
      switch (pick(4)) {
        case 0: return atom("a");
        case 1: return atom("b");
        case 2: return one();
        default: return zero();
      }
    }
    switch (pick(3)) {
      case 0: return funion(general(depth - 1), general(depth - 1));
      case 1: return fcomp(general(depth - 1), general(depth - 1));
      default:
        return fbox(pick(2) ? fdia(general(depth - 1)) : bbox(general(depth - 1)));
    }
  }
};

}  // namespace

TEST_CASE("catalog has forty directed rules with unique names") {
  const auto& cat = rule_catalog();
  CHECK(cat.size() == 40);
  std::set<std::string> names;
  for (const auto& r : cat) names.insert(r.name);
  CHECK(names.size() == cat.size());

  CHECK(find_rule("res1_fwd"));
  CHECK(find_rule("omega"));
  CHECK(find_rule("cdot_R"));
  CHECK(find_rule("nope") == nullptr);

  for (const char* ax : {"Id", "one", "one_R", "zero_L"}) {
    REQUIRE(find_rule(ax));
    CHECK(find_rule(ax)->axiom());
  }
  CHECK_FALSE(find_rule("omega")->axiom());
  CHECK(find_rule("omega")->is_omega);
  CHECK(find_rule("omega")->premises.empty());
  int omegas = 0;
  for (const auto& r : cat) omegas += r.is_omega ? 1 : 0;
  CHECK(omegas == 1);
}

TEST_CASE("conclusions determine premises, except for the cut formula") {
  for (const RuleSchema& r : rule_catalog()) {
    if (r.is_omega || r.premises.empty()) continue;
    Binding b;
    int i = 0;
    for (const auto& [name, sort] : metavars(r)) {
      std::string id = "x" + std::to_string(i++);
      switch (sort) {
        case MetaSort::GStruct: b.s[name] = leaf(atom(id)); break;
        case MetaSort::SStruct: b.s[name] = leaf(fdia(atom(id))); break;
        case MetaSort::GFormula: b.f[name] = funion(atom(id), atom(id)); break;
        case MetaSort::SFormula: b.f[name] = fdia(atom(id)); break;
        case MetaSort::Atom: b.f[name] = atom(id); break;
      }
    }
    Sequent concl = instantiate(r.conclusion, b);
    Binding from_concl;
    REQUIRE(match(r.conclusion, concl, from_concl));
    if (r.name == "Cut_g" || r.name == "Cut_s") {
      CHECK_THROWS_AS(instantiate(r.premises[0], from_concl), TypeError);
    } else {
      for (const SeqPat& p : r.premises) {
        INFO(r.name);
        CHECK(eq(instantiate(p, from_concl), instantiate(p, b)));
      }
    }
  }
}

TEST_CASE("matching respects sorts and repeated metavariables") {
  Binding b;
  CHECK(match(p_odot(meta_g("G"), meta_g("G")), S("(a , a)"), b));
  Binding b2;
  CHECK_FALSE(match(p_odot(meta_g("G"), meta_g("G")), S("(a , b)"), b2));
  Binding b3;
  CHECK_FALSE(match(meta_s("P"), S("a"), b3));
  CHECK(match(meta_s("P"), S("fdia(a)"), b3));
  Binding b4;
  CHECK_FALSE(match(meta_fg("al"), S("bbox(a)"), b4));
  CHECK_FALSE(match(meta_fg("al"), S("(a , b)"), b4));  // not a formula leaf
  CHECK(match(meta_fg("al"), S("box(bbox(a))"), b4));
  Binding b5;
  CHECK(match(meta_atom("a"), S("c"), b5));
  CHECK_FALSE(match(meta_atom("a"), S("1"), b5));
  Binding b6;
  CHECK(match(meta_g("G"), S("pow(a, n)"), b6));  // powers are general structures
}

TEST_CASE("checker accepts forward-built trees, including cuts") {
  DPtr star_in = by("one_L", {by("box_R", {by("one", {}, sbind("P", "fdia(a)"))})});
  CHECK(check_derivation(star_in).ok);
  CHECK(eq(star_in->conclusion, Q("1 |- box(fdia(a))")));

  DPtr cut = by("Cut_g", {by("one_R", {}), by("one_L", {by("one_R", {})})});
  CHECK(eq(cut->conclusion, Q("I |- 1")));
  CHECK(check_derivation(cut).ok);

  DPtr cs = by("Cut_s", {by("fdia_R", {ida()}), by("fdia_L", {by("fdia_R", {ida()})})});
  CHECK(eq(cs->conclusion, Q("b(a) |- fdia(a)")));
  CHECK(check_derivation(cs).ok);

  CHECK(check_derivation(star_one_tree()).ok);
  CHECK(count_nodes(star_one_tree()) == 11);
}

TEST_CASE("checker rejects malformed trees with a path to the failure") {
  auto reject = [](const DPtr& d, const char* needle) {
    CheckResult c = check_derivation(d);
    CHECK_FALSE(c.ok);
    INFO(c.where << ": " << c.reason);
    CHECK(c.reason.find(needle) != std::string::npos);
    return c;
  };

  reject(node("frob", Q("a |- a")), "unknown rule");
  reject(node("Id", Q("a |- b")), "not an instance");
  reject(node("Id", Q("1 |- 1")), "not an instance");  // axiom wants an atom
  reject(node("one_L", Q("1 |- a")), "expects 1 premises");
  reject(hyp_node(Q("a |- a")), "outside a step template");

  CheckResult c =
      check_derivation(node("one_L", Q("1 |- 1"), {node("one_R", Q("I |- 0"))}));
  CHECK_FALSE(c.ok);
  CHECK(c.where == "root.0");

  // the two cut premises must agree on the cut formula
  DPtr bad_cut = node("Cut_g", Q("I |- I"),
                      {node("one_R", Q("I |- 1")), node("zero_L", Q("0 |- I"))});
  CheckResult cc = reject(bad_cut, "premise should be 1 |- I");
  CHECK(cc.where == "root.1");

  // only omega nodes may carry families
  DPtr fam_on_id = node("Id", Q("a |- a"));
  auto d = std::make_shared<Derivation>(*fam_on_id);
  d->family = family(Q("pow(a, n) |- a"), ida(), ida());
  reject(d, "only omega nodes");
}

TEST_CASE("omega nodes demand the right conclusion and family shape") {
  Sequent fam_ok = Q("pow(I, n) |- 1");
  DPtr base = by("one_R", {});
  DPtr step = by("PhiL_fwd", {hyp_node(fam_ok)});

  CheckResult bad_concl =
      check_derivation(omega_node(Q("(I , I) |- 1"), family(fam_ok, base, step)));
  CHECK_FALSE(bad_concl.ok);
  CHECK(bad_concl.reason.find("does not fit omega") != std::string::npos);

  CheckResult bad_fam = check_derivation(
      omega_node(Q("o(b(I)) |- 1"), family(Q("pow(a, n) |- 1"), base, step)));
  CHECK_FALSE(bad_fam.ok);
  CHECK(bad_fam.reason.find("omega family must be") != std::string::npos);

  CHECK(check_derivation(omega_node(Q("o(b(I)) |- 1"), family(fam_ok, base, step))).ok);
}

TEST_CASE("premise families are verified base, step and hypothesis") {
  Sequent fs = Q("pow(0, n) |- 1");
  DPtr good_base = by("PhiW", {by("zero_L", {})}, sbind("D", "1"));
  DPtr good_step = by("res2_bwd", {by("PhiW", {by("zero_L", {})}, sbind("D", "(1 < pow(0, n))"))});

  CHECK(verify_omega_family(*family(fs, good_base, good_step)).ok);

  // instances at 1 and n + 1
  CHECK(eq(family_at_one(fs), Q("0 |- 1")));
  CHECK(eq(family_at_succ(fs), Q("(0 , pow(0, n)) |- 1")));
  CHECK(eq(family_at_succ(Q("(pow(a, n) , b) |- b")), Q("((a , pow(a, n)) , b) |- b")));

  CheckResult two_pows = verify_omega_family(
      *family(Q("(pow(0, n) , pow(0, n)) |- 1"), good_base, good_step));
  CHECK_FALSE(two_pows.ok);
  CHECK(two_pows.reason.find("exactly one symbolic pow") != std::string::npos);

  CheckResult pow_right =
      verify_omega_family(*family(Q("pow(0, n) |- (1 < pow(0, n))"), good_base, good_step));
  CHECK_FALSE(pow_right.ok);

  CheckResult wrong_base =
      verify_omega_family(*family(fs, by("one_R", {}), good_step));
  CHECK_FALSE(wrong_base.ok);
  CHECK(wrong_base.reason.find("base concludes") != std::string::npos);

  CheckResult wrong_step = verify_omega_family(*family(fs, good_base, hyp_node(fs)));
  CHECK_FALSE(wrong_step.ok);
  CHECK(wrong_step.reason.find("step concludes") != std::string::npos);

  CheckResult hyp_in_base = verify_omega_family(*family(fs, hyp_node(Q("0 |- 1")), good_step));
  CHECK_FALSE(hyp_in_base.ok);
  CHECK(hyp_in_base.reason.find("outside a step template") != std::string::npos);

  // a (hyp) whose sequent is not the family schema is rejected even where a
  // cut premise would let it slip through the instance check
  Sequent succ = family_at_succ(fs);
  DPtr bad_hyp_step =
      node("Cut_g", succ, {hyp_node(succ), by("one_L", {by("one_R", {})})});
  CheckResult bh = verify_omega_family(*family(fs, good_base, bad_hyp_step));
  CHECK_FALSE(bh.ok);
  CHECK(bh.reason.find("(hyp) states") != std::string::npos);
}

TEST_CASE("bounded family checking unrolls instances and says so") {
  Sequent fs = Q("pow(I, n) |- 1");
  DPtr base = by("one_R", {});
  DPtr step = by("PhiL_fwd", {hyp_node(fs)});
  FamPtr fam = family(fs, base, step);

  CheckResult ok = verify_omega_family_bounded(*fam, 4);
  CHECK(ok.ok);
  CHECK(ok.reason.find("unsound-bounded") != std::string::npos);
  CHECK(verify_omega_family_bounded(*fam, 1).ok);

  // a step that merely restates the hypothesis cannot reach n + 1
  CheckResult lazy = verify_omega_family_bounded(*family(fs, base, hyp_node(fs)), 3);
  CHECK_FALSE(lazy.ok);
  CHECK(lazy.reason.find("unrolled instance concludes") != std::string::npos);

  CheckResult none = verify_omega_family_bounded(*fam, 0);
  CHECK_FALSE(none.ok);

  CheckResult wrong_base = verify_omega_family_bounded(*family(fs, by("zero_L", {}), step), 3);
  CHECK_FALSE(wrong_base.ok);
  CHECK(wrong_base.where == "family.base");

  // omega_lift families unroll too; their steps contain real cuts
  DPtr d = by("res2_bwd", {by("PhiW", {by("zero_L", {})}, sbind("D", "(b < b)"))});
  FamPtr lifted = omega_lift(d, true);
  CheckResult lf = verify_omega_family_bounded(*lifted, 3);
  CHECK(lf.ok);
  CHECK(lf.reason.find("unsound-bounded") != std::string::npos);

  // omega nodes inside the step are refused outright
  DPtr om = omega_node(Q("o(b(I)) |- 1"),
                       family(fs, by("one_R", {}), by("PhiL_fwd", {hyp_node(fs)})));
  CheckResult nested = verify_omega_family_bounded(*family(fs, base, om), 3);
  CHECK_FALSE(nested.ok);
  CHECK(nested.reason.find("nested omega") != std::string::npos);
}

TEST_CASE("omega_lift builds coherent families for both sides") {
  DPtr d_left = zero_absorbs();  // (0 , b) |- b
  FamPtr left = omega_lift(d_left, true);
  CHECK(eq(left->family_seq, Q("(pow(0, n) , b) |- b")));
  CHECK(verify_omega_family(*left).ok);

  DPtr d_right = by("res1_bwd", {by("PhiW", {by("zero_L", {})}, sbind("D", "(b > b)"))});
  FamPtr right = omega_lift(d_right, false);
  CHECK(eq(right->family_seq, Q("(b , pow(0, n)) |- b")));
  CHECK(verify_omega_family(*right).ok);

  // lifted families are residual-shaped, not bare powers: no omega node fits
  CheckResult as_omega = check_derivation(omega_node(Q("o(b(0)) |- b"), left));
  CHECK_FALSE(as_omega.ok);

  CHECK_THROWS_AS(omega_lift(ida(), true), ShapeError);
  CHECK_THROWS_AS(omega_lift(by("cdot_R", {ida("a"), ida("b")}), true), ShapeError);
  DPtr bogus = node("res2_bwd", Q("(0 , b) |- b"), {node("PhiW", Q("0 |- (b < b)"))});
  CHECK_THROWS_AS(omega_lift(bogus, true), ShapeError);
}

TEST_CASE("identity derivations for random formulas are cut-free and check") {
  FGen g(44021);
  for (int i = 0; i < 200; i++) {
    FPtr f = g.general(1 + g.pick(4));
    CAPTURE(render(f));
    DPtr d = derive_identity(f);
    CHECK(eq(d->conclusion, sequent(leaf(f), leaf(f))));
    CHECK(check_derivation(d).ok);
    CHECK(cut_formulas(d).empty());
  }
  DPtr dspec = derive_identity(fdia(funion(atom("a"), one())));
  CHECK(check_derivation(dspec).ok);
  CHECK_THROWS_AS(derive_identity(star(atom("a"))), TypeError);
  CHECK_THROWS_AS(derive_identity(dstar(atom("a"))), TypeError);
}

TEST_CASE("principal cuts reduce for every connective") {
  auto reduces = [](const DPtr& cut) {
    REQUIRE(check_derivation(cut).ok);
    DPtr r = reduce_principal_cut(cut);
    CHECK(eq(r->conclusion, cut->conclusion));
    CHECK(check_derivation(r).ok);
    return r;
  };

  SUBCASE("atom") {
    DPtr r = reduces(by("Cut_g", {ida(), ida()}));
    CHECK(r->rule == "Id");
    CHECK(cut_formulas(r).empty());
  }
  SUBCASE("one") {
    DPtr r = reduces(by("Cut_g", {by("one_R", {}), by("one_L", {by("one_R", {})})}));
    CHECK(r->rule == "one_R");
  }
  SUBCASE("zero") {
    DPtr zl = by("zero_L", {});
    DPtr r = reduces(by("Cut_g", {by("zero_R", {zl}), zl}));
    CHECK(r->rule == "zero_L");
  }
  SUBCASE("union, both injections") {
    DPtr idab = by("cup_L", {by("cup_R1", {ida("a")}, fbind("a2", "b")),
                             by("cup_R2", {ida("b")}, fbind("a1", "a"))});
    DPtr via1 = by("Cut_g", {by("cup_R1", {ida("a")}, fbind("a2", "b")), idab});
    DPtr r1 = reduces(via1);
    CHECK(count_nodes(r1) < count_nodes(via1));
    DPtr via2 = by("Cut_g", {by("cup_R2", {ida("b")}, fbind("a1", "a")), idab});
    reduces(via2);
  }
  SUBCASE("composition") {
    DPtr pair = by("cdot_R", {ida("a"), ida("b")});
    DPtr cut = by("Cut_g", {pair, by("cdot_L", {pair})});
    DPtr r = reduces(cut);
    // one comp cut becomes two smaller cuts on the factors
    auto cf = cut_formulas(r);
    REQUIRE(cf.size() == 2);
    std::multiset<std::string> got{render(cf[0]), render(cf[1])};
    CHECK(got == std::multiset<std::string>{"a", "b"});
  }
  SUBCASE("forward diamond") {
    DPtr up = by("fdia_R", {ida()});
    reduces(by("Cut_s", {up, by("fdia_L", {up})}));
  }
  SUBCASE("backward box") {
    DPtr down = by("bbox_L", {ida()});
    reduces(by("Cut_s", {by("bbox_R", {down}), down}));
  }
  SUBCASE("box through w_bal") {
    DPtr core = by("w_bal_fwd", {by("fdia_L", {by("fdia_R", {ida()})})});
    DPtr cut = by("Cut_g", {by("box_R", {core}), by("box_L", {core})});
    DPtr r = reduces(cut);
    auto cf = cut_formulas(r);
    REQUIRE(cf.size() == 1);
    CHECK(eq(cf[0], fdia(atom("a"))));  // the cut moves to the special type
  }
}

TEST_CASE("non-principal cuts are refused with an explanation") {
  CHECK_THROWS_AS(reduce_principal_cut(ida()), NotPrincipal);

  DPtr one_id = by("one_L", {by("one_R", {})});
  CHECK_THROWS_AS(reduce_principal_cut(by("Cut_g", {one_id, one_id})), NotPrincipal);

  // box whose left rule does not come through w_bal
  DPtr d1 = by("box_R", {by("one", {}, sbind("P", "bbox(a)"))});
  DPtr d2 = by("box_L", {by("adj2_bwd", {by("bbox_L", {ida()})})});
  CHECK_THROWS_AS(reduce_principal_cut(by("Cut_g", {d1, d2})), NotPrincipal);

  DPtr broken = node("Cut_g", Q("a |- b"), {node("Id", Q("a |- a")), node("Id", Q("b |- b"))});
  CHECK_THROWS_AS(reduce_principal_cut(broken), NotPrincipal);
}

TEST_CASE("proof files round trip, including omega families") {
  std::vector<DPtr> samples = {
      derive_identity(parse_formula("box(fdia((a + b)))")),
      by("Cut_g", {by("one_R", {}), by("one_L", {by("one_R", {})})}),
      star_one_tree(),
      unfold_star(),
  };
  for (const DPtr& d : samples) {
    std::string text = write_proof(d);
    CAPTURE(text);
    DPtr back = parse_proof(text);
    CHECK(eq_deriv(d, back));
    CHECK(write_proof(back) == text);
  }
}

TEST_CASE("proof reader reports structural errors") {
  CHECK_THROWS_AS(parse_proof("(Id \"a |- a\""), ProofError);
  CHECK_THROWS_AS(parse_proof("(Id \"a |-\")"), ProofError);
  CHECK_THROWS_AS(parse_proof("(Id \"a |- a\") junk"), ProofError);
  CHECK_THROWS_AS(parse_proof("(hyp)"), ProofError);
  CHECK_THROWS_AS(parse_proof(""), ProofError);
  CHECK_THROWS_AS(parse_proof("(omega \"o(b(I)) |- 1\" (base))"), ProofError);
  CHECK_THROWS_AS(load_proof_file("/nonexistent/x.prf"), ProofError);

  // unknown rule names parse; the checker is the one to complain
  DPtr odd = parse_proof("(frob \"a |- a\")");
  CHECK_FALSE(check_derivation(odd).ok);

  DPtr commented = parse_proof("; leading note\n(one_R \"I |- 1\") ; trailing\n");
  CHECK(check_derivation(commented).ok);
}
