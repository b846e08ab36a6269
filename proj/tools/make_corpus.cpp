// Builds the golden proof corpus: a set of checked derivations written as
// proof s-expressions, plus a corpus driver file with CHECK and PROVE
// entries.  Every tree is constructed rule by rule through the catalog
// (match the premises, instantiate the conclusion), so a typo in a tree
// fails here rather than at check time.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mkl/ast.hpp"
#include "mkl/derivation.hpp"
#include "mkl/parse.hpp"
#include "mkl/proof_sexpr.hpp"
#include "mkl/rules.hpp"
#include "mkl/search.hpp"

using namespace mkl;
namespace fs = std::filesystem;

namespace {

SPtr S(const std::string& t) { return parse_structure(t); }
Sequent Q(const std::string& t) { return parse_sequent(t); }

// Forward application: match each child's conclusion against the premise
// patterns, add any metavariables the premises leave open, and instantiate
// the conclusion.  The extra binding covers rules whose conclusion mentions
// metavariables absent from the premises (weakening targets, join sides).
DPtr by(const std::string& rule, std::vector<DPtr> kids, const Binding& extra = {}) {
  const RuleSchema* r = find_rule(rule);
  if (!r) throw std::logic_error("no rule named " + rule);
  if (kids.size() != r->premises.size())
    throw std::logic_error(rule + " wants " + std::to_string(r->premises.size()) +
                           " premises, got " + std::to_string(kids.size()));
  Binding b = extra;
  for (size_t i = 0; i < kids.size(); ++i) {
    if (!match(r->premises[i], kids[i]->conclusion, b))
      throw std::logic_error(rule + " premise " + std::to_string(i) +
                             " rejects " + render(kids[i]->conclusion));
  }
  try {
    return node(rule, instantiate(r->conclusion, b), std::move(kids));
  } catch (const std::exception& e) {
    throw std::logic_error(rule + ": " + e.what());
  }
}

Binding with_s(const std::string& name, const std::string& text) {
  Binding b;
  b.s[name] = S(text);
  return b;
}

Binding with_f(const std::string& name, const std::string& text) {
  Binding b;
  b.f[name] = parse_formula(text);
  return b;
}

DPtr ax_id(const std::string& at) { return by("Id", {}, with_f("a", at)); }
DPtr ax_zero() { return by("zero_L", {}); }

// 0 |- D by weakening the zero axiom.
DPtr zero_into(const std::string& target) {
  return by("PhiW", {ax_zero()}, with_s("D", target));
}

// box(fdia(a)) |- o(fdia(a)): unfold once on the left.
DPtr star_unfold_left() {
  return by("box_L", {by("w_bal_fwd", {by("fdia_L", {by("fdia_R", {ax_id("a")})})})});
}

// a |- o(fdia(a)): the element sits under its own closure.
DPtr into_own_closure() {
  return by("adj1_bwd", {by("fdia_R", {ax_id("a")})});
}

// 1 |- box(fdia(a)): the unit enters any closure.
DPtr one_into_star(const std::string& body) {
  return by("one_L", {by("box_R", {by("one", {}, with_s("P", body))})});
}

// bbox(a) |- bbox(a) through the modal pair.
DPtr bbox_refl() { return by("bbox_R", {by("bbox_L", {ax_id("a")})}); }

// Star induction for the body 0: from (0 , b) |- b close the family
// pow(0, n) |- (b < b) under omega, then display the star to the left.
DPtr k4_star_induction() {
  DPtr d = by("res2_bwd", {zero_into("(b < b)")});  // (0 , b) |- b
  Sequent fam = Q("pow(0, n) |- (b < b)");
  DPtr base = by("res2_fwd", {d});
  DPtr zz = by("zero_R", {ax_zero()});
  DPtr step = by("res2_fwd",
                 {by("Cut_g", {by("assoc_bwd", {by("cdot_R", {zz, by("res2_bwd", {hyp_node(fam)})})}),
                               by("cdot_L", {d})})});
  DPtr om = omega_node(Q("o(b(0)) |- (b < b)"), family(fam, base, step));
  return by("cdot_L",
            {by("res2_bwd",
                {by("box_L", {by("adj2_bwd", {by("fdia_L", {by("adj2_fwd", {om})})})})})});
}

// Mirror image: (b , 0) |- b drives pow(0, n) |- (b > b).
DPtr k5_star_induction() {
  DPtr d = by("res1_bwd", {zero_into("(b > b)")});  // (b , 0) |- b
  Sequent fam = Q("pow(0, n) |- (b > b)");
  DPtr base = by("res1_fwd", {d});
  DPtr step = by("res1_fwd",
                 {by("assoc_fwd",
                     {by("res2_bwd",
                         {by("Cut_g", {d, by("res2_fwd", {by("res1_bwd", {hyp_node(fam)})})})})})});
  DPtr om = omega_node(Q("o(b(0)) |- (b > b)"), family(fam, base, step));
  return by("cdot_L",
            {by("res1_bwd",
                {by("box_L", {by("adj2_bwd", {by("fdia_L", {by("adj2_fwd", {om})})})})})});
}

// (1 + (a . box(fdia(a)))) |- box(fdia(a)) and the two variants: the join of
// the unit with a product absorbs into the closure.
DPtr k3_join(DPtr left_factor, DPtr right_factor) {
  DPtr prod = by("cdot_L", {by("box_R", {by("abs", {left_factor, right_factor})})});
  return by("cup_L", {one_into_star("fdia(a)"), prod});
}

DPtr star_zero_collapses() {
  return by("box_L",
            {by("adj2_bwd", {by("fdia_L", {by("adj1_fwd", {zero_into("o(b(1))")})})})});
}

// box(fdia(1)) |- 1: the family pow(I, n) |- 1 closes by unwinding units.
DPtr star_one_collapses() {
  Sequent fam = Q("pow(I, n) |- 1");
  DPtr base = by("one_R", {});
  DPtr step = by("PhiL_fwd", {hyp_node(fam)});
  DPtr om = omega_node(Q("o(b(I)) |- 1"), family(fam, base, step));
  DPtr lifted = by("adj1_fwd", {by("one_L", {by("adj1_bwd", {by("adj2_fwd", {om})})})});
  return by("box_L", {by("adj2_bwd", {by("fdia_L", {lifted})})});
}

DPtr dual_star_multiplicative() {
  DPtr x = by("box_L", {by("w_bal_fwd", {bbox_refl()})});
  return by("box_R", {by("abs", {x, x})});
}

DPtr dual_star_deflation() {
  return by("box_L", {by("adj2_bwd", {by("bbox_L", {ax_id("a")})})});
}

// box(bbox(a)) |- box(bbox(box(bbox(a)))): idempotence through the balance
// rule on the inner interior.
DPtr dual_star_idempotent() {
  DPtr core = by("adj2_bwd", {by("b_bal", {bbox_refl()})});
  return by("box_L",
            {by("box_R",
                {by("adj1_bwd",
                    {by("bbox_R", {by("adj2_fwd", {by("box_R", {core})})})})})});
}

DPtr dual_star_reflexive() {
  return by("box_R", {by("box_L", {by("w_bal_fwd", {bbox_refl()})})});
}

// o(b(o(b(0)))) |- 1: an omega node whose base is itself an omega node.
DPtr nested_closure() {
  Sequent ifam = Q("pow(0, n) |- 1");
  DPtr ibase = zero_into("1");
  DPtr istep = by("res2_bwd", {zero_into("(1 < pow(0, n))")});
  DPtr inner = omega_node(Q("o(b(0)) |- 1"), family(ifam, ibase, istep));

  DPtr x = by("box_R", {by("w_bal_fwd", {by("fdia_R", {by("zero_R", {ax_zero()})})})});
  DPtr y = by("cdot_L",
              {by("res2_bwd",
                  {by("box_L",
                      {by("adj2_bwd",
                          {by("fdia_L", {by("adj1_fwd", {zero_into("o(b((1 < 1)))")})})})})})});
  Sequent ofam = Q("pow(o(b(0)), n) |- 1");
  DPtr ostep = by("Cut_g", {by("cdot_R", {x, hyp_node(ofam)}), y});
  return omega_node(Q("o(b(o(b(0)))) |- 1"), family(ofam, inner, ostep));
}

DPtr dia_monotone() {
  return by("fdia_L", {by("fdia_R", {by("cup_R1", {ax_id("a")}, with_f("a2", "b"))})});
}

DPtr bbox_monotone() {
  return by("bbox_R", {by("bbox_L", {by("cup_R2", {ax_id("b")}, with_f("a1", "a"))})});
}

// box(fdia(a)) |- box(fdia((a + b))): monotonicity of the closure, routed
// through a special-type cut on fdia((a + b)).
DPtr star_monotone() {
  DPtr idab = by("cup_L", {by("cup_R1", {ax_id("a")}, with_f("a2", "b")),
                           by("cup_R2", {ax_id("b")}, with_f("a1", "a"))});
  DPtr up = by("fdia_L", {by("fdia_R", {by("cup_R1", {ax_id("a")}, with_f("a2", "b"))})});
  DPtr in = by("adj2_fwd",
               {by("box_R", {by("w_bal_fwd", {by("fdia_L", {by("fdia_R", {idab})})})})});
  return by("box_L", {by("adj2_bwd", {by("Cut_s", {up, in})})});
}

DPtr one_below_comp_one() {
  return by("one_L", {by("PhiL_bwd", {by("cdot_R", {by("one_R", {}), by("one_R", {})})})});
}

DPtr circ_contraction() {
  DPtr z = by("box_R", {by("w_bal_fwd", {by("fdia_L", {by("fdia_R", {ax_id("a")})})})});
  return by("circC", {by("cdot_R", {z, z})});
}

DPtr phi_right_unit() {
  return by("PhiR_fwd", {by("one_L", {by("one_R", {})})});
}

struct Entry {
  std::string file;
  std::string goal;
  DPtr proof;
};

std::vector<Entry> build_entries() {
  std::vector<Entry> v;
  auto add = [&v](const std::string& file, const std::string& goal, DPtr d) {
    v.push_back({file, goal, std::move(d)});
  };
  add("k4_star_induction.prf", "(box(fdia(0)) . b) |- b", k4_star_induction());
  add("k5_star_induction.prf", "(b . box(fdia(0))) |- b", k5_star_induction());
  add("k3_one_join_left.prf", "(1 + (a . box(fdia(a)))) |- box(fdia(a))",
      k3_join(into_own_closure(), star_unfold_left()));
  add("k3_one_join_right.prf", "(1 + (box(fdia(a)) . a)) |- box(fdia(a))",
      k3_join(star_unfold_left(), into_own_closure()));
  add("k3_one_join_both.prf", "(1 + (box(fdia(a)) . box(fdia(a)))) |- box(fdia(a))",
      k3_join(star_unfold_left(), star_unfold_left()));
  add("zero_annihilates_left.prf", "(0 . a) |- 0",
      by("zero_R", {by("cdot_L", {by("res2_bwd", {zero_into("(I < a)")})})}));
  add("zero_below_comp.prf", "0 |- (a . 0)", zero_into("(a . 0)"));
  add("star_zero_collapses.prf", "box(fdia(0)) |- 1", star_zero_collapses());
  add("one_below_star_zero.prf", "1 |- box(fdia(0))", one_into_star("fdia(0)"));
  add("star_one_collapses.prf", "box(fdia(1)) |- 1", star_one_collapses());
  add("one_below_dual_star.prf", "1 |- box(bbox(a))", one_into_star("bbox(a)"));
  add("dual_star_multiplicative.prf",
      "(box(bbox(a)) , box(bbox(a))) |- box(bbox(a))", dual_star_multiplicative());
  add("dual_star_deflation.prf", "box(bbox(a)) |- a", dual_star_deflation());
  add("dual_star_idempotent.prf", "box(bbox(a)) |- box(bbox(box(bbox(a))))",
      dual_star_idempotent());
  add("dual_star_reflexive.prf", "box(bbox(a)) |- box(bbox(a))", dual_star_reflexive());
  add("nested_closure.prf", "o(b(o(b(0)))) |- 1", nested_closure());
  add("dia_monotone.prf", "fdia(a) |- fdia((a + b))", dia_monotone());
  add("bbox_monotone.prf", "bbox(b) |- bbox((a + b))", bbox_monotone());
  add("star_monotone.prf", "box(fdia(a)) |- box(fdia((a + b)))", star_monotone());
  add("one_below_comp_one.prf", "1 |- (1 . 1)", one_below_comp_one());
  add("circ_contraction.prf", "o(fdia(a)) |- (box(fdia(a)) . box(fdia(a)))",
      circ_contraction());
  add("phi_right_unit.prf", "(1 , I) |- 1", phi_right_unit());
  return v;
}

const char* kDriverTail =
    "\n"
    "# searched entries: small goals the prover must close within budget\n"
    "PROVE \"1 |- box(fdia(0))\" depth=6\n"
    "PROVE \"I |- 1\" depth=2\n"
    "PROVE \"box(bbox(a)) |- box(bbox(a))\" depth=8\n"
    "PROVE \"(0 . a) |- 0\" depth=8\n"
    "PROVE \"fdia((a . b)) |- fdia((a . b))\" depth=8\n";

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? argv[1] : "corpus";
  std::error_code ec;
  fs::create_directories(dir, ec);

  std::vector<Entry> entries;
  try {
    entries = build_entries();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "corpus construction failed: %s\n", e.what());
    return 1;
  }

  int bad = 0;
  std::ofstream driver(dir / "golden.corpus");
  driver << "# golden corpus: checked derivations plus search goals\n";
  for (const Entry& e : entries) {
    Sequent goal = Q(e.goal);
    if (!eq(e.proof->conclusion, goal)) {
      std::fprintf(stderr, "%s: built conclusion %s, wanted %s\n", e.file.c_str(),
                   render(e.proof->conclusion).c_str(), e.goal.c_str());
      ++bad;
      continue;
    }
    CheckResult c = check_derivation(e.proof);
    if (!c.ok) {
      std::fprintf(stderr, "%s: check failed at %s: %s\n", e.file.c_str(),
                   c.where.c_str(), c.reason.c_str());
      ++bad;
      continue;
    }
    std::ofstream out(dir / e.file);
    out << write_proof(e.proof) << "\n";
    driver << "CHECK " << e.file << "\n";
    std::printf("%-32s %3zu nodes  %s\n", e.file.c_str(), count_nodes(e.proof),
                e.goal.c_str());
  }
  driver << kDriverTail;
  driver.close();

  if (bad) {
    std::fprintf(stderr, "%d entries failed\n", bad);
    return 1;
  }

  // round trip through the driver as a final sanity pass
  CorpusReport rep = run_corpus((dir / "golden.corpus").string());
  for (const std::string& l : rep.lines) std::printf("  %s\n", l.c_str());
  std::printf("corpus: %d passed, %d failed\n", rep.passed, rep.failed);
  return rep.ok() ? 0 : 1;
}
