#pragma once
// Derivation trees and their checker.  A derivation node names a catalog
// rule, states its conclusion, and carries the subderivations of the
// premises.  An omega node instead carries a premise family: one sequent
// schema in a symbolic index n, witnessed by a derivation of the n = 1
// instance and a step template that turns the n instance into the n + 1
// instance through a single (hyp) leaf.

#include <memory>
#include <string>
#include <vector>

#include "mkl/ast.hpp"
#include "mkl/rules.hpp"

namespace mkl {

struct Derivation;
using DPtr = std::shared_ptr<const Derivation>;

struct PremiseFamily {
  Sequent family_seq;  // exactly one symbolic pow, in the precedent
  DPtr base;           // closed derivation of the n = 1 instance
  DPtr step;           // template: unique (hyp) at n, conclusion at n + 1
};
using FamPtr = std::shared_ptr<const PremiseFamily>;

struct Derivation {
  std::string rule;  // catalog name, "hyp" inside step templates
  Sequent conclusion;
  std::vector<DPtr> children;
  FamPtr family;  // omega nodes only
};

DPtr node(std::string rule, Sequent conclusion, std::vector<DPtr> children = {});
DPtr omega_node(Sequent conclusion, FamPtr family);
DPtr hyp_node(Sequent s);
FamPtr family(Sequent family_seq, DPtr base, DPtr step);

size_t count_nodes(const DPtr& d);

// The family instance at n = 1 (pow removed) and at n + 1 (pow wrapped as
// (G , pow(G, n))).
Sequent family_at_one(const Sequent& family_seq);
Sequent family_at_succ(const Sequent& family_seq);

struct CheckResult {
  bool ok = true;
  std::string where;   // path such as root.1.0 of the first failure
  std::string reason;
  explicit operator bool() const { return ok; }
};

// Full check of a closed derivation: every node is an instance of its named
// rule, omega families verify, no stray (hyp) leaves.
CheckResult check_derivation(const DPtr& d);

// Coherence of a premise family on its own: the base derives the n = 1
// instance, the step derives n + 1, using (hyp) leaves at n as needed.
CheckResult verify_omega_family(const PremiseFamily& fam);

// Exploration variant: unrolls the step template and checks the concrete
// instances n = 1 .. n_max only.  Acceptance on this basis proves nothing
// about larger n, so a passing result carries reason "unsound-bounded".
// Steps containing nested omega nodes are rejected (the unrolling cannot
// tell their symbolic index apart from the outer one).
CheckResult verify_omega_family_bounded(const PremiseFamily& fam, int n_max);

// Cut-free derivation of f |- f for any multi-type formula.
DPtr derive_identity(const FPtr& f);

// From a derivation of (x , y) |- y (side_left) or (y , x) |- y builds the
// premise family for (pow(x, n) , y) |- y resp. (y , pow(x, n)) |- y.
// Throws ShapeError unless the conclusion has the required shape with
// formula leaves.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
FamPtr omega_lift(const DPtr& d, bool side_left);

// One step of principal cut elimination at the root.
struct NotPrincipal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
DPtr reduce_principal_cut(const DPtr& d);

// All cut formulas appearing anywhere in d (including inside families).
std::vector<FPtr> cut_formulas(const DPtr& d);

}  // namespace mkl
