#pragma once
// Finite models.  A FiniteAlgebra is a join-semilattice monoid on indices
// 0..n-1 with optional star and dual star tables; a HeterogeneousAlgebra is
// its two-sorted companion (general carrier plus the kernel of star-closed
// elements) with the closure/interior maps.  Everything here is brute force
// over the finite carrier, which is exactly the point: the algebra side acts
// as an independent oracle for the proof theory.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mkl/ast.hpp"
#include "mkl/rules.hpp"

namespace mkl {

using Elem = int;

enum class AlgMode { Kleene, MeasurableLiteral, MeasurableGuarded };

const char* mode_name(AlgMode m);
std::optional<AlgMode> mode_of(const std::string& name);

struct FiniteAlgebra {
  std::string name;
  int n = 0;
  std::vector<Elem> join_t;   // n*n row-major
  std::vector<Elem> comp_t;   // n*n row-major
  Elem one_e = -1, zero_e = -1;
  std::vector<Elem> star_t;   // empty when absent
  std::vector<Elem> dstar_t;  // empty when absent; -1 entries mean undefined

  Elem join(Elem a, Elem b) const { return join_t[static_cast<size_t>(a) * n + b]; }
  Elem comp(Elem a, Elem b) const { return comp_t[static_cast<size_t>(a) * n + b]; }
  bool leq(Elem a, Elem b) const { return join(a, b) == b; }
  bool has_star() const { return !star_t.empty(); }
  bool has_dstar() const { return !dstar_t.empty(); }
};

struct AxiomReport {
  std::string axiom;
  bool ok;
  std::string witness;  // empty when ok
};

struct ValidationReport {
  bool ok = true;
  std::vector<AxiomReport> items;
  long skipped = 0;  // guarded-mode assignments outside the dual star domain
};

ValidationReport validate(const FiniteAlgebra& m, AlgMode mode);

// Join of all powers a^0, a^1, ... (stabilizes on a finite carrier).
Elem star_of(const FiniteAlgebra& m, Elem a);

// Elements of Range(star), ascending.
std::vector<Elem> kernel_elements(const FiniteAlgebra& m);

// a^0, a^1, ... up to and including the first repeated power.
std::vector<Elem> powers(const FiniteAlgebra& m, Elem a);

// 1 <= b and b.b <= b
bool is_special(const FiniteAlgebra& m, Elem b);

// Maximal special elements below a; empty when 1 is not below a.  A lawful
// dual star value at a exists exactly when this is a singleton whose member
// dominates every special element below a.
std::vector<Elem> dual_star_candidates(const FiniteAlgebra& m, Elem a);

FiniteAlgebra with_star(FiniteAlgebra m);           // star_t := star_of
FiniteAlgebra with_guarded_dstar(FiniteAlgebra m);  // greatest special below, where defined

// ---------- heterogeneous side ----------

struct HeterogeneousAlgebra {
  std::string name;
  FiniteAlgebra a;              // star-free general carrier
  std::vector<Elem> s_elems;    // kernel carrier, as elements of a (ascending)
  std::vector<int> s_join;      // |S| x |S| indices into s_elems
  int s_zero = -1;
  std::vector<int> gamma_m;     // n -> S
  std::vector<int> iota_m;      // n -> S or -1; empty when not measurable
  bool guarded = false;

  int s_size() const { return static_cast<int>(s_elems.size()); }
  int sjoin(int x, int y) const { return s_join[static_cast<size_t>(x) * s_elems.size() + y]; }
  bool s_leq(int x, int y) const { return sjoin(x, y) == y; }
  int gamma(Elem x) const { return gamma_m[x]; }
  Elem e(int s) const { return s_elems[s]; }
  bool has_iota() const { return !iota_m.empty(); }
  int iota(Elem x) const { return iota_m[x]; }  // -1 = undefined
  Elem otimes1(int s, Elem x) const { return a.comp(e(s), x); }
  Elem otimes2(Elem x, int s) const { return a.comp(x, e(s)); }
};

// Kernel construction: S = image of star, gamma = star, e = inclusion,
// s-joins are stars of joins.  Needs star; uses dstar for iota when present,
// otherwise derives a guarded iota (greatest special element below, where
// one exists).
HeterogeneousAlgebra lift(const FiniteAlgebra& m);

// Stars and dual stars recovered from a heterogeneous algebra.  Entries
// where iota is undefined come back as -1 in the dual star table.
FiniteAlgebra lower(const HeterogeneousAlgebra& h);

// e(iota(x)); throws IotaPartial outside the interior's domain.
Elem lower_dstar_at(const HeterogeneousAlgebra& h, Elem x);

// Mode Kleene reads as plain heterogeneous (H1-H7); the measurable modes
// check HM1-HM6 with iota total resp. partial with domain up-set of 1.
ValidationReport validate(const HeterogeneousAlgebra& h, AlgMode mode);

// lower(lift(m)) returns m's tables; lift(lower(h)) has an isomorphic kernel.
bool roundtrip_k(const FiniteAlgebra& m, std::string* why = nullptr);
bool roundtrip_h(const HeterogeneousAlgebra& h, std::string* why = nullptr);

// ---------- evaluation ----------

struct EvalError : std::runtime_error {
  enum class What { NoInterpretation, IotaPartial, SymbolicPow, UnboundAtom };
  What what_kind;
  EvalError(What w, const std::string& msg) : std::runtime_error(msg), what_kind(w) {}
};

using Assignment = std::map<std::string, Elem>;

struct Value {
  Kind kind;
  int v;  // element of a (general) or S index (special)
};

enum class Position { Precedent, Succedent };

Value eval(const HeterogeneousAlgebra& h, const Assignment& asg, const FPtr& f);
Value eval(const HeterogeneousAlgebra& h, const Assignment& asg, const SPtr& s, Position pos);

struct Validity {
  bool valid = true;
  long checked = 0;
  long skipped = 0;
  std::string witness;
};

// Quantifies atoms over the general carrier; guarded iota failures skip the
// assignment and are counted.
Validity valid(const HeterogeneousAlgebra& h, const Sequent& s);

// Single-type evaluation in a FiniteAlgebra with star tables.
Elem eval1(const FiniteAlgebra& m, const Assignment& asg, const FPtr& f);
Validity valid1(const FiniteAlgebra& m, const FPtr& alpha, const FPtr& beta);

// Residuals by brute force: largest x with a.x <= b, resp. x.a <= b.
Elem left_residual(const FiniteAlgebra& m, Elem a, Elem b);
Elem right_residual(const FiniteAlgebra& m, Elem b, Elem a);

// ---------- rule soundness ----------

struct SoundnessResult {
  bool ok = true;
  long checked = 0;
  long skipped = 0;
  std::string witness;
};

// Sweeps every sort-respecting valuation of the schema's metavariables over
// h; whenever all premises hold the conclusion must hold.  The omega premise
// family is summarized through the finite powers join.
SoundnessResult check_rule_soundness(const HeterogeneousAlgebra& h, const RuleSchema& r);

// ---------- model zoo ----------

FiniteAlgebra builtin_b2();
FiniteAlgebra builtin_singleton();
FiniteAlgebra builtin_rel(int k);  // relations on k points, k <= 3
std::optional<FiniteAlgebra> builtin(const std::string& name);  // b2, singleton, rel1, rel2, rel3

// All models of the given mode up to isomorphism fixing 0 and 1, carriers up
// to max_size.  Kleene models come with their (unique) star.
std::vector<FiniteAlgebra> enumerate_models(int max_size, AlgMode mode);

// ---------- translation invariance ----------

struct InvarianceResult {
  bool lhs_valid = true, rhs_valid = true;
  long skipped = 0;
  bool agree() const { return lhs_valid == rhs_valid; }
};

// Compares m |= alpha <= beta with lift(m) |= alpha^t <= beta^t.
InvarianceResult translation_invariance(const FiniteAlgebra& m, const FPtr& alpha, const FPtr& beta);

// ---------- model files ----------

struct ModelFile {
  FiniteAlgebra alg;
  AlgMode mode = AlgMode::Kleene;
};

struct ModelIOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ModelFile read_model(const std::string& path);
ModelFile parse_model(const std::string& text);
std::string write_model(const FiniteAlgebra& m, AlgMode mode);

}  // namespace mkl
