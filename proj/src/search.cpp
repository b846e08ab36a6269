#include "mkl/search.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "mkl/algebra.hpp"
#include "mkl/parse.hpp"
#include "mkl/proof_sexpr.hpp"
#include "mkl/rules.hpp"

namespace mkl {

namespace {

int ssize(const SPtr& s) {
  int n = 1;
  if (s->a) n += ssize(s->a);
  if (s->b) n += ssize(s->b);
  return n;
}

int seq_size(const Sequent& s) { return ssize(s.lhs) + ssize(s.rhs); }

// Backward order: axioms, then operational rules (they consume a connective
// of the goal), then structural churn.  Cuts are never applied backward, and
// omega is handled separately after everything else fails.
const std::vector<const RuleSchema*>& backward_rules() {
  static const std::vector<const RuleSchema*> order = [] {
    const char* names[] = {
        "Id",        "one_R",     "zero_L",    "one",
        "cup_L",     "cdot_L",    "one_L",     "zero_R",    "fdia_L",
        "bbox_R",    "box_L",     "box_R",     "fdia_R",    "bbox_L",
        "cdot_R",    "cup_R1",    "cup_R2",
        "w_bal_fwd", "w_bal_bwd", "PhiL_bwd",  "PhiR_bwd",  "adj1_fwd",
        "adj1_bwd",  "adj2_fwd",  "adj2_bwd",  "res1_fwd",  "res1_bwd",
        "res2_fwd",  "res2_bwd",  "assoc_fwd", "assoc_bwd", "b_bal",
        "circC",     "abs",       "PhiL_fwd",  "PhiR_fwd",  "PhiW"};
    std::vector<const RuleSchema*> v;
    for (const char* n : names) {
      const RuleSchema* r = find_rule(n);
      if (!r) throw std::logic_error(std::string("search order names unknown rule ") + n);
      v.push_back(r);
    }
    return v;
  }();
  return order;
}

// Small finite models, lifted, shared by every refutation query.
const std::vector<HeterogeneousAlgebra>& countermodel_pool() {
  static const std::vector<HeterogeneousAlgebra> pool = [] {
    std::vector<HeterogeneousAlgebra> v;
    for (const FiniteAlgebra& a : enumerate_models(3, AlgMode::Kleene))
      v.push_back(lift(a));
    v.push_back(lift(builtin_rel(2)));
    return v;
  }();
  return pool;
}

std::string refute(const Sequent& s) {
  for (const HeterogeneousAlgebra& h : countermodel_pool()) {
    try {
      Validity v = valid(h, s);
      if (!v.valid) return h.name + " with " + v.witness;
    } catch (const EvalError&) {
      // a model that cannot evaluate the sequent refutes nothing
    }
  }
  return {};
}

struct Searcher {
  SearchBudget budget;
  SearchStats stats;
  bool out_of_budget = false;
  int size_cap = 0;

  // Induction hypothesis of the omega step template being searched, if any.
  // Families are fresh scopes: the base drops the hypothesis entirely, the
  // step replaces it, and path keys are tagged so that revisiting an
  // ancestor's goal inside a family is not mistaken for a loop.
  const Sequent* hyp = nullptr;
  int scope = 0;
  int next_scope = 0;

  std::unordered_set<std::string> path;
  std::unordered_map<std::string, int> failed;  // memo: max depth that failed

  std::string memo_key(const Sequent& s) const {
    std::string k = render(s);
    if (hyp) {
      k += " % ";
      k += render(*hyp);
    }
    return k;
  }

  DPtr search(const Sequent& goal, int depth) {
    if (out_of_budget || depth <= 0) return nullptr;
    if (++stats.expanded > budget.max_visited) {
      out_of_budget = true;
      return nullptr;
    }
    if (hyp && eq(goal, *hyp)) return hyp_node(goal);
    std::string mk = memo_key(goal);
    auto known = failed.find(mk);
    if (known != failed.end() && known->second >= depth) return nullptr;
    std::string pk = std::to_string(scope);
    pk += '|';
    pk += mk;
    if (!path.insert(pk).second) return nullptr;
    DPtr found = expand(goal, depth);
    path.erase(pk);
    if (!found && !out_of_budget) {
      int& d = failed[mk];
      if (depth > d) d = depth;
    }
    return found;
  }

  DPtr expand(const Sequent& goal, int depth) {
    for (const RuleSchema* r : backward_rules()) {
      Binding b;
      if (!match(r->conclusion, goal, b)) continue;
      std::vector<DPtr> kids;
      bool all = true;
      for (const SeqPat& p : r->premises) {
        Sequent sub = instantiate(p, b);
        if (seq_size(sub) > size_cap) {
          all = false;
          break;
        }
        DPtr k = search(sub, depth - 1);
        if (!k) {
          all = false;
          break;
        }
        kids.push_back(std::move(k));
      }
      if (all) return node(r->name, goal, std::move(kids));
    }
    return try_omega(goal, depth);
  }

  // Schematic omega only: the goal must already display as o(b(G)) |- D, and
  // the premise family is fixed to pow(G, n) |- D, searched through its base
  // and step instances.
  DPtr try_omega(const Sequent& goal, int depth) {
    static const RuleSchema* om = find_rule("omega");
    Binding b;
    if (!match(om->conclusion, goal, b)) return nullptr;
    ++stats.omega_attempts;
    Sequent fam_seq = sequent(pow_n(b.s.at("G")), b.s.at("D"));

    const Sequent* outer_hyp = hyp;
    int outer_scope = scope;

    hyp = nullptr;  // base instances are closed
    scope = ++next_scope;
    DPtr base = search(family_at_one(fam_seq), depth - 1);
    hyp = outer_hyp;
    scope = outer_scope;
    if (!base) return nullptr;

    hyp = &fam_seq;
    scope = ++next_scope;
    DPtr step = search(family_at_succ(fam_seq), depth - 1);
    hyp = outer_hyp;
    scope = outer_scope;
    if (!step) return nullptr;

    return omega_node(goal, family(fam_seq, base, step));
  }
};

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ProveResult prove(const Sequent& goal, const SearchBudget& budget) {
  if (budget.max_depth <= 0 || budget.max_visited <= 0)
    throw std::invalid_argument("search bounds must be positive");
  Sequent g = sequent(normalize(goal.lhs), normalize(goal.rhs));
  ProveResult out;
  if (budget.use_countermodels && !has_symbolic_pow(g.lhs) &&
      !has_symbolic_pow(g.rhs)) {
    std::string cm = refute(g);
    if (!cm.empty()) {
      out.refuted = true;
      out.countermodel = cm;
      return out;
    }
  }
  Searcher s;
  s.budget = budget;
  s.size_cap = seq_size(g) * 2 + 3 * budget.max_depth + 8;
  DPtr d = s.search(g, budget.max_depth);
  out.stats = s.stats;
  if (d) {
    out.proved = true;
    out.proof = d;
  }
  return out;
}

CorpusReport run_corpus(const std::string& path, int default_depth) {
  CorpusReport rep;
  std::ifstream in(path);
  if (!in) {
    rep.failed++;
    rep.lines.push_back("failed: cannot open corpus file " + path);
    return rep;
  }
  std::filesystem::path dir = std::filesystem::path(path).parent_path();
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    line = trimmed(line);
    if (line.empty()) continue;
    std::string tag = "line " + std::to_string(lineno);
    try {
      if (line.rfind("CHECK", 0) == 0) {
        std::string name = trimmed(line.substr(5));
        if (name.empty()) throw std::runtime_error("CHECK needs a file name");
        std::string file = (dir / name).string();
        DPtr d = load_proof_file(file);
        CheckResult c = check_derivation(d);
        if (c.ok) {
          rep.passed++;
          rep.lines.push_back("checked " + name + ": " + render(d->conclusion));
        } else {
          rep.failed++;
          rep.lines.push_back("failed " + name + ": " + c.where + ": " + c.reason);
        }
      } else if (line.rfind("PROVE", 0) == 0) {
        std::string rest = trimmed(line.substr(5));
        if (rest.size() < 2 || rest[0] != '"')
          throw std::runtime_error("PROVE needs a quoted sequent");
        size_t close = rest.find('"', 1);
        if (close == std::string::npos)
          throw std::runtime_error("unterminated sequent quote");
        std::string seqtext = rest.substr(1, close - 1);
        std::string opts = trimmed(rest.substr(close + 1));
        int depth = default_depth;
        if (!opts.empty()) {
          if (opts.rfind("depth=", 0) != 0)
            throw std::runtime_error("unknown PROVE option " + opts);
          depth = std::stoi(opts.substr(6));
        }
        Sequent s = parse_sequent(seqtext);
        SearchBudget b;
        b.max_depth = depth;
        ProveResult r = prove(s, b);
        if (r.proved && check_derivation(r.proof).ok) {
          rep.passed++;
          std::ostringstream os;
          os << "searched " << seqtext << " (depth " << depth << ", "
             << r.stats.expanded << " expansions)";
          rep.lines.push_back(os.str());
        } else if (r.refuted) {
          rep.failed++;
          rep.lines.push_back("failed " + seqtext + ": refuted by " + r.countermodel);
        } else {
          rep.failed++;
          rep.lines.push_back("failed " + seqtext + ": search exhausted");
        }
      } else {
        throw std::runtime_error("unknown corpus entry");
      }
    } catch (const std::exception& e) {
      rep.failed++;
      rep.lines.push_back("failed " + tag + ": " + e.what());
    }
  }
  return rep;
}

}  // namespace mkl
