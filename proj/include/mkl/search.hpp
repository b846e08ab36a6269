#pragma once
// Backward proof search over the directed rule catalog, cut-free.  The search
// is a deterministic depth-first walk with a fixed rule order, loop detection
// on rendered sequents along the current path, and a failure memo.  Before
// searching, the goal is tested against lifts of the small enumerated models;
// a countermodel short-circuits the search with a refutation.

#include <optional>
#include <string>
#include <vector>

#include "mkl/ast.hpp"
#include "mkl/derivation.hpp"

namespace mkl {

struct SearchStats {
  long expanded = 0;
  long omega_attempts = 0;
};

// All bounds must stay positive; omega is only ever tried schematically, on
// goals that already display as  o(b(G)) |- D.
struct SearchBudget {
  int max_depth = 12;
  long max_visited = 2000000;
  bool use_countermodels = true;
};

struct ProveResult {
  bool proved = false;
  DPtr proof;  // set when proved
  bool refuted = false;
  std::string countermodel;  // set when refuted
  SearchStats stats;
};

ProveResult prove(const Sequent& goal, const SearchBudget& budget = {});

// Corpus files drive batches: one entry per line, `CHECK <proof file>` or
// `PROVE "<sequent>" depth=<k>`, with # comments.  Entry failures are
// recorded, not thrown.
struct CorpusReport {
  int passed = 0;
  int failed = 0;
  std::vector<std::string> lines;
  bool ok() const { return failed == 0; }
};

CorpusReport run_corpus(const std::string& path, int default_depth = 12);

}  // namespace mkl
