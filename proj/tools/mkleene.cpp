// Command line workbench.  One subcommand per invocation; every report ends
// with a RESULT: PASS|FAIL line.  Exit 0 when the verdict is positive, 1 when
// it is negative, 2 on usage errors.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mkl/algebra.hpp"
#include "mkl/ast.hpp"
#include "mkl/derivation.hpp"
#include "mkl/parse.hpp"
#include "mkl/proof_sexpr.hpp"
#include "mkl/rules.hpp"
#include "mkl/search.hpp"

using namespace mkl;

namespace {

bool cmd_parse(const std::string& text) {
  if (text.find("|-") != std::string::npos) {
    Sequent s = parse_sequent(text);
    std::printf("sequent (%s): %s\n", kind_name(s.kind), render(s).c_str());
    return true;
  }
  FPtr f;
  try {
    f = parse_formula(text, Lang::Multi);
  } catch (const SyntaxError&) {
    f = parse_formula(text, Lang::Single);  // stars live in the one-sorted language
  }
  std::printf("formula (%s, depth %d): %s\n", kind_name(f->kind()), depth(f),
              render(f).c_str());
  return true;
}

bool cmd_translate(const std::string& text) {
  FPtr f = parse_formula(text, Lang::Single);
  std::printf("%s\n", render(translate(f)).c_str());
  return true;
}

bool cmd_check(const std::vector<std::string>& files) {
  bool all = true;
  for (const std::string& fn : files) {
    try {
      DPtr d = load_proof_file(fn);
      CheckResult c = check_derivation(d);
      if (c.ok) {
        std::printf("checked %s: %s (%zu nodes)\n", fn.c_str(),
                    render(d->conclusion).c_str(), count_nodes(d));
      } else {
        std::printf("failed %s at %s: %s\n", fn.c_str(), c.where.c_str(), c.reason.c_str());
        all = false;
      }
    } catch (const std::exception& e) {
      std::printf("failed %s: %s\n", fn.c_str(), e.what());
      all = false;
    }
  }
  return all;
}

bool cmd_prove(const std::string& text, int depth) {
  Sequent s = parse_sequent(text);
  SearchBudget b;
  b.max_depth = depth;
  ProveResult r = prove(s, b);
  if (r.proved) {
    std::printf("%s\n", write_proof(r.proof).c_str());
    std::printf("proved %s (depth %d, %ld expansions, %ld omega attempts)\n",
                render(s).c_str(), depth, r.stats.expanded, r.stats.omega_attempts);
    return true;
  }
  if (r.refuted) {
    std::printf("refuted %s: %s\n", render(s).c_str(), r.countermodel.c_str());
    return false;
  }
  std::printf("no proof of %s within depth %d (%ld expansions)\n", render(s).c_str(), depth,
              r.stats.expanded);
  return false;
}

bool cmd_identity(const std::string& text) {
  FPtr f = parse_formula(text, Lang::Multi);
  DPtr d = derive_identity(f);
  CheckResult c = check_derivation(d);
  std::printf("%s\n", write_proof(d).c_str());
  std::printf("identity for %s: %zu nodes, %s\n", render(f).c_str(), count_nodes(d),
              c.ok ? "checks" : ("does not check: " + c.reason).c_str());
  return c.ok;
}

bool cmd_reduce_cut(const std::string& file) {
  DPtr d = load_proof_file(file);
  try {
    DPtr r = reduce_principal_cut(d);
    CheckResult c = check_derivation(r);
    std::printf("%s\n", write_proof(r).c_str());
    std::printf("reduced %s: %zu -> %zu nodes, %s\n", file.c_str(), count_nodes(d),
                count_nodes(r), c.ok ? "checks" : ("does not check: " + c.reason).c_str());
    return c.ok;
  } catch (const NotPrincipal& e) {
    std::printf("not reducible: %s\n", e.what());
    return false;
  }
}

bool cmd_model_validate(const std::string& file, const std::string& mode_flag) {
  ModelFile mf = read_model(file);
  AlgMode mode = mf.mode;
  if (!mode_flag.empty()) mode = *mode_of(mode_flag);
  ValidationReport rep = validate(mf.alg, mode);
  for (const AxiomReport& it : rep.items) {
    if (it.ok)
      std::printf("PASS %s\n", it.axiom.c_str());
    else
      std::printf("FAIL %s %s\n", it.axiom.c_str(), it.witness.c_str());
  }
  std::printf("%s as %s: %zu axioms, %ld assignments skipped\n", file.c_str(), mode_name(mode),
              rep.items.size(), rep.skipped);
  return rep.ok;
}

bool cmd_model_enumerate(int max_size, AlgMode mode) {
  std::vector<FiniteAlgebra> ms = enumerate_models(max_size, mode);
  for (size_t i = 0; i < ms.size(); ++i) {
    std::printf("# model %zu\n%s", i, write_model(ms[i], mode).c_str());
  }
  std::printf("%zu models of size <= %d in mode %s\n", ms.size(), max_size, mode_name(mode));
  return true;
}

std::vector<HeterogeneousAlgebra> soundness_models(int max_size, AlgMode mode) {
  std::vector<HeterogeneousAlgebra> hs;
  if (mode == AlgMode::MeasurableLiteral) {
    for (const FiniteAlgebra& m : enumerate_models(max_size, mode)) hs.push_back(lift(m));
    return hs;
  }
  for (const FiniteAlgebra& m : enumerate_models(max_size, AlgMode::Kleene))
    hs.push_back(lift(m));
  hs.push_back(lift(builtin_rel(2)));  // noncommutative composition
  return hs;
}

bool cmd_soundness(const std::string& rule, int max_size, AlgMode mode) {
  std::vector<HeterogeneousAlgebra> hs = soundness_models(max_size, mode);
  bool all = true;
  for (const RuleSchema& r : rule_catalog()) {
    if (rule != "all" && r.name != rule) continue;
    long checked = 0, skipped = 0;
    std::string bad;
    for (const HeterogeneousAlgebra& h : hs) {
      SoundnessResult res = check_rule_soundness(h, r);
      checked += res.checked;
      skipped += res.skipped;
      if (!res.ok && bad.empty()) bad = h.name + " " + res.witness;
    }
    if (bad.empty()) {
      std::printf("PASS %s (%ld valuations, %ld skipped)\n", r.name.c_str(), checked, skipped);
    } else {
      std::printf("FAIL %s %s\n", r.name.c_str(), bad.c_str());
      all = false;
    }
  }
  return all;
}

bool cmd_corpus(const std::string& file, int depth) {
  CorpusReport rep = run_corpus(file, depth);
  for (const std::string& l : rep.lines) std::printf("%s\n", l.c_str());
  std::printf("corpus %s: %d passed, %d failed\n", file.c_str(), rep.passed, rep.failed);
  return rep.ok();
}

bool cmd_invariance(int max_size) {
  // star-free formulas of depth <= 2 over two atoms, plus starred leaves
  std::vector<FPtr> leaves = {atom("a"), atom("b"), one(), zero()};
  std::vector<FPtr> fs = leaves;
  for (const FPtr& x : leaves)
    for (const FPtr& y : leaves) {
      fs.push_back(funion(x, y));
      fs.push_back(fcomp(x, y));
    }
  for (const FPtr& x : leaves) fs.push_back(star(x));

  std::vector<FiniteAlgebra> ms = enumerate_models(max_size, AlgMode::Kleene);
  ms.push_back(builtin_rel(2));
  long pairs = 0;
  bool all = true;
  for (const FiniteAlgebra& m : ms) {
    for (const FPtr& al : fs)
      for (const FPtr& be : fs) {
        InvarianceResult r = translation_invariance(m, al, be);
        ++pairs;
        if (!r.agree()) {
          if (all)
            std::printf("FAIL %s: %s <= %s holds %s-sorted but %s multi-sorted\n",
                        m.name.c_str(), render(al).c_str(), render(be).c_str(),
                        r.lhs_valid ? "one" : "not one", r.rhs_valid ? "holds" : "fails");
          all = false;
        }
      }
  }
  if (all)
    std::printf("translation invariance agrees on %ld comparisons over %zu models\n", pairs,
                ms.size());
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for the multi-type display calculus of measurable Kleene logic"};
  app.require_subcommand(1);

  std::string text, file, mode = "guarded", mode_override, rule = "all";
  std::string corpus_file = "corpus/golden.corpus";
  std::vector<std::string> files;
  int max_size = 3, depth = 12;

  auto mode_check = CLI::IsMember(
      {"kleene", "literal", "guarded", "measurable-literal", "measurable-guarded"});

  CLI::App* c_parse = app.add_subcommand("parse", "parse a formula or sequent and reprint it");
  c_parse->add_option("text", text)->required();

  CLI::App* c_translate =
      app.add_subcommand("translate", "translate a one-sorted formula into the multi-type language");
  c_translate->add_option("text", text)->required();

  CLI::App* c_check = app.add_subcommand("check", "check proof files");
  c_check->add_option("files", files)->required();

  CLI::App* c_prove = app.add_subcommand("prove", "bounded cut-free proof search for a sequent");
  c_prove->add_option("text", text)->required();
  c_prove->add_option("--depth", depth, "search depth bound");

  CLI::App* c_identity = app.add_subcommand("identity", "derive f |- f for a multi-type formula");
  c_identity->add_option("text", text)->required();

  CLI::App* c_reduce = app.add_subcommand("reduce-cut", "one principal cut reduction at the root");
  c_reduce->add_option("file", file)->required();

  CLI::App* c_mval = app.add_subcommand("model-validate", "validate a model file against its axioms");
  c_mval->add_option("file", file)->required();
  c_mval->add_option("--mode", mode_override, "override the mode in the file")->check(mode_check);

  CLI::App* c_menum = app.add_subcommand("model-enumerate", "enumerate models up to isomorphism");
  c_menum->add_option("--max-size", max_size, "carrier size bound");
  c_menum->add_option("--mode", mode, "axiom set to enumerate")->check(mode_check);

  CLI::App* c_sound = app.add_subcommand("soundness", "sweep rule schemas over finite models");
  c_sound->add_option("--rule", rule, "rule name, or all");
  c_sound->add_option("--max-size", max_size, "model size bound");
  c_sound->add_option("--mode", mode, "model class")->check(mode_check);

  CLI::App* c_corpus = app.add_subcommand("corpus", "run a corpus file of CHECK/PROVE entries");
  c_corpus->add_option("--corpus", corpus_file, "corpus file");
  c_corpus->add_option("--depth", depth, "default search depth for PROVE entries");

  CLI::App* c_inv = app.add_subcommand("invariance", "compare one-sorted and translated validity");
  c_inv->add_option("--max-size", max_size, "model size bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (rule != "all" && !find_rule(rule)) {
    std::fprintf(stderr, "unknown rule %s\n", rule.c_str());
    return 2;
  }

  bool ok = false;
  try {
    if (app.got_subcommand(c_parse)) ok = cmd_parse(text);
    else if (app.got_subcommand(c_translate)) ok = cmd_translate(text);
    else if (app.got_subcommand(c_check)) ok = cmd_check(files);
    else if (app.got_subcommand(c_prove)) ok = cmd_prove(text, depth);
    else if (app.got_subcommand(c_identity)) ok = cmd_identity(text);
    else if (app.got_subcommand(c_reduce)) ok = cmd_reduce_cut(file);
    else if (app.got_subcommand(c_mval)) ok = cmd_model_validate(file, mode_override);
    else if (app.got_subcommand(c_menum)) ok = cmd_model_enumerate(max_size, *mode_of(mode));
    else if (app.got_subcommand(c_sound)) ok = cmd_soundness(rule, max_size, *mode_of(mode));
    else if (app.got_subcommand(c_corpus)) ok = cmd_corpus(corpus_file, depth);
    else if (app.got_subcommand(c_inv)) ok = cmd_invariance(max_size);
  } catch (const std::exception& e) {
    std::printf("error: %s\n", e.what());
    ok = false;
  }

  std::printf("RESULT: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
