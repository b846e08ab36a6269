#pragma once
// Proof files are s-expressions:
//
//   (<rule> "<sequent>" <child>*)
//   (omega "<sequent>" (family "<sequent with pow(G, n)>" (base <tree>) (step <tree>)))
//   (hyp)
//
// The (hyp) leaf takes its sequent from the enclosing family.

#include <string>

#include "mkl/derivation.hpp"

namespace mkl {

struct ProofError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string write_proof(const DPtr& d);
DPtr parse_proof(const std::string& text);
DPtr load_proof_file(const std::string& path);  // ProofError on missing file

}  // namespace mkl
