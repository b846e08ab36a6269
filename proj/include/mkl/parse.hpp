#pragma once
// Concrete syntax.  Whitespace-insensitive, parentheses are mandatory for
// binary nodes:
//
//   formula    a  1  0  (F + F)  (F . F)  F^*  F^#  box(S)  fdia(F)  bbox(F)
//   structure  I  (G , G)  (G < G)  (G > G)  o(P)  b(G)  pow(G, n)  formula
//   sequent    LHS |- RHS
//
// o/b/pow/box/fdia/bbox are keywords only when directly applied to an
// argument list, so plain  b  still parses as an atom.  I is always the
// structural constant.

#include <cstddef>

#include "mkl/ast.hpp"

namespace mkl {

struct SyntaxError : std::runtime_error {
  size_t pos;
  SyntaxError(const std::string& what, size_t p);
};

FPtr parse_formula(const std::string& text, Lang lang = Lang::Multi);
SPtr parse_structure(const std::string& text);
Sequent parse_sequent(const std::string& text);

}  // namespace mkl
