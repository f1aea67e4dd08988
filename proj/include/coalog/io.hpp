#pragma once

// Text files for models, valuations and L-algebras. Lines are
// whitespace-insensitive; '#' starts a comment.
//
//   model        functor: EXPR / states: x y ... / x -> VALUE (one per state)
//   valuation    p = {x, y}
//   algebra      functor: EXPR / atoms: a b ... / dual: a -> VALUE (one per atom)

#include "coalog/duality.hpp"

#include <string>
#include <string_view>

namespace coalog {

std::string read_file(const std::string& path);

Coalgebra parse_model(std::string_view text);

Valuation parse_valuation(std::string_view text, const FinSet& states);
std::string show_valuation(const Valuation& h, const FinSet& states);

/// `{x, y}` in carrier order.
std::string show_states(const Subset& s, const FinSet& states);

LAlgebra parse_algebra(std::string_view text);
std::string show_algebra(const LAlgebra& alg);

} // namespace coalog
