// Randomized verification suites behind the `check` command: finite-difference
// gradient comparison, the agreement-bound chain, the cross-entropy identity,
// and MST decoding against exhaustive search.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bidep/decoder.hpp"
#include "bidep/model.hpp"
#include "bidep/rng.hpp"

namespace bidep {

struct CheckOutcome {
  std::string name;
  bool passed;
  std::string detail;
};

// A tiny fully-featured model (hidden 4, form+fpos channels, 2 relation
// labels) with random weights, plus one 3-token prepared sentence; the
// shared fixture for gradient checking.
struct GradientFixture {
  Model model;
  std::vector<TokenIds> tokens;
  std::vector<int> heads;
  std::vector<int> rels;
};

GradientFixture make_gradient_fixture(std::uint64_t seed);

// Central finite differences (step 1e-5, refined to 1e-6/1e-7 for entries
// that miss tolerance at the pinned step) against tape gradients over every
// tensor. Returns the worst per-entry relative error; gaps at or below the
// finite-difference resolution (1e-8) count as exact. flip_sign corrupts one
// analytic gradient entry first (the sabotage hook for testing the check
// itself).
Real max_gradient_error(GradientFixture& fixture, bool flip_sign = false);

// Random point on the probability simplex.
RealVector random_simplex(Rng& rng, std::size_t dim);

// Exhaustive maximum over all head assignments that form a valid tree.
Real brute_force_best_tree_score(const ArcScoreMatrix& scores, bool single_root);

// The four suites; exit-code semantics live in the CLI.
std::vector<CheckOutcome> run_self_checks(std::uint64_t seed,
                                          bool sabotage_gradient = false);

}  // namespace bidep
