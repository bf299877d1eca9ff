// Attachment scoring: UAS/LAS over non-punctuation tokens, plus recall split
// by whether a token's gold arc is crossed by another arc.
#pragma once

#include <string>
#include <vector>

#include "bidep/conll.hpp"
#include "bidep/numerics.hpp"

namespace bidep {

// False iff every character of the form is Unicode punctuation (category P*).
bool is_scoring_token(const std::string& form);

struct EvalReport {
  Real uas = 0;
  Real las = 0;
  std::size_t counted_tokens = 0;  // scoring tokens
  Real uncrossed_recall = 0;
  Real crossed_recall = 0;
  Real pct_crossed = 0;
  bool has_uncrossed = false;  // denominators can be empty; never report 0/0
  bool has_crossed = false;

  // Line-oriented "key<TAB>value" text; absent rates serialize as "n/a".
  std::string to_text() const;
};

// Scores predicted heads/labels against gold annotations. Sentence count and
// per-sentence lengths must line up; a mismatch names the sentence index.
EvalReport score(const std::vector<Sentence>& gold,
                 const std::vector<std::vector<int>>& pred_heads,
                 const std::vector<std::vector<std::string>>& pred_rels);

}  // namespace bidep
