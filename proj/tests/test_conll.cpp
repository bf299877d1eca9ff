#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "bidep/conll.hpp"
#include "bidep/rng.hpp"
#include "test_util.hpp"

using namespace bidep;
using bidep::test::TempDir;
using bidep::test::fixture_path;

namespace {

// Independent pair oracle: two arcs cross iff exactly one endpoint of the
// second one falls strictly inside the first one's span.
std::set<std::size_t> crossed_by_pair_oracle(const std::vector<int>& heads) {
  std::set<std::size_t> out;
  const std::size_t n = heads.size();
  for (std::size_t a = 1; a <= n; ++a) {
    if (heads[a - 1] == 0) continue;
    const std::size_t alo = std::min<std::size_t>(a, heads[a - 1]);
    const std::size_t ahi = std::max<std::size_t>(a, heads[a - 1]);
    for (std::size_t b = 1; b <= n; ++b) {
      if (b == a || heads[b - 1] == 0) continue;
      const std::size_t blo = std::min<std::size_t>(b, heads[b - 1]);
      const std::size_t bhi = std::max<std::size_t>(b, heads[b - 1]);
      // Crossing = one endpoint of b strictly inside a's span while the other
      // is strictly outside; arcs sharing a position never cross.
      const auto inside = [&](std::size_t x) { return alo < x && x < ahi; };
      const auto outside = [&](std::size_t x) { return x < alo || x > ahi; };
      if ((inside(blo) && outside(bhi)) || (inside(bhi) && outside(blo))) {
        out.insert(a);
        out.insert(b);
      }
    }
  }
  return out;
}

Sentence sentence_with_heads(const std::vector<int>& heads) {
  Sentence s;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    Token t;
    t.form = "w" + std::to_string(i + 1);
    t.fpos = "X";
    t.gold_head = heads[i];
    t.gold_rel = "dep";
    s.tokens.push_back(std::move(t));
  }
  return s;
}

}  // namespace

TEST_CASE("reading the bundled fixture recovers every field") {
  const auto sents = read_conll(fixture_path("mini.conll"));
  REQUIRE(sents.size() == 3);

  const Sentence& s0 = sents[0];
  REQUIRE(s0.size() == 4);
  CHECK(s0.tokens[0].form == "The");
  CHECK(s0.tokens[0].lemma == "the");
  CHECK(s0.tokens[0].cpos == "D");
  CHECK(s0.tokens[0].fpos == "DT");
  CHECK(s0.tokens[0].feats.empty());
  CHECK(s0.tokens[0].gold_head == 2);
  CHECK(s0.tokens[0].gold_rel == "det");
  CHECK(s0.tokens[1].feats == std::vector<std::string>{"num=sg"});
  CHECK(s0.tokens[2].feats == std::vector<std::string>{"num=sg", "per=3"});
  CHECK(s0.tokens[3].lemma.empty());  // '_' reads back as absent
  CHECK(s0.tokens[3].form == ".");

  const Sentence& s1 = sents[1];
  CHECK(s1.tokens[0].gold_head == 3);
  CHECK(s1.tokens[1].gold_head == 4);
  CHECK(s1.tokens[2].gold_head == 0);
  CHECK(s1.tokens[3].gold_head == 3);

  REQUIRE(sents[2].size() == 1);
  CHECK(sents[2].tokens[0].form == "Yes");
  CHECK(sents[2].tokens[0].gold_head == 0);
}

TEST_CASE("read then write reproduces the fixture byte for byte") {
  const std::string src = fixture_path("mini.conll");
  const auto sents = read_conll(src);
  std::vector<std::vector<int>> heads;
  std::vector<std::vector<std::string>> rels;
  for (const auto& s : sents) {
    heads.emplace_back();
    rels.emplace_back();
    for (const auto& t : s.tokens) {
      heads.back().push_back(t.gold_head);
      rels.back().push_back(t.gold_rel);
    }
  }
  TempDir tmp;
  const std::string out = tmp.file("roundtrip.conll");
  write_conll(sents, heads, rels, out);
  CHECK(test::read_file(out) == test::read_file(src));
}

TEST_CASE("reader tolerates CRLF and a missing final blank line") {
  TempDir tmp;
  const std::string path = tmp.file("crlf.conll");
  test::write_file(path,
                   "1\thi\t_\t_\tUH\t_\t0\ttop\t_\t_\r\n\r\n"
                   "1\tbye\t_\t_\tUH\t_\t0\ttop\t_\t_");
  const auto sents = read_conll(path);
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].tokens[0].form == "hi");
  CHECK(sents[1].tokens[0].form == "bye");
}

TEST_CASE("malformed rows fail with the path and line number") {
  TempDir tmp;
  const auto expect_error = [&](const std::string& content,
                                const std::string& fragment,
                                const std::string& line_tag) {
    const std::string path = tmp.file("bad.conll");
    test::write_file(path, content);
    try {
      read_conll(path);
      FAIL_CHECK("expected ConllError for: " << fragment);
    } catch (const ConllError& e) {
      const std::string what = e.what();
      INFO("message: ", what);
      CHECK(what.find(fragment) != std::string::npos);
      CHECK(what.find(line_tag) != std::string::npos);
    }
  };

  expect_error("1\tonly\tfour\tcols\n", "10 tab-separated columns", ":1:");
  expect_error("x\thi\t_\t_\tUH\t_\t0\ttop\t_\t_\n", "non-integer ID", ":1:");
  expect_error(
      "1\thi\t_\t_\tUH\t_\t0\ttop\t_\t_\n3\tho\t_\t_\tUH\t_\t0\ttop\t_\t_\n",
      "non-contiguous ID", ":2:");
  expect_error("1\thi\t_\t_\tUH\t_\tbad\ttop\t_\t_\n", "non-integer HEAD",
               ":1:");
  expect_error("1\thi\t_\t_\tUH\t_\t1\ttop\t_\t_\n", "own head", ":1:");
  expect_error("1\thi\t_\t_\tUH\t_\t5\ttop\t_\t_\n\n", "out of range", ":2:");
  expect_error("1\t\t_\t_\tUH\t_\t0\ttop\t_\t_\n", "empty FORM", ":1:");
  CHECK_THROWS_AS(read_conll(tmp.file("no-such-file.conll")), ConllError);
}

TEST_CASE("write_conll validates alignment") {
  const auto sents = read_conll(fixture_path("mini.conll"));
  TempDir tmp;
  CHECK_THROWS_AS(write_conll(sents, {}, {}, tmp.file("x.conll")), ConllError);
  std::vector<std::vector<int>> heads(sents.size());
  std::vector<std::vector<std::string>> rels(sents.size());
  CHECK_THROWS_AS(write_conll(sents, heads, rels, tmp.file("x.conll")),
                  ConllError);  // per-sentence length mismatch
}

TEST_CASE("is_valid_tree accepts trees and rejects everything else") {
  CHECK(is_valid_tree({2, 0, 2}));
  CHECK(is_valid_tree({0, 0, 0}));  // several root children
  CHECK(is_valid_tree({0}));
  CHECK_FALSE(is_valid_tree({}));
  CHECK_FALSE(is_valid_tree({2, 3, 1}));   // three-cycle
  CHECK_FALSE(is_valid_tree({0, 3, 2}));   // two-cycle off a rooted token
  CHECK_FALSE(is_valid_tree({1, 0}));      // self-head
  CHECK_FALSE(is_valid_tree({4, 0}));      // head out of range
  CHECK_FALSE(is_valid_tree({-1, 0}));
}

TEST_CASE("crossed_arcs matches hand-worked cases") {
  CHECK(crossed_arcs(sentence_with_heads({3, 4, 0, 3})) ==
        std::set<std::size_t>{1, 2});
  CHECK(crossed_arcs(sentence_with_heads({2, 3, 0, 5, 3})).empty());
  // A root-headed arc spans positions 0..2 here, which would interleave with
  // the 1..3 arc if root arcs could cross; they cannot.
  CHECK(crossed_arcs(sentence_with_heads({3, 0, 0})).empty());
  CHECK(crossed_arcs(sentence_with_heads({0})).empty());
}

TEST_CASE("crossed_arcs agrees with the pair oracle on random trees") {
  Rng rng(2024);
  int tested = 0;
  while (tested < 300) {
    const std::size_t n = 2 + rng.uniform_int(5);  // 2..6 tokens
    std::vector<int> heads(n);
    for (auto& h : heads) h = static_cast<int>(rng.uniform_int(n + 1));
    if (!is_valid_tree(heads)) continue;
    ++tested;
    CHECK(crossed_arcs(sentence_with_heads(heads)) ==
          crossed_by_pair_oracle(heads));
  }
}

TEST_CASE("split_dev holds out 5 percent deterministically") {
  std::vector<Sentence> sents;
  for (int i = 0; i < 40; ++i)
    sents.push_back(sentence_with_heads({0, 1}));
  for (std::size_t i = 0; i < sents.size(); ++i)
    sents[i].tokens[0].form = "s" + std::to_string(i);

  const CorpusSplit a = split_dev(sents, 9);
  CHECK(a.dev.size() == 2);  // llround(0.05 * 40)
  CHECK(a.train.size() == 38);
  CHECK(a.split_seed == 9);

  const CorpusSplit b = split_dev(sents, 9);
  REQUIRE(b.dev.size() == a.dev.size());
  for (std::size_t i = 0; i < a.dev.size(); ++i)
    CHECK(a.dev[i].tokens[0].form == b.dev[i].tokens[0].form);

  // Nothing is lost or duplicated.
  std::multiset<std::string> seen;
  for (const auto& s : a.train) seen.insert(s.tokens[0].form);
  for (const auto& s : a.dev) seen.insert(s.tokens[0].form);
  CHECK(seen.size() == 40);
  std::multiset<std::string> expect;
  for (const auto& s : sents) expect.insert(s.tokens[0].form);
  CHECK(seen == expect);

  std::vector<Sentence> tiny(19, sentence_with_heads({0}));
  CHECK_THROWS_AS(split_dev(tiny, 1), ConllError);
  std::vector<Sentence> twenty(20, sentence_with_heads({0}));
  CHECK(split_dev(twenty, 1).dev.size() == 1);
}
