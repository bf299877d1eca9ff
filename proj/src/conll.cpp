#include "bidep/conll.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bidep/rng.hpp"

namespace bidep {

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void fail_at(const std::string& path, std::size_t line_no,
                          const std::string& msg) {
  throw ConllError(path + ":" + std::to_string(line_no) + ": " + msg);
}

void finish_sentence(std::vector<Sentence>& out, Sentence& cur,
                     const std::string& path, std::size_t line_no) {
  if (cur.tokens.empty()) return;
  const int n = static_cast<int>(cur.tokens.size());
  for (int i = 0; i < n; ++i) {
    const int h = cur.tokens[i].gold_head;
    if (h < 0 || h > n)
      fail_at(path, line_no, "HEAD " + std::to_string(h) + " out of range 0.." +
                                 std::to_string(n));
  }
  out.push_back(std::move(cur));
  cur = Sentence{};
}

}  // namespace

std::vector<Sentence> read_conll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConllError("cannot open " + path);

  std::vector<Sentence> out;
  Sentence cur;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish_sentence(out, cur, path, line_no);
      continue;
    }
    const std::vector<std::string> cols = split_on(line, '\t');
    if (cols.size() != 10)
      fail_at(path, line_no,
              "expected 10 tab-separated columns, found " +
                  std::to_string(cols.size()));

    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument(cols[0]);
    } catch (const std::exception&) {
      fail_at(path, line_no, "non-integer ID '" + cols[0] + "'");
    }
    if (id != static_cast<int>(cur.tokens.size()) + 1)
      fail_at(path, line_no, "non-contiguous ID " + std::to_string(id));

    Token tok;
    tok.form = cols[1];
    if (tok.form.empty()) fail_at(path, line_no, "empty FORM");
    tok.lemma = cols[2] == "_" ? std::string() : cols[2];
    tok.cpos = cols[3] == "_" ? std::string() : cols[3];
    tok.fpos = cols[4];
    if (cols[5] != "_") tok.feats = split_on(cols[5], '|');
    try {
      std::size_t used = 0;
      tok.gold_head = std::stoi(cols[6], &used);
      if (used != cols[6].size()) throw std::invalid_argument(cols[6]);
    } catch (const std::exception&) {
      fail_at(path, line_no, "non-integer HEAD '" + cols[6] + "'");
    }
    if (tok.gold_head == id)
      fail_at(path, line_no, "token is its own head");
    tok.gold_rel = cols[7];
    cur.tokens.push_back(std::move(tok));
  }
  finish_sentence(out, cur, path, line_no + 1);
  return out;
}

bool is_valid_tree(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return false;
  for (int t = 0; t < n; ++t)
    if (heads[t] < 0 || heads[t] > n || heads[t] == t + 1) return false;
  // Every token must reach 0 without revisiting itself.
  for (int t = 1; t <= n; ++t) {
    int cur = t;
    int steps = 0;
    while (cur != 0) {
      cur = heads[cur - 1];
      if (++steps > n) return false;  // cycle
    }
  }
  return true;
}

void write_conll(const std::vector<Sentence>& sentences,
                 const std::vector<std::vector<int>>& heads,
                 const std::vector<std::vector<std::string>>& rels,
                 const std::string& path) {
  if (sentences.size() != heads.size() || sentences.size() != rels.size())
    throw ConllError("write_conll: sentence/head/rel counts differ");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConllError("cannot open " + path + " for writing");
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const Sentence& sent = sentences[s];
    if (heads[s].size() != sent.size() || rels[s].size() != sent.size())
      throw ConllError("write_conll: length mismatch at sentence " +
                       std::to_string(s));
    for (std::size_t t = 0; t < sent.size(); ++t) {
      const Token& tok = sent.tokens[t];
      out << (t + 1) << '\t' << tok.form << '\t'
          << (tok.lemma.empty() ? "_" : tok.lemma) << '\t'
          << (tok.cpos.empty() ? "_" : tok.cpos) << '\t' << tok.fpos << '\t';
      if (tok.feats.empty()) {
        out << '_';
      } else {
        for (std::size_t f = 0; f < tok.feats.size(); ++f) {
          if (f) out << '|';
          out << tok.feats[f];
        }
      }
      out << '\t' << heads[s][t] << '\t' << rels[s][t] << '\t' << '_' << '\t'
          << '_' << '\n';
    }
    out << '\n';
  }
}

std::set<std::size_t> crossed_arcs(const Sentence& sentence) {
  const std::size_t n = sentence.size();
  std::set<std::size_t> crossed;
  for (std::size_t a = 1; a <= n; ++a) {
    const int ha = sentence.tokens[a - 1].gold_head;
    if (ha == 0) continue;
    const std::size_t alo = std::min<std::size_t>(a, ha);
    const std::size_t ahi = std::max<std::size_t>(a, ha);
    for (std::size_t b = a + 1; b <= n; ++b) {
      const int hb = sentence.tokens[b - 1].gold_head;
      if (hb == 0) continue;
      const std::size_t blo = std::min<std::size_t>(b, hb);
      const std::size_t bhi = std::max<std::size_t>(b, hb);
      const bool cross = (alo < blo && blo < ahi && ahi < bhi) ||
                         (blo < alo && alo < bhi && bhi < ahi);
      if (cross) {
        crossed.insert(a);
        crossed.insert(b);
      }
    }
  }
  return crossed;
}

CorpusSplit split_dev(const std::vector<Sentence>& sentences,
                      std::uint64_t seed) {
  if (sentences.size() < 20)
    throw ConllError("split_dev: need at least 20 sentences, have " +
                     std::to_string(sentences.size()));
  const std::size_t n_dev = static_cast<std::size_t>(
      std::llround(0.05 * static_cast<double>(sentences.size())));

  std::vector<std::size_t> order(sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<bool> in_dev(sentences.size(), false);
  for (std::size_t i = 0; i < n_dev; ++i) in_dev[order[i]] = true;

  CorpusSplit split;
  split.split_seed = seed;
  for (std::size_t i = 0; i < sentences.size(); ++i)
    (in_dev[i] ? split.dev : split.train).push_back(sentences[i]);
  return split;
}

}  // namespace bidep
