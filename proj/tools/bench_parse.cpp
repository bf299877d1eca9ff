// Throughput benchmark: serial reference vs OpenMP batch parsing on a
// synthetic corpus, printing sentences/second for each worker count.
#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bidep/model.hpp"
#include "bidep/parse_run.hpp"
#include "bidep/rng.hpp"
#include "bidep/trainer.hpp"
#include "bidep/vocab.hpp"

namespace {

using namespace bidep;

std::vector<Sentence> synthetic_corpus(std::size_t sentences,
                                       std::size_t length, Rng& rng) {
  const std::vector<std::string> words = {"the",  "a",    "cat",  "dog",
                                          "sees", "holds", "fast", "red"};
  const std::vector<std::string> tags = {"D", "N", "V", "J"};
  std::vector<Sentence> corpus(sentences);
  for (Sentence& sentence : corpus) {
    for (std::size_t t = 1; t <= length; ++t) {
      Token token;
      token.form = words[rng.uniform_int(words.size())];
      token.fpos = tags[rng.uniform_int(tags.size())];
      token.gold_head = t == 1 ? 0 : static_cast<int>(rng.uniform_int(t - 1));
      token.gold_rel = "dep";
      sentence.tokens.push_back(std::move(token));
    }
  }
  return corpus;
}

double run_once(const Model& model, const std::vector<Sentence>& corpus,
                int threads) {
  const DecodeOptions options{DecodeMode::kMst, false};
  const auto start = std::chrono::steady_clock::now();
  const std::vector<ParseTree> trees =
      parse_corpus(model, corpus, options, threads);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (trees.size() != corpus.size()) std::abort();
  return static_cast<double>(corpus.size()) / seconds;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t sentences = 200;
  std::size_t length = 12;
  std::size_t hidden = 32;
  try {
    if (argc > 1) sentences = std::stoul(argv[1]);
    if (argc > 2) length = std::stoul(argv[2]);
    if (argc > 3) hidden = std::stoul(argv[3]);
  } catch (const std::exception&) {
    std::cerr << "usage: bench_parse [sentences] [length] [hidden]\n";
    return 2;
  }

  Rng rng(7);
  const std::vector<Sentence> corpus = synthetic_corpus(sentences, length, rng);
  ModelConfig config;
  config.hidden = hidden;
  config.channels = {Channel::kForm, Channel::kFpos};
  Model model = make_model(config, build_vocab(corpus, config.channels));
  init_params(model.params, 7);

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  std::cout << "sentences=" << sentences << " length=" << length
            << " hidden=" << hidden << " max_threads=" << max_threads << '\n';
  const double serial = run_once(model, corpus, 1);
  std::cout << "serial\t" << serial << " sentences/s\n";
  for (int threads = 2; threads <= max_threads; threads *= 2) {
    const double rate = run_once(model, corpus, threads);
    std::cout << "omp-" << threads << '\t' << rate << " sentences/s (speedup "
              << rate / serial << "x)\n";
  }
  return 0;
}
