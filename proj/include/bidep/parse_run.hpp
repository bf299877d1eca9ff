// Corpus parsing: a serial reference path and an OpenMP path that fans
// sentences out across threads with shared read-only parameters. Both
// produce identical output for the same model and options.
#pragma once

#include <string>
#include <vector>

#include "bidep/conll.hpp"
#include "bidep/decoder.hpp"
#include "bidep/model.hpp"

namespace bidep {

enum class DecodeMode { kGreedy, kMst };

const char* decode_mode_name(DecodeMode mode);
DecodeMode decode_mode_from_name(const std::string& name);

struct DecodeOptions {
  DecodeMode mode = DecodeMode::kMst;
  bool single_root = false;
};

ParseTree parse_sentence(const Model& model, const std::vector<TokenIds>& tokens,
                         const DecodeOptions& options);

std::vector<ParseTree> parse_corpus_serial(const Model& model,
                                           const std::vector<Sentence>& corpus,
                                           const DecodeOptions& options);

// threads <= 1 falls back to the serial reference.
std::vector<ParseTree> parse_corpus(const Model& model,
                                    const std::vector<Sentence>& corpus,
                                    const DecodeOptions& options, int threads);

// Maps relation ids back to label strings for CoNLL output.
std::vector<std::vector<std::string>> relation_labels(
    const Model& model, const std::vector<ParseTree>& trees);

}  // namespace bidep
