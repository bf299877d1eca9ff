// Per-channel string<->id tables with singleton-aware unknown tokens, plus
// the relation label table.
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bidep/conll.hpp"

namespace bidep {

enum class Channel : std::uint8_t { kForm, kLemma, kCpos, kFpos, kFeats };

constexpr int kNumChannels = 5;

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);

// Ids are dense from 0: 0 = unknown, 1 = ROOT pseudo-token, then every
// training string with frequency >= 2. Lookup never fails; unseen strings
// map to the unknown id.
struct ChannelTable {
  static constexpr int kUnkId = 0;
  static constexpr int kRootId = 1;

  std::vector<std::string> id_to_string;  // [0]="<unk>", [1]="<root>"
  std::unordered_map<std::string, int> string_to_id;

  int lookup(const std::string& s) const {
    auto it = string_to_id.find(s);
    return it == string_to_id.end() ? kUnkId : it->second;
  }
  std::size_t size() const { return id_to_string.size(); }
};

struct Vocabulary {
  std::vector<ChannelTable> channels;   // indexed by Channel
  std::vector<bool> active;             // channel participates in embeddings
  ChannelTable relations;               // no ROOT entry semantics; unk at 0
  std::unordered_map<std::string, std::uint64_t> form_counts;

  const ChannelTable& table(Channel c) const {
    return channels[static_cast<std::size_t>(c)];
  }
  bool is_active(Channel c) const {
    return active[static_cast<std::size_t>(c)];
  }
  std::size_t relation_count() const { return relations.size(); }
  int relation_id(const std::string& rel) const {
    return relations.lookup(rel);
  }
};

// Builds tables over the training sentences for the requested channels.
// Strings seen once map to the unknown id; strings seen twice or more get
// their own id. Throws on an empty training set.
Vocabulary build_vocab(const std::vector<Sentence>& train,
                       const std::vector<Channel>& channels);

// Integer view of a token over the active channels; -1 marks an absent field.
struct TokenIds {
  int form = -1;
  int lemma = -1;
  int cpos = -1;
  int fpos = -1;
  std::vector<int> feats;
};

TokenIds lookup_token(const Vocabulary& vocab, const Token& token);
TokenIds root_token_ids(const Vocabulary& vocab);

}  // namespace bidep
