#include "bidep/vocab.hpp"

#include <map>
#include <stdexcept>

namespace bidep {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::kForm: return "form";
    case Channel::kLemma: return "lemma";
    case Channel::kCpos: return "cpos";
    case Channel::kFpos: return "fpos";
    case Channel::kFeats: return "feats";
  }
  return "?";
}

Channel channel_from_name(const std::string& name) {
  for (int i = 0; i < kNumChannels; ++i) {
    const Channel c = static_cast<Channel>(i);
    if (name == channel_name(c)) return c;
  }
  throw std::invalid_argument("unknown channel '" + name + "'");
}

namespace {

// Channel values of one token; empty strings mean absent and contribute
// nothing.
std::vector<std::string> channel_values(const Token& tok, Channel c) {
  switch (c) {
    case Channel::kForm: return {tok.form};
    case Channel::kLemma: return tok.lemma.empty()
                              ? std::vector<std::string>{}
                              : std::vector<std::string>{tok.lemma};
    case Channel::kCpos: return tok.cpos.empty()
                             ? std::vector<std::string>{}
                             : std::vector<std::string>{tok.cpos};
    case Channel::kFpos: return {tok.fpos};
    case Channel::kFeats: return tok.feats;
  }
  return {};
}

}  // namespace

Vocabulary build_vocab(const std::vector<Sentence>& train,
                       const std::vector<Channel>& channels) {
  if (train.empty()) throw std::invalid_argument("build_vocab: empty training set");

  Vocabulary vocab;
  vocab.channels.resize(kNumChannels);
  vocab.active.assign(kNumChannels, false);

  for (Channel c : channels) {
    const std::size_t ci = static_cast<std::size_t>(c);
    vocab.active[ci] = true;
    // Ordered map so id assignment does not depend on hash order.
    std::map<std::string, std::uint64_t> counts;
    for (const Sentence& sent : train)
      for (const Token& tok : sent.tokens)
        for (const std::string& v : channel_values(tok, c)) ++counts[v];

    ChannelTable& table = vocab.channels[ci];
    table.id_to_string = {"<unk>", "<root>"};
    for (const auto& [s, cnt] : counts) {
      if (cnt >= 2) {
        table.string_to_id.emplace(s, static_cast<int>(table.id_to_string.size()));
        table.id_to_string.push_back(s);
      }
    }
    if (c == Channel::kForm)
      vocab.form_counts.insert(counts.begin(), counts.end());
  }

  // Relation labels: every distinct training label gets an id; unseen labels
  // fall back to the unknown id at parse time.
  std::map<std::string, std::uint64_t> rel_counts;
  for (const Sentence& sent : train)
    for (const Token& tok : sent.tokens) ++rel_counts[tok.gold_rel];
  vocab.relations.id_to_string = {"<unk-rel>"};
  for (const auto& [s, cnt] : rel_counts) {
    vocab.relations.string_to_id.emplace(
        s, static_cast<int>(vocab.relations.id_to_string.size()));
    vocab.relations.id_to_string.push_back(s);
  }
  return vocab;
}

TokenIds lookup_token(const Vocabulary& vocab, const Token& token) {
  TokenIds ids;
  if (vocab.is_active(Channel::kForm))
    ids.form = vocab.table(Channel::kForm).lookup(token.form);
  if (vocab.is_active(Channel::kLemma) && !token.lemma.empty())
    ids.lemma = vocab.table(Channel::kLemma).lookup(token.lemma);
  if (vocab.is_active(Channel::kCpos) && !token.cpos.empty())
    ids.cpos = vocab.table(Channel::kCpos).lookup(token.cpos);
  if (vocab.is_active(Channel::kFpos))
    ids.fpos = vocab.table(Channel::kFpos).lookup(token.fpos);
  if (vocab.is_active(Channel::kFeats))
    for (const std::string& f : token.feats)
      ids.feats.push_back(vocab.table(Channel::kFeats).lookup(f));
  return ids;
}

TokenIds root_token_ids(const Vocabulary& vocab) {
  TokenIds ids;
  if (vocab.is_active(Channel::kForm)) ids.form = ChannelTable::kRootId;
  if (vocab.is_active(Channel::kLemma)) ids.lemma = ChannelTable::kRootId;
  if (vocab.is_active(Channel::kCpos)) ids.cpos = ChannelTable::kRootId;
  if (vocab.is_active(Channel::kFpos)) ids.fpos = ChannelTable::kRootId;
  if (vocab.is_active(Channel::kFeats)) ids.feats = {ChannelTable::kRootId};
  return ids;
}

}  // namespace bidep
