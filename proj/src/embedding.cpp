#include "bidep/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bidep {

namespace {

[[noreturn]] void fail_at(const std::string& path, std::size_t line,
                          const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

}  // namespace

TokenEmbedder::TokenEmbedder(Tape& tape, const EmbeddingTables& tables,
                             const Projection& proj)
    : tape_(&tape), tables_(tables) {
  if (proj.weight == nullptr || proj.bias == nullptr) {
    throw std::logic_error("token embedder requires a projection");
  }
  additive_dim_ = proj.weight->cols;
  proj_weight_ = tape_->input(*proj.weight);
  proj_bias_ = tape_->input(*proj.bias);
}

NodeId TokenEmbedder::column_node(Channel channel, int id) {
  const auto key = std::make_pair(static_cast<int>(channel), id);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const RealMatrix* table = tables_.table[static_cast<std::size_t>(channel)];
  if (table == nullptr) {
    throw std::logic_error("embedding lookup on inactive channel " +
                           std::string(channel_name(channel)));
  }
  if (table->rows != additive_dim_) {
    throw DimensionError("embedding table " + std::string(channel_name(channel)) +
                         " has " + std::to_string(table->rows) +
                         " rows, projection expects " +
                         std::to_string(additive_dim_));
  }
  const NodeId node = tape_->input(table->column(static_cast<std::size_t>(id)));
  cache_.emplace(key, node);
  used_.push_back(ColumnUse{channel, id, node});
  return node;
}

NodeId TokenEmbedder::embed(const TokenIds& ids) {
  std::vector<NodeId> parts;
  if (ids.form >= 0) parts.push_back(column_node(Channel::kForm, ids.form));
  if (ids.lemma >= 0) parts.push_back(column_node(Channel::kLemma, ids.lemma));
  if (ids.cpos >= 0) parts.push_back(column_node(Channel::kCpos, ids.cpos));
  if (ids.fpos >= 0) parts.push_back(column_node(Channel::kFpos, ids.fpos));
  for (int feat : ids.feats) {
    parts.push_back(column_node(Channel::kFeats, feat));
  }
  NodeId summed;
  if (parts.empty()) {
    summed = tape_->input(RealVector(additive_dim_));
  } else {
    summed = tape_->add(parts);
  }
  const NodeId projected = tape_->matvec(proj_weight_, summed);
  return tape_->lrel(tape_->add(projected, proj_bias_));
}

std::size_t load_pretrained(const std::string& path, RealMatrix& form_table,
                            const ChannelTable& form_vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open pretrained vector file: " + path);
  }
  const std::size_t dim = form_table.rows;
  std::size_t loaded = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<Real> values;
    std::string item;
    bool malformed = false;
    while (fields >> item) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) malformed = true;
      } catch (const std::exception&) {
        malformed = true;
      }
      if (malformed) break;
    }
    if (first_content_line) {
      first_content_line = false;
      // Optional "count dim" header: two integer fields and nothing else.
      if (values.size() == 1 && !malformed) {
        double whole = 0.0;
        const bool word_is_int =
            !word.empty() &&
            word.find_first_not_of("0123456789") == std::string::npos;
        if (word_is_int && std::modf(values[0], &whole) == 0.0) continue;
      }
    }
    if (malformed) {
      fail_at(path, line_no, "malformed vector component '" + item + "'");
    }
    if (values.size() != dim) {
      fail_at(path, line_no,
              "vector has " + std::to_string(values.size()) +
                  " components, expected " + std::to_string(dim));
    }
    auto it = form_vocab.string_to_id.find(word);
    if (it == form_vocab.string_to_id.end()) continue;
    const int id = it->second;
    if (id == ChannelTable::kUnkId) continue;
    for (std::size_t r = 0; r < dim; ++r) {
      form_table.at(r, static_cast<std::size_t>(id)) = values[r];
    }
    ++loaded;
  }
  return loaded;
}

}  // namespace bidep
