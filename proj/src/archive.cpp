#include "bidep/archive.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bidep {

namespace {

constexpr char kMagic[4] = {'B', 'D', 'E', 'P'};

void write_bytes(std::ostream& out, const void* data, std::size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

void write_u32(std::ostream& out, std::uint32_t value) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>(value >> (8 * i));
  write_bytes(out, bytes, 4);
}

void write_u64(std::ostream& out, std::uint64_t value) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(value >> (8 * i));
  write_bytes(out, bytes, 8);
}

void write_f64(std::ostream& out, Real value) {
  write_u64(out, std::bit_cast<std::uint64_t>(value));
}

void write_string(std::ostream& out, const std::string& s) {
  write_u64(out, s.size());
  write_bytes(out, s.data(), s.size());
}

void read_bytes(std::istream& in, void* data, std::size_t size,
                const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size) {
    throw std::runtime_error(std::string("truncated archive while reading ") +
                             what);
  }
}

std::uint32_t read_u32(std::istream& in, const char* what) {
  unsigned char bytes[4];
  read_bytes(in, bytes, 4, what);
  std::uint32_t value = 0;
  for (int i = 3; i >= 0; --i) value = (value << 8) | bytes[i];
  return value;
}

std::uint64_t read_u64(std::istream& in, const char* what) {
  unsigned char bytes[8];
  read_bytes(in, bytes, 8, what);
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | bytes[i];
  return value;
}

Real read_f64(std::istream& in, const char* what) {
  return std::bit_cast<Real>(read_u64(in, what));
}

std::string read_string(std::istream& in, const char* what) {
  const std::uint64_t size = read_u64(in, what);
  std::string s(size, '\0');
  if (size > 0) read_bytes(in, s.data(), size, what);
  return s;
}

void write_table(std::ostream& out, const std::string& name,
                 const ChannelTable& table) {
  write_string(out, name);
  write_u64(out, table.id_to_string.size());
  for (const std::string& entry : table.id_to_string) {
    write_string(out, entry);
  }
}

ChannelTable read_table(std::istream& in) {
  ChannelTable table;
  const std::uint64_t count = read_u64(in, "vocabulary size");
  table.id_to_string.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    table.id_to_string.push_back(read_string(in, "vocabulary entry"));
    table.string_to_id[table.id_to_string.back()] = static_cast<int>(i);
  }
  return table;
}

std::string bool_name(bool b) { return b ? "true" : "false"; }

bool bool_from_name(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

}  // namespace

std::string config_echo(const ModelConfig& config) {
  std::ostringstream out;
  out << "model.hidden = " << config.hidden << '\n';
  out << "model.additive = " << config.additive_dim() << '\n';
  out << "model.directions = " << direction_name(config.directions) << '\n';
  out << "model.feed_soft_head = " << bool_name(config.feed_soft_head) << '\n';
  out << "model.soft_head_include_root = "
      << bool_name(config.soft_head_include_root) << '\n';
  out << "model.channels = ";
  for (std::size_t i = 0; i < config.channels.size(); ++i) {
    if (i > 0) out << ',';
    out << channel_name(config.channels[i]);
  }
  out << '\n';
  return out.str();
}

ModelConfig parse_config_echo(const std::string& text) {
  ModelConfig config;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("malformed config echo line: " + line);
    }
    auto trim = [](std::string s) {
      const std::size_t b = s.find_first_not_of(" \t");
      const std::size_t e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "model.hidden") {
      config.hidden = static_cast<std::size_t>(std::stoull(value));
    } else if (key == "model.additive") {
      config.additive = static_cast<std::size_t>(std::stoull(value));
    } else if (key == "model.directions") {
      config.directions = direction_from_name(value);
    } else if (key == "model.feed_soft_head") {
      config.feed_soft_head = bool_from_name(value);
    } else if (key == "model.soft_head_include_root") {
      config.soft_head_include_root = bool_from_name(value);
    } else if (key == "model.channels") {
      config.channels.clear();
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) {
        if (!item.empty()) config.channels.push_back(channel_from_name(item));
      }
    } else {
      throw std::runtime_error("unknown config echo key: " + key);
    }
  }
  return config;
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open archive for writing: " + path);
  }
  write_bytes(out, kMagic, 4);
  write_u32(out, kArchiveVersion);
  write_string(out, config_echo(model.config));

  write_u32(out, static_cast<std::uint32_t>(model.config.channels.size()) + 1);
  for (const Channel c : model.config.channels) {
    write_table(out, channel_name(c), model.vocab.table(c));
  }
  write_table(out, "relations", model.vocab.relations);

  const auto& tensors = model.params.tensors();
  write_u64(out, tensors.size());
  for (const NamedTensor& t : tensors) {
    write_string(out, t.name);
    if (t.is_matrix) {
      write_u32(out, 2);
      write_u64(out, t.mat.rows);
      write_u64(out, t.mat.cols);
    } else {
      write_u32(out, 1);
      write_u64(out, t.vec.dim());
    }
  }
  for (const NamedTensor& t : tensors) {
    const Real* data = t.flat();
    for (std::size_t i = 0; i < t.size(); ++i) write_f64(out, data[i]);
  }
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing archive: " + path);
  }
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open archive: " + path);
  }
  char magic[4];
  read_bytes(in, magic, 4, "magic");
  if (std::string(magic, 4) != std::string(kMagic, 4)) {
    throw std::runtime_error("not a model archive: " + path);
  }
  const std::uint32_t version = read_u32(in, "version");
  if (version != kArchiveVersion) {
    throw std::runtime_error(
        "archive version " + std::to_string(version) +
        " is not supported; this build reads version " +
        std::to_string(kArchiveVersion));
  }
  const ModelConfig config = parse_config_echo(read_string(in, "config echo"));

  Vocabulary vocab;
  vocab.channels.resize(kNumChannels);
  vocab.active.assign(kNumChannels, false);
  const std::uint32_t table_count = read_u32(in, "table count");
  for (std::uint32_t i = 0; i < table_count; ++i) {
    const std::string name = read_string(in, "table name");
    ChannelTable table = read_table(in);
    if (name == "relations") {
      vocab.relations = std::move(table);
    } else {
      const Channel c = channel_from_name(name);
      vocab.channels[static_cast<std::size_t>(c)] = std::move(table);
      vocab.active[static_cast<std::size_t>(c)] = true;
    }
  }

  Model model = make_model(config, std::move(vocab));
  const std::uint64_t tensor_count = read_u64(in, "tensor count");
  if (tensor_count != model.params.tensors().size()) {
    throw std::runtime_error("archive lists " + std::to_string(tensor_count) +
                             " tensors, model has " +
                             std::to_string(model.params.tensors().size()));
  }
  for (NamedTensor& t : model.params.tensors()) {
    const std::string name = read_string(in, "tensor name");
    if (name != t.name) {
      throw std::runtime_error("archive tensor '" + name +
                               "' does not match expected '" + t.name + "'");
    }
    const std::uint32_t ndims = read_u32(in, "tensor rank");
    if (t.is_matrix) {
      if (ndims != 2 || read_u64(in, "rows") != t.mat.rows ||
          read_u64(in, "cols") != t.mat.cols) {
        throw std::runtime_error("archive shape mismatch for tensor " + t.name);
      }
    } else {
      if (ndims != 1 || read_u64(in, "dim") != t.vec.dim()) {
        throw std::runtime_error("archive shape mismatch for tensor " + t.name);
      }
    }
  }
  for (NamedTensor& t : model.params.tensors()) {
    Real* data = t.flat();
    for (std::size_t i = 0; i < t.size(); ++i) {
      data[i] = read_f64(in, "tensor payload");
    }
  }
  return model;
}

}  // namespace bidep
