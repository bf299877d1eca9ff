// Command-line entry point: train, parse, eval and check workflows.
// Exit codes: 0 success, 1 internal failure, 2 usage/config error.
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <deque>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "bidep/archive.hpp"
#include "bidep/config.hpp"
#include "bidep/conll.hpp"
#include "bidep/embedding.hpp"
#include "bidep/evaluator.hpp"
#include "bidep/parse_run.hpp"
#include "bidep/selfcheck.hpp"
#include "bidep/trainer.hpp"

namespace {

using namespace bidep;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_path(const std::string& path, const std::string& what) {
  if (path.empty()) {
    throw UsageError("missing required path: " + what);
  }
}

int cmd_train(const RunConfig& run) {
  require_path(run.train_path, "paths.train (--train)");
  require_path(run.model_out, "paths.model_out (--model-out)");

  const std::vector<Sentence> all_train = read_conll(run.train_path);
  std::vector<Sentence> train_set, dev_set;
  if (!run.dev_path.empty()) {
    train_set = all_train;
    dev_set = read_conll(run.dev_path);
  } else {
    CorpusSplit split = split_dev(all_train, run.seed);
    train_set = std::move(split.train);
    dev_set = std::move(split.dev);
    std::cerr << "no dev path given; held out " << dev_set.size() << " of "
              << all_train.size() << " training sentences\n";
  }

  const ModelConfig model_config = model_config_from(run);
  TrainConfig train_config = train_config_from(run);
  Vocabulary vocab = build_vocab(train_set, model_config.channels);
  Model model = make_model(model_config, std::move(vocab));
  init_params(model.params, run.seed);

  if (run.pretrained_init) {
    require_path(run.pretrained_path,
                 "paths.pretrained_vectors (--pretrained-vectors)");
    const std::size_t loaded =
        load_pretrained(run.pretrained_path, model.params.matrix("emb.form"),
                        model.vocab.table(Channel::kForm));
    std::cerr << "initialized " << loaded << " form columns from "
              << run.pretrained_path << '\n';
  }

  if (train_config.lr_grid_count > 0) {
    train_config.lr =
        lr_grid_search(model, train_set, dev_set, train_config, &std::cerr);
    std::cerr << "grid search selected lr=" << train_config.lr << '\n';
  }

  const TrainResult result =
      train(model, train_set, dev_set, train_config, &std::cerr);
  if (result.unk_relations > 0) {
    std::cerr << result.unk_relations
              << " gold relation labels mapped to the unknown relation\n";
  }
  save_model(model, run.model_out);
  std::cerr << "wrote " << run.model_out << " after " << result.log.size()
            << " epochs\n";
  return 0;
}

int cmd_parse(const RunConfig& run) {
  require_path(run.model_in, "paths.model_in (--model-in)");
  require_path(run.test_path, "paths.test (--test)");
  require_path(run.output_path, "paths.output (--output)");

  const Model model = load_model(run.model_in);
  const std::vector<Sentence> corpus = read_conll(run.test_path);
  const DecodeOptions options{run.decode, run.single_root};
  const std::vector<ParseTree> trees =
      parse_corpus(model, corpus, options, run.threads);

  std::vector<std::vector<int>> heads(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) heads[i] = trees[i].head;
  write_conll(corpus, heads, relation_labels(model, trees), run.output_path);
  return 0;
}

int cmd_eval(const RunConfig& run) {
  require_path(run.test_path, "paths.test (--gold)");
  require_path(run.pred_path, "paths.pred (--pred)");

  const std::vector<Sentence> gold = read_conll(run.test_path);
  const std::vector<Sentence> pred = read_conll(run.pred_path);
  if (pred.size() != gold.size()) {
    throw std::runtime_error("gold has " + std::to_string(gold.size()) +
                             " sentences, predictions have " +
                             std::to_string(pred.size()));
  }
  std::vector<std::vector<int>> pred_heads(pred.size());
  std::vector<std::vector<std::string>> pred_rels(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (const Token& t : pred[i].tokens) {
      pred_heads[i].push_back(t.gold_head);
      pred_rels[i].push_back(t.gold_rel);
    }
  }
  const EvalReport report = score(gold, pred_heads, pred_rels);

  const auto pct = [](Real rate) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << 100 * rate;
    return out.str();
  };
  std::cout << "UAS\t" << pct(report.uas) << '\n';
  std::cout << "LAS\t" << pct(report.las) << '\n';
  std::cout << "counted_tokens\t" << report.counted_tokens << '\n';
  std::cout << "uncrossed_recall\t"
            << (report.has_uncrossed ? pct(report.uncrossed_recall) : "n/a")
            << '\n';
  std::cout << "crossed_recall\t"
            << (report.has_crossed ? pct(report.crossed_recall) : "n/a") << '\n';
  std::cout << "pct_crossed\t" << pct(report.pct_crossed) << '\n';
  return 0;
}

int cmd_check(const RunConfig& run, bool sabotage) {
  const std::vector<CheckOutcome> outcomes = run_self_checks(run.seed, sabotage);
  bool all_passed = true;
  for (const CheckOutcome& outcome : outcomes) {
    std::cout << (outcome.passed ? "PASS" : "FAIL") << '\t' << outcome.name
              << '\t' << outcome.detail << '\n';
    all_passed = all_passed && outcome.passed;
  }
  return all_passed ? 0 : 1;
}

// Every flag mirrors a config-file key. Values are collected as strings and
// funneled through apply_config_value, so a flag and its key cannot drift.
struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
  bool is_switch;            // no argument; applies `switch_value`
  const char* switch_value;  // value applied when the switch is present
};

constexpr FlagSpec kFlags[] = {
    {"--seed", "seed", "random seed", false, nullptr},
    {"--train", "paths.train", "training treebank (CoNLL)", false, nullptr},
    {"--dev", "paths.dev", "dev treebank; omitted = hold out 5% of train",
     false, nullptr},
    {"--test", "paths.test", "input treebank (CoNLL)", false, nullptr},
    {"--gold", "paths.test", "gold treebank (CoNLL)", false, nullptr},
    {"--pred", "paths.pred", "predicted treebank (CoNLL)", false, nullptr},
    {"--pretrained-vectors", "paths.pretrained_vectors",
     "word-vector text file", false, nullptr},
    {"--model-in", "paths.model_in", "archive to load", false, nullptr},
    {"--model-out", "paths.model_out", "archive to write", false, nullptr},
    {"--output", "paths.output", "where to write predictions", false, nullptr},
    {"--hidden-size", "train.hidden_size", "hidden layer size d", false,
     nullptr},
    {"--additive-dim", "train.additive_dim",
     "additive embedding dim (0 = derive)", false, nullptr},
    {"--channels", "train.channels", "comma list: form,lemma,cpos,fpos,feats",
     false, nullptr},
    {"--pretrained-init", "train.pretrained_init",
     "initialize form embeddings from --pretrained-vectors", true, "true"},
    {"--no-pos", "train.use_pos", "drop POS channels (ablation)", true,
     "false"},
    {"--directions", "train.directions", "both | l2r | r2l", false, nullptr},
    {"--no-feed-soft-head", "train.feed_soft_head",
     "do not feed soft headword embeddings to the query GRU", true, "false"},
    {"--exclude-root-soft-head", "train.soft_head_include_root",
     "exclude the root slot from soft headword embeddings", true, "false"},
    {"--lr", "train.lr", "initial learning rate", false, nullptr},
    {"--lr-grid-start", "train.lr_grid_start",
     "first learning-rate grid candidate", false, nullptr},
    {"--lr-grid-count", "train.lr_grid_count",
     "number of grid candidates (step 0.0002)", false, nullptr},
    {"--max-epochs", "train.max_epochs", "epoch cap", false, nullptr},
    {"--decode", "decode.mode", "greedy | mst", false, nullptr},
    {"--single-root", "decode.single_root",
     "allow exactly one arc from the root", true, "true"},
    {"--threads", "parse.threads", "parallel sentence workers", false, nullptr},
};

struct FlagCapture {
  const FlagSpec* spec;
  std::string value;
  bool switch_present = false;
};

void add_flags(CLI::App* sub, std::deque<FlagCapture>& captures,
               const std::vector<std::string>& names) {
  for (const FlagSpec& spec : kFlags) {
    bool wanted = false;
    for (const std::string& n : names) wanted = wanted || n == spec.flag;
    if (!wanted) continue;
    captures.push_back(FlagCapture{&spec, {}, false});
    FlagCapture& capture = captures.back();
    if (spec.is_switch) {
      sub->add_flag(spec.flag, capture.switch_present, spec.help);
    } else {
      sub->add_option(spec.flag, capture.value, spec.help);
    }
  }
}

void apply_flags(RunConfig& run, const CLI::App* sub,
                 const std::deque<FlagCapture>& captures) {
  for (const FlagCapture& capture : captures) {
    const CLI::Option* opt = sub->get_option_no_throw(capture.spec->flag);
    if (opt == nullptr || opt->count() == 0) continue;
    const std::string value = capture.spec->is_switch
                                  ? capture.spec->switch_value
                                  : capture.value;
    apply_config_value(run, capture.spec->key, value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bidep: graph-based dependency parser with agreement-trained "
               "bidirectional attention"};
  app.require_subcommand(1);

  std::string config_path;
  bool sabotage = false;
  // deque: CLI11 keeps references into the captures, which must stay stable.
  std::deque<FlagCapture> train_flags, parse_flags, eval_flags, check_flags;

  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--config", config_path, "key = value config file");
  add_flags(train_cmd, train_flags,
            {"--seed", "--train", "--dev", "--model-out",
             "--pretrained-vectors", "--hidden-size", "--additive-dim",
             "--channels", "--pretrained-init", "--no-pos", "--directions",
             "--no-feed-soft-head", "--exclude-root-soft-head", "--lr",
             "--lr-grid-start", "--lr-grid-count", "--max-epochs"});

  CLI::App* parse_cmd = app.add_subcommand("parse", "parse with a trained model");
  parse_cmd->add_option("--config", config_path, "key = value config file");
  add_flags(parse_cmd, parse_flags,
            {"--seed", "--model-in", "--test", "--output", "--decode",
             "--single-root", "--threads"});

  CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
  eval_cmd->add_option("--config", config_path, "key = value config file");
  add_flags(eval_cmd, eval_flags, {"--seed", "--gold", "--pred"});

  CLI::App* check_cmd = app.add_subcommand("check", "run verification suites");
  check_cmd->add_option("--config", config_path, "key = value config file");
  check_cmd->add_flag("--sabotage-gradient", sabotage,
                      "corrupt one analytic gradient (the check must then fail)");
  add_flags(check_cmd, check_flags, {"--seed"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig run;
    if (!config_path.empty()) load_config_file(run, config_path);
    if (train_cmd->parsed()) {
      apply_flags(run, train_cmd, train_flags);
      return cmd_train(run);
    }
    if (parse_cmd->parsed()) {
      apply_flags(run, parse_cmd, parse_flags);
      return cmd_parse(run);
    }
    if (eval_cmd->parsed()) {
      apply_flags(run, eval_cmd, eval_flags);
      return cmd_eval(run);
    }
    if (check_cmd->parsed()) {
      apply_flags(run, check_cmd, check_flags);
      return cmd_check(run, sabotage);
    }
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
