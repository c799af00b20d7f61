#include "cli.h"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <thread>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <nlohmann/json.hpp>

#include "manifest.h"
#include "termcorpus/analytics.h"
#include "termcorpus/corpus_io.h"
#include "termcorpus/corrupter.h"
#include "termcorpus/error.h"
#include "termcorpus/matcher.h"
#include "termcorpus/metrics.h"
#include "termcorpus/objective.h"
#include "termcorpus/splitter.h"
#include "termcorpus/version.h"

namespace termcorpus::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kThreadsEnv = "TERMCORPUS_THREADS";

struct Globals {
  std::uint64_t seed = 42;
  unsigned threads = 1;
};

struct MatchArgs {
  std::string src, tgt, dict, out;
  std::size_t min_chars = 4;
  std::size_t max_ngram = 20;
  std::size_t max_tokens = 80;
  std::string filter_side = "target";
  bool casefold = false;
  bool multi_pass = false;
};

struct SplitArgs {
  std::string in, out_dir;
  std::size_t heldout_size = 3000;
  std::string dup_mode = "grouped";
};

struct CorruptArgs {
  std::string in, tgt, out, vocab;
  double ratio = 0.5;
  double geometric_p = 0.2;
  std::size_t min_span = 1;
  std::size_t max_span = 10;
  std::string mask_token = "[MASK]";
  double mask_prob = 0.8;
  double random_prob = 0.1;
  double keep_prob = 0.1;
  std::vector<std::string> reserved;
};

struct StatsArgs {
  std::string in, out_dir;
  std::size_t top_k = 10;
};

struct EvalArgs {
  std::string ref, hyp, out, details;
};

struct LossArgs {
  std::string in, out;
  double gamma = 0.5;
  bool per_token = false;
};

struct UniqueArgs {
  std::string split_dir, out_dir;
};

unsigned default_threads() {
  if (const char* env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (*end != '\0' || value < 1) {
      throw ValidationError(std::string(kThreadsEnv) + " must be a positive integer");
    }
    return static_cast<unsigned>(value);
  }
  return 1;
}

fs::path parent_dir(const fs::path& file) {
  const auto parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_json(const fs::path& path, const ordered_json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::vector<SentencePair> pairs_of(const std::vector<MatchedSentence>& sentences) {
  std::vector<SentencePair> pairs;
  pairs.reserve(sentences.size());
  for (const auto& s : sentences) pairs.push_back(s.pair);
  return pairs;
}

// Writes `<dir>/<name>.{jsonl,src,tgt}` and registers them as outputs.
void write_part(const fs::path& dir, const std::string& name,
                const std::vector<MatchedSentence>& sentences, RunManifest& manifest) {
  const auto jsonl = dir / (name + ".jsonl");
  const auto src = dir / (name + ".src");
  const auto tgt = dir / (name + ".tgt");
  save_matched_corpus(sentences, jsonl);
  save_corpus(pairs_of(sentences), src, tgt);
  for (const auto& p : {jsonl, src, tgt}) manifest.add_output(p);
}

int run_match(const MatchArgs& a, const Globals& g, std::ostream& out) {
  const fs::path out_path(a.out);
  const auto dir = parent_dir(out_path);
  ensure_dir(dir);

  const auto corpus = load_corpus(a.src, a.tgt);
  const auto filtered = filter_corpus_by_length(corpus, a.max_tokens);
  const auto dictionary = filter_dictionary(
      load_dictionary(a.dict),
      DictionaryFilter{a.min_chars, a.max_ngram, parse_filter_side(a.filter_side)});
  const auto matched = build_matched_corpus(
      filtered, dictionary, MatchOptions{a.casefold, a.multi_pass}, g.threads);
  save_matched_corpus(matched.sentences, out_path);

  RunManifest manifest("match", dir);
  manifest.set_config({{"src", manifest.relative(a.src)},
                       {"tgt", manifest.relative(a.tgt)},
                       {"dict", manifest.relative(a.dict)},
                       {"out", manifest.relative(a.out)},
                       {"min-chars", a.min_chars},
                       {"max-ngram", a.max_ngram},
                       {"max-tokens", a.max_tokens},
                       {"filter-side", a.filter_side},
                       {"casefold", a.casefold},
                       {"multi-pass", a.multi_pass}});
  for (const auto& p : {a.src, a.tgt, a.dict}) manifest.add_input(p);
  manifest.add_output(out_path);
  manifest.write();

  out << "matched " << matched.size() << " of " << filtered.size()
      << " sentences (" << corpus.size() << " before length filtering) with "
      << dictionary.size() << " dictionary entries\n";
  return kOk;
}

int run_split(const SplitArgs& a, const Globals& g, std::ostream& out) {
  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  const auto corpus = load_matched_corpus(a.in);
  const SplitConfig config{a.heldout_size, g.seed, parse_dup_mode(a.dup_mode), g.threads};
  const auto result = split(corpus, config);

  RunManifest manifest("split", dir);
  write_part(dir, "train", result.train, manifest);
  write_part(dir, "valid", result.valid, manifest);
  write_part(dir, "test", result.test, manifest);

  ordered_json buckets = ordered_json::array();
  for (const auto& [k, counts] : result.bucket_report) {
    buckets.push_back({{"max_ngram", k},
                       {"train", counts[kTrain]},
                       {"valid", counts[kValid]},
                       {"test", counts[kTest]}});
  }
  const auto sizes = result.sizes();
  const ordered_json report{
      {"seed", result.seed_used},
      {"dup_mode", to_string(result.dup_mode)},
      {"heldout_size", result.heldout_size},
      {"sizes", {{"train", sizes[kTrain]}, {"valid", sizes[kValid]}, {"test", sizes[kTest]}}},
      {"duplicate_groups", result.duplicate_groups},
      {"duplicate_sentences", result.duplicate_sentences},
      {"buckets", std::move(buckets)}};
  const auto report_path = dir / "split_report.json";
  write_json(report_path, report);
  manifest.add_output(report_path);

  manifest.set_config({{"in", manifest.relative(a.in)},
                       {"out-dir", "."},
                       {"heldout-size", a.heldout_size},
                       {"dup-mode", a.dup_mode}});
  manifest.set_seed(g.seed);
  manifest.add_input(a.in);
  manifest.write();

  out << "split " << corpus.size() << " sentences into " << sizes[kTrain] << "/"
      << sizes[kValid] << "/" << sizes[kTest] << " (train/valid/test)\n";
  return kOk;
}

std::vector<std::string> read_vocabulary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& t : split_tokens(line)) vocab.push_back(std::move(t));
  }
  return vocab;
}

int run_corrupt(const CorruptArgs& a, const Globals& g, std::ostream& out) {
  if (a.in.empty() == a.tgt.empty()) {
    throw ValidationError("corrupt needs exactly one of --in (matched JSONL) or --tgt (text)");
  }
  const fs::path out_path(a.out);
  const auto dir = parent_dir(out_path);
  ensure_dir(dir);

  std::vector<std::pair<SentenceId, Sentence>> targets;
  if (!a.in.empty()) {
    for (auto& s : load_matched_corpus(a.in).sentences) {
      targets.emplace_back(s.id(), std::move(s.pair.target));
    }
  } else {
    std::ifstream in(a.tgt, std::ios::binary);
    if (!in) throw IoError("cannot open '" + a.tgt + "' for reading");
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      auto tokens = split_tokens(line);
      if (tokens.empty()) {
        throw ValidationError("target line " + std::to_string(n) + " is empty");
      }
      targets.emplace_back(n - 1, Sentence(std::move(tokens)));
    }
  }

  CorruptionConfig config;
  config.geometric_p = a.geometric_p;
  config.min_span = a.min_span;
  config.max_span = a.max_span;
  config.ratio = a.ratio;
  config.mask_token = a.mask_token;
  config.replace_probs = {a.mask_prob, a.random_prob, a.keep_prob};
  config.reserved_tokens = a.reserved;
  config.seed = g.seed;
  if (!a.vocab.empty()) {
    config.vocabulary = read_vocabulary(a.vocab);
  } else {
    std::set<std::string> vocab;
    for (const auto& [id, s] : targets) vocab.insert(s.tokens().begin(), s.tokens().end());
    config.vocabulary.assign(vocab.begin(), vocab.end());
  }
  const Corrupter corrupter(config);

  std::vector<std::string> lines(targets.size());
  const std::size_t workers =
      std::clamp<std::size_t>(g.threads, 1, std::max<std::size_t>(targets.size(), 1));
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < targets.size(); i += workers) {
      const auto& [id, sentence] = targets[i];
      lines[i] = to_jsonl(id, corrupter.corrupt(sentence, id));
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  {
    auto file = open_out(out_path);
    for (const auto& line : lines) file << line << '\n';
    if (!file) throw IoError("error writing '" + a.out + "'");
  }

  RunManifest manifest("corrupt", dir);
  json cfg{{"out", manifest.relative(a.out)},
           {"ratio", a.ratio},
           {"geometric-p", a.geometric_p},
           {"min-span", a.min_span},
           {"max-span", a.max_span},
           {"mask-token", a.mask_token},
           {"mask-prob", a.mask_prob},
           {"random-prob", a.random_prob},
           {"keep-prob", a.keep_prob},
           {"reserved", a.reserved}};
  if (!a.in.empty()) {
    cfg["in"] = manifest.relative(a.in);
    manifest.add_input(a.in);
  } else {
    cfg["tgt"] = manifest.relative(a.tgt);
    manifest.add_input(a.tgt);
  }
  if (!a.vocab.empty()) {
    cfg["vocab"] = manifest.relative(a.vocab);
    manifest.add_input(a.vocab);
  }
  manifest.set_config(std::move(cfg));
  manifest.set_seed(g.seed);
  manifest.add_output(out_path);
  manifest.write();

  out << "corrupted " << targets.size() << " target sentences\n";
  return kOk;
}

int run_stats(const StatsArgs& a, std::ostream& out) {
  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  const auto corpus = load_matched_corpus(a.in);
  const auto stats = corpus_stats(corpus);
  const auto histogram = ngram_histogram(corpus);
  if (histogram.total() != stats.n_terms) {
    throw ValidationError("histogram total disagrees with term count");
  }

  RunManifest manifest("stats", dir);
  const auto stats_path = dir / "stats.json";
  write_json(stats_path, to_json(stats));
  const auto top_path = dir / "top_terms.tsv";
  {
    auto file = open_out(top_path);
    write_top_terms_tsv(top_terms(corpus, a.top_k), file);
  }
  const auto hist_path = dir / "ngram_hist.csv";
  {
    auto file = open_out(hist_path);
    write_histogram_csv(histogram, file);
  }
  for (const auto& p : {stats_path, top_path, hist_path}) manifest.add_output(p);
  manifest.set_config(
      {{"in", manifest.relative(a.in)}, {"out-dir", "."}, {"top-k", a.top_k}});
  manifest.add_input(a.in);
  manifest.write();

  out << stats.n_sentences << " sentences, " << stats.n_terms << " term instances, "
      << stats.avg_terms_per_sent << " terms per sentence\n";
  return kOk;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const fs::path out_path(a.out);
  const auto dir = parent_dir(out_path);
  ensure_dir(dir);
  auto references = load_matched_corpus(a.ref).sentences;
  const auto n = references.size();
  const auto instances = pair_instances(load_hypotheses(a.hyp), std::move(references));
  const auto usage = term_usage(instances);
  const auto lsm = aggregate_lsm2(instances);
  write_json(out_path, ordered_json{{"n_sentences", n},
                                    {"term_usage", to_json(usage)},
                                    {"lsm2", to_json(lsm)}});

  RunManifest manifest("eval", dir);
  json cfg{{"ref", manifest.relative(a.ref)},
           {"hyp", manifest.relative(a.hyp)},
           {"out", manifest.relative(a.out)}};
  manifest.add_output(out_path);
  if (!a.details.empty()) {
    {
      auto file = open_out(a.details);
      write_term_details(instances, file);
    }
    cfg["details"] = manifest.relative(a.details);
    manifest.add_output(a.details);
  }
  manifest.set_config(std::move(cfg));
  manifest.add_input(a.ref);
  manifest.add_input(a.hyp);
  manifest.write();

  auto show = [](std::optional<double> v) {
    return v ? nlohmann::json(*v).dump() : std::string("n/a");
  };
  out << "Term% 1-gram " << show(usage.unigram.rate()) << ", 2-gram "
      << show(usage.bigram.rate()) << ", >2 micro " << show(usage.gt2.rate())
      << ", >2 macro " << show(usage.gt2_macro) << "; LSM-2 micro "
      << show(lsm.gt2_micro) << ", macro " << show(lsm.gt2_macro) << '\n';
  return kOk;
}

int run_loss(const LossArgs& a, std::ostream& out) {
  const fs::path out_path(a.out);
  const auto dir = parent_dir(out_path);
  ensure_dir(dir);
  const auto records = load_logprob_records(a.in);
  const auto loss = total_loss(records, LossConfig{a.gamma});
  write_json(out_path, to_json(loss, a.per_token));

  RunManifest manifest("loss", dir);
  manifest.set_config({{"in", manifest.relative(a.in)},
                       {"out", manifest.relative(a.out)},
                       {"gamma", a.gamma},
                       {"per-token", a.per_token}});
  manifest.add_input(a.in);
  manifest.add_output(out_path);
  manifest.write();

  out << "total " << nlohmann::json(loss.total).dump() << " over " << loss.n_sentences
      << " sentences\n";
  return kOk;
}

int run_unique(const UniqueArgs& a, std::ostream& out) {
  const fs::path split_dir(a.split_dir);
  const fs::path dir = a.out_dir.empty() ? split_dir : fs::path(a.out_dir);
  ensure_dir(dir);
  const auto train = load_matched_corpus(split_dir / "train.jsonl").sentences;
  const auto valid = load_matched_corpus(split_dir / "valid.jsonl").sentences;
  const auto test = load_matched_corpus(split_dir / "test.jsonl").sentences;
  const auto unique = unique_subset(test, train, valid);

  RunManifest manifest("unique-test", dir);
  write_part(dir, "unique_test", unique, manifest);
  manifest.set_config({{"split-dir", manifest.relative(a.split_dir)}, {"out-dir", "."}});
  for (const char* name : {"train.jsonl", "valid.jsonl", "test.jsonl"}) {
    manifest.add_input(split_dir / name);
  }
  manifest.write();

  out << unique.size() << " of " << test.size() << " test sentences are unseen and unique\n";
  return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Terminology-aware corpus processing and evaluation"};
  app.name("termcorpus");
  app.set_version_flag("--version", TERMCORPUS_VERSION);
  app.set_config("--config", "", "TOML-style key = value file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Globals globals;
  try {
    globals.threads = default_threads();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
  app.add_option("--seed", globals.seed, "Global seed for every random stream")
      ->capture_default_str();
  app.add_option("--threads", globals.threads,
                 std::string("Worker threads (default from ") + kThreadsEnv + ")")
      ->check(CLI::PositiveNumber);

  MatchArgs match_args;
  auto* match = app.add_subcommand("match", "Annotate a parallel corpus with dictionary terms");
  match->add_option("--src", match_args.src, "Source-side corpus")->required();
  match->add_option("--tgt", match_args.tgt, "Target-side corpus")->required();
  match->add_option("--dict", match_args.dict, "Term dictionary TSV")->required();
  match->add_option("--out", match_args.out, "Matched-corpus JSONL")->required();
  match->add_option("--min-chars", match_args.min_chars, "Minimum term characters")
      ->capture_default_str();
  match->add_option("--max-ngram", match_args.max_ngram, "Maximum term tokens")
      ->capture_default_str();
  match->add_option("--max-tokens", match_args.max_tokens, "Maximum sentence tokens")
      ->capture_default_str();
  match->add_option("--filter-side", match_args.filter_side,
                    "Side the term filter applies to")
      ->check(CLI::IsMember({"target", "source", "both"}))
      ->capture_default_str();
  match->add_flag("--casefold", match_args.casefold, "ASCII case-insensitive matching");
  match->add_flag("--multi-pass", match_args.multi_pass,
                  "Rescan the dictionary until no term matches");

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "Terminology-aware train/valid/test split");
  split_cmd->add_option("--in", split_args.in, "Matched-corpus JSONL")->required();
  split_cmd->add_option("--out-dir", split_args.out_dir, "Output directory")->required();
  split_cmd->add_option("--heldout-size", split_args.heldout_size,
                        "Sentences in each of valid and test")
      ->capture_default_str();
  split_cmd->add_option("--dup-mode", split_args.dup_mode, "Duplicate handling")
      ->check(CLI::IsMember({"grouped", "paper"}))
      ->capture_default_str();

  CorruptArgs corrupt_args;
  auto* corrupt_cmd = app.add_subcommand("corrupt", "Span-corrupt target sentences");
  corrupt_cmd->add_option("--in", corrupt_args.in, "Matched-corpus JSONL");
  corrupt_cmd->add_option("--tgt", corrupt_args.tgt, "Target text, one sentence per line");
  corrupt_cmd->add_option("--out", corrupt_args.out, "Corrupted JSONL")->required();
  corrupt_cmd->add_option("--vocab", corrupt_args.vocab,
                          "Random-replacement vocabulary (default: input targets)");
  corrupt_cmd->add_option("--ratio", corrupt_args.ratio, "Fraction of tokens to corrupt")
      ->capture_default_str();
  corrupt_cmd->add_option("--geometric-p", corrupt_args.geometric_p,
                          "Span-length geometric parameter")
      ->capture_default_str();
  corrupt_cmd->add_option("--min-span", corrupt_args.min_span)->capture_default_str();
  corrupt_cmd->add_option("--max-span", corrupt_args.max_span)->capture_default_str();
  corrupt_cmd->add_option("--mask-token", corrupt_args.mask_token)->capture_default_str();
  corrupt_cmd->add_option("--mask-prob", corrupt_args.mask_prob)->capture_default_str();
  corrupt_cmd->add_option("--random-prob", corrupt_args.random_prob)->capture_default_str();
  corrupt_cmd->add_option("--keep-prob", corrupt_args.keep_prob)->capture_default_str();
  corrupt_cmd->add_option("--reserved", corrupt_args.reserved,
                          "Tokens never used for random replacement");

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics and term histograms");
  stats_cmd->add_option("--in", stats_args.in, "Matched-corpus JSONL")->required();
  stats_cmd->add_option("--out-dir", stats_args.out_dir, "Output directory")->required();
  stats_cmd->add_option("--top-k", stats_args.top_k, "Most frequent terms to list")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Term% and LSM-2 for a hypothesis file");
  eval_cmd->add_option("--ref", eval_args.ref, "Reference matched-corpus JSONL")->required();
  eval_cmd->add_option("--hyp", eval_args.hyp, "Hypotheses, one per line")->required();
  eval_cmd->add_option("--out", eval_args.out, "metrics.json path")->required();
  eval_cmd->add_option("--details", eval_args.details, "Per-term TSV for error analysis");

  LossArgs loss_args;
  auto* loss_cmd = app.add_subcommand("loss", "Joint translation + SSP loss from log-probs");
  loss_cmd->add_option("--in", loss_args.in, "Log-probability JSONL")->required();
  loss_cmd->add_option("--out", loss_args.out, "Loss breakdown JSON")->required();
  loss_cmd->add_option("--gamma", loss_args.gamma, "SSP task coefficient")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  loss_cmd->add_flag("--per-token", loss_args.per_token, "Also report token-normalized losses");

  UniqueArgs unique_args;
  auto* unique_cmd = app.add_subcommand("unique-test", "Test sentences unseen in train/valid");
  unique_cmd->add_option("--split-dir", unique_args.split_dir, "Directory written by split")
      ->required();
  unique_cmd->add_option("--out-dir", unique_args.out_dir, "Output directory (default: split dir)");

  std::vector<const char*> argv{"termcorpus"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kValidationFailure;
  }

  try {
    if (*match) return run_match(match_args, globals, out);
    if (*split_cmd) return run_split(split_args, globals, out);
    if (*corrupt_cmd) return run_corrupt(corrupt_args, globals, out);
    if (*stats_cmd) return run_stats(stats_args, out);
    if (*eval_cmd) return run_eval(eval_args, out);
    if (*loss_cmd) return run_loss(loss_args, out);
    if (*unique_cmd) return run_unique(unique_args, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
  return kValidationFailure;
}

}  // namespace termcorpus::cli
