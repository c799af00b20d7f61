#include "termcorpus/corpus_io.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "termcorpus/error.h"

namespace termcorpus {
namespace {

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

Sentence parse_line(const std::string& line, const char* side,
                    std::size_t line_no) {
  Tokens tokens = split_tokens(line);
  if (tokens.empty()) {
    throw ValidationError(std::string(side) + " line " +
                          std::to_string(line_no) + " is empty");
  }
  return Sentence(std::move(tokens));
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> columns;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    columns.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return columns;
}

}  // namespace

std::vector<SentencePair> read_corpus(std::istream& source,
                                      std::istream& target) {
  std::vector<SentencePair> corpus;
  std::string src_line;
  std::string tgt_line;
  for (std::size_t line_no = 1;; ++line_no) {
    const bool has_src = next_line(source, src_line);
    const bool has_tgt = next_line(target, tgt_line);
    if (!has_src && !has_tgt) break;
    if (has_src != has_tgt) {
      throw AlignmentError(
          std::string("corpus sides are not aligned: line ") +
          std::to_string(line_no) + " exists only in the " +
          (has_src ? "source" : "target") + " file");
    }
    corpus.push_back(SentencePair{corpus.size(),
                                  parse_line(src_line, "source", line_no),
                                  parse_line(tgt_line, "target", line_no)});
  }
  if (source.bad() || target.bad()) throw IoError("error reading corpus");
  return corpus;
}

std::vector<SentencePair> load_corpus(const std::filesystem::path& source,
                                      const std::filesystem::path& target) {
  auto src = open_input(source);
  auto tgt = open_input(target);
  return read_corpus(src, tgt);
}

void write_corpus(std::span<const SentencePair> corpus, std::ostream& source,
                  std::ostream& target) {
  for (const auto& pair : corpus) {
    source << pair.source.str() << '\n';
    target << pair.target.str() << '\n';
  }
}

void save_corpus(std::span<const SentencePair> corpus,
                 const std::filesystem::path& source,
                 const std::filesystem::path& target) {
  auto src = open_output(source);
  auto tgt = open_output(target);
  write_corpus(corpus, src, tgt);
  if (!src || !tgt) throw IoError("error writing corpus");
}

TermDictionary read_dictionary(std::istream& in) {
  std::vector<TermPair> entries;
  std::string line;
  for (std::size_t row = 1; next_line(in, line); ++row) {
    if (line.empty() || line.front() == '#') continue;
    if (split_tokens(line).empty()) continue;
    const auto columns = split_tabs(line);
    if (columns.size() < 2) {
      throw FormatError("dictionary row " + std::to_string(row) +
                        ": expected source<TAB>target[<TAB>id]");
    }
    Tokens source = split_tokens(columns[0]);
    Tokens target = split_tokens(columns[1]);
    if (source.empty() || target.empty()) {
      throw FormatError("dictionary row " + std::to_string(row) +
                        ": empty term column");
    }
    std::optional<std::string> dict_id;
    if (columns.size() >= 3 && !columns[2].empty()) dict_id = columns[2];
    entries.push_back(TermPair::make(Sentence(std::move(source)),
                                     Sentence(std::move(target)),
                                     std::move(dict_id)));
  }
  if (in.bad()) throw IoError("error reading dictionary");
  return TermDictionary(std::move(entries));
}

TermDictionary load_dictionary(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_dictionary(in);
}

TermDictionary expand_dictionary(std::span<const RawTermEntry> raw) {
  std::vector<TermPair> entries;
  for (const auto& entry : raw) {
    if (entry.target_terms.empty()) {
      throw ValidationError("term '" + entry.source_term +
                            "' has no translations");
    }
    const auto source = Sentence::parse(entry.source_term);
    for (const auto& target : entry.target_terms) {
      entries.push_back(
          TermPair::make(source, Sentence::parse(target), entry.dict_id));
    }
  }
  return TermDictionary(std::move(entries));
}

TermDictionary filter_dictionary(const TermDictionary& dictionary,
                                 const DictionaryFilter& filter) {
  auto keep_side = [&](std::size_t chars, std::size_t ngram) {
    return chars >= filter.min_chars && ngram <= filter.max_ngram;
  };
  std::vector<TermPair> kept;
  for (const auto& term : dictionary) {
    const bool target_ok = keep_side(term.target_chars, term.target_ngram);
    const bool source_ok = keep_side(term.source_chars, term.source_term.size());
    bool keep = false;
    switch (filter.side) {
      case FilterSide::kTarget: keep = target_ok; break;
      case FilterSide::kSource: keep = source_ok; break;
      case FilterSide::kBoth: keep = target_ok && source_ok; break;
    }
    if (keep) kept.push_back(term);
  }
  return TermDictionary(std::move(kept));
}

std::vector<SentencePair> filter_corpus_by_length(
    std::span<const SentencePair> corpus, std::size_t max_tokens) {
  std::vector<SentencePair> kept;
  for (const auto& pair : corpus) {
    if (pair.source.size() <= max_tokens && pair.target.size() <= max_tokens) {
      kept.push_back(pair);
    }
  }
  return kept;
}

FilterSide parse_filter_side(const std::string& name) {
  if (name == "target") return FilterSide::kTarget;
  if (name == "source") return FilterSide::kSource;
  if (name == "both") return FilterSide::kBoth;
  throw ValidationError("unknown filter side '" + name + "'");
}

}  // namespace termcorpus
