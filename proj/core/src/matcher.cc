#include "termcorpus/matcher.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "termcorpus/error.h"

namespace termcorpus {
namespace {

using json = nlohmann::ordered_json;

std::string fold(std::string token) {
  for (auto& c : token) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return token;
}

Tokens keys_for(const Tokens& tokens, bool casefold) {
  if (!casefold) return tokens;
  Tokens folded;
  folded.reserve(tokens.size());
  for (const auto& t : tokens) folded.push_back(fold(t));
  return folded;
}

// Token text plus its index in the unconsumed sentence.
struct WorkingToken {
  std::string_view text;
  std::size_t position;
};

std::optional<std::size_t> find_working(const std::vector<WorkingToken>& hay,
                                        const Tokens& needle) {
  if (needle.empty() || needle.size() > hay.size()) return std::nullopt;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    std::size_t k = 0;
    while (k < needle.size() && hay[i + k].text == needle[k]) ++k;
    if (k == needle.size()) return i;
  }
  return std::nullopt;
}

std::vector<WorkingToken> working_copy(const Tokens& keys) {
  std::vector<WorkingToken> working;
  working.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) working.push_back({keys[i], i});
  return working;
}

std::vector<std::size_t> take(std::vector<WorkingToken>& working,
                              std::size_t start, std::size_t length) {
  std::vector<std::size_t> positions;
  positions.reserve(length);
  for (std::size_t k = 0; k < length; ++k) {
    positions.push_back(working[start + k].position);
  }
  working.erase(working.begin() + static_cast<std::ptrdiff_t>(start),
                working.begin() + static_cast<std::ptrdiff_t>(start + length));
  return positions;
}

Tokens tokens_from_json(const json& value, const char* field,
                        std::size_t line_no) {
  if (!value.is_array()) {
    throw FormatError("line " + std::to_string(line_no) + ": '" + field +
                      "' must be an array of tokens");
  }
  Tokens tokens;
  for (const auto& t : value) tokens.push_back(t.get<std::string>());
  return tokens;
}

}  // namespace

std::optional<std::size_t> find_subsequence(
    std::span<const std::string> haystack, std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return std::nullopt;
  const auto it = std::search(haystack.begin(), haystack.end(), needle.begin(),
                              needle.end());
  if (it == haystack.end()) return std::nullopt;
  return static_cast<std::size_t>(it - haystack.begin());
}

TermMatcher::TermMatcher(const TermDictionary& dictionary, MatchOptions options)
    : dictionary_(&dictionary), options_(options) {
  source_keys_.reserve(dictionary.size());
  target_keys_.reserve(dictionary.size());
  for (std::size_t i = 0; i < dictionary.size(); ++i) {
    const auto& term = dictionary.entries()[i];
    source_keys_.push_back(keys_for(term.source_term.tokens(), options.casefold));
    target_keys_.push_back(keys_for(term.target_term.tokens(), options.casefold));
    by_first_token_[target_keys_.back().front()].push_back(i);
  }
}

std::vector<std::size_t> TermMatcher::candidates(const Tokens& source,
                                                 const Tokens& target) const {
  // Consumption only removes tokens, so an entry whose first tokens are absent
  // from the untouched sentence can never match later in the scan.
  const std::unordered_set<std::string_view> source_set(source.begin(),
                                                        source.end());
  std::unordered_set<std::string_view> seen;
  std::vector<std::size_t> result;
  for (const auto& token : target) {
    if (!seen.insert(token).second) continue;
    const auto it = by_first_token_.find(token);
    if (it == by_first_token_.end()) continue;
    for (const auto entry : it->second) {
      if (source_set.contains(source_keys_[entry].front())) {
        result.push_back(entry);
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::optional<MatchedSentence> TermMatcher::match(const SentencePair& pair,
                                                  MatchTrace* trace) const {
  const Tokens source_keys = keys_for(pair.source.tokens(), options_.casefold);
  const Tokens target_keys = keys_for(pair.target.tokens(), options_.casefold);
  const auto entries = candidates(source_keys, target_keys);
  if (entries.empty()) return std::nullopt;

  auto source = working_copy(source_keys);
  auto target = working_copy(target_keys);

  MatchedSentence result{pair, {}, 0};
  // Dictionary index -> position in result.annotations.
  std::unordered_map<std::size_t, std::size_t> annotation_of;

  bool matched_in_pass = true;
  while (matched_in_pass) {
    matched_in_pass = false;
    for (const auto entry : entries) {
      const auto tgt_at = find_working(target, target_keys_[entry]);
      if (!tgt_at) continue;
      const auto src_at = find_working(source, source_keys_[entry]);
      if (!src_at) continue;

      auto src_positions = take(source, *src_at, source_keys_[entry].size());
      auto tgt_positions = take(target, *tgt_at, target_keys_[entry].size());
      if (trace != nullptr) {
        trace->events.push_back(
            {entry, std::move(src_positions), std::move(tgt_positions)});
      }

      const auto [it, inserted] =
          annotation_of.try_emplace(entry, result.annotations.size());
      if (inserted) {
        const auto& term = dictionary_->entries()[entry];
        result.annotations.push_back({term, term.target_ngram, 1});
        result.max_ngram = std::max(result.max_ngram, term.target_ngram);
      } else {
        ++result.annotations[it->second].count_in_sentence;
      }
      matched_in_pass = true;
    }
    if (!options_.multi_pass) break;
  }

  if (result.annotations.empty()) return std::nullopt;
  return result;
}

std::optional<MatchedSentence> match_terms(const SentencePair& pair,
                                           const TermDictionary& dictionary,
                                           const MatchOptions& options) {
  return TermMatcher(dictionary, options).match(pair);
}

MatchedCorpus build_matched_corpus(std::span<const SentencePair> corpus,
                                   const TermDictionary& dictionary,
                                   const MatchOptions& options,
                                   unsigned threads) {
  const TermMatcher matcher(dictionary, options);
  std::vector<std::optional<MatchedSentence>> slots(corpus.size());

  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(corpus.size(), 1));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) slots[i] = matcher.match(corpus[i]);
  };
  if (workers == 1) {
    work(0, corpus.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (corpus.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < corpus.size(); begin += chunk) {
      pool.emplace_back(work, begin, std::min(begin + chunk, corpus.size()));
    }
  }

  MatchedCorpus result{{}, dictionary};
  for (auto& slot : slots) {
    if (slot) result.sentences.push_back(std::move(*slot));
  }
  return result;
}

std::string to_jsonl(const MatchedSentence& sentence) {
  json terms = json::array();
  for (const auto& a : sentence.annotations) {
    terms.push_back(json{{"src", a.term.source_term.tokens()},
                         {"tgt", a.term.target_term.tokens()},
                         {"l", a.target_ngram},
                         {"count", a.count_in_sentence}});
  }
  const json object{{"id", sentence.pair.id},
                    {"src", sentence.pair.source.tokens()},
                    {"tgt", sentence.pair.target.tokens()},
                    {"terms", std::move(terms)},
                    {"max_ngram", sentence.max_ngram}};
  return object.dump();
}

MatchedSentence parse_matched_sentence(std::string_view line,
                                       std::size_t line_no) {
  const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
  json object;
  try {
    object = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(where() + e.what());
  }
  try {
    MatchedSentence sentence{
        SentencePair{object.at("id").get<SentenceId>(),
                     Sentence(tokens_from_json(object.at("src"), "src", line_no)),
                     Sentence(tokens_from_json(object.at("tgt"), "tgt", line_no))},
        {},
        0};
    for (const auto& t : object.at("terms")) {
      auto term = TermPair::make(
          Sentence(tokens_from_json(t.at("src"), "terms.src", line_no)),
          Sentence(tokens_from_json(t.at("tgt"), "terms.tgt", line_no)));
      const auto l = t.at("l").get<std::size_t>();
      const auto count = t.contains("count") ? t.at("count").get<std::size_t>() : 1;
      if (l != term.target_ngram) {
        throw FormatError(where() + "term length 'l' disagrees with 'tgt'");
      }
      if (count == 0) throw FormatError(where() + "term count must be >= 1");
      sentence.max_ngram = std::max(sentence.max_ngram, l);
      sentence.annotations.push_back({std::move(term), l, count});
    }
    if (sentence.annotations.empty()) {
      throw FormatError(where() + "sentence has no term annotations");
    }
    if (object.contains("max_ngram") &&
        object.at("max_ngram").get<std::size_t>() != sentence.max_ngram) {
      throw FormatError(where() + "max_ngram disagrees with annotations");
    }
    return sentence;
  } catch (const json::exception& e) {
    throw FormatError(where() + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const ValidationError& e) {
    throw FormatError(where() + e.what());
  }
}

void write_matched_corpus(std::span<const MatchedSentence> sentences,
                          std::ostream& out) {
  for (const auto& s : sentences) out << to_jsonl(s) << '\n';
}

void save_matched_corpus(std::span<const MatchedSentence> sentences,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_matched_corpus(sentences, out);
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

std::vector<MatchedSentence> read_matched_corpus(std::istream& in) {
  std::vector<MatchedSentence> sentences;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    sentences.push_back(parse_matched_sentence(line, line_no));
  }
  if (in.bad()) throw IoError("error reading matched corpus");
  return sentences;
}

MatchedCorpus load_matched_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return MatchedCorpus{read_matched_corpus(in), {}};
}

}  // namespace termcorpus
