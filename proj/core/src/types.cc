#include "termcorpus/types.h"

#include <algorithm>
#include <tuple>

#include "termcorpus/error.h"

namespace termcorpus {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace

std::size_t utf8_length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(),
      [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

Tokens split_tokens(std::string_view line) {
  Tokens tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

Sentence::Sentence(Tokens tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw ValidationError("sentence has no tokens");
  for (const auto& token : tokens_) {
    if (token.empty()) throw ValidationError("sentence contains an empty token");
    if (std::any_of(token.begin(), token.end(), is_space)) {
      throw ValidationError("token contains whitespace: '" + token + "'");
    }
  }
}

Sentence Sentence::parse(std::string_view line) {
  Tokens tokens = split_tokens(line);
  if (tokens.empty()) throw ValidationError("empty sentence");
  return Sentence(std::move(tokens));
}

std::size_t Sentence::char_count() const {
  std::size_t n = 0;
  for (const auto& token : tokens_) n += utf8_length(token);
  return n;
}

TermPair TermPair::make(Sentence source, Sentence target,
                        std::optional<std::string> dict_id) {
  TermPair term{std::move(source), std::move(target), 0, 0, 0,
                std::move(dict_id)};
  term.source_chars = term.source_term.char_count();
  term.target_chars = term.target_term.char_count();
  term.target_ngram = term.target_term.size();
  return term;
}

bool dictionary_order(const TermPair& a, const TermPair& b) {
  const auto la = a.target_length();
  const auto lb = b.target_length();
  if (la != lb) return la > lb;
  const auto ta = a.target_term.str();
  const auto tb = b.target_term.str();
  if (ta != tb) return ta < tb;
  return a.source_term.str() < b.source_term.str();
}

TermDictionary::TermDictionary(std::vector<TermPair> entries)
    : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(), dictionary_order);
  auto same_pair = [](const TermPair& a, const TermPair& b) {
    return a.source_term == b.source_term && a.target_term == b.target_term;
  };
  entries_.erase(std::unique(entries_.begin(), entries_.end(), same_pair),
                 entries_.end());
}

}  // namespace termcorpus
