#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "termcorpus/matcher.h"

namespace termcorpus {

// A hypothesis paired with its term-annotated reference. The hypothesis may
// be empty (a system can emit a blank line).
struct EvalInstance {
  Tokens hypothesis;
  MatchedSentence reference;
};

struct TermMatchResult {
  bool matched = false;
  Tokens remaining;  // working hypothesis after consuming the leftmost hit
};

// Looks for the term's target tokens as a contiguous run in `hypothesis`.
TermMatchResult term_matched(std::span<const std::string> hypothesis,
                             const TermPair& term);

struct UsageCount {
  std::size_t matched = 0;
  std::size_t total = 0;

  // Percent, or nullopt when total is zero.
  std::optional<double> rate() const;
};

struct TermUsageReport {
  UsageCount unigram;
  UsageCount bigram;
  UsageCount gt2;                    // pooled over every n > 2 (micro)
  std::optional<double> gt2_macro;   // mean of per-n rates over n > 2
  std::map<std::size_t, UsageCount> per_n;  // every n seen, including 1 and 2
};

// Term usage rate. In each hypothesis the reference annotations are checked
// longest first, each occurrence (count_in_sentence) once, and a hit consumes
// its tokens so a nested shorter term cannot reuse them.
TermUsageReport term_usage(std::span<const EvalInstance> instances);

// Length of the longest contiguous run of `term` tokens that also occurs
// contiguously in `hypothesis`.
std::size_t longest_shared_run(std::span<const std::string> hypothesis,
                               std::span<const std::string> term);

// L / l for the longest shared run L when L >= 2, else 0. Defined for terms of
// more than two tokens; throws DomainError otherwise.
double lsm2(std::span<const std::string> hypothesis, const TermPair& term);

struct LsmScore {
  SentenceId id = 0;
  std::string term;  // space-joined target term
  std::size_t ngram = 0;
  double score = 0.0;
};

struct LSMReport {
  std::optional<double> gt2_micro;  // nullopt when no term is longer than 2
  std::optional<double> gt2_macro;
  std::map<std::size_t, double> per_n_mean;
  std::vector<LsmScore> per_instance;

  bool empty() const { return per_instance.empty(); }
};

// LSM-2 over every annotation with more than two target tokens, read against
// the raw hypothesis. Micro pools instances; macro averages the per-n means.
LSMReport aggregate_lsm2(std::span<const EvalInstance> instances);

// Pairs each hypothesis line with the reference at the same position.
// Throws AlignmentError when the counts differ.
std::vector<EvalInstance> pair_instances(std::vector<Tokens> hypotheses,
                                         std::vector<MatchedSentence> references);
std::vector<Tokens> load_hypotheses(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const TermUsageReport& report);
nlohmann::ordered_json to_json(const LSMReport& report);

// Per-term TSV: id, term, n, matched (0/1), lsm2 (blank for n <= 2).
void write_term_details(std::span<const EvalInstance> instances, std::ostream& out);

}  // namespace termcorpus
