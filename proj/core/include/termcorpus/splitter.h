#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "termcorpus/matcher.h"

namespace termcorpus {

enum class DupMode {
  kPaper,    // duplicate copies are spread across splits by quota
  kGrouped,  // each duplicate group lands in a single split
};

DupMode parse_dup_mode(const std::string& name);
std::string to_string(DupMode mode);

struct SplitConfig {
  std::size_t heldout_size = 3000;  // sentences in each of valid and test
  std::uint64_t seed = 42;
  DupMode dup_mode = DupMode::kGrouped;
  unsigned threads = 1;  // duplicate detection only; never affects output
};

enum Split : std::size_t { kTrain = 0, kValid = 1, kTest = 2 };
inline constexpr std::array<const char*, 3> kSplitNames = {"train", "valid",
                                                           "test"};

using SplitCounts = std::array<std::size_t, 3>;

// Largest term n-gram -> sentence ids, ids in corpus order.
using Buckets = std::map<std::size_t, std::vector<SentenceId>>;

struct DuplicateReport {
  std::vector<std::vector<SentenceId>> groups;  // each of size >= 2
  std::vector<SentenceId> unique_ids;
};

struct SplitResult {
  std::vector<MatchedSentence> train;
  std::vector<MatchedSentence> valid;
  std::vector<MatchedSentence> test;
  std::map<std::size_t, SplitCounts> bucket_report;
  std::uint64_t seed_used = 0;
  DupMode dup_mode = DupMode::kGrouped;
  std::size_t heldout_size = 0;
  std::size_t duplicate_groups = 0;
  std::size_t duplicate_sentences = 0;

  const std::vector<MatchedSentence>& part(Split s) const;
  SplitCounts sizes() const { return {train.size(), valid.size(), test.size()}; }
};

// Throws ValidationError on an empty corpus or repeated ids.
Buckets bucketize(const MatchedCorpus& corpus);

// Groups `ids` by identical target token sequence. Groups and unique ids keep
// the order of first appearance in `ids`.
DuplicateReport duplicate_check(std::span<const SentenceId> ids,
                                const MatchedCorpus& corpus);

// Cumulative held-out allocation after `seen` of `total` sentences have been
// distributed: (train, valid, test) sums to `seen`, every component is
// non-decreasing in `seen`, each is within 3/4 of its exact proportional
// share, and `seen == total` yields exactly (total - 2R, R, R).
SplitCounts cumulative_quota(std::size_t seen, std::size_t total,
                             std::size_t heldout);

// Terminology-aware train/valid/test split. Buckets are processed from the
// longest maximum n-gram down; within a bucket duplicates are placed first,
// then unique sentences are dealt round-robin in a seeded shuffled order.
// Each split is returned sorted by id.
SplitResult split(const MatchedCorpus& corpus, const SplitConfig& config);

// Test sentences whose target appears in neither train nor valid nor earlier
// in test.
std::vector<MatchedSentence> unique_subset(
    std::span<const MatchedSentence> test,
    std::span<const MatchedSentence> train,
    std::span<const MatchedSentence> valid);

}  // namespace termcorpus
