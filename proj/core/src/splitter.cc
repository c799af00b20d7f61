#include "termcorpus/splitter.h"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "termcorpus/error.h"
#include "termcorpus/random.h"

namespace termcorpus {
namespace {

__extension__ using Wide = unsigned __int128;
using Signed = std::int64_t;

std::unordered_map<SentenceId, std::size_t> index_by_id(
    const MatchedCorpus& corpus) {
  std::unordered_map<SentenceId, std::size_t> index;
  index.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!index.emplace(corpus.sentences[i].id(), i).second) {
      throw ValidationError("duplicate sentence id " +
                            std::to_string(corpus.sentences[i].id()));
    }
  }
  return index;
}

std::string target_key(const MatchedSentence& s) { return s.pair.target.str(); }

DuplicateReport group_duplicates(
    std::span<const SentenceId> ids, const MatchedCorpus& corpus,
    const std::unordered_map<SentenceId, std::size_t>& index) {
  std::unordered_map<std::string, std::size_t> group_of;
  std::vector<std::vector<SentenceId>> groups;
  for (const auto id : ids) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw ValidationError("unknown sentence id " + std::to_string(id));
    }
    const auto [slot, inserted] =
        group_of.try_emplace(target_key(corpus.sentences[it->second]), groups.size());
    if (inserted) groups.emplace_back();
    groups[slot->second].push_back(id);
  }
  DuplicateReport report;
  for (auto& g : groups) {
    if (g.size() >= 2) {
      report.groups.push_back(std::move(g));
    } else {
      report.unique_ids.push_back(g.front());
    }
  }
  return report;
}

// Largest-remainder apportionment of `n` over `weights`; ties go to the
// lower split index.
SplitCounts apportion(std::size_t n, const SplitCounts& weights) {
  const std::uint64_t total = std::accumulate(weights.begin(), weights.end(),
                                              std::uint64_t{0});
  SplitCounts out{};
  if (total == 0 || n == 0) return out;
  std::array<std::uint64_t, 3> remainder{};
  std::size_t given = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const auto product = static_cast<Wide>(n) * weights[s];
    out[s] = static_cast<std::size_t>(product / total);
    remainder[s] = static_cast<std::uint64_t>(product % total);
    given += out[s];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; given < n; ++k, ++given) ++out[order[k % 3]];
  return out;
}


// Index of the split with the largest remaining quota (lowest index on ties),
// preferring splits that can absorb `size` whole.
std::size_t best_fit(const std::array<Signed, 3>& remaining, std::size_t size) {
  std::size_t best = 3;
  for (std::size_t s = 0; s < 3; ++s) {
    if (remaining[s] < static_cast<Signed>(size)) continue;
    if (best == 3 || remaining[s] > remaining[best]) best = s;
  }
  if (best != 3) return best;
  best = 0;
  for (std::size_t s = 1; s < 3; ++s) {
    if (remaining[s] > remaining[best]) best = s;
  }
  return best;
}

}  // namespace

DupMode parse_dup_mode(const std::string& name) {
  if (name == "paper") return DupMode::kPaper;
  if (name == "grouped") return DupMode::kGrouped;
  throw ValidationError("unknown dup mode '" + name + "'");
}

std::string to_string(DupMode mode) {
  return mode == DupMode::kPaper ? "paper" : "grouped";
}

const std::vector<MatchedSentence>& SplitResult::part(Split s) const {
  switch (s) {
    case kTrain: return train;
    case kValid: return valid;
    case kTest: break;
  }
  return test;
}

Buckets bucketize(const MatchedCorpus& corpus) {
  if (corpus.empty()) throw ValidationError("cannot bucketize an empty corpus");
  index_by_id(corpus);
  Buckets buckets;
  for (const auto& s : corpus.sentences) buckets[s.max_ngram].push_back(s.id());
  return buckets;
}

DuplicateReport duplicate_check(std::span<const SentenceId> ids,
                                const MatchedCorpus& corpus) {
  return group_duplicates(ids, corpus, index_by_id(corpus));
}

SplitCounts cumulative_quota(std::size_t seen, std::size_t total,
                             std::size_t heldout) {
  // Round the pooled held-out share half-up, then halve it. Both steps are
  // monotone in `seen`, and the pooled share grows by less than one per
  // sentence because 2R < total, so train never shrinks either.
  const auto twice = static_cast<Wide>(2) * 2 * heldout * seen + total;
  const auto pooled = static_cast<std::size_t>(twice / (2 * static_cast<Wide>(total)));
  const std::size_t valid = (pooled + 1) / 2;
  const std::size_t test = pooled / 2;
  return {seen - pooled, valid, test};
}

SplitResult split(const MatchedCorpus& corpus, const SplitConfig& config) {
  if (corpus.empty()) throw ValidationError("cannot split an empty corpus");
  const std::size_t total = corpus.size();
  if (2 * config.heldout_size >= total) {
    throw ValidationError("held-out size " + std::to_string(config.heldout_size) +
                          " leaves no training data for a corpus of " +
                          std::to_string(total) + " sentences");
  }

  const auto index = index_by_id(corpus);
  const Buckets buckets = bucketize(corpus);

  // Buckets in descending n-gram order.
  std::vector<std::pair<std::size_t, const std::vector<SentenceId>*>> order;
  for (auto it = buckets.rbegin(); it != buckets.rend(); ++it) {
    order.emplace_back(it->first, &it->second);
  }

  std::vector<DuplicateReport> reports(order.size());
  {
    const std::size_t workers =
        std::clamp<std::size_t>(config.threads, 1, order.size());
    auto work = [&](std::size_t first) {
      for (std::size_t b = first; b < order.size(); b += workers) {
        reports[b] = group_duplicates(*order[b].second, corpus, index);
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
  }

  const SplitCounts heldout_weights{total - 2 * config.heldout_size,
                                    config.heldout_size, config.heldout_size};
  SplitResult result;
  result.seed_used = config.seed;
  result.dup_mode = config.dup_mode;
  result.heldout_size = config.heldout_size;

  std::array<std::vector<SentenceId>, 3> assigned_ids;
  SplitCounts assigned{};
  std::size_t seen = 0;
  // Target text -> split, used to keep duplicates together across buckets.
  std::unordered_map<std::string, std::size_t> pinned;
  const bool grouped = config.dup_mode == DupMode::kGrouped;

  auto text_of = [&](SentenceId id) -> std::string {
    return target_key(corpus.sentences[index.at(id)]);
  };

  for (std::size_t b = 0; b < order.size(); ++b) {
    const auto [ngram, ids] = order[b];
    const auto& report = reports[b];
    Rng rng = make_stream(config.seed, "splitter", ngram);

    seen += ids->size();
    const auto target = cumulative_quota(seen, total, config.heldout_size);
    std::array<Signed, 3> remaining{};
    for (std::size_t s = 0; s < 3; ++s) {
      remaining[s] = static_cast<Signed>(target[s]) - static_cast<Signed>(assigned[s]);
    }
    SplitCounts placed{};
    auto place = [&](SentenceId id, std::size_t s) {
      assigned_ids[s].push_back(id);
      --remaining[s];
      ++placed[s];
    };

    std::vector<SentenceId> free_ids;
    if (grouped) {
      auto groups = report.groups;
      std::stable_sort(groups.begin(), groups.end(),
                       [](const auto& a, const auto& b) { return a.size() > b.size(); });
      for (const auto& g : groups) {
        const auto key = text_of(g.front());
        const auto pin = pinned.find(key);
        const std::size_t s =
            pin != pinned.end() ? pin->second : best_fit(remaining, g.size());
        pinned.emplace(key, s);
        for (const auto id : g) place(id, s);
      }
      for (const auto id : report.unique_ids) {
        const auto pin = pinned.find(text_of(id));
        if (pin != pinned.end()) {
          place(id, pin->second);
        } else {
          free_ids.push_back(id);
        }
      }
    } else {
      std::vector<SentenceId> copies;
      for (const auto& g : report.groups) copies.insert(copies.end(), g.begin(), g.end());
      // Proportional share of the duplicate copies, capped by bucket quota.
      auto share = apportion(copies.size(), heldout_weights);
      std::size_t overflow = 0;
      for (std::size_t s = 0; s < 3; ++s) {
        const auto cap = static_cast<std::size_t>(std::max<Signed>(remaining[s], 0));
        if (share[s] > cap) {
          overflow += share[s] - cap;
          share[s] = cap;
        }
      }
      for (std::size_t s = 0; s < 3 && overflow > 0; ++s) {
        const auto spare = static_cast<std::size_t>(remaining[s]) - share[s];
        const auto extra = std::min(spare, overflow);
        share[s] += extra;
        overflow -= extra;
      }
      shuffle(std::span(copies), rng);
      std::size_t next = 0;
      for (std::size_t s = 0; s < 3; ++s) {
        for (std::size_t k = 0; k < share[s]; ++k) place(copies[next++], s);
      }
      free_ids = report.unique_ids;
    }

    shuffle(std::span(free_ids), rng);
    std::size_t turn = 0;
    for (const auto id : free_ids) {
      // Some split always has room: total remaining equals free_ids left.
      while (remaining[turn % 3] <= 0) ++turn;
      const std::size_t s = turn % 3;
      place(id, s);
      if (grouped) pinned.emplace(text_of(id), s);
      ++turn;
    }

    for (std::size_t s = 0; s < 3; ++s) assigned[s] += placed[s];
    result.bucket_report[ngram] = placed;
    result.duplicate_groups += report.groups.size();
    for (const auto& g : report.groups) result.duplicate_sentences += g.size();
  }

  std::array<std::vector<MatchedSentence>*, 3> parts{&result.train, &result.valid,
                                                     &result.test};
  for (std::size_t s = 0; s < 3; ++s) {
    auto& ids = assigned_ids[s];
    std::sort(ids.begin(), ids.end());
    parts[s]->reserve(ids.size());
    for (const auto id : ids) parts[s]->push_back(corpus.sentences[index.at(id)]);
  }
  return result;
}

std::vector<MatchedSentence> unique_subset(
    std::span<const MatchedSentence> test,
    std::span<const MatchedSentence> train,
    std::span<const MatchedSentence> valid) {
  std::unordered_set<std::string> seen;
  for (const auto& s : train) seen.insert(target_key(s));
  for (const auto& s : valid) seen.insert(target_key(s));
  std::vector<MatchedSentence> kept;
  for (const auto& s : test) {
    if (seen.insert(target_key(s)).second) kept.push_back(s);
  }
  return kept;
}

}  // namespace termcorpus
