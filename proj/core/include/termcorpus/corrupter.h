#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "termcorpus/random.h"
#include "termcorpus/types.h"

namespace termcorpus {

enum class ReplacementKind { kMask, kRandom, kKeep };

const char* to_string(ReplacementKind kind);

struct ReplacementProbs {
  double mask = 0.8;
  double random = 0.1;
  double keep = 0.1;
};

struct CorruptionConfig {
  double geometric_p = 0.2;
  std::size_t min_span = 1;
  std::size_t max_span = 10;
  double ratio = 0.5;
  std::string mask_token = "[MASK]";
  ReplacementProbs replace_probs;
  // Candidates for random replacement; the mask token and reserved tokens are
  // never drawn.
  std::vector<std::string> vocabulary;
  std::vector<std::string> reserved_tokens;
  std::uint64_t seed = 42;

  // Throws ValidationError when a field is out of range.
  void validate() const;
};

// Span lengths follow P(L = l) proportional to (1-p)^(l-1) p, renormalized on
// [min_span, max_span].
class SpanLengthSampler {
 public:
  explicit SpanLengthSampler(const CorruptionConfig& config);

  std::size_t operator()(Rng& rng) const;

  std::size_t min_span() const { return min_span_; }
  std::size_t max_span() const { return max_span_; }

 private:
  std::size_t min_span_;
  std::size_t max_span_;
  std::vector<double> cumulative_;  // normalized CDF over [min_span, max_span]
};

std::size_t sample_span_length(Rng& rng, const CorruptionConfig& config);

// A maximal corrupted interval [start, start + length) sharing one kind.
struct CorruptedSpan {
  std::size_t start = 0;
  std::size_t length = 0;
  ReplacementKind kind = ReplacementKind::kMask;

  friend bool operator==(const CorruptedSpan&, const CorruptedSpan&) = default;
};

// One placement step: the length drawn from the sampler and the length that
// was actually masked after trimming to the remaining budget.
struct SpanDraw {
  std::size_t sampled_length = 0;
  std::size_t placed_length = 0;
  ReplacementKind kind = ReplacementKind::kMask;

  friend bool operator==(const SpanDraw&, const SpanDraw&) = default;
};

struct CorruptedSequence {
  Sentence original;
  Sentence corrupted;
  std::vector<std::uint8_t> mask;
  std::vector<CorruptedSpan> spans;  // sorted by start, pairwise disjoint
  std::vector<SpanDraw> draws;       // in placement order

  friend bool operator==(const CorruptedSequence&, const CorruptedSequence&) = default;
};

// round(ratio * length), halves rounded up.
std::size_t mask_budget(double ratio, std::size_t length);

// Span corruption of a target sentence.
//
// Exactly mask_budget(ratio, |y|) positions are masked. Spans are placed on
// the sentence viewed as a ring: a start is drawn uniformly over all
// positions and a span that runs past the end continues at position 0, so
// every position has the same marginal chance of being masked. Overlapping
// placements are redrawn; once no free run can hold the span, or after 1000
// rejections, the span fills forward from a uniformly chosen free position.
// A wrapped placement is reported as two spans with the same kind.
class Corrupter {
 public:
  explicit Corrupter(CorruptionConfig config);

  CorruptedSequence operator()(const Sentence& target, Rng& rng) const;

  // Uses the stream derived from (seed, "corrupter", id).
  CorruptedSequence corrupt(const Sentence& target, SentenceId id) const;

  const CorruptionConfig& config() const { return config_; }

 private:
  CorruptionConfig config_;
  SpanLengthSampler sampler_;
  std::vector<std::string> candidates_;
};

CorruptedSequence corrupt(const Sentence& target, const CorruptionConfig& config,
                          Rng& rng);

// `{"id":..,"y":[..],"y_tilde":[..],"mask":[..],"spans":[[start,len,kind],..]}`
std::string to_jsonl(SentenceId id, const CorruptedSequence& sequence);

}  // namespace termcorpus
