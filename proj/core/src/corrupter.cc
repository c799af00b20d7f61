#include "termcorpus/corrupter.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "termcorpus/error.h"

namespace termcorpus {
namespace {

constexpr std::size_t kMaxAttempts = 1000;

// Longest run of free positions on the ring.
std::size_t longest_free_run(const std::vector<std::uint8_t>& mask) {
  const std::size_t n = mask.size();
  const auto first_masked = std::find(mask.begin(), mask.end(), 1);
  if (first_masked == mask.end()) return n;
  const auto origin = static_cast<std::size_t>(first_masked - mask.begin());
  std::size_t best = 0;
  std::size_t run = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (mask[(origin + k) % n] == 0) {
      best = std::max(best, ++run);
    } else {
      run = 0;
    }
  }
  return best;
}

bool ring_free(const std::vector<std::uint8_t>& mask, std::size_t start,
               std::size_t length) {
  const std::size_t n = mask.size();
  for (std::size_t k = 0; k < length; ++k) {
    if (mask[(start + k) % n] != 0) return false;
  }
  return true;
}

ReplacementKind draw_kind(const ReplacementProbs& probs, Rng& rng) {
  const double u = uniform_unit(rng);
  if (u < probs.mask) return ReplacementKind::kMask;
  if (u < probs.mask + probs.random) return ReplacementKind::kRandom;
  return ReplacementKind::kKeep;
}

}  // namespace

const char* to_string(ReplacementKind kind) {
  switch (kind) {
    case ReplacementKind::kMask: return "mask";
    case ReplacementKind::kRandom: return "random";
    case ReplacementKind::kKeep: break;
  }
  return "keep";
}

void CorruptionConfig::validate() const {
  if (!(geometric_p > 0.0 && geometric_p < 1.0)) {
    throw ValidationError("geometric_p must lie in (0, 1)");
  }
  if (min_span < 1 || min_span > max_span) {
    throw ValidationError("span bounds must satisfy 1 <= min_span <= max_span");
  }
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw ValidationError("corruption ratio must lie in [0, 1]");
  }
  const auto& p = replace_probs;
  if (p.mask < 0 || p.random < 0 || p.keep < 0 ||
      std::abs(p.mask + p.random + p.keep - 1.0) > 1e-9) {
    throw ValidationError("replacement probabilities must be >= 0 and sum to 1");
  }
  if (mask_token.empty() || split_tokens(mask_token).size() != 1 ||
      split_tokens(mask_token).front() != mask_token) {
    throw ValidationError("mask token must be a single whitespace-free token");
  }
}

SpanLengthSampler::SpanLengthSampler(const CorruptionConfig& config)
    : min_span_(config.min_span), max_span_(config.max_span) {
  config.validate();
  double total = 0.0;
  for (std::size_t l = min_span_; l <= max_span_; ++l) {
    total += std::pow(1.0 - config.geometric_p, static_cast<double>(l - 1)) *
             config.geometric_p;
    cumulative_.push_back(total);
  }
  for (auto& c : cumulative_) c /= total;
}

std::size_t SpanLengthSampler::operator()(Rng& rng) const {
  const double u = uniform_unit(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto offset = std::min<std::size_t>(
      static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  return min_span_ + offset;
}

std::size_t sample_span_length(Rng& rng, const CorruptionConfig& config) {
  return SpanLengthSampler(config)(rng);
}

std::size_t mask_budget(double ratio, std::size_t length) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(length) + 0.5));
}

Corrupter::Corrupter(CorruptionConfig config)
    : config_(std::move(config)), sampler_(config_) {
  std::unordered_set<std::string> excluded(config_.reserved_tokens.begin(),
                                           config_.reserved_tokens.end());
  excluded.insert(config_.mask_token);
  std::unordered_set<std::string> kept;
  for (const auto& token : config_.vocabulary) {
    if (token.empty() || split_tokens(token).size() != 1 ||
        split_tokens(token).front() != token) {
      throw ValidationError("vocabulary token '" + token + "' is not a single token");
    }
    if (!excluded.contains(token) && kept.insert(token).second) {
      candidates_.push_back(token);
    }
  }
  if (candidates_.empty() && config_.replace_probs.random > 0.0) {
    throw ValidationError(
        "random replacement needs a vocabulary with at least one usable token");
  }
}

CorruptedSequence Corrupter::operator()(const Sentence& target, Rng& rng) const {
  const std::size_t n = target.size();
  const std::size_t budget = mask_budget(config_.ratio, n);

  std::vector<std::uint8_t> mask(n, 0);
  Tokens corrupted = target.tokens();
  std::vector<CorruptedSpan> spans;
  std::vector<SpanDraw> draws;

  auto record = [&](std::size_t start, std::size_t length, ReplacementKind kind) {
    for (std::size_t k = 0; k < length; ++k) {
      const std::size_t t = start + k;
      mask[t] = 1;
      if (kind == ReplacementKind::kMask) {
        corrupted[t] = config_.mask_token;
      } else if (kind == ReplacementKind::kRandom) {
        corrupted[t] = candidates_[uniform_below(rng, candidates_.size())];
      }
    }
    spans.push_back({start, length, kind});
  };

  std::size_t masked = 0;
  while (masked < budget) {
    const std::size_t sampled = sampler_(rng);
    std::size_t length = std::min(sampled, budget - masked);

    std::size_t start = n;
    if (length <= longest_free_run(mask)) {
      for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const auto candidate = static_cast<std::size_t>(uniform_below(rng, n));
        if (ring_free(mask, candidate, length)) {
          start = candidate;
          break;
        }
      }
    }
    if (start == n) {
      // Fill forward from a random free position.
      std::vector<std::size_t> free_positions;
      for (std::size_t t = 0; t < n; ++t) {
        if (mask[t] == 0) free_positions.push_back(t);
      }
      start = free_positions[uniform_below(rng, free_positions.size())];
      std::size_t run = 0;
      while (run < length && mask[(start + run) % n] == 0) ++run;
      length = run;
    }

    const ReplacementKind kind = draw_kind(config_.replace_probs, rng);
    const std::size_t head = std::min(length, n - start);
    record(start, head, kind);
    if (head < length) record(0, length - head, kind);
    draws.push_back({sampled, length, kind});
    masked += length;
  }

  std::sort(spans.begin(), spans.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  return CorruptedSequence{target, Sentence(std::move(corrupted)), std::move(mask),
                           std::move(spans), std::move(draws)};
}

CorruptedSequence Corrupter::corrupt(const Sentence& target, SentenceId id) const {
  Rng rng = make_stream(config_.seed, "corrupter", id);
  return (*this)(target, rng);
}

CorruptedSequence corrupt(const Sentence& target, const CorruptionConfig& config,
                          Rng& rng) {
  return Corrupter(config)(target, rng);
}

std::string to_jsonl(SentenceId id, const CorruptedSequence& sequence) {
  using json = nlohmann::ordered_json;
  json spans = json::array();
  for (const auto& s : sequence.spans) {
    spans.push_back(json::array({s.start, s.length, to_string(s.kind)}));
  }
  const json object{{"id", id},
                    {"y", sequence.original.tokens()},
                    {"y_tilde", sequence.corrupted.tokens()},
                    {"mask", sequence.mask},
                    {"spans", std::move(spans)}};
  return object.dump();
}

}  // namespace termcorpus
