#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "termcorpus/types.h"

namespace termcorpus {

// Externally computed token log-probabilities for one sentence. Both vectors
// cover target positions 1..T+1, the last entry scoring end-of-sequence.
struct LogProbRecord {
  SentenceId id = 0;
  std::vector<double> translation_logprobs;
  std::optional<std::vector<double>> ssp_logprobs;
  // One bit per position in ssp_logprobs. A mask of length T (as emitted by
  // the corrupter) is padded with a 0 for the end-of-sequence slot.
  std::optional<std::vector<std::uint8_t>> mask;

  // Throws ValidationError on positive or NaN log-probabilities, an empty
  // translation vector, SSP scores without a mask, or mismatched lengths.
  void validate() const;
};

struct LossConfig {
  double gamma = 0.5;
};

struct LossBreakdown {
  double gamma = 0.0;
  // Sentence means.
  double translation_nll = 0.0;
  double ssp_nll = 0.0;
  double total = 0.0;
  std::size_t n_sentences = 0;
  std::size_t n_masked = 0;
  std::size_t n_positions = 0;
  // Token-normalized view: translation NLL per scored position, SSP NLL per
  // masked position.
  double translation_nll_per_token = 0.0;
  double ssp_nll_per_masked_token = 0.0;
  double total_per_token = 0.0;
};

// -sum of translation log-probabilities.
double translation_nll(const LogProbRecord& record);

// -sum over positions with mask bit 1 of the SSP log-probabilities. Throws
// ValidationError when the record has no SSP scores or no mask.
double ssp_nll(const LogProbRecord& record);

// total = mean(translation_nll) + gamma * mean(ssp_nll); records without SSP
// scores contribute zero to the SSP mean. Reductions are compensated, so the
// result does not depend on record order beyond rounding of the final sum.
LossBreakdown total_loss(std::span<const LogProbRecord> records,
                         const LossConfig& config = {});

// `{"id":int, "lp":[..], "ssp_lp":[..]?, "mask":[..]?}`
LogProbRecord parse_logprob_record(std::string_view line, std::size_t line_no = 0);
std::vector<LogProbRecord> read_logprob_records(std::istream& in);
std::vector<LogProbRecord> load_logprob_records(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const LossBreakdown& loss, bool per_token);

}  // namespace termcorpus
