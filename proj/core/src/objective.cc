#include "termcorpus/objective.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <string>

#include "termcorpus/error.h"
#include "termcorpus/summation.h"

namespace termcorpus {
namespace {

void check_logprobs(const std::vector<double>& values, const char* what,
                    SentenceId id) {
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (!(values[t] <= 0.0)) {
      throw ValidationError("record " + std::to_string(id) + ": " + what +
                            "[" + std::to_string(t) +
                            "] is not a log-probability (must be <= 0)");
    }
  }
}

// Mask aligned with ssp_logprobs.
std::vector<std::uint8_t> aligned_mask(const LogProbRecord& r) {
  auto mask = *r.mask;
  if (mask.size() + 1 == r.ssp_logprobs->size()) mask.push_back(0);
  return mask;
}

std::size_t mask_count(const LogProbRecord& r) {
  std::size_t n = 0;
  for (auto bit : *r.mask) n += bit;
  return n;
}

}  // namespace

void LogProbRecord::validate() const {
  if (translation_logprobs.empty()) {
    throw ValidationError("record " + std::to_string(id) + ": no log-probabilities");
  }
  check_logprobs(translation_logprobs, "lp", id);
  if (ssp_logprobs) {
    check_logprobs(*ssp_logprobs, "ssp_lp", id);
    if (!mask) {
      throw ValidationError("record " + std::to_string(id) +
                            ": SSP log-probabilities require a mask");
    }
    if (ssp_logprobs->size() != translation_logprobs.size()) {
      throw ValidationError("record " + std::to_string(id) +
                            ": lp and ssp_lp lengths differ");
    }
  }
  if (mask) {
    const auto expected = translation_logprobs.size();
    if (mask->size() != expected && mask->size() + 1 != expected) {
      throw ValidationError("record " + std::to_string(id) +
                            ": mask length does not match the scored positions");
    }
    for (auto bit : *mask) {
      if (bit > 1) {
        throw ValidationError("record " + std::to_string(id) + ": mask bits must be 0/1");
      }
    }
  }
}

double translation_nll(const LogProbRecord& record) {
  record.validate();
  CompensatedSum sum;
  for (double lp : record.translation_logprobs) sum += -lp;
  return sum.value();
}

double ssp_nll(const LogProbRecord& record) {
  if (!record.ssp_logprobs || !record.mask) {
    throw ValidationError("record " + std::to_string(record.id) +
                          ": SSP loss needs ssp_lp and mask");
  }
  record.validate();
  const auto mask = aligned_mask(record);
  CompensatedSum sum;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (mask[t] != 0) sum += -(*record.ssp_logprobs)[t];
  }
  return sum.value();
}

LossBreakdown total_loss(std::span<const LogProbRecord> records,
                         const LossConfig& config) {
  if (records.empty()) throw ValidationError("loss needs at least one record");
  if (!(config.gamma >= 0.0)) throw ValidationError("gamma must be >= 0");

  CompensatedSum translation;
  CompensatedSum ssp;
  LossBreakdown out;
  out.gamma = config.gamma;
  for (const auto& r : records) {
    translation += translation_nll(r);
    out.n_positions += r.translation_logprobs.size();
    if (r.ssp_logprobs) {
      ssp += ssp_nll(r);
      out.n_masked += mask_count(r);
    }
  }
  out.n_sentences = records.size();
  const auto n = static_cast<double>(records.size());
  out.translation_nll = translation.value() / n;
  out.ssp_nll = ssp.value() / n;
  out.total = out.translation_nll + config.gamma * out.ssp_nll;

  out.translation_nll_per_token =
      translation.value() / static_cast<double>(out.n_positions);
  out.ssp_nll_per_masked_token =
      out.n_masked > 0 ? ssp.value() / static_cast<double>(out.n_masked) : 0.0;
  out.total_per_token =
      out.translation_nll_per_token + config.gamma * out.ssp_nll_per_masked_token;
  return out;
}

LogProbRecord parse_logprob_record(std::string_view line, std::size_t line_no) {
  const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
  try {
    const auto object = nlohmann::json::parse(line);
    LogProbRecord r;
    r.id = object.at("id").get<SentenceId>();
    r.translation_logprobs = object.at("lp").get<std::vector<double>>();
    if (object.contains("ssp_lp") && !object.at("ssp_lp").is_null()) {
      r.ssp_logprobs = object.at("ssp_lp").get<std::vector<double>>();
    }
    if (object.contains("mask") && !object.at("mask").is_null()) {
      r.mask = object.at("mask").get<std::vector<std::uint8_t>>();
    }
    r.validate();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where() + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(where() + e.what());
  }
}

std::vector<LogProbRecord> read_logprob_records(std::istream& in) {
  std::vector<LogProbRecord> records;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    records.push_back(parse_logprob_record(line, line_no));
  }
  if (in.bad()) throw IoError("error reading log-probability records");
  return records;
}

std::vector<LogProbRecord> load_logprob_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_logprob_records(in);
}

nlohmann::ordered_json to_json(const LossBreakdown& loss, bool per_token) {
  nlohmann::ordered_json out{{"gamma", loss.gamma},
                             {"translation_nll", loss.translation_nll},
                             {"ssp_nll", loss.ssp_nll},
                             {"total", loss.total},
                             {"n_sentences", loss.n_sentences},
                             {"n_masked", loss.n_masked},
                             {"n_positions", loss.n_positions}};
  if (per_token) {
    out["per_token"] = {{"translation_nll", loss.translation_nll_per_token},
                        {"ssp_nll", loss.ssp_nll_per_masked_token},
                        {"total", loss.total_per_token}};
  }
  return out;
}

}  // namespace termcorpus
