#include "termcorpus/metrics.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "termcorpus/error.h"
#include "termcorpus/summation.h"

namespace termcorpus {
namespace {

// Annotation occurrences in checking order: dictionary order, each repeated
// count_in_sentence times.
std::vector<const TermPair*> checking_order(const MatchedSentence& reference) {
  std::vector<const TermAnnotation*> sorted;
  for (const auto& a : reference.annotations) sorted.push_back(&a);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return dictionary_order(a->term, b->term);
  });
  std::vector<const TermPair*> order;
  for (const auto* a : sorted) {
    for (std::size_t k = 0; k < a->count_in_sentence; ++k) order.push_back(&a->term);
  }
  return order;
}

template <typename Map>
std::optional<double> mean_of(const Map& values) {
  if (values.empty()) return std::nullopt;
  CompensatedSum sum;
  for (const auto& [n, v] : values) sum += v;
  return sum.value() / static_cast<double>(values.size());
}

nlohmann::ordered_json rate_json(std::optional<double> rate) {
  return rate ? nlohmann::ordered_json(*rate) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json count_json(const UsageCount& c) {
  return {{"matched", c.matched}, {"total", c.total}, {"rate", rate_json(c.rate())}};
}

}  // namespace

TermMatchResult term_matched(std::span<const std::string> hypothesis,
                             const TermPair& term) {
  const auto& needle = term.target_term.tokens();
  TermMatchResult result{false, Tokens(hypothesis.begin(), hypothesis.end())};
  const auto at = find_subsequence(hypothesis, needle);
  if (!at) return result;
  result.matched = true;
  result.remaining.erase(
      result.remaining.begin() + static_cast<std::ptrdiff_t>(*at),
      result.remaining.begin() + static_cast<std::ptrdiff_t>(*at + needle.size()));
  return result;
}

std::optional<double> UsageCount::rate() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(matched) / static_cast<double>(total);
}

TermUsageReport term_usage(std::span<const EvalInstance> instances) {
  TermUsageReport report;
  for (const auto& instance : instances) {
    Tokens working = instance.hypothesis;
    for (const auto* term : checking_order(instance.reference)) {
      auto hit = term_matched(working, *term);
      if (hit.matched) working = std::move(hit.remaining);
      const std::size_t n = term->target_ngram;
      auto& bucket = n == 1 ? report.unigram : n == 2 ? report.bigram : report.gt2;
      for (auto* c : {&bucket, &report.per_n[n]}) {
        ++c->total;
        if (hit.matched) ++c->matched;
      }
    }
  }
  std::map<std::size_t, double> long_rates;
  for (const auto& [n, c] : report.per_n) {
    if (n > 2 && c.total > 0) long_rates[n] = *c.rate();
  }
  report.gt2_macro = mean_of(long_rates);
  return report;
}

std::size_t longest_shared_run(std::span<const std::string> hypothesis,
                               std::span<const std::string> term) {
  // Longest common substring over tokens, one DP row at a time.
  std::vector<std::size_t> previous(term.size() + 1, 0);
  std::vector<std::size_t> current(term.size() + 1, 0);
  std::size_t best = 0;
  for (const auto& h : hypothesis) {
    for (std::size_t j = 1; j <= term.size(); ++j) {
      current[j] = h == term[j - 1] ? previous[j - 1] + 1 : 0;
      best = std::max(best, current[j]);
    }
    std::swap(previous, current);
  }
  return best;
}

double lsm2(std::span<const std::string> hypothesis, const TermPair& term) {
  const std::size_t l = term.target_ngram;
  if (l <= 2) {
    throw DomainError("LSM-2 is defined only for terms longer than two tokens");
  }
  const std::size_t longest = longest_shared_run(hypothesis, term.target_term.tokens());
  return longest >= 2 ? static_cast<double>(longest) / static_cast<double>(l) : 0.0;
}

LSMReport aggregate_lsm2(std::span<const EvalInstance> instances) {
  LSMReport report;
  std::map<std::size_t, CompensatedSum> sums;
  std::map<std::size_t, std::size_t> counts;
  CompensatedSum pooled;
  for (const auto& instance : instances) {
    for (const auto* term : checking_order(instance.reference)) {
      if (term->target_ngram <= 2) continue;
      const double score = lsm2(instance.hypothesis, *term);
      report.per_instance.push_back(
          {instance.reference.id(), term->target_term.str(), term->target_ngram, score});
      pooled += score;
      sums[term->target_ngram] += score;
      ++counts[term->target_ngram];
    }
  }
  if (report.per_instance.empty()) return report;
  report.gt2_micro = pooled.value() / static_cast<double>(report.per_instance.size());
  for (const auto& [n, sum] : sums) {
    report.per_n_mean[n] = sum.value() / static_cast<double>(counts[n]);
  }
  report.gt2_macro = mean_of(report.per_n_mean);
  return report;
}

std::vector<EvalInstance> pair_instances(std::vector<Tokens> hypotheses,
                                         std::vector<MatchedSentence> references) {
  if (hypotheses.size() != references.size()) {
    throw AlignmentError("hypothesis file has " + std::to_string(hypotheses.size()) +
                         " lines but the reference has " +
                         std::to_string(references.size()) + " sentences");
  }
  std::vector<EvalInstance> instances;
  instances.reserve(references.size());
  for (std::size_t i = 0; i < references.size(); ++i) {
    instances.push_back({std::move(hypotheses[i]), std::move(references[i])});
  }
  return instances;
}

std::vector<Tokens> load_hypotheses(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<Tokens> hypotheses;
  std::string line;
  while (std::getline(in, line)) hypotheses.push_back(split_tokens(line));
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return hypotheses;
}

nlohmann::ordered_json to_json(const TermUsageReport& report) {
  nlohmann::ordered_json per_n = nlohmann::ordered_json::object();
  for (const auto& [n, c] : report.per_n) per_n[std::to_string(n)] = count_json(c);
  return {{"1-gram", count_json(report.unigram)},
          {"2-gram", count_json(report.bigram)},
          {"gt2_micro", count_json(report.gt2)},
          {"gt2_macro", rate_json(report.gt2_macro)},
          {"per_n", std::move(per_n)}};
}

nlohmann::ordered_json to_json(const LSMReport& report) {
  nlohmann::ordered_json per_n = nlohmann::ordered_json::object();
  for (const auto& [n, mean] : report.per_n_mean) per_n[std::to_string(n)] = mean;
  return {{"empty", report.empty()},
          {"instances", report.per_instance.size()},
          {"gt2_micro", rate_json(report.gt2_micro)},
          {"gt2_macro", rate_json(report.gt2_macro)},
          {"per_n", std::move(per_n)}};
}

void write_term_details(std::span<const EvalInstance> instances, std::ostream& out) {
  out << "id\tterm\tn\tmatched\tlsm2\n";
  for (const auto& instance : instances) {
    Tokens working = instance.hypothesis;
    for (const auto* term : checking_order(instance.reference)) {
      auto hit = term_matched(working, *term);
      if (hit.matched) working = std::move(hit.remaining);
      out << instance.reference.id() << '\t' << term->target_term.str() << '\t'
          << term->target_ngram << '\t' << (hit.matched ? 1 : 0) << '\t';
      if (term->target_ngram > 2) {
        out << nlohmann::json(lsm2(instance.hypothesis, *term)).dump();
      }
      out << '\n';
    }
  }
}

}  // namespace termcorpus
