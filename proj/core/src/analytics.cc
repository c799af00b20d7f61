#include "termcorpus/analytics.h"

#include <algorithm>
#include <ostream>
#include <set>
#include <unordered_map>

#include "termcorpus/error.h"

namespace termcorpus {

std::size_t NgramHistogram::total() const {
  std::size_t sum = 0;
  for (const auto& [n, c] : counts) sum += c;
  return sum;
}

CorpusStats corpus_stats(const MatchedCorpus& corpus) {
  if (corpus.empty()) throw ValidationError("statistics need a non-empty corpus");
  CorpusStats stats;
  std::size_t src_words = 0;
  std::size_t tgt_words = 0;
  std::size_t src_instances = 0;
  std::set<Tokens> src_terms;
  std::set<Tokens> tgt_terms;
  for (const auto& s : corpus.sentences) {
    src_words += s.pair.source.size();
    tgt_words += s.pair.target.size();
    for (const auto& a : s.annotations) {
      // Every annotation is an aligned pair, so both sides count alike.
      src_instances += a.count_in_sentence;
      stats.n_terms += a.count_in_sentence;
      src_terms.insert(a.term.source_term.tokens());
      tgt_terms.insert(a.term.target_term.tokens());
    }
  }
  if (src_instances != stats.n_terms) {
    throw ValidationError("source and target term instance counts differ");
  }
  const auto n = static_cast<double>(corpus.size());
  stats.n_sentences = corpus.size();
  stats.avg_words_src = static_cast<double>(src_words) / n;
  stats.avg_words_tgt = static_cast<double>(tgt_words) / n;
  stats.avg_terms_per_sent = static_cast<double>(stats.n_terms) / n;
  stats.unique_terms_src = src_terms.size();
  stats.unique_terms_tgt = tgt_terms.size();
  return stats;
}

std::vector<std::pair<std::string, std::size_t>> top_terms(const MatchedCorpus& corpus,
                                                           std::size_t k) {
  if (k == 0) throw ValidationError("top_terms needs k >= 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& s : corpus.sentences) {
    for (const auto& a : s.annotations) {
      counts[a.term.target_term.str()] += a.count_in_sentence;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

NgramHistogram ngram_histogram(const MatchedCorpus& corpus) {
  NgramHistogram histogram;
  for (const auto& s : corpus.sentences) {
    for (const auto& a : s.annotations) {
      histogram.counts[a.target_ngram] += a.count_in_sentence;
    }
  }
  return histogram;
}

nlohmann::ordered_json to_json(const CorpusStats& stats) {
  return {{"n_sentences", stats.n_sentences},
          {"avg_words_src", stats.avg_words_src},
          {"avg_words_tgt", stats.avg_words_tgt},
          {"n_terms", stats.n_terms},
          {"avg_terms_per_sent", stats.avg_terms_per_sent},
          {"unique_terms_src", stats.unique_terms_src},
          {"unique_terms_tgt", stats.unique_terms_tgt}};
}

void write_histogram_csv(const NgramHistogram& histogram, std::ostream& out) {
  std::size_t last = 20;
  if (!histogram.counts.empty()) last = std::max(last, histogram.counts.rbegin()->first);
  out << "n,count\n";
  for (std::size_t n = 1; n <= last; ++n) {
    const auto it = histogram.counts.find(n);
    out << n << ',' << (it == histogram.counts.end() ? 0 : it->second) << '\n';
  }
}

void write_top_terms_tsv(const std::vector<std::pair<std::string, std::size_t>>& terms,
                         std::ostream& out) {
  out << "term\tcount\n";
  for (const auto& [term, count] : terms) out << term << '\t' << count << '\n';
}

}  // namespace termcorpus
