// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "pipeline.h"
#include "termcorpus/analytics.h"
#include "termcorpus/corpus_io.h"
#include "termcorpus/corrupter.h"
#include "termcorpus/matcher.h"
#include "termcorpus/metrics.h"
#include "termcorpus/objective.h"
#include "termcorpus/random.h"
#include "termcorpus/splitter.h"

namespace termcorpus {
namespace {

using Clock = std::chrono::steady_clock;
using testing::make_matched;
using testing::S;
using testing::T;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failure reasons for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
};

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome metric_oracle() {
  const auto start = Clock::now();
  Check c;
  Rng rng(20240613);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e"};
  auto phrase = [&](std::size_t lo, std::size_t hi) {
    Tokens t;
    const auto n = lo + uniform_below(rng, hi - lo + 1);
    for (std::uint64_t i = 0; i < n; ++i) t.push_back(vocab[uniform_below(rng, vocab.size())]);
    return t;
  };
  std::vector<EvalInstance> all;
  std::size_t lsm_instances = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    std::vector<TermPair> terms;
    const auto k = 1 + uniform_below(rng, 4);
    for (std::uint64_t j = 0; j < k; ++j) {
      terms.push_back(TermPair::make(Sentence(phrase(1, 2)), Sentence(phrase(1, 6))));
    }
    auto ref = make_matched(i, "ref", terms);
    for (auto& a : ref.annotations) a.count_in_sentence = 1 + uniform_below(rng, 2);
    EvalInstance inst{phrase(0, 15), std::move(ref)};

    const std::vector<EvalInstance> one{inst};
    const auto expected = oracle::term_usage(one);
    const auto got = term_usage(one);
    c.expect(got.per_n.size() == expected.size(), "instance " + std::to_string(i) + " n-set");
    for (const auto& [n, mt] : expected) {
      const auto it = got.per_n.find(n);
      c.expect(it != got.per_n.end() && it->second.matched == mt.first &&
                   it->second.total == mt.second,
               "instance " + std::to_string(i) + " term_usage n=" + std::to_string(n));
    }
    for (const auto& a : inst.reference.annotations) {
      if (a.target_ngram <= 2) continue;
      ++lsm_instances;
      c.expect(lsm2(inst.hypothesis, a.term) ==
                   oracle::lsm2(inst.hypothesis, a.term.target_term.tokens()),
               "instance " + std::to_string(i) + " lsm2");
    }
    all.push_back(std::move(inst));
  }
  // Pooled reports against pooled oracle counts.
  const auto expected = oracle::term_usage(all);
  const auto got = term_usage(all);
  for (const auto& [n, mt] : expected) {
    c.expect(got.per_n.at(n).matched == mt.first && got.per_n.at(n).total == mt.second,
             "pooled n=" + std::to_string(n));
  }
  double lsm_sum = 0.0;
  std::size_t lsm_count = 0;
  for (const auto& inst : all) {
    for (const auto& a : inst.reference.annotations) {
      if (a.target_ngram <= 2) continue;
      for (std::size_t k = 0; k < a.count_in_sentence; ++k) {
        lsm_sum += oracle::lsm2(inst.hypothesis, a.term.target_term.tokens());
        ++lsm_count;
      }
    }
  }
  const auto report = aggregate_lsm2(all);
  c.expect(report.gt2_micro &&
               std::abs(*report.gt2_micro - lsm_sum / static_cast<double>(lsm_count)) < 1e-12,
           "pooled lsm2 micro");
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s");
  std::ostringstream d;
  d << "10000 instances, " << lsm_instances << " lsm2 terms, " << elapsed << "s";
  for (const auto& f : c.failures) d << "; " << f;
  return {c.failures.empty(), d.str()};
}

Outcome lsm2_examples() {
  const auto term = T("Wasser für Injektionszwecke", "water for injection");
  const double partial = lsm2(S("water for the injection").tokens(), term);
  const double full = lsm2(S("sterile water for injection").tokens(), term);
  const double unigram = lsm2(S("injection with water").tokens(), term);
  std::ostringstream d;
  d.precision(17);
  d << "partial=" << partial << " full=" << full << " unigram=" << unigram;
  return {std::abs(partial - 2.0 / 3.0) <= 1e-12 && full == 1.0 && unigram == 0.0, d.str()};
}

Outcome objective_arithmetic() {
  Check c;
  const std::vector<LogProbRecord> hand{{0, {-0.1, -0.2, -0.3},
                                         std::vector<double>{-0.4, -0.5, -0.6},
                                         std::vector<std::uint8_t>{0, 1, 0}}};
  const double total = total_loss(hand, {0.5}).total;
  c.expect(std::abs(total - 0.85) <= 1e-12, "hand total " + std::to_string(total));

  Rng rng(5);
  std::vector<LogProbRecord> records;
  for (SentenceId id = 0; id < 64; ++id) {
    LogProbRecord r{id, {}, std::vector<double>{}, std::vector<std::uint8_t>{}};
    const auto n = 1 + uniform_below(rng, 20);
    for (std::uint64_t i = 0; i < n; ++i) {
      r.translation_logprobs.push_back(-5.0 * uniform_unit(rng));
      r.ssp_logprobs->push_back(-5.0 * uniform_unit(rng));
      r.mask->push_back(static_cast<std::uint8_t>(uniform_below(rng, 2)));
    }
    records.push_back(std::move(r));
  }
  // Affine: total(g) = a + b g with a, b fixed by g = 0 and g = 1.
  const double a = total_loss(records, {0.0}).total;
  const double b = total_loss(records, {1.0}).total - a;
  for (double g : {0.0, 0.5, 1.0, 2.0}) {
    const double t = total_loss(records, {g}).total;
    c.expect(std::abs(t - (a + b * g)) <= 1e-12, "affine at gamma " + std::to_string(g));
  }
  // gamma = 0 equals the mean translation NLL computed independently.
  long double sum = 0.0L;
  for (const auto& r : records) {
    long double s = 0.0L;
    for (double lp : r.translation_logprobs) s -= lp;
    sum += s;
  }
  const double mean = static_cast<double>(sum / records.size());
  c.expect(std::abs(a - mean) <= 1e-12 && a == total_loss(records, {0.0}).translation_nll,
           "gamma 0 mean");
  std::ostringstream d;
  d.precision(17);
  d << "hand total=" << total;
  for (const auto& f : c.failures) d << "; " << f;
  return {c.failures.empty(), d.str()};
}

struct CorrupterRun {
  Outcome stats;
  Outcome marginals;
};

CorrupterRun corrupter_statistics() {
  const auto start = Clock::now();
  CorruptionConfig config;
  for (int i = 0; i < 1000; ++i) config.vocabulary.push_back("v" + std::to_string(i));
  const Corrupter corrupter(config);
  Tokens tokens;
  for (int i = 0; i < 80; ++i) tokens.push_back("y" + std::to_string(i));
  const Sentence y(tokens);

  const std::size_t sequences = 100000;
  std::size_t bad_budget = 0;
  std::array<std::size_t, 3> kinds{0, 0, 0};
  std::size_t draws = 0;
  double sampled_sum = 0.0;
  double placed_sum = 0.0;
  std::vector<std::size_t> hits(80, 0);
  for (std::size_t i = 0; i < sequences; ++i) {
    const auto out = corrupter.corrupt(y, i);
    std::size_t bits = 0;
    for (std::size_t p = 0; p < 80; ++p) {
      bits += out.mask[p];
      hits[p] += out.mask[p];
    }
    bad_budget += bits != 40;
    for (const auto& d : out.draws) {
      ++kinds[static_cast<std::size_t>(d.kind)];
      sampled_sum += static_cast<double>(d.sampled_length);
      placed_sum += static_cast<double>(d.placed_length);
      ++draws;
    }
  }
  const double elapsed = seconds_since(start);
  const double analytic = oracle::clamped_geometric_mean(0.2, 1, 10);
  const double mean_len = sampled_sum / static_cast<double>(draws);
  std::array<double, 3> pct{};
  const std::array<double, 3> target{80.0, 10.0, 10.0};
  bool kinds_ok = true;
  for (int k = 0; k < 3; ++k) {
    pct[k] = 100.0 * static_cast<double>(kinds[k]) / static_cast<double>(draws);
    kinds_ok = kinds_ok && std::abs(pct[k] - target[k]) <= 1.5;
  }
  const bool ok = bad_budget == 0 && kinds_ok && std::abs(mean_len - analytic) <= 0.02 &&
                  elapsed < 60.0;
  std::ostringstream d;
  d.precision(5);
  d << "bad budgets=" << bad_budget << ", kinds%=(" << pct[0] << "," << pct[1] << ","
    << pct[2] << "), mean sampled span=" << mean_len << " vs " << analytic
    << " (placed " << placed_sum / static_cast<double>(draws) << "), " << elapsed << "s";

  double lo = 1.0;
  double hi = 0.0;
  for (auto h : hits) {
    const double rate = static_cast<double>(h) / static_cast<double>(sequences);
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
  }
  std::ostringstream m;
  m << "min=" << lo << " max=" << hi;
  return {{ok, d.str()}, {lo >= 0.45 && hi <= 0.55, m.str()}};
}

Outcome splitter_properties() {
  Check c;
  const std::map<std::size_t, std::size_t> sizes{{1, 6000}, {3, 3000}, {6, 1000}};
  const auto clean = testing::synthetic_corpus(sizes);
  const auto dupes = testing::synthetic_corpus(sizes, 500);
  const std::size_t n = 10000;
  const std::size_t r = 1000;

  auto partition_ok = [](const MatchedCorpus& mc, const SplitResult& res) {
    std::vector<SentenceId> ids;
    for (auto s : {kTrain, kValid, kTest}) {
      for (const auto& m : res.part(s)) ids.push_back(m.id());
    }
    std::sort(ids.begin(), ids.end());
    if (ids.size() != mc.size()) return false;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] != mc.sentences[i].id()) return false;
    }
    return true;
  };

  const auto paper = split(clean, {.heldout_size = r, .seed = 42, .dup_mode = DupMode::kPaper});
  c.expect(partition_ok(clean, paper), "paper partition");
  c.expect(paper.valid.size() == r && paper.test.size() == r,
           "paper sizes " + std::to_string(paper.valid.size()) + "/" +
               std::to_string(paper.test.size()));
  std::ostringstream per_bucket;
  for (const auto& [k, bucket] : sizes) {
    // Exact share R*|b|/N, compared in integers: |count*N - R*|b|| < N.
    const auto counts = paper.bucket_report.at(k);
    for (auto s : {kValid, kTest}) {
      const long diff = static_cast<long>(counts[s] * n) - static_cast<long>(r * bucket);
      c.expect(std::labs(diff) < static_cast<long>(n),
               "bucket " + std::to_string(k) + " share " + std::to_string(counts[s]));
    }
    per_bucket << (per_bucket.tellp() ? "/" : "") << counts[kTest];
  }

  const auto grouped = split(dupes, {.heldout_size = r, .seed = 42});
  c.expect(partition_ok(dupes, grouped), "grouped partition");
  std::map<std::string, std::set<int>> where;
  for (auto s : {kTrain, kValid, kTest}) {
    for (const auto& m : grouped.part(s)) where[m.pair.target.str()].insert(s);
  }
  std::size_t cross = 0;
  for (const auto& [text, splits] : where) cross += splits.size() > 1;
  c.expect(cross == 0, std::to_string(cross) + " cross-split duplicates");
  c.expect(grouped.duplicate_groups == 500, "planted groups detected");

  const auto paper_dupes =
      split(dupes, {.heldout_size = r, .seed = 42, .dup_mode = DupMode::kPaper});
  c.expect(partition_ok(dupes, paper_dupes) && paper_dupes.valid.size() == r &&
               paper_dupes.test.size() == r,
           "paper mode with duplicates");

  for (auto mode : {DupMode::kPaper, DupMode::kGrouped}) {
    std::vector<SplitResult> runs;
    for (unsigned threads : {1u, 1u, 4u, 4u}) {
      runs.push_back(split(dupes, {.heldout_size = r, .seed = 42, .dup_mode = mode,
                                   .threads = threads}));
    }
    for (const auto& other : runs) {
      c.expect(other.train == runs[0].train && other.valid == runs[0].valid &&
                   other.test == runs[0].test && other.bucket_report == runs[0].bucket_report,
               "determinism " + to_string(mode));
    }
  }
  std::ostringstream d;
  d << "paper test per bucket=" << per_bucket.str() << ", grouped sizes="
    << grouped.train.size() << "/" << grouped.valid.size() << "/" << grouped.test.size()
    << ", cross-split=" << cross;
  for (const auto& f : c.failures) d << "; " << f;
  return {c.failures.empty(), d.str()};
}

Outcome matcher_behaviour() {
  Check c;
  const TermDictionary dict({T("Beamter", "officer"), T("öffentlicher Beamter", "public officer")});
  const auto m = match_terms(
      {0, S("der öffentlicher Beamter trat zurück"), S("the public officer resigned")}, dict);
  c.expect(m && m->annotations.size() == 1 &&
               m->annotations[0].term.target_term.str() == "public officer",
           "nested term");

  const auto corpus = filter_corpus_by_length(
      load_corpus(testing::data_path("fixture.de"), testing::data_path("fixture.en")));
  const auto mc = build_matched_corpus(
      corpus, filter_dictionary(load_dictionary(testing::data_path("fixture_dict.tsv"))));
  std::ostringstream out;
  write_matched_corpus(mc.sentences, out);
  c.expect(out.str() == testing::slurp(testing::data_path("fixture_golden.jsonl")),
           "golden bytes");
  std::ostringstream d;
  d << mc.size() << " matched sentences";
  for (const auto& f : c.failures) d << "; " << f;
  return {c.failures.empty(), d.str()};
}

Outcome analytics_checks() {
  Check c;
  const auto council = T("Rat", "Council");
  const MatchedCorpus two{
      {make_matched(0, "the Council and the market",
                    {council, T("Markt", "market"), T("und", "and")}),
       make_matched(1, "the Council met the public officer in Brussels",
                    {council, T("Beamter", "officer"), T("öffentlicher Beamter", "public officer"),
                     T("Brüssel", "Brussels")})},
      {}};
  const auto stats = corpus_stats(two);
  c.expect(stats.avg_terms_per_sent == 3.5, "avg terms " + std::to_string(stats.avg_terms_per_sent));
  std::size_t corpora = 0;
  for (const auto& mc : {two, load_matched_corpus(testing::data_path("fixture_golden.jsonl")),
                         testing::synthetic_corpus({{1, 6000}, {3, 3000}, {6, 1000}}, 500)}) {
    c.expect(ngram_histogram(mc).total() == corpus_stats(mc).n_terms, "histogram total");
    ++corpora;
  }
  std::ostringstream d;
  d << "avg terms/sent=" << stats.avg_terms_per_sent << ", histogram totals on " << corpora
    << " corpora";
  for (const auto& f : c.failures) d << "; " << f;
  return {c.failures.empty(), d.str()};
}

Outcome end_to_end(Clock::time_point suite_start) {
  const auto a = testing::scratch_dir("acceptance_pipeline_a");
  const auto b = testing::scratch_dir("acceptance_pipeline_b");
  const int ca = testing::run_pipeline(a);
  const int cb = testing::run_pipeline(b);
  const auto sa = testing::snapshot(a);
  const auto sb = testing::snapshot(b);
  const double elapsed = seconds_since(suite_start);
  std::ostringstream d;
  d << sa.size() << " files compared, exit codes " << ca << "/" << cb << ", acceptance run "
    << elapsed << "s";
  return {ca == 0 && cb == 0 && !sa.empty() && sa == sb && elapsed < 180.0, d.str()};
}

}  // namespace
}  // namespace termcorpus

int main() {
  using namespace termcorpus;
  const auto start = Clock::now();
  int failed = 0;
  auto report = [&](const char* name, const Outcome& o) {
    std::printf("%s  %-32s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  auto guarded = [&](const char* name, const std::function<Outcome()>& f) {
    try {
      report(name, f());
    } catch (const std::exception& e) {
      report(name, {false, std::string("exception: ") + e.what()});
    }
  };
  guarded("metric oracle equivalence", metric_oracle);
  guarded("lsm2 worked examples", lsm2_examples);
  guarded("objective arithmetic", objective_arithmetic);
  try {
    const auto run = corrupter_statistics();
    report("corrupter statistics", run.stats);
    report("corrupter position marginals", run.marginals);
  } catch (const std::exception& e) {
    report("corrupter statistics", {false, std::string("exception: ") + e.what()});
  }
  guarded("splitter properties", splitter_properties);
  guarded("matcher nested term and golden", matcher_behaviour);
  guarded("analytics stats and histogram", analytics_checks);
  guarded("end-to-end determinism", [&] { return end_to_end(start); });
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
