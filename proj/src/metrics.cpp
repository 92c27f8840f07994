#include "vtag/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "vtag/errors.hpp"

namespace vtag {

namespace {

void validate(const std::vector<ScoreVec>& preds,
              const std::vector<GroundTruth>& truths) {
  if (preds.size() != truths.size())
    throw DimensionError("metrics: prediction/truth counts disagree");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (truths[i].labels.empty())
      throw LabelError("metrics: ground truth must be non-empty");
    for (int l : truths[i].labels)
      if (l < 0 || static_cast<std::size_t>(l) >= preds[i].size())
        throw VocabularyError("metrics: truth label outside score vector");
  }
}

// Label ids ranked by score descending, ties by ascending id.
std::vector<int> ranked_labels(const ScoreVec& scores) {
  std::vector<int> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

bool is_truth(const GroundTruth& truth, int label) {
  return std::binary_search(truth.labels.begin(), truth.labels.end(), label);
}

std::vector<int> sorted_labels(const GroundTruth& t) {
  std::vector<int> s = t.labels;
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

double hit_at_k(const std::vector<ScoreVec>& preds,
                const std::vector<GroundTruth>& truths, std::size_t k) {
  validate(preds, truths);
  if (k < 1) throw DomainError("hit_at_k: k must be >= 1");
  if (preds.empty()) return 0.0;
  double hits = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (k > preds[i].size())
      throw DomainError("hit_at_k: k exceeds the vocabulary");
    const GroundTruth truth{sorted_labels(truths[i])};
    std::vector<int> order = ranked_labels(preds[i]);
    for (std::size_t r = 0; r < k; ++r) {
      if (is_truth(truth, order[r])) {
        hits += 1.0;
        break;
      }
    }
  }
  return hits / static_cast<double>(preds.size());
}

double perr(const std::vector<ScoreVec>& preds,
            const std::vector<GroundTruth>& truths) {
  validate(preds, truths);
  if (preds.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const GroundTruth truth{sorted_labels(truths[i])};
    const std::size_t n = std::min(truth.labels.size(), preds[i].size());
    std::vector<int> order = ranked_labels(preds[i]);
    double correct = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      if (is_truth(truth, order[r])) correct += 1.0;
    total += correct / static_cast<double>(truth.labels.size());
  }
  return total / static_cast<double>(preds.size());
}

double gap(const std::vector<ScoreVec>& preds,
           const std::vector<GroundTruth>& truths, std::size_t top_n) {
  validate(preds, truths);
  if (top_n < 1) throw DomainError("gap: top_n must be >= 1");

  struct PoolEntry {
    double score;
    std::size_t video;
    int label;
    bool correct;
  };
  std::vector<PoolEntry> pool;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const GroundTruth truth{sorted_labels(truths[i])};
    std::vector<int> order = ranked_labels(preds[i]);
    const std::size_t n = std::min(top_n, order.size());
    for (std::size_t r = 0; r < n; ++r)
      pool.push_back({preds[i][order[r]], i, order[r], is_truth(truth, order[r])});
  }
  if (pool.empty()) throw MetricError("gap: empty prediction pool");

  std::stable_sort(pool.begin(), pool.end(), [](const PoolEntry& a, const PoolEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.video != b.video) return a.video < b.video;
    return a.label < b.label;
  });

  std::size_t positives = 0;
  for (const auto& e : pool) positives += e.correct ? 1 : 0;
  if (positives == 0) return 0.0;

  double ap = 0.0;
  std::size_t seen_correct = 0;
  for (std::size_t r = 0; r < pool.size(); ++r) {
    if (!pool[r].correct) continue;
    ++seen_correct;
    const double precision =
        static_cast<double>(seen_correct) / static_cast<double>(r + 1);
    ap += precision / static_cast<double>(positives);
  }
  return ap;
}

MetricReport compute_metrics(const std::vector<ScoreVec>& preds,
                             const std::vector<GroundTruth>& truths) {
  MetricReport report;
  report.hit1 = hit_at_k(preds, truths, 1);
  report.perr = perr(preds, truths);
  report.gap = gap(preds, truths);
  return report;
}

void write_report_csv(std::ostream& out, const MetricReport& report) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "hit1,%.17g\n", report.hit1);
  out << buf;
  std::snprintf(buf, sizeof(buf), "perr,%.17g\n", report.perr);
  out << buf;
  std::snprintf(buf, sizeof(buf), "gap,%.17g\n", report.gap);
  out << buf;
}

void write_report_text(std::ostream& out, const MetricReport& report) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "Hit@1 %.1f%% | PERR %.1f%% | GAP %.1f%%\n",
                100.0 * report.hit1, 100.0 * report.perr, 100.0 * report.gap);
  out << buf;
}

}  // namespace vtag
