#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace vtag {

// Per-video ground-truth labels; must be non-empty.
struct GroundTruth {
  std::vector<int> labels;
};

using ScoreVec = std::vector<double>;

// Fraction of videos whose top-k predictions intersect the truth. Ranking
// ties break by ascending label id.
double hit_at_k(const std::vector<ScoreVec>& preds,
                const std::vector<GroundTruth>& truths, std::size_t k);

// Precision at equal recall rate: per video, the fraction of the top-|truth|
// predictions that are correct, averaged over videos.
double perr(const std::vector<ScoreVec>& preds,
            const std::vector<GroundTruth>& truths);

// Global average precision: each video contributes its top_n (score,
// correct) pairs to one global pool, sorted by score descending (ties by
// video index then label id); AP over the pool with recall measured against
// the pooled positives.
double gap(const std::vector<ScoreVec>& preds,
           const std::vector<GroundTruth>& truths, std::size_t top_n = 20);

struct MetricReport {
  double hit1 = 0.0;
  double perr = 0.0;
  double gap = 0.0;
};

MetricReport compute_metrics(const std::vector<ScoreVec>& preds,
                             const std::vector<GroundTruth>& truths);

// metric,value lines (fractions, full precision).
void write_report_csv(std::ostream& out, const MetricReport& report);
// Human-readable block; percentages with one decimal.
void write_report_text(std::ostream& out, const MetricReport& report);

}  // namespace vtag
