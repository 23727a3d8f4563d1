/*
 * Copyright 2026 The DriftAlign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Retrieval scoring and the standard 3D object retrieval metrics: mAP, NDCG
// with binary relevance, MPEG-7 ANMRR and an interpolated precision-recall
// curve. Rankings sort by descending score with ties broken by ascending
// target index.

#ifndef DRIFTALIGN_RETRIEVAL_EVAL_H_
#define DRIFTALIGN_RETRIEVAL_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace driftalign {

// S x N, row i holds the scores of query i against every target.
struct RetrievalMatrix {
  Eigen::MatrixXd scores;
};

using TargetRanking = std::vector<std::uint32_t>;

// Membership mask over target indices.
using RelevanceMask = std::vector<bool>;

inline constexpr std::size_t kPrLevels = 100;

struct PRCurve {
  std::vector<double> recall;     // 0.01, 0.02, ..., 1.00
  std::vector<double> precision;  // interpolated, macro-averaged
};

struct QueryMetrics {
  std::size_t query_index;
  double ap;
  double ndcg;
  double nmrr;
};

struct MetricsReport {
  std::vector<QueryMetrics> per_query;  // non-skipped queries, index order
  std::vector<std::size_t> skipped;     // queries with no relevant target
  double map = 0.0;
  double ndcg = 0.0;
  double anmrr = 0.0;
  PRCurve pr_curve;
};

// R = Q_bar X^T.
RetrievalMatrix ScoreMatrix(const Eigen::MatrixXd& q_bar,
                            const Eigen::MatrixXd& targets);

std::vector<TargetRanking> Rank(const RetrievalMatrix& r);
TargetRanking RankRow(const Eigen::Ref<const Eigen::RowVectorXd>& scores);

// The per-query metrics return nullopt when the relevant set is empty; the
// caller treats that as "skip this query".
std::optional<double> AveragePrecision(std::span<const std::uint32_t> ranking,
                                       const RelevanceMask& relevant);
std::optional<double> Ndcg(std::span<const std::uint32_t> ranking,
                           const RelevanceMask& relevant);
// NMRR of one query given GTM, the largest relevant-set size over all
// queries.
std::optional<double> Nmrr(std::span<const std::uint32_t> ranking,
                           const RelevanceMask& relevant,
                           std::size_t ground_truth_max);

// Mean NMRR over queries with relevant items. Throws EvaluationError if no
// query has any.
double Anmrr(std::span<const TargetRanking> rankings,
             std::span<const RelevanceMask> relevant);

PRCurve PrCurveForQuery(std::span<const std::uint32_t> ranking,
                        const RelevanceMask& relevant);
// Macro-average over queries with relevant items. Throws EvaluationError if
// there are none.
PRCurve ComputePrCurve(std::span<const TargetRanking> rankings,
                       std::span<const RelevanceMask> relevant);

// relevant[i][t] = (query_labels[i] == target_labels[t]).
std::vector<RelevanceMask> RelevanceFromLabels(
    std::span<const std::string> query_labels,
    std::span<const std::string> target_labels);

// Full protocol: score, rank, relevance by shared label, metrics. Throws
// ValidationError on label/row count mismatch and EvaluationError if no query
// has a same-label target.
MetricsReport Evaluate(const Eigen::MatrixXd& q_bar,
                       const Eigen::MatrixXd& targets,
                       std::span<const std::string> query_labels,
                       std::span<const std::string> target_labels);

// Aggregates computed from rankings and relevance directly.
MetricsReport EvaluateRankings(std::span<const TargetRanking> rankings,
                               std::span<const RelevanceMask> relevant);

// JSON with keys map, ndcg, anmrr (percent, 4 decimals), per_query and
// skipped.
std::string MetricsToJson(const MetricsReport& report);
void WritePrCurveCsv(const PRCurve& curve, std::ostream& out);

}  // namespace driftalign

#endif  // DRIFTALIGN_RETRIEVAL_EVAL_H_
