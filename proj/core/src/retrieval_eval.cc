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

#include "driftalign/retrieval_eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "driftalign/error.h"

namespace driftalign {
namespace {

std::size_t CountRelevant(const RelevanceMask& relevant) {
  return static_cast<std::size_t>(
      std::count(relevant.begin(), relevant.end(), true));
}

void CheckRanking(std::span<const std::uint32_t> ranking,
                  const RelevanceMask& relevant) {
  if (ranking.size() != relevant.size()) {
    throw ValidationError("ranking length " + std::to_string(ranking.size()) +
                          " does not match relevance mask length " +
                          std::to_string(relevant.size()));
  }
}

double RoundPercent(double fraction) {
  return std::round(fraction * 1e6) / 1e4;
}

}  // namespace

RetrievalMatrix ScoreMatrix(const Eigen::MatrixXd& q_bar,
                            const Eigen::MatrixXd& targets) {
  if (q_bar.cols() != targets.cols()) {
    throw ValidationError("query dim " + std::to_string(q_bar.cols()) +
                          " does not match target dim " +
                          std::to_string(targets.cols()));
  }
  return {q_bar * targets.transpose()};
}

TargetRanking RankRow(const Eigen::Ref<const Eigen::RowVectorXd>& scores) {
  TargetRanking order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::uint32_t a, std::uint32_t b) {
                     return scores(a) > scores(b);
                   });
  return order;
}

std::vector<TargetRanking> Rank(const RetrievalMatrix& r) {
  std::vector<TargetRanking> rankings;
  rankings.reserve(static_cast<std::size_t>(r.scores.rows()));
  for (Eigen::Index i = 0; i < r.scores.rows(); ++i) {
    rankings.push_back(RankRow(r.scores.row(i)));
  }
  return rankings;
}

std::optional<double> AveragePrecision(std::span<const std::uint32_t> ranking,
                                       const RelevanceMask& relevant) {
  CheckRanking(ranking, relevant);
  const std::size_t total = CountRelevant(relevant);
  if (total == 0) return std::nullopt;
  long double sum = 0.0L;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    if (relevant[ranking[k]]) {
      ++hits;
      sum += static_cast<long double>(hits) / static_cast<long double>(k + 1);
    }
  }
  return static_cast<double>(sum / static_cast<long double>(total));
}

std::optional<double> Ndcg(std::span<const std::uint32_t> ranking,
                           const RelevanceMask& relevant) {
  CheckRanking(ranking, relevant);
  const std::size_t total = CountRelevant(relevant);
  if (total == 0) return std::nullopt;
  double dcg = 0.0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    if (relevant[ranking[k]]) dcg += 1.0 / std::log2(static_cast<double>(k + 2));
  }
  double ideal = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    ideal += 1.0 / std::log2(static_cast<double>(k + 2));
  }
  return dcg / ideal;
}

std::optional<double> Nmrr(std::span<const std::uint32_t> ranking,
                           const RelevanceMask& relevant,
                           std::size_t ground_truth_max) {
  CheckRanking(ranking, relevant);
  const std::size_t ng = CountRelevant(relevant);
  if (ng == 0) return std::nullopt;
  if (ground_truth_max < ng) {
    throw ValidationError("GTM smaller than the query's relevant count");
  }
  const double k = static_cast<double>(std::min(4 * ng, 2 * ground_truth_max));
  double rank_sum = 0.0;
  for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
    if (!relevant[ranking[pos]]) continue;
    const double rank = static_cast<double>(pos + 1);
    rank_sum += rank <= k ? rank : 1.25 * k;
  }
  const double ngd = static_cast<double>(ng);
  const double avr = rank_sum / ngd;
  const double mrr = avr - 0.5 - ngd / 2.0;
  return mrr / (1.25 * k - 0.5 - 0.5 * ngd);
}

double Anmrr(std::span<const TargetRanking> rankings,
             std::span<const RelevanceMask> relevant) {
  return EvaluateRankings(rankings, relevant).anmrr;
}

PRCurve PrCurveForQuery(std::span<const std::uint32_t> ranking,
                        const RelevanceMask& relevant) {
  CheckRanking(ranking, relevant);
  const std::size_t ng = CountRelevant(relevant);
  if (ng == 0) throw EvaluationError("query has no relevant targets");

  const std::size_t n = ranking.size();
  std::vector<std::size_t> hits(n);
  std::vector<double> best_from(n);
  std::size_t h = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (relevant[ranking[k]]) ++h;
    hits[k] = h;
    best_from[k] = static_cast<double>(h) / static_cast<double>(k + 1);
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    best_from[k] = std::max(best_from[k], best_from[k + 1]);
  }

  PRCurve curve;
  curve.recall.resize(kPrLevels);
  curve.precision.resize(kPrLevels);
  std::size_t k = 0;
  for (std::size_t level = 1; level <= kPrLevels; ++level) {
    // Smallest rank whose recall hits/ng reaches level/100.
    while (hits[k] * kPrLevels < level * ng) ++k;
    curve.recall[level - 1] = static_cast<double>(level) / kPrLevels;
    curve.precision[level - 1] = best_from[k];
  }
  return curve;
}

PRCurve ComputePrCurve(std::span<const TargetRanking> rankings,
                       std::span<const RelevanceMask> relevant) {
  return EvaluateRankings(rankings, relevant).pr_curve;
}

std::vector<RelevanceMask> RelevanceFromLabels(
    std::span<const std::string> query_labels,
    std::span<const std::string> target_labels) {
  std::vector<RelevanceMask> relevant(query_labels.size(),
                                      RelevanceMask(target_labels.size()));
  for (std::size_t i = 0; i < query_labels.size(); ++i) {
    for (std::size_t t = 0; t < target_labels.size(); ++t) {
      relevant[i][t] = query_labels[i] == target_labels[t];
    }
  }
  return relevant;
}

MetricsReport EvaluateRankings(std::span<const TargetRanking> rankings,
                               std::span<const RelevanceMask> relevant) {
  if (rankings.size() != relevant.size()) {
    throw ValidationError("ranking count " + std::to_string(rankings.size()) +
                          " does not match relevance count " +
                          std::to_string(relevant.size()));
  }
  std::size_t gtm = 0;
  for (const auto& mask : relevant) gtm = std::max(gtm, CountRelevant(mask));
  if (gtm == 0) {
    throw EvaluationError("no query has a relevant target");
  }

  MetricsReport report;
  report.pr_curve.recall.resize(kPrLevels);
  report.pr_curve.precision.assign(kPrLevels, 0.0);
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    const auto ap = AveragePrecision(rankings[i], relevant[i]);
    if (!ap) {
      report.skipped.push_back(i);
      continue;
    }
    const double ndcg = *Ndcg(rankings[i], relevant[i]);
    const double nmrr = *Nmrr(rankings[i], relevant[i], gtm);
    report.per_query.push_back(QueryMetrics{i, *ap, ndcg, nmrr});

    const PRCurve curve = PrCurveForQuery(rankings[i], relevant[i]);
    report.pr_curve.recall = curve.recall;
    for (std::size_t l = 0; l < kPrLevels; ++l) {
      report.pr_curve.precision[l] += curve.precision[l];
    }
  }

  const double count = static_cast<double>(report.per_query.size());
  for (const auto& q : report.per_query) {
    report.map += q.ap;
    report.ndcg += q.ndcg;
    report.anmrr += q.nmrr;
  }
  report.map /= count;
  report.ndcg /= count;
  report.anmrr /= count;
  for (double& p : report.pr_curve.precision) p /= count;
  return report;
}

MetricsReport Evaluate(const Eigen::MatrixXd& q_bar,
                       const Eigen::MatrixXd& targets,
                       std::span<const std::string> query_labels,
                       std::span<const std::string> target_labels) {
  if (query_labels.size() != static_cast<std::size_t>(q_bar.rows())) {
    throw ValidationError("query label count " +
                          std::to_string(query_labels.size()) +
                          " does not match query rows " +
                          std::to_string(q_bar.rows()));
  }
  if (target_labels.size() != static_cast<std::size_t>(targets.rows())) {
    throw ValidationError("target label count " +
                          std::to_string(target_labels.size()) +
                          " does not match target rows " +
                          std::to_string(targets.rows()));
  }
  const auto rankings = Rank(ScoreMatrix(q_bar, targets));
  const auto relevant = RelevanceFromLabels(query_labels, target_labels);
  return EvaluateRankings(rankings, relevant);
}

std::string MetricsToJson(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["map"] = RoundPercent(report.map);
  doc["ndcg"] = RoundPercent(report.ndcg);
  doc["anmrr"] = RoundPercent(report.anmrr);
  auto per_query = nlohmann::ordered_json::array();
  for (const auto& q : report.per_query) {
    per_query.push_back({{"query_index", q.query_index},
                         {"ap", q.ap},
                         {"ndcg", q.ndcg},
                         {"nmrr", q.nmrr}});
  }
  doc["per_query"] = std::move(per_query);
  doc["skipped"] = report.skipped;
  return doc.dump(2) + "\n";
}

void WritePrCurveCsv(const PRCurve& curve, std::ostream& out) {
  out << "recall,precision\n";
  char line[64];
  for (std::size_t i = 0; i < curve.recall.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.2f,%.10f\n", curve.recall[i],
                  curve.precision[i]);
    out << line;
  }
}

}  // namespace driftalign
