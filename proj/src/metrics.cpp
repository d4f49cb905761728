// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "spl/train.hpp"

namespace spl {

namespace {

ClassId true_label_of(const ClipRecord& r) {
  if (!r.true_label) fail(ErrorKind::MissingTrueLabel, "clip " + r.clip_id + " has no true_label");
  return *r.true_label;
}

}  // namespace

template <Classifier M>
ScoreMatrix score_records(const M& model, std::span<const ClipRecord> records) {
  ScoreMatrix out;
  out.num_classes = model.num_classes();
  out.scores.reserve(records.size() * out.num_classes);
  for (const auto& r : records) {
    const auto pred = predict(model, r.features);
    out.scores.insert(out.scores.end(), pred.probabilities.begin(), pred.probabilities.end());
  }
  return out;
}

bool in_top_k(std::span<const double> scores, std::size_t label, std::size_t k) {
  const double s = scores[label];
  std::size_t ahead = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > s || (scores[j] == s && j < label)) ++ahead;
  }
  return ahead < k;
}

double top_k_accuracy(const ScoreMatrix& scores, std::span<const ClipRecord> records, std::size_t k) {
  if (k < 1 || k > scores.num_classes) {
    fail(ErrorKind::KOutOfRange, "k = " + std::to_string(k) + " not in [1, " + std::to_string(scores.num_classes) + "]");
  }
  if (scores.num_records() != records.size()) {
    fail(ErrorKind::DimensionMismatch, "score rows do not match record count");
  }
  if (records.empty()) fail(ErrorKind::EmptyDataset, "top-k accuracy of an empty record set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ClassId y = true_label_of(records[i]);
    if (y >= scores.num_classes) {
      fail(ErrorKind::LabelOutOfRange, "clip " + records[i].clip_id + ": true_label outside model classes");
    }
    if (in_top_k(scores.row(i), y, k)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

template <Classifier M>
double top_k_accuracy(const M& model, std::span<const ClipRecord> records, std::size_t k) {
  if (k < 1 || k > model.num_classes()) {
    fail(ErrorKind::KOutOfRange, "k = " + std::to_string(k) + " not in [1, " + std::to_string(model.num_classes()) + "]");
  }
  for (const auto& r : records) true_label_of(r);
  return top_k_accuracy(score_records(model, records), records, k);
}

EvalReport evaluate(const ScoreMatrix& scores, std::span<const ClipRecord> records) {
  EvalReport report;
  report.num_samples = records.size();
  report.top1 = top_k_accuracy(scores, records, 1);
  if (scores.num_classes >= 5) report.top5 = top_k_accuracy(scores, records, 5);
  report.per_class_accuracy.assign(scores.num_classes, 0.0);
  report.per_class_support.assign(scores.num_classes, 0);
  std::vector<std::size_t> hits(scores.num_classes, 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ClassId y = *records[i].true_label;
    ++report.per_class_support[y];
    if (in_top_k(scores.row(i), y, 1)) ++hits[y];
  }
  for (std::size_t c = 0; c < scores.num_classes; ++c) {
    if (report.per_class_support[c] > 0) {
      report.per_class_accuracy[c] =
          static_cast<double>(hits[c]) / static_cast<double>(report.per_class_support[c]);
    }
  }
  return report;
}

template <Classifier M>
EvalReport evaluate(const M& model, std::span<const ClipRecord> records) {
  for (const auto& r : records) true_label_of(r);
  return evaluate(score_records(model, records), records);
}

double average_precision(const ScoreMatrix& scores, std::span<const ClassId> true_labels, ClassId cls) {
  if (scores.num_records() != true_labels.size()) {
    fail(ErrorKind::DimensionMismatch, "score rows do not match label count");
  }
  if (cls >= scores.num_classes) fail(ErrorKind::LabelOutOfRange, "class outside score matrix");
  std::vector<std::size_t> order(true_labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores.row(a)[cls] > scores.row(b)[cls];
  });
  // Extended precision keeps simple rational cases (e.g. 5/6) exact after rounding.
  long double precision_sum = 0.0L;
  std::size_t positives = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (true_labels[order[rank]] != cls) continue;
    ++positives;
    precision_sum += static_cast<long double>(positives) / static_cast<long double>(rank + 1);
  }
  if (positives == 0) fail(ErrorKind::NoPositives, "class " + std::to_string(cls) + " has no positive samples");
  return static_cast<double>(precision_sum / static_cast<long double>(positives));
}

double mean_ap_excluding_background(const ScoreMatrix& scores, std::span<const ClassId> true_labels,
                                    std::optional<ClassId> background_class) {
  double sum = 0.0;
  std::size_t classes = 0;
  for (ClassId c = 0; c < scores.num_classes; ++c) {
    if (background_class && c == *background_class) continue;
    sum += average_precision(scores, true_labels, c);
    ++classes;
  }
  if (classes == 0) fail(ErrorKind::InvalidArgument, "no non-background classes to average");
  return sum / static_cast<double>(classes);
}

namespace {

ClassDistribution histogram(std::span<const ClipRecord> records, std::size_t num_classes,
                            const std::vector<bool>& diagonal_class) {
  ClassDistribution out;
  out.class_counts.assign(num_classes, 0);
  for (const auto& r : records) {
    if (!r.pseudo_label) fail(ErrorKind::MissingPseudoLabel, "clip " + r.clip_id + " has no pseudo_label");
    if (*r.pseudo_label >= num_classes) {
      fail(ErrorKind::LabelOutOfRange, "clip " + r.clip_id + ": pseudo_label " + std::to_string(*r.pseudo_label) +
                                           " outside label space of " + std::to_string(num_classes));
    }
    ++out.class_counts[*r.pseudo_label];
  }
  out.total = records.size();
  if (num_classes > 0) {
    std::vector<std::uint64_t> sorted = out.class_counts;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    out.median = sorted.size() % 2 == 1 ? static_cast<double>(sorted[mid])
                                        : 0.5 * (static_cast<double>(sorted[mid - 1]) + static_cast<double>(sorted[mid]));
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto count = static_cast<double>(out.class_counts[c]);
    if (count > out.median) ++out.head_classes;
    if (count < out.median) ++out.tail_classes;
    if (out.class_counts[c] == 0) out.empty_classes.push_back(static_cast<ClassId>(c));
    (diagonal_class[c] ? out.diagonal_mass : out.off_diagonal_mass) += out.class_counts[c];
  }
  return out;
}

}  // namespace

ClassDistribution class_distribution(std::span<const ClipRecord> records, std::size_t num_classes,
                                     std::size_t n) {
  std::vector<bool> diagonal(num_classes, false);
  for (std::size_t c = 0; c < std::min(n, num_classes); ++c) diagonal[c] = true;
  return histogram(records, num_classes, diagonal);
}

ClassDistribution class_distribution(std::span<const ClipRecord> records, const SplLabelSpace& space) {
  std::vector<bool> diagonal(space.num_classes(), false);
  for (std::size_t w = 0; w < space.n().value(); ++w) diagonal[*space.class_of(w, w)] = true;
  return histogram(records, space.num_classes(), diagonal);
}

template ScoreMatrix score_records<LinearSoftmaxModel>(const LinearSoftmaxModel&, std::span<const ClipRecord>);
template ScoreMatrix score_records<MlpModel>(const MlpModel&, std::span<const ClipRecord>);
template double top_k_accuracy<LinearSoftmaxModel>(const LinearSoftmaxModel&, std::span<const ClipRecord>, std::size_t);
template double top_k_accuracy<MlpModel>(const MlpModel&, std::span<const ClipRecord>, std::size_t);
template EvalReport evaluate<LinearSoftmaxModel>(const LinearSoftmaxModel&, std::span<const ClipRecord>);
template EvalReport evaluate<MlpModel>(const MlpModel&, std::span<const ClipRecord>);

}  // namespace spl
