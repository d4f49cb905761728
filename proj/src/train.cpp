// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "spl/rng.hpp"

namespace spl {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorKind::InvalidArgument, "learning_rate must be positive");
  }
  if (epochs == 0) fail(ErrorKind::InvalidArgument, "epochs must be positive");
  if (batch_size == 0) fail(ErrorKind::InvalidArgument, "batch_size must be positive");
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

namespace {

template <Classifier M>
void check_batch(const M& model, const Dataset& batch) {
  if (batch.empty()) fail(ErrorKind::DimensionMismatch, "empty batch");
  if (batch.feature_dim != model.feature_dim()) {
    fail(ErrorKind::DimensionMismatch, "batch has " + std::to_string(batch.feature_dim) +
                                           " features, model expects " + std::to_string(model.feature_dim()));
  }
}

// Sum (not mean) of per-sample losses over the given rows; gradient summed
// into grad.
template <Classifier M>
double accumulate_rows(const M& model, const Dataset& data, std::span<const std::size_t> rows,
                       std::span<double> grad, typename M::Workspace& ws) {
  double loss = 0.0;
  for (const std::size_t i : rows) loss += model.accumulate_gradient(data.row(i), data.labels[i], grad, ws);
  return loss;
}

}  // namespace

template <Classifier M>
double cross_entropy_loss(const M& model, const Dataset& batch) {
  check_batch(model, batch);
  std::vector<double> logits(model.num_classes());
  std::vector<double> probs(model.num_classes());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const ClassId y = batch.labels[i];
    if (y >= model.num_classes()) {
      fail(ErrorKind::LabelOutOfRange, "label " + std::to_string(y) + " not in [0, " +
                                           std::to_string(model.num_classes() - 1) + "]");
    }
    model.logits(batch.row(i), logits);
    softmax(logits, probs);
    total += -std::log(std::max(probs[y], kProbabilityFloor));
  }
  return total / static_cast<double>(batch.size());
}

template <Classifier M>
double loss_and_gradient(const M& model, const Dataset& batch, std::span<double> grad) {
  check_batch(model, batch);
  if (grad.size() != model.parameters().size()) {
    fail(ErrorKind::DimensionMismatch, "gradient buffer does not match parameter count");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  auto ws = model.make_workspace();
  std::vector<std::size_t> rows(batch.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double loss = accumulate_rows(model, batch, rows, grad, ws) * scale;
  for (double& g : grad) g *= scale;
  return loss;
}

template <Classifier M>
std::vector<double> fit(M& model, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) fail(ErrorKind::EmptyDataset, "cannot train on an empty dataset");
  check_batch(model, data);
  for (const ClassId y : data.labels) {
    if (y >= model.num_classes()) {
      fail(ErrorKind::LabelOutOfRange, "training label " + std::to_string(y) + " not in [0, " +
                                           std::to_string(model.num_classes() - 1) + "]");
    }
  }

  Rng order_rng(derive_seed(cfg.seed, "shuffle"));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(model.parameters().size());
  auto ws = model.make_workspace();
  std::vector<double> history;
  history.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) order_rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const auto rows = std::span<const std::size_t>(order).subspan(start, stop - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      accumulate_rows(model, data, rows, grad, ws);
      const double step = cfg.learning_rate / static_cast<double>(rows.size());
      auto params = model.parameters();
      for (std::size_t p = 0; p < params.size(); ++p) params[p] -= step * grad[p];
    }
    const double loss = cross_entropy_loss(model, data);
    const bool params_finite =
        std::all_of(model.parameters().begin(), model.parameters().end(), [](double v) { return std::isfinite(v); });
    if (!std::isfinite(loss) || !params_finite) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch + 1 << " with learning_rate " << cfg.learning_rate;
      fail(ErrorKind::NonFiniteLoss, msg.str());
    }
    history.push_back(loss);
  }
  return history;
}

template <Classifier M>
M train(M model, const Dataset& data, const TrainConfig& cfg) {
  model.initialize(cfg.seed);
  fit(model, data, cfg);
  return model;
}

template <Classifier M>
Prediction predict(const M& model, std::span<const double> features) {
  std::vector<double> logits(model.num_classes());
  model.logits(features, logits);
  Prediction out;
  out.probabilities.resize(model.num_classes());
  softmax(logits, out.probabilities);
  out.label = static_cast<ClassId>(argmax(out.probabilities));
  return out;
}

template <Classifier M>
double gradient_check(const M& model, const Dataset& batch, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    fail(ErrorKind::InvalidArgument, "gradient_check epsilon must be in [1e-7, 1e-3]");
  }
  check_batch(model, batch);
  std::vector<double> analytic(model.parameters().size());
  loss_and_gradient(model, batch, analytic);

  M probe = model;
  double worst = 0.0;
  for (std::size_t p = 0; p < analytic.size(); ++p) {
    const double original = probe.parameters()[p];
    probe.parameters()[p] = original + epsilon;
    const double up = cross_entropy_loss(probe, batch);
    probe.parameters()[p] = original - epsilon;
    const double down = cross_entropy_loss(probe, batch);
    probe.parameters()[p] = original;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double denom = std::max({std::abs(analytic[p]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic[p] - numeric) / denom);
  }
  return worst;
}

#define SPL_INSTANTIATE(M)                                                                        \
  template double cross_entropy_loss<M>(const M&, const Dataset&);                                \
  template double loss_and_gradient<M>(const M&, const Dataset&, std::span<double>);              \
  template std::vector<double> fit<M>(M&, const Dataset&, const TrainConfig&);                    \
  template M train<M>(M, const Dataset&, const TrainConfig&);                                     \
  template Prediction predict<M>(const M&, std::span<const double>);                              \
  template double gradient_check<M>(const M&, const Dataset&, double);

SPL_INSTANTIATE(LinearSoftmaxModel)
SPL_INSTANTIATE(MlpModel)

#undef SPL_INSTANTIATE

}  // namespace spl
