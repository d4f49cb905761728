// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spl/rng.hpp"

namespace spl {

void softmax(std::span<const double> logits, std::span<double> probs) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - top);
    sum += probs[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) probs[i] /= sum;
}

namespace {

void check_shape(std::size_t num_classes, std::size_t feature_dim) {
  if (num_classes < 2) fail(ErrorKind::InvalidArgument, "model needs >= 2 classes");
  if (feature_dim == 0) fail(ErrorKind::InvalidArgument, "model needs feature_dim >= 1");
}

void check_input(std::span<const double> x, std::size_t feature_dim) {
  if (x.size() != feature_dim) {
    fail(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) + " features, model expects " +
                                           std::to_string(feature_dim));
  }
}

void check_label(ClassId y, std::size_t num_classes) {
  if (y >= num_classes) {
    fail(ErrorKind::LabelOutOfRange, "label " + std::to_string(y) + " not in [0, " +
                                         std::to_string(num_classes - 1) + "]");
  }
}

// Fills probs from logits and turns probs into dL/dlogits in place.
// Returns the clamped loss.
double softmax_cross_entropy(std::span<const double> logits, std::span<double> probs, ClassId y) {
  softmax(logits, probs);
  const double p = probs[y];
  if (p < kProbabilityFloor) {
    // Clamped branch: the loss is constant in the parameters.
    std::fill(probs.begin(), probs.end(), 0.0);
    return -std::log(kProbabilityFloor);
  }
  probs[y] -= 1.0;
  return -std::log(p);
}

void gaussian_fill(Rng& rng, std::span<double> out) {
  for (double& v : out) v = rng.normal(0.0, kInitStddev);
}

}  // namespace

// ---------------------------------------------------------------------------
// LinearSoftmaxModel

LinearSoftmaxModel::LinearSoftmaxModel(std::size_t num_classes, std::size_t feature_dim)
    : num_classes_(num_classes), feature_dim_(feature_dim) {
  check_shape(num_classes, feature_dim);
  params_.assign(num_classes * (feature_dim + 1), 0.0);
}

void LinearSoftmaxModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t nw = num_classes_ * feature_dim_;
  gaussian_fill(rng, std::span<double>(params_).first(nw));
  std::fill(params_.begin() + static_cast<std::ptrdiff_t>(nw), params_.end(), 0.0);
}

std::span<const double> LinearSoftmaxModel::weights() const noexcept {
  return std::span<const double>(params_).first(num_classes_ * feature_dim_);
}

std::span<const double> LinearSoftmaxModel::biases() const noexcept {
  return std::span<const double>(params_).last(num_classes_);
}

LinearSoftmaxModel::Workspace LinearSoftmaxModel::make_workspace() const {
  return {std::vector<double>(num_classes_), std::vector<double>(num_classes_)};
}

void LinearSoftmaxModel::logits(std::span<const double> x, std::span<double> out) const {
  check_input(x, feature_dim_);
  const double* w = params_.data();
  const double* b = params_.data() + num_classes_ * feature_dim_;
  for (std::size_t c = 0; c < num_classes_; ++c) {
    double z = b[c];
    const double* row = w + c * feature_dim_;
    for (std::size_t j = 0; j < feature_dim_; ++j) z += row[j] * x[j];
    out[c] = z;
  }
}

double LinearSoftmaxModel::accumulate_gradient(std::span<const double> x, ClassId y, std::span<double> grad,
                                               Workspace& ws) const {
  check_label(y, num_classes_);
  logits(x, ws.logits);
  const double loss = softmax_cross_entropy(ws.logits, ws.probs, y);
  double* gw = grad.data();
  double* gb = grad.data() + num_classes_ * feature_dim_;
  for (std::size_t c = 0; c < num_classes_; ++c) {
    const double g = ws.probs[c];
    if (g == 0.0) continue;
    double* row = gw + c * feature_dim_;
    for (std::size_t j = 0; j < feature_dim_; ++j) row[j] += g * x[j];
    gb[c] += g;
  }
  return loss;
}

// ---------------------------------------------------------------------------
// MlpModel

MlpModel::MlpModel(std::size_t num_classes, std::size_t feature_dim, std::size_t hidden_width)
    : num_classes_(num_classes), feature_dim_(feature_dim), hidden_width_(hidden_width) {
  check_shape(num_classes, feature_dim);
  if (hidden_width == 0) fail(ErrorKind::InvalidArgument, "hidden width must be >= 1");
  params_.assign(hidden_width * (feature_dim + 1) + num_classes * (hidden_width + 1), 0.0);
}

void MlpModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  std::span<double> p(params_);
  gaussian_fill(rng, p.subspan(0, hidden_width_ * feature_dim_));
  std::fill_n(p.begin() + static_cast<std::ptrdiff_t>(hidden_width_ * feature_dim_), hidden_width_, 0.0);
  gaussian_fill(rng, p.subspan(head_offset(), num_classes_ * hidden_width_));
  std::fill(p.end() - static_cast<std::ptrdiff_t>(num_classes_), p.end(), 0.0);
}

std::span<const double> MlpModel::hidden_weights() const noexcept {
  return std::span<const double>(params_).subspan(0, hidden_width_ * feature_dim_);
}

std::span<const double> MlpModel::hidden_biases() const noexcept {
  return std::span<const double>(params_).subspan(hidden_width_ * feature_dim_, hidden_width_);
}

std::span<const double> MlpModel::head_weights() const noexcept {
  return std::span<const double>(params_).subspan(head_offset(), num_classes_ * hidden_width_);
}

std::span<const double> MlpModel::head_biases() const noexcept {
  return std::span<const double>(params_).last(num_classes_);
}

std::span<const double> MlpModel::hidden_parameters() const noexcept {
  return std::span<const double>(params_).first(head_offset());
}

MlpModel::Workspace MlpModel::make_workspace() const {
  return {std::vector<double>(hidden_width_), std::vector<double>(num_classes_),
          std::vector<double>(num_classes_), std::vector<double>(hidden_width_)};
}

void MlpModel::hidden_forward(std::span<const double> x, std::span<double> hidden) const {
  check_input(x, feature_dim_);
  const double* w = params_.data();
  const double* b = params_.data() + hidden_width_ * feature_dim_;
  for (std::size_t k = 0; k < hidden_width_; ++k) {
    double a = b[k];
    const double* row = w + k * feature_dim_;
    for (std::size_t j = 0; j < feature_dim_; ++j) a += row[j] * x[j];
    hidden[k] = std::tanh(a);
  }
}

void MlpModel::logits(std::span<const double> x, std::span<double> out) const {
  std::vector<double> hidden(hidden_width_);
  hidden_forward(x, hidden);
  const double* w = params_.data() + head_offset();
  const double* b = w + num_classes_ * hidden_width_;
  for (std::size_t c = 0; c < num_classes_; ++c) {
    double z = b[c];
    const double* row = w + c * hidden_width_;
    for (std::size_t k = 0; k < hidden_width_; ++k) z += row[k] * hidden[k];
    out[c] = z;
  }
}

double MlpModel::accumulate_gradient(std::span<const double> x, ClassId y, std::span<double> grad,
                                     Workspace& ws) const {
  check_label(y, num_classes_);
  hidden_forward(x, ws.hidden);
  const std::size_t h = hidden_width_;
  const double* w2 = params_.data() + head_offset();
  const double* b2 = w2 + num_classes_ * h;
  for (std::size_t c = 0; c < num_classes_; ++c) {
    double z = b2[c];
    const double* row = w2 + c * h;
    for (std::size_t k = 0; k < h; ++k) z += row[k] * ws.hidden[k];
    ws.logits[c] = z;
  }
  const double loss = softmax_cross_entropy(ws.logits, ws.probs, y);

  double* gw1 = grad.data();
  double* gb1 = gw1 + h * feature_dim_;
  double* gw2 = grad.data() + head_offset();
  double* gb2 = gw2 + num_classes_ * h;
  std::fill(ws.hidden_grad.begin(), ws.hidden_grad.end(), 0.0);
  for (std::size_t c = 0; c < num_classes_; ++c) {
    const double g = ws.probs[c];
    if (g == 0.0) continue;
    const double* row = w2 + c * h;
    double* grow = gw2 + c * h;
    for (std::size_t k = 0; k < h; ++k) {
      grow[k] += g * ws.hidden[k];
      ws.hidden_grad[k] += g * row[k];
    }
    gb2[c] += g;
  }
  for (std::size_t k = 0; k < h; ++k) {
    const double da = ws.hidden_grad[k] * (1.0 - ws.hidden[k] * ws.hidden[k]);
    if (da == 0.0) continue;
    double* grow = gw1 + k * feature_dim_;
    for (std::size_t j = 0; j < feature_dim_; ++j) grow[j] += da * x[j];
    gb1[k] += da;
  }
  return loss;
}

MlpModel MlpModel::with_head_rows(std::span<const std::size_t> order) const {
  if (order.size() != num_classes_) {
    fail(ErrorKind::DimensionMismatch, "head permutation has " + std::to_string(order.size()) +
                                           " entries, model has " + std::to_string(num_classes_) + " classes");
  }
  MlpModel out = *this;
  const std::size_t h = hidden_width_;
  const double* w2 = params_.data() + head_offset();
  const double* b2 = w2 + num_classes_ * h;
  double* ow2 = out.params_.data() + head_offset();
  double* ob2 = ow2 + num_classes_ * h;
  for (std::size_t i = 0; i < num_classes_; ++i) {
    const std::size_t src = order[i];
    if (src >= num_classes_) fail(ErrorKind::LabelOutOfRange, "head permutation index out of range");
    std::copy_n(w2 + src * h, h, ow2 + i * h);
    ob2[i] = b2[src];
  }
  return out;
}

MlpModel swap_head(const MlpModel& model, std::size_t new_num_classes, std::uint64_t seed) {
  if (new_num_classes < 2) fail(ErrorKind::InvalidArgument, "swap_head needs >= 2 classes");
  MlpModel out(new_num_classes, model.feature_dim(), model.hidden_width());
  auto hidden = model.hidden_parameters();
  std::copy(hidden.begin(), hidden.end(), out.parameters().begin());
  Rng rng(seed);
  auto head = out.parameters().subspan(hidden.size(), new_num_classes * model.hidden_width());
  gaussian_fill(rng, head);
  return out;
}

}  // namespace spl
