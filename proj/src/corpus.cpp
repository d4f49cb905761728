// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "spl/rng.hpp"

namespace spl {

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorKind::InvalidSpec, what); }

void check_common(std::size_t n, std::size_t d, double separation, double noise_std) {
  if (n < 2) invalid("n must be >= 2");
  if (d < 2) invalid("feature_dim must be >= 2");
  if (!(separation > 0.0) || !std::isfinite(separation)) invalid("prototype_separation must be positive");
  if (!(noise_std > 0.0) || !std::isfinite(noise_std)) invalid("noise_std must be positive");
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p < 1.0)) invalid(std::string(name) + " must lie in [0, 1)");
}

std::string clip_name(const char* fmt, std::size_t a, std::size_t b, std::size_t c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

void draw_features(Rng& rng, const Matrix& prototypes, std::size_t cls, double noise_std,
                   std::vector<double>& out) {
  out.resize(prototypes.cols);
  for (std::size_t j = 0; j < prototypes.cols; ++j) out[j] = prototypes(cls, j) + noise_std * rng.normal();
}

// Inverse-CDF draw from one relatedness row.
std::size_t draw_related(Rng& rng, const Matrix& relatedness, std::size_t row) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = row;
  for (std::size_t c = 0; c < relatedness.cols; ++c) {
    const double w = relatedness(row, c);
    if (w <= 0.0) continue;
    acc += w;
    last = c;
    if (u < acc) return c;
  }
  return last;
}

}  // namespace

void CorpusSpec::validate() const {
  check_common(n, feature_dim, prototype_separation, noise_std);
  if (videos_per_class == 0) invalid("videos_per_class must be positive");
  if (clips_per_video == 0) invalid("clips_per_video must be positive");
  check_probability(temporal_noise_p, "temporal_noise_p");
  if (background_mode) check_probability(background_noise_p, "background_noise_p");
  if (relatedness.values.empty()) return;
  if (relatedness.rows != n || relatedness.cols != n || relatedness.values.size() != n * n) {
    invalid("relatedness must be N x N");
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (relatedness(r, r) != 0.0) invalid("relatedness diagonal must be zero");
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!(relatedness(r, c) >= 0.0)) invalid("relatedness entries must be non-negative");
      sum += relatedness(r, c);
    }
    if (std::abs(sum - 1.0) > 1e-9) invalid("relatedness row " + std::to_string(r) + " must sum to 1");
  }
}

void TargetSpec::validate() const {
  check_common(n, feature_dim, prototype_separation, noise_std);
  if (clips_per_class == 0) invalid("clips_per_class must be >= 1");
}

Matrix make_prototypes(std::size_t n, std::size_t d, double separation, std::uint64_t seed) {
  if (n < 2) invalid("n must be >= 2");
  if (d < 2) invalid("prototype dimension must be >= 2");
  Rng rng(seed);
  Matrix m{n, d, std::vector<double>(n * d)};
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        m(i, j) = rng.normal();
        norm += m(i, j) * m(i, j);
      }
      norm = std::sqrt(norm);
    } while (norm == 0.0);
    for (std::size_t j = 0; j < d; ++j) m(i, j) *= separation / norm;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double dist = 0.0;
      for (std::size_t j = 0; j < d; ++j) dist += (m(a, j) - m(b, j)) * (m(a, j) - m(b, j));
      if (dist == 0.0) invalid("prototype draw produced coincident vectors; choose another seed");
    }
  }
  return m;
}

Matrix nearest_neighbor_relatedness(const Matrix& prototypes) {
  const std::size_t n = prototypes.rows;
  const std::size_t neighbors = std::min<std::size_t>(2, n - 1);
  Matrix rel{n, n, std::vector<double>(n * n, 0.0)};
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t a = 0; a < n; ++a) {
    dist.clear();
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      double s = 0.0;
      for (std::size_t j = 0; j < prototypes.cols; ++j) {
        const double diff = prototypes(a, j) - prototypes(b, j);
        s += diff * diff;
      }
      dist.emplace_back(s, b);
    }
    std::sort(dist.begin(), dist.end());
    for (std::size_t i = 0; i < neighbors; ++i) rel(a, dist[i].second) = 1.0 / static_cast<double>(neighbors);
  }
  return rel;
}

SyntheticCorpus generate_web_corpus(const CorpusSpec& spec) {
  spec.validate();
  SyntheticCorpus out;
  out.prototypes = make_prototypes(spec.n, spec.feature_dim, spec.prototype_separation, spec.prototype_seed);
  out.relatedness = spec.relatedness.values.empty() ? nearest_neighbor_relatedness(out.prototypes)
                                                    : spec.relatedness;
  Rng rng(spec.seed);
  out.records.reserve(spec.n * spec.videos_per_class * spec.clips_per_video);
  for (std::size_t q = 0; q < spec.n; ++q) {
    const double p = (spec.background_mode && q == 0) ? spec.background_noise_p : spec.temporal_noise_p;
    for (std::size_t v = 0; v < spec.videos_per_class; ++v) {
      const std::string video = clip_name("web-c%03zu-v%05zu", q, v, 0);
      for (std::size_t k = 0; k < spec.clips_per_video; ++k) {
        ClipRecord r;
        r.clip_id = clip_name("web-c%03zu-v%05zu-k%03zu", q, v, k);
        r.video_id = video;
        r.weak_label = static_cast<ClassId>(q);
        const std::size_t shown = rng.uniform() < p ? draw_related(rng, out.relatedness, q) : q;
        r.true_label = static_cast<ClassId>(shown);
        draw_features(rng, out.prototypes, shown, spec.noise_std, r.features);
        out.records.push_back(std::move(r));
      }
    }
  }
  return out;
}

SyntheticCorpus generate_target_set(const TargetSpec& spec) {
  spec.validate();
  SyntheticCorpus out;
  out.prototypes = make_prototypes(spec.n, spec.feature_dim, spec.prototype_separation, spec.prototype_seed);
  Rng rng(spec.seed);
  out.records.reserve(spec.n * spec.clips_per_class);
  for (std::size_t c = 0; c < spec.n; ++c) {
    for (std::size_t i = 0; i < spec.clips_per_class; ++i) {
      ClipRecord r;
      r.clip_id = spec.id_prefix + clip_name("-c%03zu-%05zu", c, i, 0);
      r.video_id = r.clip_id;
      r.weak_label = static_cast<ClassId>(c);
      r.true_label = r.weak_label;
      draw_features(rng, out.prototypes, c, spec.noise_std, r.features);
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace spl
