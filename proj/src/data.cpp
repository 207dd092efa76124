/* Copyright 2026 The QEK Lab Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "qekl/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "qekl/kernel.hpp"
#include "qekl/rng.hpp"

namespace qekl {

namespace {

constexpr double kPixelThreshold = 0.95;  // on gray values normalized to [0,1]

// Area-uniform point in the annulus r_lo <= r <= r_hi around `center`.
Eigen::Vector2d sample_annulus(Rng& rng, const Eigen::Vector2d& center,
                               double r_lo, double r_hi) {
  const double u = rng.uniform();
  const double r = std::sqrt(r_lo * r_lo + u * (r_hi * r_hi - r_lo * r_lo));
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return center + r * Eigen::Vector2d(std::cos(phi), std::sin(phi));
}

std::uint32_t read_be32(std::istream& in) {
  std::uint8_t bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw std::runtime_error("idx: truncated header");
  return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
         (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
}

struct CoordLess {
  bool operator()(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
    if (a.x() != b.x()) return a.x() < b.x();
    return a.y() < b.y();
  }
};

std::vector<int> qualifying_pixels(const std::vector<std::uint8_t>& image) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(image.size()); ++i) {
    if (image[i] / 255.0 > kPixelThreshold) idx.push_back(i);
  }
  return idx;
}

Eigen::Vector2d pixel_to_coord(int flat_index, int rows, int cols) {
  const int r = flat_index / cols;
  const int c = flat_index % cols;
  return {c / double(cols - 1), (rows - 1 - r) / double(rows - 1)};
}

}  // namespace

void LabeledDataset::validate() const {
  if (points.empty()) throw std::invalid_argument("dataset: empty");
  if (points.size() != labels.size()) {
    throw std::invalid_argument("dataset: point/label count mismatch");
  }
  for (int label : labels) {
    if (label != 1 && label != -1) {
      throw std::invalid_argument("dataset: labels must be +-1");
    }
  }
}

LabeledDataset LabeledDataset::head(int count) const {
  if (count <= 0 || count > size()) {
    throw std::invalid_argument("dataset: head count out of range");
  }
  LabeledDataset out = *this;
  out.points.assign(points.begin(), points.begin() + count);
  out.labels.assign(labels.begin(), labels.begin() + count);
  out.dataset_id += "-head" + std::to_string(count);
  return out;
}

std::pair<LabeledDataset, LabeledDataset> gen_checkerboard(std::uint64_t seed) {
  // 8 sites per class; 15 points per class per split, round-robin over sites
  std::vector<Eigen::Vector2d> plus_sites, minus_sites;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Eigen::Vector2d site((2 * i + 1) / 8.0, (2 * j + 1) / 8.0);
      ((i + j) % 2 == 0 ? plus_sites : minus_sites).push_back(site);
    }
  }

  auto make_split = [&](const char* split, std::uint64_t split_key) {
    LabeledDataset ds;
    ds.split = split;
    ds.dataset_id = "checkerboard";
    ds.seed = seed;
    Rng rng = keyed_rng(seed, 0xc3eb0a2d, split_key);
    for (int cls = 0; cls < 2; ++cls) {
      const auto& sites = cls == 0 ? plus_sites : minus_sites;
      for (int k = 0; k < 15; ++k) {
        const Eigen::Vector2d& site = sites[k % sites.size()];
        const double dx = rng.uniform(-0.125, 0.125);
        const double dy = rng.uniform(-0.125, 0.125);
        ds.points.emplace_back(site.x() + dx, site.y() + dy);
        ds.labels.push_back(cls == 0 ? 1 : -1);
      }
    }
    return ds;
  };
  return {make_split("train", 1), make_split("test", 2)};
}

std::pair<LabeledDataset, LabeledDataset> gen_symmetric_donuts(
    std::uint64_t seed) {
  const double outer = std::numbers::sqrt2 / 2.0;
  const double inner = 0.5;

  auto make_split = [&](const char* split, std::uint64_t split_key) {
    LabeledDataset ds;
    ds.split = split;
    ds.dataset_id = "donuts";
    ds.seed = seed;
    Rng rng = keyed_rng(seed, 0xd07075, split_key);
    // 15 points per (disk, region); the right disk labels inner points +1,
    // the left disk exchanges the labels.
    for (int disk = 0; disk < 2; ++disk) {
      const Eigen::Vector2d center(disk == 0 ? 1.0 : -1.0, 0.0);
      for (int region = 0; region < 2; ++region) {  // 0 = inner, 1 = outer
        const double r_lo = region == 0 ? 0.0 : inner;
        const double r_hi = region == 0 ? inner : outer;
        int label = region == 0 ? 1 : -1;
        if (disk == 1) label = -label;
        for (int k = 0; k < 15; ++k) {
          ds.points.push_back(sample_annulus(rng, center, r_lo, r_hi));
          ds.labels.push_back(label);
        }
      }
    }
    return ds;
  };
  return {make_split("train", 1), make_split("test", 2)};
}

IdxImages read_idx_images(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("idx: cannot open " + path);
  const std::uint32_t magic = read_be32(in);
  if (magic != 0x00000803u) {
    throw std::runtime_error("idx: bad image magic in " + path);
  }
  const std::uint32_t count = read_be32(in);
  IdxImages out;
  out.rows = static_cast<int>(read_be32(in));
  out.cols = static_cast<int>(read_be32(in));
  if (out.rows <= 1 || out.cols <= 1 || out.rows > 4096 || out.cols > 4096) {
    throw std::runtime_error("idx: implausible image dimensions in " + path);
  }
  const std::size_t pixels = std::size_t(out.rows) * std::size_t(out.cols);
  out.images.resize(count);
  for (auto& image : out.images) {
    image.resize(pixels);
    in.read(reinterpret_cast<char*>(image.data()),
            static_cast<std::streamsize>(pixels));
    if (!in) throw std::runtime_error("idx: truncated image data in " + path);
  }
  return out;
}

std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("idx: cannot open " + path);
  const std::uint32_t magic = read_be32(in);
  if (magic != 0x00000801u) {
    throw std::runtime_error("idx: bad label magic in " + path);
  }
  const std::uint32_t count = read_be32(in);
  std::vector<std::uint8_t> labels(count);
  in.read(reinterpret_cast<char*>(labels.data()),
          static_cast<std::streamsize>(count));
  if (!in) throw std::runtime_error("idx: truncated label data in " + path);
  return labels;
}

MnistPixelPools load_mnist_pixels(const std::string& images_path,
                                  const std::string& labels_path,
                                  std::uint64_t seed, int images_per_class) {
  const IdxImages idx = read_idx_images(images_path);
  const std::vector<std::uint8_t> labels = read_idx_labels(labels_path);
  if (idx.images.size() != labels.size()) {
    throw std::runtime_error("mnist: image/label count mismatch");
  }

  MnistPixelPools pools;
  for (int digit = 0; digit <= 1; ++digit) {
    std::vector<int> candidates;
    for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
      if (labels[i] == digit) candidates.push_back(i);
    }
    if (candidates.empty()) {
      throw std::runtime_error("mnist: no images with digit label " +
                               std::to_string(digit));
    }
    Rng rng = keyed_rng(seed, 0x6d6e7374, static_cast<std::uint64_t>(digit));
    rng.shuffle(candidates);

    auto& pool = digit == 0 ? pools.base_zero : pools.base_one;
    int used = 0;
    for (int image_index : candidates) {
      if (used == images_per_class) break;
      std::vector<int> bright = qualifying_pixels(idx.images[image_index]);
      if (static_cast<int>(bright.size()) < 3) continue;  // resample image
      rng.shuffle(bright);
      for (int k = 0; k < 3; ++k) {
        pool.push_back(pixel_to_coord(bright[k], idx.rows, idx.cols));
      }
      ++used;
    }
    if (used == 0) {
      throw std::runtime_error("mnist: no usable images for digit " +
                               std::to_string(digit));
    }
  }

  const std::set<Eigen::Vector2d, CoordLess> zero_set(pools.base_zero.begin(),
                                                      pools.base_zero.end());
  const std::set<Eigen::Vector2d, CoordLess> one_set(pools.base_one.begin(),
                                                     pools.base_one.end());
  for (const auto& p : pools.base_zero) {
    if (!one_set.count(p)) pools.zero.push_back(p);
  }
  for (const auto& p : pools.base_one) {
    if (!zero_set.count(p)) pools.one.push_back(p);
  }
  pools.not_zero = pools.base_one;
  pools.not_one = pools.base_zero;
  return pools;
}

int classify_point(const KernelClassifier& clf, const Eigen::Vector2d& x) {
  Eigen::MatrixXd row(1, clf.train.size());
  for (int j = 0; j < clf.train.size(); ++j) {
    row(0, j) = overlap_pure(x, clf.train.points[j], clf.theta, clf.shape);
  }
  return svm_predict(clf.model, row)[0];
}

VoteOutcome majority_vote(int votes_zero, int votes_one) {
  if (std::abs(votes_zero - votes_one) < 2) return {};
  return {true, votes_zero > votes_one ? 0 : 1};
}

int ensemble_classify(const std::vector<std::uint8_t>& image,
                      const KernelClassifier& zero_model,
                      const KernelClassifier& one_model, std::uint64_t seed,
                      int max_attempts) {
  constexpr int kVotes = 15;
  std::vector<int> bright = qualifying_pixels(image);
  if (static_cast<int>(bright.size()) < kVotes) {
    throw std::invalid_argument("ensemble: fewer than 15 qualifying pixels");
  }
  const int side = static_cast<int>(std::lround(std::sqrt(image.size())));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng = keyed_rng(seed, 0xe25e, static_cast<std::uint64_t>(attempt));
    std::vector<int> pick = bright;
    rng.shuffle(pick);
    int votes_zero = 0, votes_one = 0;
    for (int k = 0; k < kVotes; ++k) {
      const Eigen::Vector2d coord = pixel_to_coord(pick[k], side, side);
      // label +1 means "is the digit" for both binary models
      const bool says_zero = classify_point(zero_model, coord) == 1;
      const bool says_one = classify_point(one_model, coord) == 1;
      if (says_zero && !says_one) ++votes_zero;
      if (says_one && !says_zero) ++votes_one;
    }
    const VoteOutcome outcome = majority_vote(votes_zero, votes_one);
    if (outcome.decided) return outcome.cls;
  }
  throw EnsembleUndecided("ensemble: vote margin below 2 after all attempts");
}

}  // namespace qekl
