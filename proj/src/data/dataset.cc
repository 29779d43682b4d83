// Copyright 2026 The PrivFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "data/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "common/canonical.h"
#include "common/error.h"
#include "common/rng.h"

namespace privfusion::data {
namespace {

constexpr uint32_t kIdxImagesMagic = 2051;
constexpr uint32_t kIdxLabelsMagic = 2049;

uint32_t ReadBigEndian32(const std::string& bytes, size_t offset,
                         const std::string& path) {
  if (offset + 4 > bytes.size()) {
    Fail(ErrorCode::kMalformed, path + ": truncated IDX header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  return (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) |
         (uint32_t{p[2]} << 8) | uint32_t{p[3]};
}

void Shuffle(std::vector<size_t>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.UniformInt(i)]);
  }
}

std::vector<std::vector<size_t>> IndicesByClass(const LabeledDataset& data) {
  std::vector<std::vector<size_t>> by_class(static_cast<size_t>(data.class_count));
  for (size_t i = 0; i < data.size(); ++i) {
    by_class[static_cast<size_t>(data.labels[i])].push_back(i);
  }
  return by_class;
}

}  // namespace

void LabeledDataset::Validate() const {
  Require(class_count >= 1, ErrorCode::kInvalidArgument,
          "dataset needs at least one class");
  Require(static_cast<size_t>(inputs.rows()) == labels.size(),
          ErrorCode::kDimensionMismatch, "dataset rows and labels disagree");
  for (int label : labels) {
    Require(label >= 0 && label < class_count, ErrorCode::kInvalidArgument,
            "label " + std::to_string(label) + " out of range");
  }
}

size_t LabeledDataset::CountLabel(int label) const {
  return static_cast<size_t>(std::count(labels.begin(), labels.end(), label));
}

LabeledDataset Subset(const LabeledDataset& data, const std::vector<size_t>& rows) {
  LabeledDataset out;
  out.class_count = data.class_count;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), data.inputs.cols());
  out.labels.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out.inputs.row(static_cast<Eigen::Index>(i)) =
        data.inputs.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(data.labels[rows[i]]);
  }
  return out;
}

LabeledDataset LoadIdx(const std::string& images_path,
                       const std::string& labels_path, int class_count) {
  const std::string images = ReadFile(images_path);
  const std::string labels = ReadFile(labels_path);

  if (ReadBigEndian32(images, 0, images_path) != kIdxImagesMagic) {
    Fail(ErrorCode::kMalformed, images_path + ": bad IDX image magic");
  }
  if (ReadBigEndian32(labels, 0, labels_path) != kIdxLabelsMagic) {
    Fail(ErrorCode::kMalformed, labels_path + ": bad IDX label magic");
  }
  const uint32_t n_images = ReadBigEndian32(images, 4, images_path);
  const uint32_t rows = ReadBigEndian32(images, 8, images_path);
  const uint32_t cols = ReadBigEndian32(images, 12, images_path);
  const uint32_t n_labels = ReadBigEndian32(labels, 4, labels_path);
  if (n_images != n_labels) {
    Fail(ErrorCode::kMalformed, "IDX count mismatch: " +
                                    std::to_string(n_images) + " images vs " +
                                    std::to_string(n_labels) + " labels");
  }
  const size_t dim = size_t{rows} * cols;
  if (images.size() < 16 + size_t{n_images} * dim) {
    Fail(ErrorCode::kMalformed, images_path + ": truncated IDX image data");
  }
  if (labels.size() < 8 + size_t{n_labels}) {
    Fail(ErrorCode::kMalformed, labels_path + ": truncated IDX label data");
  }

  LabeledDataset out;
  out.class_count = class_count;
  out.inputs.resize(n_images, static_cast<Eigen::Index>(dim));
  const auto* pixels = reinterpret_cast<const unsigned char*>(images.data() + 16);
  for (size_t i = 0; i < size_t{n_images} * dim; ++i) {
    out.inputs.data()[i] = pixels[i] / 255.0;
  }
  out.labels.resize(n_labels);
  for (size_t i = 0; i < n_labels; ++i) {
    out.labels[i] = static_cast<unsigned char>(labels[8 + i]);
  }
  out.Validate();
  return out;
}

LabeledDataset SynthBlobs(int class_count, int per_class, int input_dim,
                          double spread, uint64_t seed) {
  Require(class_count >= 1 && input_dim >= 1, ErrorCode::kInvalidArgument,
          "synth_blobs needs class_count >= 1 and input_dim >= 1");
  Require(per_class >= 1, ErrorCode::kInvalidArgument,
          "synth_blobs would produce an empty dataset (per_class < 1)");
  Require(spread >= 0 && std::isfinite(spread), ErrorCode::kInvalidArgument,
          "spread must be finite and non-negative");

  Rng center_rng = Substream(seed, "blobs-centers");
  Matrix centers(class_count, input_dim);
  for (Eigen::Index i = 0; i < centers.size(); ++i) {
    centers.data()[i] = 0.25 + 0.5 * center_rng.Uniform();
  }

  Rng point_rng = Substream(seed, "blobs-points");
  LabeledDataset out;
  out.class_count = class_count;
  const Eigen::Index n = Eigen::Index{class_count} * per_class;
  out.inputs.resize(n, input_dim);
  out.labels.resize(static_cast<size_t>(n));
  Eigen::Index row = 0;
  for (int i = 0; i < per_class; ++i) {
    for (int c = 0; c < class_count; ++c, ++row) {
      for (int k = 0; k < input_dim; ++k) {
        const double x = centers(c, k) + spread * point_rng.Gaussian();
        out.inputs(row, k) = std::clamp(x, 0.0, 1.0);
      }
      out.labels[static_cast<size_t>(row)] = c;
    }
  }
  return out;
}

std::pair<std::vector<size_t>, std::vector<size_t>> PartitionIndices(
    const LabeledDataset& data, const PartitionPlan& plan, uint64_t seed) {
  data.Validate();
  std::vector<size_t> a;
  std::vector<size_t> b;
  Rng rng = Substream(seed, "partition");

  if (plan.kind == PartitionKind::kHomogeneous) {
    bool extra_to_a = true;
    for (auto& members : IndicesByClass(data)) {
      Shuffle(members, rng);
      size_t half = members.size() / 2;
      if (members.size() % 2 == 1) {
        if (extra_to_a) ++half;
        extra_to_a = !extra_to_a;
      }
      a.insert(a.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(half));
      b.insert(b.end(), members.begin() + static_cast<std::ptrdiff_t>(half), members.end());
    }
  } else {
    Require(plan.personalized_label >= 0 &&
                plan.personalized_label < data.class_count,
            ErrorCode::kInvalidArgument, "personalized label out of range");
    Require(plan.minority_fraction > 0 && plan.minority_fraction < 1,
            ErrorCode::kInvalidArgument, "minority_fraction must lie in (0, 1)");
    std::vector<size_t> rest;
    for (size_t i = 0; i < data.size(); ++i) {
      if (data.labels[i] == plan.personalized_label) {
        a.push_back(i);
      } else {
        rest.push_back(i);
      }
    }
    Require(!a.empty(), ErrorCode::kInvalidArgument,
            "personalized label " + std::to_string(plan.personalized_label) +
                " is absent from the data");
    Shuffle(rest, rng);
    const auto minority = static_cast<size_t>(
        std::llround(plan.minority_fraction * static_cast<double>(rest.size())));
    a.insert(a.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(minority));
    b.assign(rest.begin() + static_cast<std::ptrdiff_t>(minority), rest.end());
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {std::move(a), std::move(b)};
}

std::pair<LabeledDataset, LabeledDataset> Partition(const LabeledDataset& data,
                                                    const PartitionPlan& plan,
                                                    uint64_t seed) {
  auto [a, b] = PartitionIndices(data, plan, seed);
  return {Subset(data, a), Subset(data, b)};
}

LabeledDataset StratifiedSample(const LabeledDataset& data, size_t count,
                                uint64_t seed) {
  data.Validate();
  Rng rng = Substream(seed, "probe");
  auto by_class = IndicesByClass(data);
  for (auto& members : by_class) Shuffle(members, rng);
  std::vector<size_t> picked;
  for (size_t depth = 0; picked.size() < count; ++depth) {
    bool any = false;
    for (const auto& members : by_class) {
      if (depth < members.size() && picked.size() < count) {
        picked.push_back(members[depth]);
        any = true;
      }
    }
    if (!any) break;
  }
  return Subset(data, picked);
}

std::pair<LabeledDataset, LabeledDataset> HoldoutSplit(const LabeledDataset& data,
                                                       double fraction,
                                                       uint64_t seed) {
  Require(fraction >= 0 && fraction <= 1, ErrorCode::kInvalidArgument,
          "holdout fraction must lie in [0, 1]");
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Substream(seed, "holdout");
  Shuffle(order, rng);
  const auto held = static_cast<size_t>(
      std::llround(fraction * static_cast<double>(order.size())));
  std::vector<size_t> second(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(held));
  std::vector<size_t> first(order.begin() + static_cast<std::ptrdiff_t>(held), order.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {Subset(data, first), Subset(data, second)};
}

}  // namespace privfusion::data
