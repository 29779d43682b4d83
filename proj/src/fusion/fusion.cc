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

#include "fusion/fusion.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "common/error.h"

namespace privfusion::fusion {
namespace {

void RequireSameArchitecture(const nn::MlpModel& a, const nn::MlpModel& b) {
  a.Validate();
  b.Validate();
  Require(a.spec == b.spec, ErrorCode::kArchMismatch,
          "models have different architectures");
}

// [W | b] for layer p (just W without biases).
Matrix Block(const nn::MlpModel& m, size_t p) {
  if (!m.spec.use_bias) return m.weights[p];
  Matrix out(m.weights[p].rows(), m.weights[p].cols() + 1);
  out << m.weights[p], m.biases[p];
  return out;
}

void StoreBlock(nn::MlpModel& m, size_t p, const Matrix& block) {
  const auto cols = m.weights[p].cols();
  m.weights[p] = block.leftCols(cols);
  if (m.spec.use_bias) m.biases[p] = block.col(cols);
}

}  // namespace

std::string_view FusionRuleName(FusionRule r) {
  return r == FusionRule::kConvex ? "convex" : "halved";
}

FusionRule ParseFusionRule(std::string_view name) {
  if (name == "convex") return FusionRule::kConvex;
  if (name == "halved") return FusionRule::kHalved;
  Fail(ErrorCode::kInvalidArgument, "unknown fusion rule '" + std::string(name) + "'");
}

std::vector<double> FusionConfig::DefaultAlphas() {
  std::vector<double> a;
  for (int i = 0; i <= 10; ++i) a.push_back(i / 10.0);
  return a;
}

void FusionConfig::Validate() const {
  Require(!alphas.empty(), ErrorCode::kInvalidArgument, "alpha set is empty");
  for (double a : alphas) {
    Require(a >= 0 && a <= 1, ErrorCode::kInvalidArgument, "alpha outside [0, 1]");
  }
}

Json FusionConfigToJson(const FusionConfig& c) {
  Json j;
  j["alphas"] = c.alphas;
  j["rule"] = std::string(FusionRuleName(c.rule));
  j["pfa_enabled"] = c.pfa_enabled;
  j["sfu_enabled"] = c.pfa.sfu_enabled;
  j["sfu_rescale"] = c.pfa.sfu_rescale;
  if (c.pfa.sensitivity.mode == ldp::SensitivityMode::kRange) {
    j["pfa_sensitivity"] = "range";
  } else {
    j["pfa_sensitivity"] = c.pfa.sensitivity.value;
  }
  return j;
}

FusionConfig FusionConfigFromJson(const Json& j) {
  Require(j.is_object(), ErrorCode::kMalformed, "fusion config must be an object");
  FusionConfig c;
  try {
    if (j.contains("alphas")) c.alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("rule")) c.rule = ParseFusionRule(j["rule"].get<std::string>());
    c.pfa_enabled = j.value("pfa_enabled", c.pfa_enabled);
    c.pfa.sfu_enabled = j.value("sfu_enabled", c.pfa.sfu_enabled);
    c.pfa.sfu_rescale = j.value("sfu_rescale", c.pfa.sfu_rescale);
    if (j.contains("pfa_sensitivity")) {
      const auto& s = j["pfa_sensitivity"];
      if (s.is_string()) {
        Require(s.get<std::string>() == "range", ErrorCode::kInvalidArgument,
                "pfa_sensitivity must be \"range\" or a number");
        c.pfa.sensitivity = ldp::Sensitivity::Range();
      } else {
        c.pfa.sensitivity = ldp::Sensitivity::Fixed(s.get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kMalformed, std::string("fusion config: ") + e.what());
  }
  c.Validate();
  return c;
}

nn::MlpModel ApplyPermutations(const nn::MlpModel& model,
                               const matching::PermutationSet& perms) {
  model.Validate();
  perms.Validate(model.spec.layer_sizes);
  nn::MlpModel out = model;
  for (size_t h = 0; h < perms.perms.size(); ++h) {
    const auto& pi = perms.perms[h];
    // Layer h's columns may already have moved with layer h - 1.
    const Matrix in = out.weights[h];
    const Matrix next = out.weights[h + 1];
    for (size_t i = 0; i < pi.size(); ++i) {
      const auto src = static_cast<Eigen::Index>(pi[i]);
      const auto dst = static_cast<Eigen::Index>(i);
      out.weights[h].row(dst) = in.row(src);
      out.weights[h + 1].col(dst) = next.col(src);
      if (model.spec.use_bias) out.biases[h](dst) = model.biases[h](src);
    }
  }
  return out;
}

nn::MlpModel PfaTransform(const nn::MlpModel& model, const ldp::PrivacyBudget& budget,
                          const ldp::NoiseSpec& noise, const PfaOptions& options) {
  model.Validate();
  budget.Validate();
  if (budget.test_mode) return model;
  nn::MlpModel out = model;
  for (size_t p = 0; p < model.weights.size(); ++p) {
    const Matrix block = Block(model, p);
    const double lo = block.minCoeff();
    const double hi = block.maxCoeff();
    const double sen = ldp::FeatureSensitivity(block, options.sensitivity);
    const double sigma = ldp::GaussianSigma(budget.eps_f, budget.delta, sen);
    Matrix noisy = ldp::Rpu(block, sigma, noise, p);
    if (options.sfu_enabled) {
      const auto mom = ldp::MomentsOf(noisy);
      if (mom.stddev > 0) {
        noisy = ldp::Sfu(noisy, mom.mean, mom.stddev);
        if (options.sfu_rescale) noisy = (noisy.array() * (hi - lo) + lo).matrix();
      }
    }
    StoreBlock(out, p, noisy);
  }
  return out;
}

nn::MlpModel FuseWeights(const nn::MlpModel& a, const nn::MlpModel& b, double alpha,
                         FusionRule rule) {
  RequireSameArchitecture(a, b);
  Require(alpha >= 0 && alpha <= 1, ErrorCode::kInvalidArgument, "alpha outside [0, 1]");
  const double scale = rule == FusionRule::kHalved ? 0.5 : 1.0;
  nn::MlpModel out = a;
  for (size_t p = 0; p < a.weights.size(); ++p) {
    out.weights[p] = scale * (alpha * a.weights[p] + (1 - alpha) * b.weights[p]);
  }
  for (size_t p = 0; p < a.biases.size(); ++p) {
    out.biases[p] = scale * (alpha * a.biases[p] + (1 - alpha) * b.biases[p]);
  }
  return out;
}

std::string FusionReport::ToCsv() const {
  std::string out = "alpha," + data::MetricCsvHeader() + "\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.6f,", p.alpha);
    out += buf + data::MetricCsvRow(p.metrics) + "\n";
  }
  if (!points.empty()) {
    std::snprintf(buf, sizeof buf, "best@%.6f,", best().alpha);
    out += buf + data::MetricCsvRow(best().metrics) + "\n";
    std::snprintf(buf, sizeof buf, "top3_avg,%.6f,,,,,,\n", top3_avg);
    out += buf;
  }
  return out;
}

Json FusionReport::ToJson() const {
  Json j;
  j["points"] = Json::array();
  for (const auto& p : points) {
    const auto& m = p.metrics;
    j["points"].push_back({{"alpha", p.alpha}, {"acc", m.acc}, {"ma_f1", m.ma_f1},
                           {"w_f1", m.w_f1}, {"ma_rec", m.ma_rec}, {"w_rec", m.w_rec},
                           {"ma_prec", m.ma_prec}, {"w_prec", m.w_prec}});
  }
  if (!points.empty()) {
    j["best"] = {{"alpha", best().alpha}, {"acc", best().metrics.acc}};
  }
  j["top3_avg"] = top3_avg;
  return j;
}

FusionReport Summarize(std::vector<AlphaPoint> points) {
  Require(!points.empty(), ErrorCode::kInvalidArgument, "nothing to summarize");
  FusionReport r;
  r.points = std::move(points);
  std::vector<size_t> order(r.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return r.points[x].metrics.acc > r.points[y].metrics.acc;
  });
  r.best_index = order[0];
  const size_t k = std::min<size_t>(3, order.size());
  double sum = 0;
  for (size_t i = 0; i < k; ++i) sum += r.points[order[i]].metrics.acc;
  r.top3_avg = sum / static_cast<double>(k);
  return r;
}

FusionReport AlphaSweep(const nn::MlpModel& a, const nn::MlpModel& b_aligned,
                        const data::LabeledDataset& test, const FusionConfig& config) {
  config.Validate();
  RequireSameArchitecture(a, b_aligned);
  std::vector<AlphaPoint> points;
  for (double alpha : config.alphas) {
    points.push_back({alpha, data::Evaluate(FuseWeights(a, b_aligned, alpha, config.rule), test)});
  }
  return Summarize(std::move(points));
}

FusionReport VanillaAverageBaseline(const nn::MlpModel& a, const nn::MlpModel& b,
                                    const data::LabeledDataset& test,
                                    const FusionConfig& config) {
  return AlphaSweep(a, b, test, config);
}

data::MetricReport PredictionEnsembleBaseline(const std::vector<nn::MlpModel>& models,
                                              const data::LabeledDataset& test) {
  Require(!models.empty(), ErrorCode::kInvalidArgument, "ensemble needs at least one model");
  test.Validate();
  Matrix mean;
  for (const auto& m : models) {
    Matrix probs = nn::SoftmaxRows(nn::Forward(m, test.inputs));
    Require(probs.cols() >= test.class_count, ErrorCode::kDimensionMismatch,
            "model has fewer outputs than the dataset has classes");
    probs = probs.leftCols(test.class_count).eval();
    if (mean.size() == 0) {
      mean = probs;
    } else {
      Require(mean.rows() == probs.rows(), ErrorCode::kDimensionMismatch,
              "ensemble members disagree on output shape");
      mean += probs;
    }
  }
  mean /= static_cast<double>(models.size());
  return data::EvaluatePredictions(nn::ArgmaxRows(mean), test);
}

}  // namespace privfusion::fusion
