/*
 * Copyright 2026 The xclust Authors.
 *
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

#include "xclust/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "xclust/error.hpp"
#include "xclust/rng.hpp"

namespace xclust {
namespace {

// Row-wise softmax in place.
void Softmax(Eigen::MatrixXd& logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const double peak = row.maxCoeff();
    row = (row.array() - peak).exp();
    row /= row.sum();
  }
}

// Pre-activations (z) and activations (a) of every layer for a batch;
// activations[0] is the input.
struct ForwardPass {
  std::vector<Eigen::MatrixXd> pre;
  std::vector<Eigen::MatrixXd> act;
};

ForwardPass Forward(const std::vector<DenseLayer>& layers, const Eigen::MatrixXd& x) {
  ForwardPass pass;
  pass.act.push_back(x);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = pass.act.back() * layers[l].weight.transpose();
    z.rowwise() += layers[l].bias.transpose();
    pass.pre.push_back(z);
    if (l + 1 < layers.size()) {
      pass.act.push_back(z.cwiseMax(0.0));
    } else {
      Softmax(z);
      pass.act.push_back(std::move(z));
    }
  }
  return pass;
}

void CheckLabels(std::span<const int> y, Eigen::Index rows, std::size_t classes) {
  if (static_cast<Eigen::Index>(y.size()) != rows) {
    throw Error(ErrorCode::kDimensionMismatch, "label count differs from row count");
  }
  for (int label : y) {
    if (label < 1 || static_cast<std::size_t>(label) > classes) {
      throw Error(ErrorCode::kBadLabel, "label " + std::to_string(label) +
                                            " outside 1.." + std::to_string(classes));
    }
  }
}

void Fnv(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
}

std::vector<double> RowMajor(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

}  // namespace

Eigen::VectorXd LossModel::Losses(const Eigen::MatrixXd& x, std::span<const int> y) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out[r] = Loss(x.row(r).transpose(), y[static_cast<std::size_t>(r)]);
  }
  return out;
}

void MlpConfig::Validate() const {
  if (hidden_sizes.empty()) throw Error(ErrorCode::kConfigError, "hidden_sizes is empty");
  for (std::size_t h : hidden_sizes) {
    if (h == 0) throw Error(ErrorCode::kConfigError, "hidden layer of width 0");
  }
  if (max_epochs < 1) throw Error(ErrorCode::kConfigError, "max_epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::kConfigError, "batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kConfigError, "learning_rate must be > 0");
}

void to_json(nlohmann::json& j, const MlpConfig& cfg) {
  j = nlohmann::json{{"hidden_sizes", cfg.hidden_sizes},
                     {"activation", "relu"},
                     {"max_epochs", cfg.max_epochs},
                     {"batch_size", cfg.batch_size},
                     {"learning_rate", cfg.learning_rate},
                     {"adam_beta1", cfg.adam_beta1},
                     {"adam_beta2", cfg.adam_beta2},
                     {"adam_epsilon", cfg.adam_epsilon},
                     {"early_stopping_patience", cfg.early_stopping_patience},
                     {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, MlpConfig& cfg) {
  MlpConfig defaults;
  cfg.hidden_sizes = j.value("hidden_sizes", defaults.hidden_sizes);
  if (j.contains("activation") && j.at("activation") != "relu") {
    throw Error(ErrorCode::kConfigError, "only the relu activation is supported");
  }
  cfg.max_epochs = j.value("max_epochs", defaults.max_epochs);
  cfg.batch_size = j.value("batch_size", defaults.batch_size);
  cfg.learning_rate = j.value("learning_rate", defaults.learning_rate);
  cfg.adam_beta1 = j.value("adam_beta1", defaults.adam_beta1);
  cfg.adam_beta2 = j.value("adam_beta2", defaults.adam_beta2);
  cfg.adam_epsilon = j.value("adam_epsilon", defaults.adam_epsilon);
  cfg.early_stopping_patience = j.value("early_stopping_patience", defaults.early_stopping_patience);
  cfg.seed = j.value("seed", defaults.seed);
}

MlpModel::MlpModel(std::span<const std::size_t> widths) {
  if (widths.size() < 2) throw Error(ErrorCode::kDimensionMismatch, "need at least two widths");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    layers.push_back({Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(widths[l + 1]),
                                            static_cast<Eigen::Index>(widths[l])),
                      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(widths[l + 1]))});
  }
}

std::size_t MlpModel::input_width() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols());
}

std::size_t MlpModel::num_classes() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.rows());
}

void MlpModel::CheckInput(Eigen::Index cols) const {
  if (layers.empty()) throw Error(ErrorCode::kDimensionMismatch, "model has no layers");
  if (static_cast<std::size_t>(cols) != input_width()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "input width " + std::to_string(cols) + ", model expects " +
                    std::to_string(input_width()));
  }
}

Eigen::MatrixXd MlpModel::PredictProba(const Eigen::MatrixXd& x) const {
  CheckInput(x.cols());
  return Forward(layers, x).act.back();
}

Eigen::VectorXd MlpModel::PredictProba(const Eigen::VectorXd& x) const {
  CheckInput(x.size());
  return PredictProba(Eigen::MatrixXd(x.transpose())).row(0).transpose();
}

double CrossEntropy(double probability) {
  return -std::log(std::max(probability, kProbabilityFloor));
}

double MlpModel::Loss(const Eigen::VectorXd& x, int y) const {
  const Eigen::VectorXd p = PredictProba(x);
  CheckLabels(std::span<const int>(&y, 1), 1, num_classes());
  return CrossEntropy(p[y - 1]);
}

Eigen::VectorXd MlpModel::Losses(const Eigen::MatrixXd& x, std::span<const int> y) const {
  const Eigen::MatrixXd p = PredictProba(x);
  CheckLabels(y, x.rows(), num_classes());
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out[r] = CrossEntropy(p(r, y[static_cast<std::size_t>(r)] - 1));
  }
  return out;
}

double MlpModel::MeanLoss(const Eigen::MatrixXd& x, std::span<const int> y) const {
  if (x.rows() == 0) return 0.0;
  return Losses(x, y).mean();
}

MlpGradients MlpModel::Gradients(const Eigen::MatrixXd& x, std::span<const int> y) const {
  CheckInput(x.cols());
  CheckLabels(y, x.rows(), num_classes());
  const ForwardPass pass = Forward(layers, x);
  const double inv_n = 1.0 / static_cast<double>(std::max<Eigen::Index>(1, x.rows()));

  // d(mean CE)/d(logits) = (softmax - onehot) / n. The probability floor is
  // not differentiated; it only matters for probabilities below 1e-12.
  Eigen::MatrixXd delta = pass.act.back();
  for (Eigen::Index r = 0; r < x.rows(); ++r) delta(r, y[static_cast<std::size_t>(r)] - 1) -= 1.0;
  delta *= inv_n;

  MlpGradients grads;
  grads.layers.resize(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    grads.layers[l].weight = delta.transpose() * pass.act[l];
    grads.layers[l].bias = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * layers[l].weight).cwiseProduct(
          (pass.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

std::string MlpModel::Fingerprint() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& layer : layers) {
    const std::int64_t shape[2] = {layer.weight.rows(), layer.weight.cols()};
    Fnv(h, shape, sizeof(shape));
    for (double w : RowMajor(layer.weight)) Fnv(h, &w, sizeof(w));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      const double b = layer.bias[i];
      Fnv(h, &b, sizeof(b));
    }
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

void to_json(nlohmann::json& j, const MlpModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : model.layers) {
    std::vector<double> bias(layer.bias.data(), layer.bias.data() + layer.bias.size());
    layers.push_back({{"rows", layer.weight.rows()},
                      {"cols", layer.weight.cols()},
                      {"weights", RowMajor(layer.weight)},
                      {"bias", bias}});
  }
  j = nlohmann::json{{"format", "xclust-mlp"},
                     {"version", 1},
                     {"input_width", model.input_width()},
                     {"num_classes", model.num_classes()},
                     {"loss", "cross_entropy"},
                     {"probability_floor", kProbabilityFloor},
                     {"config", model.config},
                     {"layers", layers},
                     {"training_log",
                      {{"train_loss", model.log.train_loss},
                       {"validation_loss", model.log.validation_loss},
                       {"best_epoch", model.log.best_epoch}}}};
}

void from_json(const nlohmann::json& j, MlpModel& model) {
  if (j.value("format", "") != "xclust-mlp" || j.value("version", 0) != 1) {
    throw Error(ErrorCode::kParseError, "not an xclust-mlp version 1 model");
  }
  model.layers.clear();
  for (const auto& layer : j.at("layers")) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    const auto weights = layer.at("weights").get<std::vector<double>>();
    const auto bias = layer.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(weights.size()) != rows * cols ||
        static_cast<Eigen::Index>(bias.size()) != rows) {
      throw Error(ErrorCode::kParseError, "layer shape does not match its data");
    }
    DenseLayer dense{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        dense.weight(r, c) = weights[static_cast<std::size_t>(r * cols + c)];
      }
      dense.bias[r] = bias[static_cast<std::size_t>(r)];
    }
    if (!model.layers.empty() && model.layers.back().weight.rows() != cols) {
      throw Error(ErrorCode::kParseError, "consecutive layer widths do not chain");
    }
    model.layers.push_back(std::move(dense));
  }
  if (model.layers.empty()) throw Error(ErrorCode::kParseError, "model has no layers");
  model.config = j.at("config").get<MlpConfig>();
  const auto& log = j.at("training_log");
  log.at("train_loss").get_to(model.log.train_loss);
  log.at("validation_loss").get_to(model.log.validation_loss);
  log.at("best_epoch").get_to(model.log.best_epoch);
}

MlpModel Train(const Dataset& train, const Dataset& validation, const MlpConfig& cfg) {
  cfg.Validate();
  const auto& y_train = train.RequireLabels();
  const auto& y_val = validation.RequireLabels();
  if (train.width() != validation.width()) {
    throw Error(ErrorCode::kDimensionMismatch, "train and validation widths differ");
  }
  if (train.rows() == 0) throw Error(ErrorCode::kTooFewSamples, "empty training set");
  const auto classes = static_cast<std::size_t>(
      std::max(train.NumClasses(), validation.rows() > 0 ? validation.NumClasses() : 0));

  std::vector<std::size_t> widths{train.width()};
  widths.insert(widths.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  widths.push_back(classes);
  MlpModel model(widths);
  model.config = cfg;

  Rng rng(cfg.seed);
  for (auto& layer : model.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = rng.Uniform(-limit, limit);
      }
    }
  }

  std::vector<DenseLayer> m1, m2;
  for (const auto& layer : model.layers) {
    m1.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
                  Eigen::VectorXd::Zero(layer.bias.size())});
  }
  m2 = m1;

  // Model selection falls back to the training loss without a validation set.
  const bool has_validation = validation.rows() > 0;
  const Eigen::MatrixXd& x_sel = has_validation ? validation.values : train.values;
  const std::vector<int>& y_sel = has_validation ? y_val : y_train;

  std::vector<std::size_t> order(train.rows());
  std::iota(order.begin(), order.end(), 0);
  std::vector<DenseLayer> best_layers = model.layers;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::uint64_t step = 0;
  Eigen::MatrixXd xb;
  std::vector<int> yb;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.Shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      xb.resize(static_cast<Eigen::Index>(stop - start), train.values.cols());
      yb.resize(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) =
            train.values.row(static_cast<Eigen::Index>(order[i]));
        yb[i - start] = y_train[order[i]];
      }
      const MlpGradients grads = model.Gradients(xb, yb);
      ++step;
      const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      auto adam = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseAbs2();
        param.array() -= cfg.learning_rate * (m.array() / c1) /
                         ((v.array() / c2).sqrt() + cfg.adam_epsilon);
      };
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        adam(model.layers[l].weight, grads.layers[l].weight, m1[l].weight, m2[l].weight);
        adam(model.layers[l].bias, grads.layers[l].bias, m1[l].bias, m2[l].bias);
      }
    }

    const double train_loss = model.MeanLoss(train.values, y_train);
    const double sel_loss = has_validation ? model.MeanLoss(x_sel, y_sel) : train_loss;
    model.log.train_loss.push_back(train_loss);
    model.log.validation_loss.push_back(sel_loss);
    if (sel_loss < best_loss) {
      best_loss = sel_loss;
      best_layers = model.layers;
      model.log.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.early_stopping_patience) {
      break;
    }
  }
  model.layers = std::move(best_layers);
  return model;
}

double Accuracy(const MlpModel& model, const Dataset& data) {
  const auto& y = data.RequireLabels();
  if (data.rows() == 0) return 0.0;
  const Eigen::MatrixXd p = model.PredictProba(data.values);
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < p.cols(); ++c) {
      if (p(r, c) > p(r, best)) best = c;
    }
    if (best + 1 == y[static_cast<std::size_t>(r)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows());
}

}  // namespace xclust
