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

#ifndef XCLUST_MLP_HPP_
#define XCLUST_MLP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "xclust/dataset.hpp"

namespace xclust {

// Anything that scores a labeled input with a non-negative loss. The
// significance tests only need this view of a trained model.
class LossModel {
 public:
  virtual ~LossModel() = default;
  virtual std::size_t input_width() const = 0;
  // Loss of label `y` (1-based) at input `x`.
  virtual double Loss(const Eigen::VectorXd& x, int y) const = 0;
  // Row-wise losses; the default loops over Loss().
  virtual Eigen::VectorXd Losses(const Eigen::MatrixXd& x, std::span<const int> y) const;
};

// Probability floor used by the cross-entropy loss.
inline constexpr double kProbabilityFloor = 1e-12;

struct MlpConfig {
  std::vector<std::size_t> hidden_sizes{50, 25, 10};
  std::size_t max_epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t early_stopping_patience = 5;
  std::uint64_t seed = 0;

  void Validate() const;
};

void to_json(nlohmann::json& j, const MlpConfig& cfg);
void from_json(const nlohmann::json& j, MlpConfig& cfg);

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct TrainingLog {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::size_t best_epoch = 0;  // 0-based index into the loss vectors
};

// Gradients with the same layout as MlpModel::layers.
struct MlpGradients {
  std::vector<DenseLayer> layers;
};

// Fully connected ReLU network with a softmax output over C classes. The
// input includes the intercept column, which the network treats as an
// ordinary (constant) input.
class MlpModel : public LossModel {
 public:
  MlpModel() = default;
  // Zero-initialized network of the given widths:
  // {input, hidden..., classes}.
  explicit MlpModel(std::span<const std::size_t> widths);

  std::size_t input_width() const override;
  std::size_t num_classes() const;

  Eigen::VectorXd PredictProba(const Eigen::VectorXd& x) const;
  // Row-wise class probabilities, n x C.
  Eigen::MatrixXd PredictProba(const Eigen::MatrixXd& x) const;
  double Loss(const Eigen::VectorXd& x, int y) const override;
  Eigen::VectorXd Losses(const Eigen::MatrixXd& x, std::span<const int> y) const override;
  // Mean cross-entropy over the rows.
  double MeanLoss(const Eigen::MatrixXd& x, std::span<const int> y) const;
  // Gradient of MeanLoss with respect to every weight and bias.
  MlpGradients Gradients(const Eigen::MatrixXd& x, std::span<const int> y) const;

  // Stable 64-bit FNV-1a hash of the architecture and parameters, as hex.
  std::string Fingerprint() const;

  std::vector<DenseLayer> layers;
  MlpConfig config;
  TrainingLog log;

 private:
  void CheckInput(Eigen::Index cols) const;
};

void to_json(nlohmann::json& j, const MlpModel& model);
void from_json(const nlohmann::json& j, MlpModel& model);

// Cross-entropy at a given probability, with the probability floored at
// kProbabilityFloor.
double CrossEntropy(double probability);

// Adam on mini-batch cross-entropy, He-uniform initialization, early
// stopping on validation loss. The returned weights are those of the epoch
// with the lowest validation loss. Bit-reproducible for a fixed seed.
MlpModel Train(const Dataset& train, const Dataset& validation, const MlpConfig& cfg);

// Fraction of rows whose argmax class (lowest index on ties) equals the label.
double Accuracy(const MlpModel& model, const Dataset& data);

}  // namespace xclust

#endif  // XCLUST_MLP_HPP_
