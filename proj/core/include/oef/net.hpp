// Copyright 2026 The OEF Toolkit Authors
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

#ifndef OEF_NET_HPP_
#define OEF_NET_HPP_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oef/rng.hpp"
#include "oef/types.hpp"

namespace oef {

enum class HeadKind { kSoftmax, kLinear, kSigmoid };
enum class LossKind { kCrossEntropy, kMse };

std::string HeadName(HeadKind head);
HeadKind HeadFromName(const std::string& name);
std::string LossName(LossKind loss);
LossKind LossFromName(const std::string& name);

struct TrainConfig {
  int batch_size = 32;
  int epochs = 1000;
  double learning_rate = 0.01;
  uint64_t seed = 1;
  int hidden_size = 32;
};

// Distribution over the legal actions only; illegal entries are exactly 0.
std::vector<double> MaskedSoftmax(std::span<const double> logits,
                                  std::span<const uint8_t> legal_mask);

// Training data for one head / one net: row-per-sample matrices. row_mask
// (optional) selects the rows a head trains on; coord_mask (optional)
// restricts an MSE loss to a subset of output coordinates per row.
struct BatchRef {
  const Eigen::MatrixXd* inputs = nullptr;
  const Eigen::MatrixXd* targets = nullptr;
  const Eigen::VectorXd* sample_weights = nullptr;  // optional
  const Eigen::MatrixXd* coord_mask = nullptr;      // optional, MSE only
};

// A small fully-connected network: ReLU hidden layers and one output head.
// Double precision throughout; training is plain minibatch SGD.
class Net {
 public:
  Net() = default;
  Net(std::vector<int> sizes, HeadKind head, uint64_t seed);

  const std::vector<int>& sizes() const { return sizes_; }
  HeadKind head() const { return head_; }
  int InputDim() const { return sizes_.front(); }
  int OutputDim() const { return sizes_.back(); }

  Eigen::VectorXd Forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd& inputs) const;
  std::vector<double> Forward(std::span<const double> x) const;

  // One pass over the data in shuffled minibatches; returns the mean
  // per-sample loss seen during the epoch. Throws Error("nan-loss") if the
  // loss stops being finite.
  double TrainEpoch(const BatchRef& data, LossKind loss, const TrainConfig& cfg,
                    Rng& rng);

  double LossOn(const BatchRef& data, LossKind loss) const;
  // Flat analytic gradient of LossOn; layout matches Get/SetParam.
  Eigen::VectorXd Gradient(const BatchRef& data, LossKind loss) const;

  int64_t NumParams() const;
  double GetParam(int64_t index) const;
  void SetParam(int64_t index, double value);
  uint64_t ParamHash() const;
  bool ParamsFinite() const;

  nlohmann::ordered_json ToJson() const;
  static Net FromJson(const nlohmann::json& j);

  struct Layer {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;
  };

 private:
  friend class MultiHeadNet;
  std::vector<int> sizes_;
  HeadKind head_ = HeadKind::kLinear;
  std::vector<Layer> layers_;
};

// A shared ReLU trunk with several independent output heads, each with its
// own activation, loss, loss weight, and (per batch) row selection.
class MultiHeadNet {
 public:
  struct HeadSpec {
    std::string name;
    int dim = 0;
    HeadKind activation = HeadKind::kLinear;
    LossKind loss = LossKind::kMse;
    double weight = 1.0;
  };

  MultiHeadNet() = default;
  MultiHeadNet(std::vector<int> trunk_sizes, std::vector<HeadSpec> heads,
               uint64_t seed);

  const std::vector<HeadSpec>& heads() const { return heads_; }
  int InputDim() const { return trunk_sizes_.front(); }
  int HeadIndex(const std::string& name) const;

  std::vector<Eigen::VectorXd> Forward(const Eigen::VectorXd& x) const;
  std::vector<double> ForwardHead(int head, std::span<const double> x) const;

  struct HeadBatch {
    const Eigen::MatrixXd* targets = nullptr;
    const std::vector<uint8_t>* row_mask = nullptr;  // optional
    const Eigen::MatrixXd* coord_mask = nullptr;     // optional, MSE only
  };

  // One shuffled-minibatch pass updating the trunk and all heads with
  // selected rows. Returns the weighted mean loss.
  double TrainEpoch(const Eigen::MatrixXd& inputs,
                    const std::vector<HeadBatch>& batches,
                    const TrainConfig& cfg, Rng& rng);

  double LossOn(const Eigen::MatrixXd& inputs,
                const std::vector<HeadBatch>& batches) const;
  Eigen::VectorXd Gradient(const Eigen::MatrixXd& inputs,
                           const std::vector<HeadBatch>& batches) const;

  int64_t NumParams() const;
  double GetParam(int64_t index) const;
  void SetParam(int64_t index, double value);
  uint64_t ParamHash() const;
  bool ParamsFinite() const;

  nlohmann::ordered_json ToJson() const;
  static MultiHeadNet FromJson(const nlohmann::json& j);

 private:
  struct Workspace;
  void ForwardTrunk(const Eigen::MatrixXd& inputs, Workspace* ws) const;
  double Backward(const Eigen::MatrixXd& inputs,
                  const std::vector<HeadBatch>& batches, Workspace* ws,
                  std::vector<Net::Layer>* trunk_grads,
                  std::vector<Net::Layer>* head_grads) const;

  std::vector<int> trunk_sizes_;
  std::vector<HeadSpec> heads_;
  std::vector<Net::Layer> trunk_;
  std::vector<Net::Layer> head_layers_;
};

void SaveNetJson(const nlohmann::ordered_json& j, const std::string& path);
nlohmann::json LoadNetJson(const std::string& path);

}  // namespace oef

#endif  // OEF_NET_HPP_
