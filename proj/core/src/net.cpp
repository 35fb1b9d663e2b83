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

#include "oef/net.hpp"

#include <cmath>
#include <fstream>

namespace oef {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd RowSoftmax(const MatrixXd& z) {
  MatrixXd p(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    double zmax = z.row(r).maxCoeff();
    Eigen::RowVectorXd e = (z.row(r).array() - zmax).exp();
    p.row(r) = e / e.sum();
  }
  return p;
}

MatrixXd ApplyHead(HeadKind head, const MatrixXd& z) {
  switch (head) {
    case HeadKind::kLinear:
      return z;
    case HeadKind::kSigmoid:
      return ((-z.array()).exp() + 1.0).inverse().matrix();
    case HeadKind::kSoftmax:
      return RowSoftmax(z);
  }
  Fatal("net: bad head");
}

// Per-sample losses and d(loss_b)/dz_b for one head. coord_mask may be
// null (all coordinates); it is only meaningful for MSE.
std::pair<VectorXd, MatrixXd> HeadLoss(HeadKind head, LossKind loss,
                                       const MatrixXd& z, const MatrixXd& y,
                                       const MatrixXd& targets,
                                       const MatrixXd* coord_mask) {
  const Eigen::Index batch = z.rows();
  VectorXd losses(batch);
  MatrixXd dz(batch, z.cols());
  if (loss == LossKind::kCrossEntropy) {
    Check(head == HeadKind::kSoftmax, "net: cross-entropy needs a softmax head");
    for (Eigen::Index r = 0; r < batch; ++r) {
      double zmax = z.row(r).maxCoeff();
      double lse = zmax + std::log((z.row(r).array() - zmax).exp().sum());
      losses[r] = lse - targets.row(r).dot(z.row(r));
    }
    dz = y - targets;
    return {losses, dz};
  }
  // Mean squared error over unmasked coordinates.
  for (Eigen::Index r = 0; r < batch; ++r) {
    double denom = coord_mask != nullptr ? coord_mask->row(r).sum()
                                         : static_cast<double>(z.cols());
    if (denom <= 0) {
      losses[r] = 0;
      dz.row(r).setZero();
      continue;
    }
    Eigen::ArrayXd diff = (y.row(r) - targets.row(r)).transpose().array();
    if (coord_mask != nullptr) diff *= coord_mask->row(r).transpose().array();
    losses[r] = (diff * diff).sum() / denom;
    Eigen::ArrayXd grad_y = 2.0 * diff / denom;
    if (head == HeadKind::kSigmoid) {
      Eigen::ArrayXd yr = y.row(r).transpose().array();
      grad_y *= yr * (1.0 - yr);
    } else {
      Check(head == HeadKind::kLinear, "net: mse needs a linear or sigmoid head");
    }
    dz.row(r) = grad_y.matrix().transpose();
  }
  return {losses, dz};
}

void InitLayer(Eigen::MatrixXd& w, Eigen::VectorXd& b, int fan_in, Rng& rng) {
  double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      w(r, c) = (2.0 * rng.Uniform() - 1.0) * scale;
    }
  }
  b.setZero();
}

uint64_t HashDoubles(uint64_t hash, const double* data, size_t count) {
  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
  for (size_t i = 0; i < count * sizeof(double); ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::vector<int> ShuffledIndices(Eigen::Index n, Rng& rng) {
  std::vector<int> idx(n);
  for (Eigen::Index i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
  rng.Shuffle(idx);
  return idx;
}

MatrixXd GatherRows(const MatrixXd& m, const std::vector<int>& idx, size_t lo,
                    size_t hi) {
  MatrixXd out(hi - lo, m.cols());
  for (size_t i = lo; i < hi; ++i) out.row(i - lo) = m.row(idx[i]);
  return out;
}

}  // namespace

std::string HeadName(HeadKind head) {
  switch (head) {
    case HeadKind::kSoftmax: return "softmax";
    case HeadKind::kLinear: return "linear";
    case HeadKind::kSigmoid: return "sigmoid";
  }
  Fatal("net: bad head");
}

HeadKind HeadFromName(const std::string& name) {
  if (name == "softmax") return HeadKind::kSoftmax;
  if (name == "linear") return HeadKind::kLinear;
  if (name == "sigmoid") return HeadKind::kSigmoid;
  Fatal("net: unknown head '" + name + "'");
}

std::string LossName(LossKind loss) {
  return loss == LossKind::kCrossEntropy ? "cross_entropy" : "mse";
}

LossKind LossFromName(const std::string& name) {
  if (name == "cross_entropy") return LossKind::kCrossEntropy;
  if (name == "mse") return LossKind::kMse;
  Fatal("net: unknown loss '" + name + "'");
}

std::vector<double> MaskedSoftmax(std::span<const double> logits,
                                  std::span<const uint8_t> legal_mask) {
  Check(logits.size() == legal_mask.size(), "masked-softmax: length mismatch");
  double zmax = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < logits.size(); ++i) {
    if (legal_mask[i]) zmax = std::max(zmax, logits[i]);
  }
  Check(std::isfinite(zmax), "masked-softmax: empty legal mask");
  double total = 0;
  std::vector<double> probs(logits.size(), 0.0);
  for (size_t i = 0; i < logits.size(); ++i) {
    if (legal_mask[i]) total += (probs[i] = std::exp(logits[i] - zmax));
  }
  for (double& p : probs) p /= total;
  return probs;
}

// ---------------------------------------------------------------------------
// Net
// ---------------------------------------------------------------------------

Net::Net(std::vector<int> sizes, HeadKind head, uint64_t seed)
    : sizes_(std::move(sizes)), head_(head) {
  Check(sizes_.size() >= 2, "net: need at least input and output sizes");
  Rng rng(DeriveSeed(seed, 0xA0));
  for (size_t l = 1; l < sizes_.size(); ++l) {
    Layer layer;
    layer.w.resize(sizes_[l], sizes_[l - 1]);
    layer.b.resize(sizes_[l]);
    InitLayer(layer.w, layer.b, sizes_[l - 1], rng);
    layers_.push_back(std::move(layer));
  }
}

namespace {

struct NetPass {
  std::vector<MatrixXd> zs;  // pre-activations per layer
  std::vector<MatrixXd> as;  // activations, as[0] = inputs
};

void NetForwardPass(const std::vector<Net::Layer>& layers, HeadKind head,
                    const MatrixXd& inputs, NetPass* pass) {
  pass->as.clear();
  pass->zs.clear();
  pass->as.push_back(inputs);
  for (size_t l = 0; l < layers.size(); ++l) {
    MatrixXd z = (pass->as.back() * layers[l].w.transpose()).rowwise() +
                 layers[l].b.transpose();
    pass->zs.push_back(z);
    pass->as.push_back(l + 1 < layers.size() ? z.cwiseMax(0.0)
                                             : ApplyHead(head, z));
  }
}

// Backpropagates dz at the final layer into per-layer gradients.
void NetBackwardPass(const std::vector<Net::Layer>& layers, const NetPass& pass,
                     MatrixXd dz, std::vector<Net::Layer>* grads) {
  grads->resize(layers.size());
  for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
    (*grads)[l].w = dz.transpose() * pass.as[l];
    (*grads)[l].b = dz.colwise().sum();
    if (l > 0) {
      dz = (dz * layers[l].w)
               .cwiseProduct((pass.zs[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
}

}  // namespace

MatrixXd Net::ForwardBatch(const MatrixXd& inputs) const {
  Check(inputs.cols() == sizes_.front(), "net: input width mismatch");
  NetPass pass;
  NetForwardPass(layers_, head_, inputs, &pass);
  return pass.as.back();
}

VectorXd Net::Forward(const VectorXd& x) const {
  return ForwardBatch(x.transpose()).row(0);
}

std::vector<double> Net::Forward(std::span<const double> x) const {
  VectorXd v = Eigen::Map<const VectorXd>(x.data(), x.size());
  VectorXd y = Forward(v);
  return {y.data(), y.data() + y.size()};
}

double Net::TrainEpoch(const BatchRef& data, LossKind loss,
                       const TrainConfig& cfg, Rng& rng) {
  const MatrixXd& X = *data.inputs;
  const MatrixXd& T = *data.targets;
  Check(X.rows() == T.rows(), "net: inputs/targets row mismatch");
  Check(X.cols() == sizes_.front() && T.cols() == sizes_.back(),
        "net: shape mismatch");
  std::vector<int> order = ShuffledIndices(X.rows(), rng);

  double loss_sum = 0, weight_sum = 0;
  for (size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
    size_t hi = std::min(order.size(), lo + static_cast<size_t>(cfg.batch_size));
    MatrixXd xb = GatherRows(X, order, lo, hi);
    MatrixXd tb = GatherRows(T, order, lo, hi);
    std::optional<MatrixXd> mb;
    if (data.coord_mask != nullptr) {
      mb = GatherRows(*data.coord_mask, order, lo, hi);
    }
    VectorXd wb = VectorXd::Ones(hi - lo);
    if (data.sample_weights != nullptr) {
      for (size_t i = lo; i < hi; ++i) wb[i - lo] = (*data.sample_weights)[order[i]];
    }

    NetPass pass;
    NetForwardPass(layers_, head_, xb, &pass);
    auto [losses, dz] = HeadLoss(head_, loss, pass.zs.back(), pass.as.back(),
                                 tb, mb ? &*mb : nullptr);
    double wsum = wb.sum();
    if (wsum <= 0) continue;
    for (Eigen::Index r = 0; r < dz.rows(); ++r) dz.row(r) *= wb[r] / wsum;

    std::vector<Layer> grads;
    NetBackwardPass(layers_, pass, std::move(dz), &grads);
    for (size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].w -= cfg.learning_rate * grads[l].w;
      layers_[l].b -= cfg.learning_rate * grads[l].b;
    }
    loss_sum += losses.dot(wb);
    weight_sum += wsum;
  }
  double mean = weight_sum > 0 ? loss_sum / weight_sum : 0.0;
  if (!std::isfinite(mean) || !ParamsFinite()) {
    Fatal("nan-loss: training diverged (mean loss " + std::to_string(mean) + ")");
  }
  return mean;
}

double Net::LossOn(const BatchRef& data, LossKind loss) const {
  NetPass pass;
  NetForwardPass(layers_, head_, *data.inputs, &pass);
  auto [losses, dz] = HeadLoss(head_, loss, pass.zs.back(), pass.as.back(),
                               *data.targets, data.coord_mask);
  VectorXd w = VectorXd::Ones(losses.size());
  if (data.sample_weights != nullptr) w = *data.sample_weights;
  double wsum = w.sum();
  return wsum > 0 ? losses.dot(w) / wsum : 0.0;
}

VectorXd Net::Gradient(const BatchRef& data, LossKind loss) const {
  NetPass pass;
  NetForwardPass(layers_, head_, *data.inputs, &pass);
  auto [losses, dz] = HeadLoss(head_, loss, pass.zs.back(), pass.as.back(),
                               *data.targets, data.coord_mask);
  VectorXd w = VectorXd::Ones(losses.size());
  if (data.sample_weights != nullptr) w = *data.sample_weights;
  double wsum = w.sum();
  Check(wsum > 0, "net: zero total weight");
  for (Eigen::Index r = 0; r < dz.rows(); ++r) dz.row(r) *= w[r] / wsum;
  std::vector<Layer> grads;
  NetBackwardPass(layers_, pass, std::move(dz), &grads);

  VectorXd flat(NumParams());
  int64_t at = 0;
  for (const Layer& g : grads) {
    for (Eigen::Index r = 0; r < g.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.w.cols(); ++c) flat[at++] = g.w(r, c);
    }
    for (Eigen::Index r = 0; r < g.b.size(); ++r) flat[at++] = g.b[r];
  }
  return flat;
}

int64_t Net::NumParams() const {
  int64_t count = 0;
  for (const Layer& l : layers_) count += l.w.size() + l.b.size();
  return count;
}

namespace {

// Flat parameter addressing in row-major (W then b, layer by layer) order.
double* LayerParamAt(std::vector<Net::Layer>& layers, int64_t index) {
  for (Net::Layer& l : layers) {
    if (index < l.w.size()) {
      return &l.w(index / l.w.cols(), index % l.w.cols());
    }
    index -= l.w.size();
    if (index < l.b.size()) return &l.b(index);
    index -= l.b.size();
  }
  Fatal("net: parameter index out of range");
}

nlohmann::ordered_json LayersToJson(const std::vector<Net::Layer>& layers) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const Net::Layer& l : layers) {
    std::vector<double> w;
    w.reserve(l.w.size());
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) w.push_back(l.w(r, c));
    }
    std::vector<double> b(l.b.data(), l.b.data() + l.b.size());
    out.push_back({{"rows", l.w.rows()}, {"cols", l.w.cols()}, {"w", w}, {"b", b}});
  }
  return out;
}

std::vector<Net::Layer> LayersFromJson(const nlohmann::json& j) {
  std::vector<Net::Layer> layers;
  for (const auto& lj : j) {
    Net::Layer l;
    int64_t rows = lj.at("rows").get<int64_t>();
    int64_t cols = lj.at("cols").get<int64_t>();
    std::vector<double> w = lj.at("w").get<std::vector<double>>();
    std::vector<double> b = lj.at("b").get<std::vector<double>>();
    Check(static_cast<int64_t>(w.size()) == rows * cols &&
              static_cast<int64_t>(b.size()) == rows,
          "net: layer shape mismatch in file");
    l.w.resize(rows, cols);
    for (int64_t r = 0; r < rows; ++r) {
      for (int64_t c = 0; c < cols; ++c) l.w(r, c) = w[r * cols + c];
    }
    l.b = Eigen::Map<const VectorXd>(b.data(), rows);
    layers.push_back(std::move(l));
  }
  return layers;
}

uint64_t HashLayers(uint64_t hash, const std::vector<Net::Layer>& layers) {
  for (const Net::Layer& l : layers) {
    hash = HashDoubles(hash, l.w.data(), l.w.size());
    hash = HashDoubles(hash, l.b.data(), l.b.size());
  }
  return hash;
}

bool LayersFinite(const std::vector<Net::Layer>& layers) {
  for (const Net::Layer& l : layers) {
    if (!l.w.allFinite() || !l.b.allFinite()) return false;
  }
  return true;
}

}  // namespace

double Net::GetParam(int64_t index) const {
  return *LayerParamAt(const_cast<std::vector<Layer>&>(layers_), index);
}

void Net::SetParam(int64_t index, double value) {
  *LayerParamAt(layers_, index) = value;
}

uint64_t Net::ParamHash() const { return HashLayers(0xcbf29ce484222325ULL, layers_); }

bool Net::ParamsFinite() const { return LayersFinite(layers_); }

nlohmann::ordered_json Net::ToJson() const {
  nlohmann::ordered_json j;
  j["format"] = "oef-net";
  j["version"] = 1;
  j["head"] = HeadName(head_);
  j["sizes"] = sizes_;
  j["layers"] = LayersToJson(layers_);
  return j;
}

Net Net::FromJson(const nlohmann::json& j) {
  Check(j.value("format", "") == "oef-net", "net: bad format tag");
  Net net;
  net.sizes_ = j.at("sizes").get<std::vector<int>>();
  net.head_ = HeadFromName(j.at("head").get<std::string>());
  net.layers_ = LayersFromJson(j.at("layers"));
  Check(net.layers_.size() + 1 == net.sizes_.size(), "net: layer count mismatch");
  for (size_t l = 0; l < net.layers_.size(); ++l) {
    Check(net.layers_[l].w.rows() == net.sizes_[l + 1] &&
              net.layers_[l].w.cols() == net.sizes_[l],
          "net: stored shapes disagree with sizes");
  }
  return net;
}

// ---------------------------------------------------------------------------
// MultiHeadNet
// ---------------------------------------------------------------------------

struct MultiHeadNet::Workspace {
  NetPass trunk;
  std::vector<MatrixXd> head_z, head_y;
};

MultiHeadNet::MultiHeadNet(std::vector<int> trunk_sizes,
                           std::vector<HeadSpec> heads, uint64_t seed)
    : trunk_sizes_(std::move(trunk_sizes)), heads_(std::move(heads)) {
  Check(trunk_sizes_.size() >= 2, "net: trunk needs input and hidden sizes");
  Rng rng(DeriveSeed(seed, 0xB0));
  for (size_t l = 1; l < trunk_sizes_.size(); ++l) {
    Net::Layer layer;
    layer.w.resize(trunk_sizes_[l], trunk_sizes_[l - 1]);
    layer.b.resize(trunk_sizes_[l]);
    InitLayer(layer.w, layer.b, trunk_sizes_[l - 1], rng);
    trunk_.push_back(std::move(layer));
  }
  for (const HeadSpec& spec : heads_) {
    Net::Layer layer;
    layer.w.resize(spec.dim, trunk_sizes_.back());
    layer.b.resize(spec.dim);
    InitLayer(layer.w, layer.b, trunk_sizes_.back(), rng);
    head_layers_.push_back(std::move(layer));
  }
}

int MultiHeadNet::HeadIndex(const std::string& name) const {
  for (size_t i = 0; i < heads_.size(); ++i) {
    if (heads_[i].name == name) return static_cast<int>(i);
  }
  Fatal("net: no head named '" + name + "'");
}

void MultiHeadNet::ForwardTrunk(const MatrixXd& inputs, Workspace* ws) const {
  Check(inputs.cols() == trunk_sizes_.front(), "net: input width mismatch");
  ws->trunk.as.clear();
  ws->trunk.zs.clear();
  ws->trunk.as.push_back(inputs);
  for (const Net::Layer& l : trunk_) {
    MatrixXd z = (ws->trunk.as.back() * l.w.transpose()).rowwise() + l.b.transpose();
    ws->trunk.zs.push_back(z);
    ws->trunk.as.push_back(z.cwiseMax(0.0));
  }
  ws->head_z.clear();
  ws->head_y.clear();
  for (size_t k = 0; k < heads_.size(); ++k) {
    MatrixXd z = (ws->trunk.as.back() * head_layers_[k].w.transpose()).rowwise() +
                 head_layers_[k].b.transpose();
    ws->head_y.push_back(ApplyHead(heads_[k].activation, z));
    ws->head_z.push_back(std::move(z));
  }
}

std::vector<VectorXd> MultiHeadNet::Forward(const VectorXd& x) const {
  Workspace ws;
  ForwardTrunk(x.transpose(), &ws);
  std::vector<VectorXd> out;
  for (const MatrixXd& y : ws.head_y) out.push_back(y.row(0));
  return out;
}

std::vector<double> MultiHeadNet::ForwardHead(int head,
                                              std::span<const double> x) const {
  VectorXd v = Eigen::Map<const VectorXd>(x.data(), x.size());
  VectorXd y = Forward(v)[static_cast<size_t>(head)];
  return {y.data(), y.data() + y.size()};
}

double MultiHeadNet::Backward(const MatrixXd& inputs,
                              const std::vector<HeadBatch>& batches,
                              Workspace* ws,
                              std::vector<Net::Layer>* trunk_grads,
                              std::vector<Net::Layer>* head_grads) const {
  Check(batches.size() == heads_.size(), "net: one batch per head required");
  ForwardTrunk(inputs, ws);

  double total_loss = 0;
  MatrixXd da = MatrixXd::Zero(inputs.rows(), trunk_sizes_.back());
  head_grads->resize(heads_.size());
  for (size_t k = 0; k < heads_.size(); ++k) {
    const HeadBatch& hb = batches[k];
    (*head_grads)[k].w =
        MatrixXd::Zero(head_layers_[k].w.rows(), head_layers_[k].w.cols());
    (*head_grads)[k].b = VectorXd::Zero(head_layers_[k].b.size());
    if (hb.targets == nullptr) continue;  // head skipped in this pass

    auto [losses, dz] =
        HeadLoss(heads_[k].activation, heads_[k].loss, ws->head_z[k],
                 ws->head_y[k], *hb.targets, hb.coord_mask);
    double selected = 0;
    if (hb.row_mask != nullptr) {
      for (Eigen::Index r = 0; r < dz.rows(); ++r) {
        if ((*hb.row_mask)[r]) {
          ++selected;
        } else {
          dz.row(r).setZero();
          losses[r] = 0;
        }
      }
    } else {
      selected = static_cast<double>(dz.rows());
    }
    if (selected == 0) continue;
    double scale = heads_[k].weight / selected;
    dz *= scale;
    total_loss += losses.sum() * scale;
    (*head_grads)[k].w = dz.transpose() * ws->trunk.as.back();
    (*head_grads)[k].b = dz.colwise().sum();
    da += dz * head_layers_[k].w;
  }

  trunk_grads->resize(trunk_.size());
  MatrixXd dz = da;
  for (int l = static_cast<int>(trunk_.size()) - 1; l >= 0; --l) {
    dz = dz.cwiseProduct((ws->trunk.zs[l].array() > 0.0).cast<double>().matrix());
    (*trunk_grads)[l].w = dz.transpose() * ws->trunk.as[l];
    (*trunk_grads)[l].b = dz.colwise().sum();
    if (l > 0) dz = dz * trunk_[l].w;
  }
  return total_loss;
}

double MultiHeadNet::TrainEpoch(const MatrixXd& inputs,
                                const std::vector<HeadBatch>& batches,
                                const TrainConfig& cfg, Rng& rng) {
  std::vector<int> order = ShuffledIndices(inputs.rows(), rng);
  double loss_sum = 0;
  int64_t num_batches = 0;
  for (size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
    size_t hi = std::min(order.size(), lo + static_cast<size_t>(cfg.batch_size));
    MatrixXd xb = GatherRows(inputs, order, lo, hi);

    std::vector<MatrixXd> targets(heads_.size()), masks(heads_.size());
    std::vector<std::vector<uint8_t>> rows(heads_.size());
    std::vector<HeadBatch> slice(heads_.size());
    for (size_t k = 0; k < heads_.size(); ++k) {
      if (batches[k].targets == nullptr) continue;
      targets[k] = GatherRows(*batches[k].targets, order, lo, hi);
      slice[k].targets = &targets[k];
      if (batches[k].coord_mask != nullptr) {
        masks[k] = GatherRows(*batches[k].coord_mask, order, lo, hi);
        slice[k].coord_mask = &masks[k];
      }
      if (batches[k].row_mask != nullptr) {
        rows[k].resize(hi - lo);
        for (size_t i = lo; i < hi; ++i) {
          rows[k][i - lo] = (*batches[k].row_mask)[order[i]];
        }
        slice[k].row_mask = &rows[k];
      }
    }

    Workspace ws;
    std::vector<Net::Layer> trunk_grads, head_grads;
    loss_sum += Backward(xb, slice, &ws, &trunk_grads, &head_grads);
    ++num_batches;
    for (size_t l = 0; l < trunk_.size(); ++l) {
      trunk_[l].w -= cfg.learning_rate * trunk_grads[l].w;
      trunk_[l].b -= cfg.learning_rate * trunk_grads[l].b;
    }
    for (size_t k = 0; k < head_layers_.size(); ++k) {
      head_layers_[k].w -= cfg.learning_rate * head_grads[k].w;
      head_layers_[k].b -= cfg.learning_rate * head_grads[k].b;
    }
  }
  double mean = num_batches > 0 ? loss_sum / static_cast<double>(num_batches) : 0.0;
  if (!std::isfinite(mean) || !ParamsFinite()) {
    Fatal("nan-loss: environment-model training diverged");
  }
  return mean;
}

double MultiHeadNet::LossOn(const MatrixXd& inputs,
                            const std::vector<HeadBatch>& batches) const {
  Workspace ws;
  std::vector<Net::Layer> tg, hg;
  return Backward(inputs, batches, &ws, &tg, &hg);
}

VectorXd MultiHeadNet::Gradient(const MatrixXd& inputs,
                                const std::vector<HeadBatch>& batches) const {
  Workspace ws;
  std::vector<Net::Layer> tg, hg;
  Backward(inputs, batches, &ws, &tg, &hg);
  VectorXd flat(NumParams());
  int64_t at = 0;
  auto emit = [&](const std::vector<Net::Layer>& grads) {
    for (const Net::Layer& g : grads) {
      for (Eigen::Index r = 0; r < g.w.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.w.cols(); ++c) flat[at++] = g.w(r, c);
      }
      for (Eigen::Index r = 0; r < g.b.size(); ++r) flat[at++] = g.b[r];
    }
  };
  emit(tg);
  emit(hg);
  return flat;
}

int64_t MultiHeadNet::NumParams() const {
  int64_t count = 0;
  for (const Net::Layer& l : trunk_) count += l.w.size() + l.b.size();
  for (const Net::Layer& l : head_layers_) count += l.w.size() + l.b.size();
  return count;
}

double MultiHeadNet::GetParam(int64_t index) const {
  int64_t trunk_count = 0;
  for (const Net::Layer& l : trunk_) trunk_count += l.w.size() + l.b.size();
  auto& self = const_cast<MultiHeadNet&>(*this);
  if (index < trunk_count) return *LayerParamAt(self.trunk_, index);
  return *LayerParamAt(self.head_layers_, index - trunk_count);
}

void MultiHeadNet::SetParam(int64_t index, double value) {
  int64_t trunk_count = 0;
  for (const Net::Layer& l : trunk_) trunk_count += l.w.size() + l.b.size();
  if (index < trunk_count) {
    *LayerParamAt(trunk_, index) = value;
  } else {
    *LayerParamAt(head_layers_, index - trunk_count) = value;
  }
}

uint64_t MultiHeadNet::ParamHash() const {
  return HashLayers(HashLayers(0xcbf29ce484222325ULL, trunk_), head_layers_);
}

bool MultiHeadNet::ParamsFinite() const {
  return LayersFinite(trunk_) && LayersFinite(head_layers_);
}

nlohmann::ordered_json MultiHeadNet::ToJson() const {
  nlohmann::ordered_json j;
  j["format"] = "oef-multihead-net";
  j["version"] = 1;
  j["trunk_sizes"] = trunk_sizes_;
  j["trunk"] = LayersToJson(trunk_);
  nlohmann::ordered_json heads = nlohmann::ordered_json::array();
  for (size_t k = 0; k < heads_.size(); ++k) {
    nlohmann::ordered_json h;
    h["name"] = heads_[k].name;
    h["dim"] = heads_[k].dim;
    h["activation"] = HeadName(heads_[k].activation);
    h["loss"] = LossName(heads_[k].loss);
    h["weight"] = heads_[k].weight;
    h["layer"] = LayersToJson({head_layers_[k]})[0];
    heads.push_back(std::move(h));
  }
  j["heads"] = std::move(heads);
  return j;
}

MultiHeadNet MultiHeadNet::FromJson(const nlohmann::json& j) {
  Check(j.value("format", "") == "oef-multihead-net", "net: bad format tag");
  MultiHeadNet net;
  net.trunk_sizes_ = j.at("trunk_sizes").get<std::vector<int>>();
  net.trunk_ = LayersFromJson(j.at("trunk"));
  for (const auto& hj : j.at("heads")) {
    HeadSpec spec;
    spec.name = hj.at("name").get<std::string>();
    spec.dim = hj.at("dim").get<int>();
    spec.activation = HeadFromName(hj.at("activation").get<std::string>());
    spec.loss = LossFromName(hj.at("loss").get<std::string>());
    spec.weight = hj.at("weight").get<double>();
    net.heads_.push_back(spec);
    auto layers = LayersFromJson(nlohmann::json::array({hj.at("layer")}));
    Check(layers[0].w.rows() == spec.dim &&
              layers[0].w.cols() == net.trunk_sizes_.back(),
          "net: head shape mismatch in file");
    net.head_layers_.push_back(std::move(layers[0]));
  }
  return net;
}

void SaveNetJson(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  Check(out.good(), "net: cannot write " + path);
  out << j.dump() << "\n";
  Check(out.good(), "net: write failure on " + path);
}

nlohmann::json LoadNetJson(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), "net: cannot read " + path);
  return nlohmann::json::parse(in);
}

}  // namespace oef
