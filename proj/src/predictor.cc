// Copyright 2026 The pamevo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pamevo/predictor.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace pamevo {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Block = ParamLayout::Block;

Eigen::Map<const MatrixXd> Mat(const VectorXd& p, const Block& b) {
  return {p.data() + b.offset, b.rows, b.cols};
}
Eigen::Map<MatrixXd> Mat(VectorXd& p, const Block& b) {
  return {p.data() + b.offset, b.rows, b.cols};
}
Eigen::Map<const VectorXd> Vec(const VectorXd& p, const Block& b) {
  return {p.data() + b.offset, b.size()};
}
Eigen::Map<VectorXd> Vec(VectorXd& p, const Block& b) {
  return {p.data() + b.offset, b.size()};
}

MatrixXd Relu(const MatrixXd& x) { return x.cwiseMax(0.0); }

MatrixXd ReluMask(const MatrixXd& pre) {
  return (pre.array() > 0.0).cast<double>().matrix();
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) - y x, the cross entropy of a logit against label y.
double BceWithLogit(double x, double y) {
  return std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
}

// Disjoint union of the active subgraphs of several graphs.
struct GraphBatch {
  Index num_graphs = 0;
  std::vector<int> node_op;
  std::vector<int> node_graph;
  std::vector<int> edge_src;
  std::vector<int> edge_dst;
  std::vector<int> edge_pos;

  Index num_nodes() const { return static_cast<Index>(node_op.size()); }
  Index num_edges() const { return static_cast<Index>(edge_src.size()); }
};

GraphBatch BuildBatch(std::span<const ProgramGraph* const> graphs) {
  GraphBatch batch;
  batch.num_graphs = static_cast<Index>(graphs.size());
  std::vector<int> global;
  for (Index gi = 0; gi < batch.num_graphs; ++gi) {
    const ProgramGraph& g = *graphs[gi];
    const std::vector<int> active = ActiveSubgraph(g);
    global.assign(g.slots.size(), -1);
    for (int slot : active) {
      global[slot] = static_cast<int>(batch.node_op.size());
      batch.node_op.push_back(static_cast<int>(g.slots[slot].op));
      batch.node_graph.push_back(static_cast<int>(gi));
    }
    for (int slot : active) {
      const Node& node = g.slots[slot];
      for (int k = 0; k < Arity(node.op); ++k) {
        batch.edge_src.push_back(global[node.inputs[k]]);
        batch.edge_dst.push_back(global[slot]);
        batch.edge_pos.push_back(k);
      }
    }
  }
  return batch;
}

struct LayerCache {
  MatrixXd u;   // [source state; edge feature] per edge
  MatrixXd pm;  // message pre-activation
  MatrixXd a;   // self state + aggregated messages
  MatrixXd p1, z1, p2;
};

struct EncoderCache {
  GraphBatch batch;
  std::vector<MatrixXd> h;  // num_layers + 1 node-state matrices
  std::vector<LayerCache> layers;
  MatrixXd graphs;          // hidden x num_graphs readout
};

void CheckModel(const PredictorModel& model) {
  if (model.params().size() != model.layout().total) {
    throw ConfigError("parameter vector does not match the model layout");
  }
}

EncoderCache EncodeForward(const PredictorModel& model,
                           std::span<const ProgramGraph* const> graphs) {
  CheckModel(model);
  const VectorXd& p = model.params();
  const ParamLayout& lay = model.layout();
  const Index hid = model.config().hidden_dim;
  const Index edim = model.config().edge_embed_dim;

  EncoderCache cache;
  cache.batch = BuildBatch(graphs);
  const GraphBatch& b = cache.batch;
  const Index n = b.num_nodes();
  const Index e = b.num_edges();

  const auto node_embed = Mat(p, lay.node_embed);
  const auto edge_embed = Mat(p, lay.edge_embed);
  MatrixXd h(hid, n);
  for (Index i = 0; i < n; ++i) h.col(i) = node_embed.col(b.node_op[i]);
  cache.h.push_back(h);

  for (const ParamLayout::Layer& layer : lay.layers) {
    const MatrixXd& cur = cache.h.back();
    LayerCache lc;
    lc.a = cur;
    if (e > 0) {
      lc.u.resize(hid + edim, e);
      for (Index k = 0; k < e; ++k) {
        lc.u.col(k).head(hid) = cur.col(b.edge_src[k]);
        lc.u.col(k).tail(edim) = edge_embed.col(b.edge_pos[k]);
      }
      lc.pm = (Mat(p, layer.msg_w) * lc.u).colwise() + Vec(p, layer.msg_b);
      const MatrixXd messages = Relu(lc.pm);
      for (Index k = 0; k < e; ++k) lc.a.col(b.edge_dst[k]) += messages.col(k);
    }
    lc.p1 = (Mat(p, layer.upd_w1) * lc.a).colwise() + Vec(p, layer.upd_b1);
    lc.z1 = Relu(lc.p1);
    lc.p2 = (Mat(p, layer.upd_w2) * lc.z1).colwise() + Vec(p, layer.upd_b2);
    cache.h.push_back(Relu(lc.p2));
    cache.layers.push_back(std::move(lc));
  }

  cache.graphs = MatrixXd::Zero(hid, b.num_graphs);
  const MatrixXd& last = cache.h.back();
  for (Index i = 0; i < n; ++i) cache.graphs.col(b.node_graph[i]) += last.col(i);
  return cache;
}

// Accumulates encoder parameter gradients given d(loss)/d(graph embeddings).
void EncodeBackward(const PredictorModel& model, const EncoderCache& cache,
                    const MatrixXd& d_graphs, VectorXd& grad) {
  const VectorXd& p = model.params();
  const ParamLayout& lay = model.layout();
  const Index hid = model.config().hidden_dim;
  const Index edim = model.config().edge_embed_dim;
  const GraphBatch& b = cache.batch;
  const Index n = b.num_nodes();
  const Index e = b.num_edges();

  MatrixXd dh(hid, n);
  for (Index i = 0; i < n; ++i) dh.col(i) = d_graphs.col(b.node_graph[i]);

  auto g_edge = Mat(grad, lay.edge_embed);
  for (Index l = static_cast<Index>(lay.layers.size()) - 1; l >= 0; --l) {
    const ParamLayout::Layer& layer = lay.layers[l];
    const LayerCache& lc = cache.layers[l];

    const MatrixXd dp2 = dh.cwiseProduct(ReluMask(lc.p2));
    Mat(grad, layer.upd_w2).noalias() += dp2 * lc.z1.transpose();
    Vec(grad, layer.upd_b2) += dp2.rowwise().sum();
    const MatrixXd dp1 =
        (Mat(p, layer.upd_w2).transpose() * dp2).cwiseProduct(ReluMask(lc.p1));
    Mat(grad, layer.upd_w1).noalias() += dp1 * lc.a.transpose();
    Vec(grad, layer.upd_b1) += dp1.rowwise().sum();
    MatrixXd da = Mat(p, layer.upd_w1).transpose() * dp1;

    MatrixXd dprev = da;
    if (e > 0) {
      MatrixXd dm(hid, e);
      for (Index k = 0; k < e; ++k) dm.col(k) = da.col(b.edge_dst[k]);
      const MatrixXd dpm = dm.cwiseProduct(ReluMask(lc.pm));
      Mat(grad, layer.msg_w).noalias() += dpm * lc.u.transpose();
      Vec(grad, layer.msg_b) += dpm.rowwise().sum();
      const MatrixXd du = Mat(p, layer.msg_w).transpose() * dpm;
      for (Index k = 0; k < e; ++k) {
        dprev.col(b.edge_src[k]) += du.col(k).head(hid);
        g_edge.col(b.edge_pos[k]) += du.col(k).tail(edim);
      }
    }
    dh = std::move(dprev);
  }

  auto g_node = Mat(grad, lay.node_embed);
  for (Index i = 0; i < n; ++i) g_node.col(b.node_op[i]) += dh.col(i);
}

// Two-layer head applied column-wise to `inputs`. Returns one output per
// column and keeps the pre-activation for the backward pass.
struct HeadCache {
  MatrixXd inputs;
  MatrixXd pre;
  Eigen::RowVectorXd out;
};

HeadCache HeadForward(const PredictorModel& model, MatrixXd inputs) {
  const VectorXd& p = model.params();
  const ParamLayout& lay = model.layout();
  HeadCache hc;
  hc.inputs = std::move(inputs);
  hc.pre = (Mat(p, lay.head_w1) * hc.inputs).colwise() + Vec(p, lay.head_b1);
  hc.out = (Mat(p, lay.head_w2) * Relu(hc.pre)).array() + p[lay.head_b2.offset];
  return hc;
}

// Returns d(loss)/d(head inputs) and accumulates head gradients.
MatrixXd HeadBackward(const PredictorModel& model, const HeadCache& hc,
                      const Eigen::RowVectorXd& d_out, VectorXd& grad) {
  const VectorXd& p = model.params();
  const ParamLayout& lay = model.layout();
  const MatrixXd relu = Relu(hc.pre);
  Mat(grad, lay.head_w2).noalias() += d_out * relu.transpose();
  grad[lay.head_b2.offset] += d_out.sum();
  const MatrixXd dpre = (Mat(p, lay.head_w2).transpose() * d_out)
                            .cwiseProduct(ReluMask(hc.pre));
  Mat(grad, lay.head_w1).noalias() += dpre * hc.inputs.transpose();
  Vec(grad, lay.head_b1) += dpre.rowwise().sum();
  return Mat(p, lay.head_w1).transpose() * dpre;
}

// Deduplicates graph pointers so each distinct graph is encoded once.
struct GraphIndex {
  std::vector<const ProgramGraph*> graphs;
  std::unordered_map<const ProgramGraph*, int> column;

  int Add(const ProgramGraph* g) {
    auto [it, inserted] = column.try_emplace(g, static_cast<int>(graphs.size()));
    if (inserted) graphs.push_back(g);
    return it->second;
  }
};

struct PairForward {
  GraphIndex index;
  std::vector<int> first, second;
  EncoderCache enc;
  HeadCache head;
};

PairForward ForwardPairs(const PredictorModel& model,
                         std::span<const LabeledPair> batch) {
  if (model.head() != HeadKind::kBinary) {
    throw ConfigError("pair loss requires a binary head");
  }
  PairForward f;
  for (const LabeledPair& pair : batch) {
    f.first.push_back(f.index.Add(pair.first));
    f.second.push_back(f.index.Add(pair.second));
  }
  f.enc = EncodeForward(model, f.index.graphs);
  const Index hid = model.config().hidden_dim;
  MatrixXd z(2 * hid, static_cast<Index>(batch.size()));
  for (size_t k = 0; k < batch.size(); ++k) {
    z.col(k).head(hid) = f.enc.graphs.col(f.first[k]);
    z.col(k).tail(hid) = f.enc.graphs.col(f.second[k]);
  }
  f.head = HeadForward(model, std::move(z));
  return f;
}

struct RegressionForward {
  GraphIndex index;
  std::vector<int> column;
  EncoderCache enc;
  HeadCache head;
};

RegressionForward ForwardGraphs(const PredictorModel& model,
                                std::span<const LabeledGraph> batch) {
  if (model.head() != HeadKind::kRegression) {
    throw ConfigError("fitness loss requires a regression head");
  }
  RegressionForward f;
  for (const LabeledGraph& item : batch) f.column.push_back(f.index.Add(item.graph));
  f.enc = EncodeForward(model, f.index.graphs);
  MatrixXd z(model.config().hidden_dim, static_cast<Index>(batch.size()));
  for (size_t k = 0; k < batch.size(); ++k) z.col(k) = f.enc.graphs.col(f.column[k]);
  f.head = HeadForward(model, std::move(z));
  return f;
}

void WriteU32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
void WriteU64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
std::uint64_t ReadLe(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == EOF) throw ConfigError("checkpoint truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

constexpr char kModelMagic[8] = {'P', 'A', 'M', 'E', 'V', 'O', 'M', 'D'};
constexpr char kVectorMagic[8] = {'P', 'A', 'M', 'E', 'V', 'O', 'V', 'C'};
constexpr std::uint32_t kCheckpointVersion = 1;

void ExpectMagic(std::istream& in, const char (&magic)[8]) {
  char buf[8];
  in.read(buf, 8);
  if (!in || !std::equal(buf, buf + 8, magic)) {
    throw ConfigError("bad checkpoint magic");
  }
  if (ReadLe(in, 4) != kCheckpointVersion) {
    throw ConfigError("unsupported checkpoint version");
  }
}

void WriteDoubles(std::ostream& out, const VectorXd& v) {
  WriteU64(out, static_cast<std::uint64_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) WriteU64(out, std::bit_cast<std::uint64_t>(v[i]));
}

VectorXd ReadDoubles(std::istream& in, std::uint64_t count) {
  VectorXd v(static_cast<Index>(count));
  for (Index i = 0; i < v.size(); ++i) v[i] = std::bit_cast<double>(ReadLe(in, 8));
  return v;
}

}  // namespace

std::optional<std::string> ValidateConfig(const EncoderConfig& c) {
  if (c.node_embed_dim <= 0 || c.edge_embed_dim <= 0 || c.hidden_dim <= 0 ||
      c.num_layers <= 0 || c.graph_dim <= 0) {
    return "encoder dimensions must be positive";
  }
  if (c.graph_dim != c.hidden_dim) return "graph_dim must equal hidden_dim";
  if (c.node_embed_dim != c.hidden_dim) {
    return "node_embed_dim must equal hidden_dim";
  }
  return std::nullopt;
}

ParamLayout::ParamLayout(const EncoderConfig& config, HeadKind head) {
  const Index hid = config.hidden_dim;
  const Index edim = config.edge_embed_dim;
  auto take = [this](Index rows, Index cols) {
    Block b{total, rows, cols};
    total += rows * cols;
    return b;
  };
  node_embed = take(hid, kNumOpKinds);
  edge_embed = take(edim, kMaxArity);
  for (int l = 0; l < config.num_layers; ++l) {
    Layer layer;
    layer.msg_w = take(hid, hid + edim);
    layer.msg_b = take(hid, 1);
    layer.upd_w1 = take(hid, hid);
    layer.upd_b1 = take(hid, 1);
    layer.upd_w2 = take(hid, hid);
    layer.upd_b2 = take(hid, 1);
    layers.push_back(layer);
  }
  const Index head_in = head == HeadKind::kBinary ? 2 * hid : hid;
  head_w1 = take(hid, head_in);
  head_b1 = take(hid, 1);
  head_w2 = take(1, hid);
  head_b2 = take(1, 1);
}

PredictorModel::PredictorModel(const EncoderConfig& config, HeadKind head)
    : config_(config),
      head_(head),
      layout_((ValidateConfig(config)
                   ? throw ConfigError(*ValidateConfig(config))
                   : config),
              head),
      params_(VectorXd::Zero(layout_.total)) {}

PredictorModel PredictorModel::Initialized(const EncoderConfig& config,
                                           HeadKind head, Rng& rng) {
  PredictorModel model(config, head);
  VectorXd& p = model.params_;
  const ParamLayout& lay = model.layout_;
  std::normal_distribution<double> normal(0.0, 1.0);
  auto embed = [&](const Block& b) {
    for (Index i = 0; i < b.size(); ++i) p[b.offset + i] = 0.1 * normal(rng);
  };
  // Bias blocks share the fan-in of their weight matrix.
  auto dense = [&](const Block& w, const Block& bias) {
    const double s = 1.0 / std::sqrt(static_cast<double>(w.cols));
    std::uniform_real_distribution<double> uni(-s, s);
    for (Index i = 0; i < w.size(); ++i) p[w.offset + i] = uni(rng);
    for (Index i = 0; i < bias.size(); ++i) p[bias.offset + i] = uni(rng);
  };
  embed(lay.node_embed);
  embed(lay.edge_embed);
  for (const ParamLayout::Layer& layer : lay.layers) {
    dense(layer.msg_w, layer.msg_b);
    dense(layer.upd_w1, layer.upd_b1);
    dense(layer.upd_w2, layer.upd_b2);
  }
  dense(lay.head_w1, lay.head_b1);
  dense(lay.head_w2, lay.head_b2);
  return model;
}

void PredictorModel::set_params(const VectorXd& params) {
  if (params.size() != layout_.total) {
    throw ConfigError("parameter count mismatch: expected " +
                      std::to_string(layout_.total) + ", got " +
                      std::to_string(params.size()));
  }
  params_ = params;
}

BinaryScore BinaryScore::FromLogit(double logit) {
  return BinaryScore{logit, Sigmoid(logit)};
}

Eigen::MatrixXd EncodeAll(const PredictorModel& model,
                          std::span<const ProgramGraph* const> graphs) {
  return EncodeForward(model, graphs).graphs;
}

Eigen::VectorXd Encode(const PredictorModel& model, const ProgramGraph& g) {
  const ProgramGraph* one[] = {&g};
  return EncodeAll(model, one).col(0);
}

double PairLogit(const PredictorModel& model, const VectorXd& first,
                 const VectorXd& second) {
  if (model.head() != HeadKind::kBinary) {
    throw ConfigError("PairLogit requires a binary head");
  }
  MatrixXd z(first.size() + second.size(), 1);
  z << first, second;
  return HeadForward(model, std::move(z)).out[0];
}

BinaryScore PredictPair(const PredictorModel& model, const ProgramGraph& x1,
                        const ProgramGraph& x2) {
  const ProgramGraph* both[] = {&x1, &x2};
  const MatrixXd emb = EncodeAll(model, both);
  return BinaryScore::FromLogit(PairLogit(model, emb.col(0), emb.col(1)));
}

double RegressionOutput(const PredictorModel& model,
                        const VectorXd& embedding) {
  if (model.head() != HeadKind::kRegression) {
    throw ConfigError("fitness prediction requires a regression head");
  }
  return HeadForward(model, embedding).out[0];
}

double PredictFitness(const PredictorModel& model, const ProgramGraph& g) {
  return RegressionOutput(model, Encode(model, g));
}

LossAndGrad BinaryLossAndGrad(const PredictorModel& model,
                              std::span<const LabeledPair> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  PairForward f = ForwardPairs(model, batch);
  const double n = static_cast<double>(batch.size());
  LossAndGrad out;
  out.grad = VectorXd::Zero(model.num_params());
  Eigen::RowVectorXd d_logit(batch.size());
  for (size_t k = 0; k < batch.size(); ++k) {
    const double x = f.head.out[k];
    const double y = batch[k].label;
    out.loss += BceWithLogit(x, y);
    d_logit[k] = (Sigmoid(x) - y) / n;
  }
  out.loss /= n;
  const MatrixXd dz = HeadBackward(model, f.head, d_logit, out.grad);
  const Index hid = model.config().hidden_dim;
  MatrixXd d_graphs = MatrixXd::Zero(hid, f.enc.graphs.cols());
  for (size_t k = 0; k < batch.size(); ++k) {
    d_graphs.col(f.first[k]) += dz.col(k).head(hid);
    d_graphs.col(f.second[k]) += dz.col(k).tail(hid);
  }
  EncodeBackward(model, f.enc, d_graphs, out.grad);
  return out;
}

double BinaryLoss(const PredictorModel& model,
                  std::span<const LabeledPair> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  const PairForward f = ForwardPairs(model, batch);
  double loss = 0.0;
  for (size_t k = 0; k < batch.size(); ++k) {
    loss += BceWithLogit(f.head.out[k], batch[k].label);
  }
  return loss / static_cast<double>(batch.size());
}

LossAndGrad RegressionLossAndGrad(const PredictorModel& model,
                                  std::span<const LabeledGraph> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  RegressionForward f = ForwardGraphs(model, batch);
  const double n = static_cast<double>(batch.size());
  LossAndGrad out;
  out.grad = VectorXd::Zero(model.num_params());
  Eigen::RowVectorXd d_pred(batch.size());
  for (size_t k = 0; k < batch.size(); ++k) {
    const double r = f.head.out[k] - batch[k].target;
    out.loss += r * r;
    d_pred[k] = 2.0 * r / n;
  }
  out.loss /= n;
  const MatrixXd dz = HeadBackward(model, f.head, d_pred, out.grad);
  MatrixXd d_graphs = MatrixXd::Zero(model.config().hidden_dim, f.enc.graphs.cols());
  for (size_t k = 0; k < batch.size(); ++k) d_graphs.col(f.column[k]) += dz.col(k);
  EncodeBackward(model, f.enc, d_graphs, out.grad);
  return out;
}

double RegressionLoss(const PredictorModel& model,
                      std::span<const LabeledGraph> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  const RegressionForward f = ForwardGraphs(model, batch);
  double loss = 0.0;
  for (size_t k = 0; k < batch.size(); ++k) {
    const double r = f.head.out[k] - batch[k].target;
    loss += r * r;
  }
  return loss / static_cast<double>(batch.size());
}

void AdamStep(PredictorModel& model, const VectorXd& grad, AdamState& state,
              const AdamConfig& config) {
  VectorXd& p = model.mutable_params();
  if (grad.size() != p.size()) throw ConfigError("gradient size mismatch");
  if (state.m.size() != p.size()) {
    state.m = VectorXd::Zero(p.size());
    state.v = VectorXd::Zero(p.size());
    state.step = 0;
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grad;
  state.v = config.beta2 * state.v + (1.0 - config.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  p *= 1.0 - config.learning_rate * config.weight_decay;
  p.array() -= config.learning_rate * (state.m.array() / c1) /
               ((state.v.array() / c2).sqrt() + config.epsilon);
}

BinaryScore NoisyOraclePredict(double fitness1, double fitness2,
                               double accuracy, Rng& rng) {
  bool truth;
  if (fitness1 == fitness2) {
    truth = Bernoulli(rng, 0.5);
  } else {
    truth = fitness1 > fitness2;
  }
  const bool keep = Bernoulli(rng, accuracy);
  const bool says_first = keep ? truth : !truth;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  return says_first ? BinaryScore{kInf, 1.0} : BinaryScore{-kInf, 0.0};
}

std::vector<std::vector<BinaryScore>> PairScorer::CompareAll(
    std::span<const ProgramGraph> candidates) {
  const size_t n = candidates.size();
  std::vector<std::vector<BinaryScore>> out(n, std::vector<BinaryScore>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i != j) out[i][j] = Compare(candidates[i], candidates[j]);
    }
  }
  return out;
}

std::shared_ptr<const PredictorModel> ModelSnapshot::Get() const {
  std::lock_guard<std::mutex> lock(mu_);
  return current_;
}

void ModelSnapshot::Publish(const PredictorModel& model) {
  auto next = std::make_shared<const PredictorModel>(model);
  std::lock_guard<std::mutex> lock(mu_);
  current_ = std::move(next);
}

BinaryScore LearnedScorer::Compare(const ProgramGraph& a,
                                   const ProgramGraph& b) {
  const auto model = snapshot_->Get();
  if (!model) throw ConfigError("no model snapshot published");
  return PredictPair(*model, a, b);
}

std::vector<std::vector<BinaryScore>> LearnedScorer::CompareAll(
    std::span<const ProgramGraph> candidates) {
  const auto model = snapshot_->Get();
  if (!model) throw ConfigError("no model snapshot published");
  std::vector<const ProgramGraph*> ptrs;
  for (const ProgramGraph& g : candidates) ptrs.push_back(&g);
  const MatrixXd emb = EncodeAll(*model, ptrs);
  const size_t n = candidates.size();
  std::vector<std::vector<BinaryScore>> out(n, std::vector<BinaryScore>(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      out[i][j] = BinaryScore::FromLogit(PairLogit(*model, emb.col(i), emb.col(j)));
    }
  }
  return out;
}

BinaryScore NoisyOracleScorer::Compare(const ProgramGraph& a,
                                       const ProgramGraph& b) {
  return NoisyOraclePredict(truth_(a), truth_(b), accuracy_, rng_);
}

void SaveModel(const PredictorModel& model, std::ostream& out) {
  out.write(kModelMagic, 8);
  WriteU32(out, kCheckpointVersion);
  WriteU32(out, static_cast<std::uint32_t>(model.head()));
  const EncoderConfig& c = model.config();
  for (int v : {c.node_embed_dim, c.edge_embed_dim, c.hidden_dim, c.num_layers,
                c.graph_dim}) {
    WriteU32(out, static_cast<std::uint32_t>(v));
  }
  WriteDoubles(out, model.params());
}

void SaveModel(const PredictorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  SaveModel(model, out);
}

PredictorModel LoadModel(std::istream& in) {
  ExpectMagic(in, kModelMagic);
  const auto head_raw = ReadLe(in, 4);
  if (head_raw > 1) throw ConfigError("unknown head kind in checkpoint");
  EncoderConfig c;
  c.node_embed_dim = static_cast<int>(ReadLe(in, 4));
  c.edge_embed_dim = static_cast<int>(ReadLe(in, 4));
  c.hidden_dim = static_cast<int>(ReadLe(in, 4));
  c.num_layers = static_cast<int>(ReadLe(in, 4));
  c.graph_dim = static_cast<int>(ReadLe(in, 4));
  PredictorModel model(c, static_cast<HeadKind>(head_raw));
  const std::uint64_t count = ReadLe(in, 8);
  if (count != static_cast<std::uint64_t>(model.num_params())) {
    throw ConfigError("checkpoint holds " + std::to_string(count) +
                      " parameters, config expects " +
                      std::to_string(model.num_params()));
  }
  model.set_params(ReadDoubles(in, count));
  return model;
}

PredictorModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return LoadModel(in);
}

void SaveVector(const VectorXd& v, std::ostream& out) {
  out.write(kVectorMagic, 8);
  WriteU32(out, kCheckpointVersion);
  WriteDoubles(out, v);
}

VectorXd LoadVector(std::istream& in) {
  ExpectMagic(in, kVectorMagic);
  return ReadDoubles(in, ReadLe(in, 8));
}

}  // namespace pamevo
