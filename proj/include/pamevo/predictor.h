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

#ifndef PAMEVO_PREDICTOR_H_
#define PAMEVO_PREDICTOR_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pamevo/dag.h"
#include "pamevo/random.h"

namespace pamevo {

struct EncoderConfig {
  int node_embed_dim = 64;
  int edge_embed_dim = 16;
  int hidden_dim = 64;
  int num_layers = 3;
  int graph_dim = 64;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

// Node states start as the op embedding and the readout is a plain sum, so
// node_embed_dim and graph_dim must both equal hidden_dim.
std::optional<std::string> ValidateConfig(const EncoderConfig& config);

enum class HeadKind : std::uint8_t { kBinary = 0, kRegression = 1 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Offsets of every parameter block inside the flat parameter vector. All
// matrices are stored column-major.
struct ParamLayout {
  struct Block {
    Eigen::Index offset = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Eigen::Index size() const { return rows * cols; }
  };
  struct Layer {
    Block msg_w, msg_b;    // message MLP on [source state; edge feature]
    Block upd_w1, upd_b1;  // update MLP on self state + aggregated messages
    Block upd_w2, upd_b2;
  };

  Block node_embed;  // hidden x kNumOpKinds, one column per op kind
  Block edge_embed;  // edge_dim x 2, one column per input position
  std::vector<Layer> layers;
  Block head_w1, head_b1, head_w2, head_b2;
  Eigen::Index total = 0;

  ParamLayout(const EncoderConfig& config, HeadKind head);
};

class PredictorModel {
 public:
  // All parameters zero. Throws ConfigError on an invalid config.
  PredictorModel(const EncoderConfig& config, HeadKind head);

  // Uniform(+-1/sqrt(fan_in)) weights and biases, N(0, 0.01) embeddings.
  static PredictorModel Initialized(const EncoderConfig& config, HeadKind head,
                                    Rng& rng);

  const EncoderConfig& config() const { return config_; }
  HeadKind head() const { return head_; }
  const ParamLayout& layout() const { return layout_; }
  Eigen::Index num_params() const { return params_.size(); }

  const Eigen::VectorXd& params() const { return params_; }
  Eigen::VectorXd& mutable_params() { return params_; }
  // Throws ConfigError on a size mismatch.
  void set_params(const Eigen::VectorXd& params);

 private:
  EncoderConfig config_;
  HeadKind head_;
  ParamLayout layout_;
  Eigen::VectorXd params_;
};

struct BinaryScore {
  double logit = 0.0;
  double probability = 0.5;

  static BinaryScore FromLogit(double logit);
  bool Accepts() const { return probability > 0.5; }
  // +1/-1 vote for pairwise tallies; a zero logit votes +1.
  int Vote() const { return logit >= 0.0 ? 1 : -1; }
};

// Graph embedding of the active subgraph (length hidden_dim).
Eigen::VectorXd Encode(const PredictorModel& model, const ProgramGraph& g);

// Embeddings for several graphs in one pass, one column per graph.
Eigen::MatrixXd EncodeAll(const PredictorModel& model,
                          std::span<const ProgramGraph* const> graphs);

// Binary head on precomputed embeddings.
double PairLogit(const PredictorModel& model, const Eigen::VectorXd& first,
                 const Eigen::VectorXd& second);

// Score that x1 is fitter than x2. Requires a binary head.
BinaryScore PredictPair(const PredictorModel& model, const ProgramGraph& x1,
                        const ProgramGraph& x2);

// Regression head on a precomputed embedding.
double RegressionOutput(const PredictorModel& model,
                        const Eigen::VectorXd& embedding);

// Scalar fitness estimate. Requires a regression head.
double PredictFitness(const PredictorModel& model, const ProgramGraph& g);

// Non-owning training examples; the graphs must outlive the call.
struct LabeledPair {
  const ProgramGraph* first = nullptr;
  const ProgramGraph* second = nullptr;
  double label = 0.0;  // 1 iff first is fitter
};

struct LabeledGraph {
  const ProgramGraph* graph = nullptr;
  double target = 0.0;
};

struct LossAndGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

// Mean binary cross entropy on logits and its exact gradient.
LossAndGrad BinaryLossAndGrad(const PredictorModel& model,
                              std::span<const LabeledPair> batch);
double BinaryLoss(const PredictorModel& model,
                  std::span<const LabeledPair> batch);

// Mean squared error and its exact gradient.
LossAndGrad RegressionLossAndGrad(const PredictorModel& model,
                                  std::span<const LabeledGraph> batch);
double RegressionLoss(const PredictorModel& model,
                      std::span<const LabeledGraph> batch);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-5;  // decoupled
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;
};

// One decoupled-weight-decay Adam update. Lazily sizes the state.
void AdamStep(PredictorModel& model, const Eigen::VectorXd& grad,
              AdamState& state, const AdamConfig& config);

// Ground-truth ordering, flipped with probability 1 - accuracy. Ties are a
// fair coin. The probability field is exactly 0 or 1.
BinaryScore NoisyOraclePredict(double fitness1, double fitness2,
                               double accuracy, Rng& rng);

// Anything that can judge "a is fitter than b".
class PairScorer {
 public:
  virtual ~PairScorer() = default;
  virtual BinaryScore Compare(const ProgramGraph& a, const ProgramGraph& b) = 0;
  // scores[i][j] = Compare(candidates[i], candidates[j]) for i != j.
  virtual std::vector<std::vector<BinaryScore>> CompareAll(
      std::span<const ProgramGraph> candidates);
};

// Holds the most recently published model. Readers get an immutable snapshot.
class ModelSnapshot {
 public:
  std::shared_ptr<const PredictorModel> Get() const;
  void Publish(const PredictorModel& model);

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const PredictorModel> current_;
};

// Scores with the learned binary head, always against the latest snapshot.
class LearnedScorer : public PairScorer {
 public:
  explicit LearnedScorer(const ModelSnapshot* snapshot) : snapshot_(snapshot) {}
  BinaryScore Compare(const ProgramGraph& a, const ProgramGraph& b) override;
  std::vector<std::vector<BinaryScore>> CompareAll(
      std::span<const ProgramGraph> candidates) override;

 private:
  const ModelSnapshot* snapshot_;
};

// Simulated predictor of a given accuracy over a ground-truth fitness.
class NoisyOracleScorer : public PairScorer {
 public:
  using FitnessFn = std::function<double(const ProgramGraph&)>;
  NoisyOracleScorer(FitnessFn truth, double accuracy, std::uint64_t seed)
      : truth_(std::move(truth)), accuracy_(accuracy), rng_(seed) {}
  BinaryScore Compare(const ProgramGraph& a, const ProgramGraph& b) override;

  double accuracy() const { return accuracy_; }
  Rng& rng() { return rng_; }

 private:
  FitnessFn truth_;
  double accuracy_;
  Rng rng_;
};

// Binary checkpoint: "PAMEVOMD" magic, u32 version, u32 head kind, five u32
// config fields, u64 parameter count, then little-endian float64 values.
void SaveModel(const PredictorModel& model, std::ostream& out);
void SaveModel(const PredictorModel& model, const std::string& path);
// Throws ConfigError on a bad header or a parameter count mismatch.
PredictorModel LoadModel(std::istream& in);
PredictorModel LoadModel(const std::string& path);

// Writes/reads a bare float64 vector with the same header scheme.
void SaveVector(const Eigen::VectorXd& v, std::ostream& out);
Eigen::VectorXd LoadVector(std::istream& in);

}  // namespace pamevo

#endif  // PAMEVO_PREDICTOR_H_
