#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evoattack/dataset.hpp"

namespace evoattack {

enum class ModelKind { LR, DNN, CNN };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ConvSpec {
  std::size_t filters = 8;
  std::size_t kernel = 3;  // square, valid convolution, stride 1
  std::size_t pool = 2;    // square max pool, stride = pool
};

struct ModelConfig {
  ModelKind kind = ModelKind::LR;
  Shape input_shape;
  int num_classes = 0;
  std::vector<std::size_t> hidden_widths = {128, 128};  // DNN only
  ConvSpec conv;                                        // CNN only
  double learning_rate = 0.5;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t init_seed = 1;
  double temperature = 1.0;      // softmax temperature at train and serve time
  double accuracy_floor = 0.0;   // training-accuracy floor; unmet -> warning flag
};

// Throws if layer dimensions cannot chain from input shape to num_classes.
void validate(const ModelConfig& config);

/// Named weight array (dense matrices, conv filter banks, bias vectors).
struct Tensor {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<double> data;

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
  }
};

inline constexpr std::uint32_t kWeightsFormatVersion = 1;

struct ModelWeights {
  std::uint32_t version = kWeightsFormatVersion;
  ModelConfig config;
  std::vector<Tensor> tensors;
};

// probs_i = exp(z_i / T) / sum_j exp(z_j / T), computed with max subtraction.
std::vector<double> softmax_t(const std::vector<double>& logits, double temperature);

int argmax_label(const std::vector<double>& probs);  // ties -> lowest index

/// The only channel between the attack and a model: a pure probability query.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::vector<double> classify(const std::vector<double>& pixels) const = 0;
  virtual Shape input_shape() const = 0;
  virtual int num_classes() const = 0;
};

class Model : public Oracle {
 public:
  explicit Model(ModelWeights weights);

  std::vector<double> classify(const std::vector<double>& pixels) const override;
  std::vector<double> classify(const Image& image) const { return classify(image.pixels); }
  Shape input_shape() const override { return weights_.config.input_shape; }
  int num_classes() const override { return weights_.config.num_classes; }
  const ModelWeights& weights() const { return weights_; }

 private:
  ModelWeights weights_;
};

ModelWeights init_weights(const ModelConfig& config);

struct TrainResult {
  ModelWeights weights;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
  bool accuracy_floor_met = true;
};

// Mini-batch SGD on cross-entropy at the config's temperature. Deterministic
// for a given seed. Throws on non-finite loss instead of clamping.
TrainResult train(const ModelConfig& config, const Dataset& data, std::uint64_t seed);

// Same trainer against per-sample target distributions (distillation path).
TrainResult train_soft(const ModelConfig& config, const std::vector<Image>& inputs,
                       const std::vector<std::vector<double>>& targets, std::uint64_t seed);

double accuracy(const ModelWeights& weights, const Dataset& data);

struct DistillResult {
  TrainResult teacher;
  TrainResult student;
};

// Teacher trained at temperature T, student trained on the teacher's
// temperature-T probabilities, then served at serve_temperature.
DistillResult distill(ModelConfig teacher_config, ModelConfig student_config,
                      double temperature, const Dataset& data, std::uint64_t seed,
                      double serve_temperature = 1.0);

// Self-describing binary container; format spelled out in docs/file-formats.md.
void save_weights(const ModelWeights& weights, const std::string& path);
ModelWeights load_weights(const std::string& path);

// Single-sample cross-entropy against a target distribution at the config's
// temperature, and its exact gradients (one per weight tensor, same dims).
// These back the trainer and the finite-difference gradient checks.
double sample_loss(const ModelWeights& weights, const std::vector<double>& pixels,
                   const std::vector<double>& target);
std::vector<Tensor> sample_loss_gradients(const ModelWeights& weights,
                                          const std::vector<double>& pixels,
                                          const std::vector<double>& target);

}  // namespace evoattack
