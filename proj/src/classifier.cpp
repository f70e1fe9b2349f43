#include "evoattack/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "evoattack/rng.hpp"

namespace evoattack {

namespace {

using nlohmann::json;

struct ConvDims {
  std::size_t out_h = 0, out_w = 0;      // after valid 3x3 (stride 1)
  std::size_t pool_h = 0, pool_w = 0;    // after max pool
  std::size_t flat = 0;                  // filters * pool_h * pool_w
};

ConvDims conv_dims(const ModelConfig& c) {
  ConvDims d;
  if (c.input_shape.height < c.conv.kernel || c.input_shape.width < c.conv.kernel) return d;
  d.out_h = c.input_shape.height - c.conv.kernel + 1;
  d.out_w = c.input_shape.width - c.conv.kernel + 1;
  d.pool_h = d.out_h / c.conv.pool;
  d.pool_w = d.out_w / c.conv.pool;
  d.flat = c.conv.filters * d.pool_h * d.pool_w;
  return d;
}

// The dense chain widths, from the first dense input to the logits.
std::vector<std::size_t> dense_widths(const ModelConfig& c) {
  std::vector<std::size_t> w;
  switch (c.kind) {
    case ModelKind::LR:
      w = {c.input_shape.size(), std::size_t(c.num_classes)};
      break;
    case ModelKind::DNN:
      w.push_back(c.input_shape.size());
      for (std::size_t h : c.hidden_widths) w.push_back(h);
      w.push_back(std::size_t(c.num_classes));
      break;
    case ModelKind::CNN:
      w = {conv_dims(c).flat, std::size_t(c.num_classes)};
      break;
  }
  return w;
}

std::vector<Tensor> tensor_layout(const ModelConfig& c) {
  std::vector<Tensor> layout;
  if (c.kind == ModelKind::CNN) {
    layout.push_back({"conv.weight",
                      {c.conv.filters, c.input_shape.channels, c.conv.kernel, c.conv.kernel},
                      {}});
    layout.push_back({"conv.bias", {c.conv.filters}, {}});
  }
  const auto widths = dense_widths(c);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::string base = "dense" + std::to_string(l);
    layout.push_back({base + ".weight", {widths[l + 1], widths[l]}, {}});
    layout.push_back({base + ".bias", {widths[l + 1]}, {}});
  }
  for (auto& t : layout) t.data.assign(t.size(), 0.0);
  return layout;
}

void check_input(const ModelConfig& c, const std::vector<double>& pixels) {
  if (pixels.size() != c.input_shape.size()) {
    throw std::invalid_argument("input has " + std::to_string(pixels.size()) +
                                " pixels, model expects " + std::to_string(c.input_shape.size()));
  }
}

// conv -> ReLU, planar output [filter][row][col].
void conv_relu_forward(const ModelConfig& c, const std::vector<Tensor>& tensors,
                       const std::vector<double>& pixels, std::vector<double>& out) {
  const ConvDims d = conv_dims(c);
  const std::size_t K = c.conv.kernel;
  const std::size_t C = c.input_shape.channels;
  const std::size_t W = c.input_shape.width;
  const auto& wt = tensors[0].data;  // [F, C, K, K]
  const auto& bias = tensors[1].data;
  out.assign(c.conv.filters * d.out_h * d.out_w, 0.0);
  for (std::size_t f = 0; f < c.conv.filters; ++f) {
    const std::size_t wbase = f * C * K * K;
    for (std::size_t i = 0; i < d.out_h; ++i) {
      for (std::size_t j = 0; j < d.out_w; ++j) {
        double acc = bias[f];
        for (std::size_t ch = 0; ch < C; ++ch) {
          for (std::size_t ki = 0; ki < K; ++ki) {
            for (std::size_t kj = 0; kj < K; ++kj) {
              acc += wt[wbase + (ch * K + ki) * K + kj] *
                     pixels[((i + ki) * W + (j + kj)) * C + ch];
            }
          }
        }
        out[(f * d.out_h + i) * d.out_w + j] = acc > 0.0 ? acc : 0.0;
      }
    }
  }
}

// pool_src records the winning conv index per pooled element (first scanned wins ties).
void max_pool_forward(const ModelConfig& c, const std::vector<double>& conv_relu,
                      std::vector<double>& pooled, std::vector<std::size_t>& pool_src) {
  const ConvDims d = conv_dims(c);
  const std::size_t P = c.conv.pool;
  pooled.assign(d.flat, 0.0);
  pool_src.assign(d.flat, 0);
  for (std::size_t f = 0; f < c.conv.filters; ++f) {
    for (std::size_t pi = 0; pi < d.pool_h; ++pi) {
      for (std::size_t pj = 0; pj < d.pool_w; ++pj) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t i = pi * P; i < pi * P + P; ++i) {
          for (std::size_t j = pj * P; j < pj * P + P; ++j) {
            const std::size_t idx = (f * d.out_h + i) * d.out_w + j;
            if (conv_relu[idx] > best) {
              best = conv_relu[idx];
              best_idx = idx;
            }
          }
        }
        const std::size_t out_idx = (f * d.pool_h + pi) * d.pool_w + pj;
        pooled[out_idx] = best;
        pool_src[out_idx] = best_idx;
      }
    }
  }
}

void dense_forward(const Tensor& weight, const Tensor& bias, const std::vector<double>& in,
                   std::vector<double>& out) {
  const std::size_t rows = weight.dims[0];
  const std::size_t cols = weight.dims[1];
  out.resize(rows);
  for (std::size_t o = 0; o < rows; ++o) {
    double acc = bias.data[o];
    const double* wrow = weight.data.data() + o * cols;
    for (std::size_t i = 0; i < cols; ++i) acc += wrow[i] * in[i];
    out[o] = acc;
  }
}

struct ForwardCache {
  std::vector<double> conv_relu;              // CNN only
  std::vector<std::size_t> pool_src;          // CNN only
  std::vector<std::vector<double>> acts;      // input to each dense layer
  std::vector<std::vector<double>> zs;        // dense pre-activations
};

// Returns logits; fills the cache for the backward pass.
std::vector<double> forward_cached(const ModelWeights& w, const std::vector<double>& pixels,
                                   ForwardCache& cache) {
  const ModelConfig& c = w.config;
  check_input(c, pixels);
  const std::size_t dense_base = (c.kind == ModelKind::CNN) ? 2 : 0;

  cache.acts.clear();
  cache.zs.clear();
  if (c.kind == ModelKind::CNN) {
    conv_relu_forward(c, w.tensors, pixels, cache.conv_relu);
    std::vector<double> pooled;
    max_pool_forward(c, cache.conv_relu, pooled, cache.pool_src);
    cache.acts.push_back(std::move(pooled));
  } else {
    cache.acts.push_back(pixels);
  }

  const std::size_t n_dense = (w.tensors.size() - dense_base) / 2;
  for (std::size_t l = 0; l < n_dense; ++l) {
    std::vector<double> z;
    dense_forward(w.tensors[dense_base + 2 * l], w.tensors[dense_base + 2 * l + 1],
                  cache.acts.back(), z);
    cache.zs.push_back(z);
    if (l + 1 < n_dense) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;  // ReLU on hidden layers
      cache.acts.push_back(std::move(z));
    }
  }
  return cache.zs.back();
}

std::vector<double> forward_logits(const ModelWeights& w, const std::vector<double>& pixels) {
  ForwardCache cache;
  return forward_cached(w, pixels, cache);
}

// loss = -sum_k target_k * log softmax(z/T)_k; dlogits = (p - target)/T.
double cross_entropy_from_logits(const std::vector<double>& logits,
                                 const std::vector<double>& target, double temperature,
                                 std::vector<double>* dlogits) {
  const std::size_t m = logits.size();
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> e(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    e[i] = std::exp((logits[i] - mx) / temperature);
    sum += e[i];
  }
  const double log_sum = std::log(sum);
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    loss -= target[i] * ((logits[i] - mx) / temperature - log_sum);
  }
  if (dlogits) {
    dlogits->resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      (*dlogits)[i] = (e[i] / sum - target[i]) / temperature;
    }
  }
  return loss;
}

// Accumulates single-sample gradients into grads (same layout as w.tensors).
double backward_sample(const ModelWeights& w, const std::vector<double>& pixels,
                       const std::vector<double>& target, std::vector<Tensor>& grads) {
  const ModelConfig& c = w.config;
  ForwardCache cache;
  const std::vector<double> logits = forward_cached(w, pixels, cache);
  std::vector<double> delta;
  const double loss = cross_entropy_from_logits(logits, target, c.temperature, &delta);

  const std::size_t dense_base = (c.kind == ModelKind::CNN) ? 2 : 0;
  const std::size_t n_dense = (w.tensors.size() - dense_base) / 2;

  // Dense layers, last to first. delta holds dL/dz of the current layer.
  for (std::size_t l = n_dense; l-- > 0;) {
    const Tensor& weight = w.tensors[dense_base + 2 * l];
    Tensor& gw = grads[dense_base + 2 * l];
    Tensor& gb = grads[dense_base + 2 * l + 1];
    const std::vector<double>& a = cache.acts[l];
    const std::size_t rows = weight.dims[0];
    const std::size_t cols = weight.dims[1];
    for (std::size_t o = 0; o < rows; ++o) {
      gb.data[o] += delta[o];
      double* grow = gw.data.data() + o * cols;
      const double d = delta[o];
      for (std::size_t i = 0; i < cols; ++i) grow[i] += d * a[i];
    }
    if (l == 0) {
      if (c.kind != ModelKind::CNN) break;
      // propagate into the pooled activations
      std::vector<double> da(cols, 0.0);
      for (std::size_t o = 0; o < rows; ++o) {
        const double d = delta[o];
        const double* wrow = weight.data.data() + o * cols;
        for (std::size_t i = 0; i < cols; ++i) da[i] += wrow[i] * d;
      }
      // pool routes gradient to the argmax; ReLU gate on the conv map
      const ConvDims dims = conv_dims(c);
      std::vector<double> dconv(cache.conv_relu.size(), 0.0);
      for (std::size_t i = 0; i < da.size(); ++i) {
        const std::size_t src = cache.pool_src[i];
        if (cache.conv_relu[src] > 0.0) dconv[src] += da[i];
      }
      const std::size_t K = c.conv.kernel;
      const std::size_t C = c.input_shape.channels;
      const std::size_t W = c.input_shape.width;
      Tensor& gcw = grads[0];
      Tensor& gcb = grads[1];
      for (std::size_t f = 0; f < c.conv.filters; ++f) {
        const std::size_t wbase = f * C * K * K;
        for (std::size_t i = 0; i < dims.out_h; ++i) {
          for (std::size_t j = 0; j < dims.out_w; ++j) {
            const double d = dconv[(f * dims.out_h + i) * dims.out_w + j];
            if (d == 0.0) continue;
            gcb.data[f] += d;
            for (std::size_t ch = 0; ch < C; ++ch) {
              for (std::size_t ki = 0; ki < K; ++ki) {
                for (std::size_t kj = 0; kj < K; ++kj) {
                  gcw.data[wbase + (ch * K + ki) * K + kj] +=
                      d * pixels[((i + ki) * W + (j + kj)) * C + ch];
                }
              }
            }
          }
        }
      }
      break;
    }
    // propagate delta through the previous hidden layer: da = W^T delta, gated by ReLU
    const std::size_t prev = cache.zs[l - 1].size();
    std::vector<double> da(prev, 0.0);
    const std::size_t rows2 = weight.dims[0];
    for (std::size_t o = 0; o < rows2; ++o) {
      const double d = delta[o];
      const double* wrow = weight.data.data() + o * weight.dims[1];
      for (std::size_t i = 0; i < prev; ++i) da[i] += wrow[i] * d;
    }
    for (std::size_t i = 0; i < prev; ++i) {
      da[i] = cache.zs[l - 1][i] > 0.0 ? da[i] : 0.0;
    }
    delta = std::move(da);
  }
  return loss;
}

json shape_to_json(const Shape& s) {
  return json{{"height", s.height}, {"width", s.width}, {"channels", s.channels}};
}

Shape shape_from_json(const json& j) {
  return Shape{j.at("height").get<std::size_t>(), j.at("width").get<std::size_t>(),
               j.at("channels").get<std::size_t>()};
}

json config_to_json(const ModelConfig& c) {
  return json{{"kind", to_string(c.kind)},
              {"input_shape", shape_to_json(c.input_shape)},
              {"num_classes", c.num_classes},
              {"hidden_widths", c.hidden_widths},
              {"conv", {{"filters", c.conv.filters}, {"kernel", c.conv.kernel}, {"pool", c.conv.pool}}},
              {"learning_rate", c.learning_rate},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"init_seed", c.init_seed},
              {"temperature", c.temperature},
              {"accuracy_floor", c.accuracy_floor}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.kind = model_kind_from_string(j.at("kind").get<std::string>());
  c.input_shape = shape_from_json(j.at("input_shape"));
  c.num_classes = j.at("num_classes").get<int>();
  c.hidden_widths = j.at("hidden_widths").get<std::vector<std::size_t>>();
  c.conv.filters = j.at("conv").at("filters").get<std::size_t>();
  c.conv.kernel = j.at("conv").at("kernel").get<std::size_t>();
  c.conv.pool = j.at("conv").at("pool").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.init_seed = j.at("init_seed").get<std::uint64_t>();
  c.temperature = j.at("temperature").get<double>();
  c.accuracy_floor = j.at("accuracy_floor").get<double>();
  return c;
}

void write_u32_le(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                     char((v >> 24) & 0xff)};
  out.write(b, 4);
}

void write_u64_le(std::ofstream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void write_f64_le(std::ofstream& out, double d) { write_u64_le(out, std::bit_cast<std::uint64_t>(d)); }

struct Reader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;
  const std::string& path;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) {
      throw std::runtime_error(path + ": corrupt weights file, payload truncated at byte offset " +
                               std::to_string(buf.size()) + " (need " + std::to_string(pos + n) +
                               ")");
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | buf[pos + std::size_t(i)];
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[pos + std::size_t(i)];
    pos += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
    pos += n;
    return s;
  }
};

constexpr char kWeightsMagic[4] = {'E', 'A', 'W', 'F'};

struct TrainData {
  const std::vector<Image>* inputs;
  std::vector<std::vector<double>> targets;  // one distribution per sample
  std::vector<int> labels;                   // argmax of targets, for accuracy
};

TrainResult train_core(const ModelConfig& config, const TrainData& data, std::uint64_t seed) {
  validate(config);
  if (data.inputs->empty()) throw std::invalid_argument("train: dataset is empty");
  for (const auto& img : *data.inputs) check_input(config, img.pixels);

  TrainResult result;
  result.weights = init_weights(config);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(data.inputs->size());
  std::iota(order.begin(), order.end(), 0);

  const std::size_t bsz = std::max<std::size_t>(1, config.batch_size);
  std::vector<Tensor> grads = tensor_layout(config);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bsz) {
      const std::size_t end = std::min(order.size(), start + bsz);
      for (auto& g : grads) std::fill(g.data.begin(), g.data.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        batch_loss += backward_sample(result.weights, (*data.inputs)[idx].pixels,
                                      data.targets[idx], grads);
      }
      if (!std::isfinite(batch_loss)) {
        throw std::runtime_error("train: diverged, non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch starting at sample " +
                                 std::to_string(start));
      }
      const double scale = config.learning_rate / double(end - start);
      for (std::size_t t = 0; t < grads.size(); ++t) {
        double* wd = result.weights.tensors[t].data.data();
        const double* gd = grads[t].data.data();
        const std::size_t n = grads[t].data.size();
        for (std::size_t i = 0; i < n; ++i) wd[i] -= scale * gd[i];
      }
      epoch_loss += batch_loss;
    }
    result.final_loss = epoch_loss / double(order.size());
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.inputs->size(); ++i) {
    const auto logits = forward_logits(result.weights, (*data.inputs)[i].pixels);
    if (argmax_label(logits) == data.labels[i]) ++correct;
  }
  result.train_accuracy = double(correct) / double(data.inputs->size());
  result.accuracy_floor_met = result.train_accuracy >= config.accuracy_floor;
  return result;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LR: return "lr";
    case ModelKind::DNN: return "dnn";
    case ModelKind::CNN: return "cnn";
  }
  return "lr";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "lr") return ModelKind::LR;
  if (s == "dnn") return ModelKind::DNN;
  if (s == "cnn") return ModelKind::CNN;
  throw std::invalid_argument("unknown model kind '" + s + "' (expected lr, dnn, or cnn)");
}

void validate(const ModelConfig& c) {
  if (c.num_classes < 2) throw std::invalid_argument("model config: need at least 2 classes");
  if (c.input_shape.size() == 0) throw std::invalid_argument("model config: empty input shape");
  if (!(c.temperature > 0.0)) throw std::invalid_argument("model config: temperature must be > 0");
  if (c.kind == ModelKind::DNN && c.hidden_widths.empty()) {
    throw std::invalid_argument("model config: DNN needs at least one hidden layer");
  }
  if (c.kind == ModelKind::DNN) {
    for (std::size_t h : c.hidden_widths) {
      if (h == 0) throw std::invalid_argument("model config: zero-width hidden layer");
    }
  }
  if (c.kind == ModelKind::CNN) {
    if (c.conv.filters == 0 || c.conv.kernel == 0 || c.conv.pool == 0) {
      throw std::invalid_argument("model config: conv spec has a zero field");
    }
    const ConvDims d = conv_dims(c);
    if (d.out_h == 0 || d.out_w == 0 || d.pool_h == 0 || d.pool_w == 0) {
      throw std::invalid_argument("model config: conv/pool do not fit the input shape");
    }
  }
}

std::vector<double> softmax_t(const std::vector<double>& logits, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax_t: temperature must be > 0");
  if (logits.empty()) throw std::invalid_argument("softmax_t: empty logits");
  for (double z : logits) {
    if (!std::isfinite(z)) throw std::invalid_argument("softmax_t: non-finite logit");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp((logits[i] - mx) / temperature);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

int argmax_label(const std::vector<double>& probs) {
  int best = 0;
  for (int i = 1; i < int(probs.size()); ++i) {
    if (probs[std::size_t(i)] > probs[std::size_t(best)]) best = i;
  }
  return best;
}

Model::Model(ModelWeights weights) : weights_(std::move(weights)) { validate(weights_.config); }

std::vector<double> Model::classify(const std::vector<double>& pixels) const {
  return softmax_t(forward_logits(weights_, pixels), weights_.config.temperature);
}

ModelWeights init_weights(const ModelConfig& config) {
  validate(config);
  ModelWeights w;
  w.config = config;
  w.tensors = tensor_layout(config);
  std::mt19937_64 rng(config.init_seed);
  for (auto& t : w.tensors) {
    if (t.name.ends_with(".bias")) continue;  // biases start at zero
    std::size_t fan_in, fan_out;
    if (t.dims.size() == 4) {  // conv [F, C, K, K]
      fan_in = t.dims[1] * t.dims[2] * t.dims[3];
      fan_out = t.dims[0] * t.dims[2] * t.dims[3];
    } else {  // dense [out, in]
      fan_in = t.dims[1];
      fan_out = t.dims[0];
    }
    const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : t.data) v = dist(rng);
  }
  return w;
}

TrainResult train(const ModelConfig& config, const Dataset& data, std::uint64_t seed) {
  if (data.images.empty()) throw std::invalid_argument("train: dataset is empty");
  TrainData td;
  td.inputs = &data.images;
  td.labels = data.labels;
  td.targets.reserve(data.size());
  for (int label : data.labels) {
    if (label < 0 || label >= config.num_classes) {
      throw std::invalid_argument("train: label " + std::to_string(label) +
                                  " outside [0, " + std::to_string(config.num_classes) + ")");
    }
    std::vector<double> one_hot(std::size_t(config.num_classes), 0.0);
    one_hot[std::size_t(label)] = 1.0;
    td.targets.push_back(std::move(one_hot));
  }
  return train_core(config, td, seed);
}

TrainResult train_soft(const ModelConfig& config, const std::vector<Image>& inputs,
                       const std::vector<std::vector<double>>& targets, std::uint64_t seed) {
  if (inputs.size() != targets.size()) {
    throw std::invalid_argument("train_soft: inputs/targets size mismatch");
  }
  TrainData td;
  td.inputs = &inputs;
  td.targets = targets;
  td.labels.reserve(targets.size());
  for (const auto& t : targets) {
    if (t.size() != std::size_t(config.num_classes)) {
      throw std::invalid_argument("train_soft: target distribution has wrong length");
    }
    td.labels.push_back(argmax_label(t));
  }
  return train_core(config, td, seed);
}

double accuracy(const ModelWeights& weights, const Dataset& data) {
  if (data.images.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto logits = forward_logits(weights, data.images[i].pixels);
    if (argmax_label(logits) == data.labels[i]) ++correct;
  }
  return double(correct) / double(data.size());
}

DistillResult distill(ModelConfig teacher_config, ModelConfig student_config, double temperature,
                      const Dataset& data, std::uint64_t seed, double serve_temperature) {
  if (temperature < 1.0) throw std::invalid_argument("distill: temperature must be >= 1");
  teacher_config.temperature = temperature;
  student_config.temperature = temperature;

  DistillResult out;
  out.teacher = train(teacher_config, data, seed);

  Model teacher(out.teacher.weights);
  std::vector<std::vector<double>> soft;
  soft.reserve(data.size());
  for (const auto& img : data.images) soft.push_back(teacher.classify(img.pixels));

  out.student = train_soft(student_config, data.images, soft, splitmix64(seed));
  out.student.weights.config.temperature = serve_temperature;
  return out;
}

void save_weights(const ModelWeights& weights, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.write(kWeightsMagic, 4);
  write_u32_le(out, weights.version);
  const std::string cfg = config_to_json(weights.config).dump();
  write_u64_le(out, cfg.size());
  out.write(cfg.data(), std::streamsize(cfg.size()));
  write_u32_le(out, std::uint32_t(weights.tensors.size()));
  for (const auto& t : weights.tensors) {
    write_u32_le(out, std::uint32_t(t.name.size()));
    out.write(t.name.data(), std::streamsize(t.name.size()));
    write_u32_le(out, std::uint32_t(t.dims.size()));
    for (std::size_t d : t.dims) write_u64_le(out, d);
    for (double v : t.data) write_f64_le(out, v);
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

ModelWeights load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  const std::vector<std::uint8_t> buf(std::istreambuf_iterator<char>(in), {});
  Reader r{buf, 0, path};

  const std::string magic = r.str(4);
  if (std::memcmp(magic.data(), kWeightsMagic, 4) != 0) {
    throw std::runtime_error(path + ": not a weights file (bad magic at byte offset 0)");
  }
  ModelWeights w;
  w.version = r.u32();
  if (w.version != kWeightsFormatVersion) {
    throw std::runtime_error(path + ": unsupported weights format version " +
                             std::to_string(w.version) + " (expected " +
                             std::to_string(kWeightsFormatVersion) + ")");
  }
  const std::uint64_t cfg_len = r.u64();
  const std::string cfg = r.str(cfg_len);
  try {
    w.config = config_from_json(json::parse(cfg));
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": corrupt weights file, config block unreadable (" +
                             std::string(e.what()) + ")");
  }

  const std::uint32_t count = r.u32();
  w.tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t;
    t.name = r.str(r.u32());
    const std::uint32_t rank = r.u32();
    t.dims.resize(rank);
    for (auto& d : t.dims) d = r.u64();
    t.data.resize(t.size());
    for (auto& v : t.data) v = r.f64();
    w.tensors.push_back(std::move(t));
  }
  if (r.pos != buf.size()) {
    throw std::runtime_error(path + ": corrupt weights file, " +
                             std::to_string(buf.size() - r.pos) +
                             " trailing bytes at byte offset " + std::to_string(r.pos));
  }

  validate(w.config);
  const auto expected = tensor_layout(w.config);
  if (expected.size() != w.tensors.size()) {
    throw std::runtime_error(path + ": corrupt weights file, tensor count does not match config");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i].name != w.tensors[i].name || expected[i].dims != w.tensors[i].dims) {
      throw std::runtime_error(path + ": corrupt weights file, tensor '" + w.tensors[i].name +
                               "' does not match the config layout");
    }
  }
  return w;
}

double sample_loss(const ModelWeights& weights, const std::vector<double>& pixels,
                   const std::vector<double>& target) {
  ForwardCache cache;
  const auto logits = forward_cached(weights, pixels, cache);
  return cross_entropy_from_logits(logits, target, weights.config.temperature, nullptr);
}

std::vector<Tensor> sample_loss_gradients(const ModelWeights& weights,
                                          const std::vector<double>& pixels,
                                          const std::vector<double>& target) {
  std::vector<Tensor> grads = tensor_layout(weights.config);
  backward_sample(weights, pixels, target, grads);
  return grads;
}

}  // namespace evoattack
