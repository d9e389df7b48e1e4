#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ilg/datasets.hpp"
#include "ilg/image.hpp"
#include "ilg/rng.hpp"

namespace ilg {

// TinyCnn: conv 3x3x3->8, relu, maxpool2, conv 3x3x8->16, relu, maxpool2,
// dense 16*(S/4)^2 -> 10. LogReg is a linear probe on raw pixels, kept
// behind a config flag as a robustness check.
enum class ModelArch { TinyCnn, LogReg };

const char* model_arch_name(ModelArch a);
ModelArch model_arch_from_name(const std::string& name);

// Parameters are float in training; the double instantiation exists for
// finite-difference gradient checks.
template <typename T>
struct ModelT {
  ModelArch arch = ModelArch::TinyCnn;
  int input_size = 32;
  std::vector<T> conv1_w, conv1_b;  // [8][3][3][3], [8]
  std::vector<T> conv2_w, conv2_b;  // [16][8][3][3], [16]
  std::vector<T> fc_w, fc_b;        // [10][fc_inputs], [10]
  NormalizationStats norm;

  int fc_inputs() const {
    const int q = input_size / 4;
    return arch == ModelArch::TinyCnn ? 16 * q * q : input_size * input_size * 3;
  }

  // Visits every parameter tensor in a fixed order.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    if (arch == ModelArch::TinyCnn) {
      fn("conv1_w", conv1_w);
      fn("conv1_b", conv1_b);
      fn("conv2_w", conv2_w);
      fn("conv2_b", conv2_b);
    }
    fn("fc_w", fc_w);
    fn("fc_b", fc_b);
  }

  std::size_t parameter_count() const;
};

using Model = ModelT<float>;

template <typename T>
ModelT<T> init_model(ModelArch arch, int input_size, std::uint64_t seed);

template <typename U, typename T>
ModelT<U> cast_model(const ModelT<T>& m);

inline constexpr int kClasses = 10;

// Class logits, batch-major (batch * 10). Images are normalized internally
// with the model's stored stats and resized if they do not match
// input_size.
template <typename T>
std::vector<T> forward(const ModelT<T>& model, const std::vector<Image>& batch);

// Mean softmax cross-entropy over the batch plus gradients for every
// parameter (returned in a model-shaped container). Per-sample gradients
// are reduced in sample order, so the result does not depend on threads.
template <typename T>
std::pair<double, ModelT<T>> loss_and_grad(const ModelT<T>& model, const std::vector<Image>& batch,
                                           const std::vector<int>& labels, int threads = 1);

double softmax_cross_entropy(const std::vector<double>& logits, int label);

struct TrainConfig {
  double val_split = 0.2;
  int batch_size = 64;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 40;
  int patience = 5;
  std::uint64_t seed = 0;
  int input_size = 32;
  ModelArch arch = ModelArch::TinyCnn;
  int threads = 1;
};

// Per-image training-time transform (jitter); vector mapping is pre-applied
// at dataset build time instead.
using Augmentation = std::function<Image(const Image&, Rng&)>;

struct TrainResult {
  Model model;
  std::vector<double> train_losses;  // one entry per epoch
  std::vector<double> val_losses;
  int best_epoch = 0;
};

// Stratified 80/20 split under seed, Adam updates, early stopping on
// validation loss, best-validation parameters returned. Augmentation runs
// on training images only, with a fresh draw each epoch. Bit-reproducible
// for a fixed seed at any thread count.
TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const Augmentation& augmentation = nullptr);

struct EvalMetrics {
  double accuracy = 0;
  double precision_weighted = 0;
  double recall_weighted = 0;
  std::array<std::array<std::int64_t, kClasses>, kClasses> confusion{};  // [true][pred]
};

EvalMetrics metrics_from_confusion(
    const std::array<std::array<std::int64_t, kClasses>, kClasses>& confusion);

EvalMetrics evaluate(const Model& model, const Dataset& dataset, int threads = 1);

// Checkpoint: magic "ILGM" | u32 version=1 | u8 arch | u32 input_size |
// u32 tensor count | per tensor: u8 name length, name, u32 ndim, u32 dims,
// float32 data (little-endian). Normalization stats ride along as two
// 3-element tensors. Round trips are bit-exact.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

// Bilinear resize (the paper-style input rescale, configurable via
// TrainConfig::input_size).
Image resize_image(const Image& image, int height, int width);

}  // namespace ilg
