#pragma once

// From-scratch feed-forward classifier: ReLU hidden layers, softmax output,
// cross-entropy loss with optional L1 weight penalty, trained by mini-batch
// SGD or Adam with early stopping on validation loss.  Plain double loops
// throughout; determinism comes from named substreams of the training seed.

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace dphc {

struct TrainConfig {
  std::vector<int> hidden;      // hidden widths; empty trains a linear probe
  int batch_size = 300;
  int max_epochs = 100;
  int early_stop_patience = 1;  // consecutive bad epochs tolerated; 0 disables
  double learning_rate = 1e-3;
  double l1_coeff = 0.0;        // L1 penalty on weights (not biases)
  std::string optimizer = "adam";  // "adam" or "sgd"
  std::uint64_t seed = 7;
  int threads = 1;
};

void validate(const TrainConfig& config);

struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // row-major [out, in]
  std::vector<double> b;  // [out]
};

struct Model {
  std::vector<int> layer_sizes;  // e.g. {8, 5, 16}
  std::vector<Layer> layers;
  TrainConfig config;            // settings that produced the parameters
};

struct EpochRecord {
  int epoch = 0;        // 1-based
  double train_loss = 0.0;      // running average while the epoch trained
  double train_accuracy = 0.0;
  double val_loss = 0.0;        // full pass after the epoch; includes L1
  double val_accuracy = 0.0;
};

struct TrainReport {
  int best_epoch = 0;
  int stopped_epoch = 0;
  double best_val_loss = 0.0;
  std::vector<EpochRecord> curves;
};

// Parameters at uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero.
Model init_model(const std::vector<int>& layer_sizes, std::uint64_t seed);

// Trains on bundle.train, early-stops on bundle.val, restores the
// best-validation-loss parameters.  Non-finite losses raise diverged.
Model train(const Bundle& bundle, const TrainConfig& config,
            TrainReport* report = nullptr);

// Softmax outputs for one sample (x has layer_sizes.front() entries).
std::vector<double> forward_probs(const Model& model, const double* x);

// Argmax class; ties resolve to the lowest index.
int predict(const Model& model, const double* x);

// Mean cross-entropy over n samples plus the L1 term.  Exposed (with its
// exact gradient) so tests can finite-difference the backward pass.
double batch_loss(const Model& model, const double* x,
                  const std::uint16_t* y, int n, double l1);
void batch_gradient(const Model& model, const double* x,
                    const std::uint16_t* y, int n, double l1,
                    std::vector<std::vector<double>>& grad_w,
                    std::vector<std::vector<double>>& grad_b);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace dphc
