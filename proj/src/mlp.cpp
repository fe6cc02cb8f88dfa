#include "mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <thread>

#include "config.hpp"
#include "crc32.hpp"
#include "errors.hpp"
#include "rng.hpp"

#include "json.hpp"

namespace dphc {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'D', 'P', 'H', 'M'};
constexpr std::uint8_t kFormatVersion = 1;
constexpr double kProbFloor = 1e-12;
constexpr int kChunk = 32;  // fixed accumulation granule -> thread-count
                            // independent gradient sums

struct Scratch {
  std::vector<std::vector<double>> acts;  // acts[0] = input copy
  std::vector<double> probs;
  std::vector<double> delta;
  std::vector<double> delta_next;

  explicit Scratch(const std::vector<int>& sizes) {
    acts.resize(sizes.size() - 1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
      acts[l].assign(sizes[l], 0.0);
    probs.assign(sizes.back(), 0.0);
    int widest = *std::max_element(sizes.begin(), sizes.end());
    delta.assign(widest, 0.0);
    delta_next.assign(widest, 0.0);
  }
};

// Per-layer gradient accumulator.
struct GradAcc {
  std::vector<std::vector<double>> w, b;

  explicit GradAcc(const Model& model) {
    for (const auto& layer : model.layers) {
      w.emplace_back(layer.w.size(), 0.0);
      b.emplace_back(layer.b.size(), 0.0);
    }
  }
  void zero() {
    for (auto& g : w) std::fill(g.begin(), g.end(), 0.0);
    for (auto& g : b) std::fill(g.begin(), g.end(), 0.0);
  }
};

// Runs the net on one sample; returns the cross-entropy term.
double forward_sample(const Model& model, const double* x, std::uint16_t y,
                      Scratch& s) {
  int n_layers = static_cast<int>(model.layers.size());
  std::copy(x, x + model.layer_sizes.front(), s.acts[0].begin());
  const std::vector<double>* in = &s.acts[0];
  for (int l = 0; l < n_layers; ++l) {
    const Layer& layer = model.layers[l];
    bool last = (l == n_layers - 1);
    std::vector<double>& out = last ? s.probs : s.acts[l + 1];
    for (int o = 0; o < layer.out; ++o) {
      double z = layer.b[o];
      const double* row = &layer.w[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) z += row[i] * (*in)[i];
      out[o] = last ? z : std::max(0.0, z);
    }
    in = &out;
  }
  double zmax = *std::max_element(s.probs.begin(), s.probs.end());
  double sum = 0.0;
  for (double& z : s.probs) {
    z = std::exp(z - zmax);
    sum += z;
  }
  for (double& z : s.probs) z /= sum;
  return -std::log(std::max(s.probs[y], kProbFloor));
}

// Adds this sample's (unnormalised) gradient into acc; forward_sample must
// have filled s first.
void backward_sample(const Model& model, std::uint16_t y, Scratch& s,
                     GradAcc& acc) {
  int n_layers = static_cast<int>(model.layers.size());
  std::copy(s.probs.begin(), s.probs.end(), s.delta.begin());
  s.delta[y] -= 1.0;
  for (int l = n_layers - 1; l >= 0; --l) {
    const Layer& layer = model.layers[l];
    const std::vector<double>& a = s.acts[l];
    auto& gw = acc.w[l];
    auto& gb = acc.b[l];
    for (int o = 0; o < layer.out; ++o) {
      double d = s.delta[o];
      double* grow = &gw[static_cast<std::size_t>(o) * layer.in];
      for (int i = 0; i < layer.in; ++i) grow[i] += d * a[i];
      gb[o] += d;
    }
    if (l > 0) {
      std::fill(s.delta_next.begin(), s.delta_next.begin() + layer.in, 0.0);
      for (int o = 0; o < layer.out; ++o) {
        double d = s.delta[o];
        const double* row = &layer.w[static_cast<std::size_t>(o) * layer.in];
        for (int i = 0; i < layer.in; ++i) s.delta_next[i] += d * row[i];
      }
      for (int i = 0; i < layer.in; ++i)
        s.delta[i] = a[i] > 0.0 ? s.delta_next[i] : 0.0;
    }
  }
}

double l1_term(const Model& model, double l1) {
  if (l1 <= 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& layer : model.layers)
    for (double w : layer.w) sum += std::fabs(w);
  return l1 * sum;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct ChunkStat {
  double loss_sum = 0.0;
  long correct = 0;
};

// Forward+backward over samples [begin, end) of the index list, summed into
// one accumulator slot.
ChunkStat run_chunk(const Model& model, const float* x,
                    const std::uint16_t* y,
                    const std::vector<std::uint64_t>& idx, std::size_t begin,
                    std::size_t end, Scratch& scratch, GradAcc& acc) {
  ChunkStat stat;
  int dim = model.layer_sizes.front();
  std::vector<double> xd(dim);
  for (std::size_t k = begin; k < end; ++k) {
    const float* row = &x[idx[k] * dim];
    for (int i = 0; i < dim; ++i) xd[i] = row[i];
    std::uint16_t label = y[idx[k]];
    stat.loss_sum += forward_sample(model, xd.data(), label, scratch);
    int arg = 0;
    for (int c = 1; c < static_cast<int>(scratch.probs.size()); ++c)
      if (scratch.probs[c] > scratch.probs[arg]) arg = c;
    if (arg == label) ++stat.correct;
    backward_sample(model, label, scratch, acc);
  }
  return stat;
}

struct SplitView {
  const float* x;
  const std::uint16_t* y;
  std::size_t n;
};

double split_loss(const Model& model, const SplitView& view, double l1,
                  Scratch& scratch, double* accuracy_out) {
  int dim = model.layer_sizes.front();
  std::vector<double> xd(dim);
  double loss = 0.0;
  long correct = 0;
  for (std::size_t k = 0; k < view.n; ++k) {
    const float* row = &view.x[k * dim];
    for (int i = 0; i < dim; ++i) xd[i] = row[i];
    loss += forward_sample(model, xd.data(), view.y[k], scratch);
    int arg = 0;
    for (int c = 1; c < static_cast<int>(scratch.probs.size()); ++c)
      if (scratch.probs[c] > scratch.probs[arg]) arg = c;
    if (arg == view.y[k]) ++correct;
  }
  loss = loss / static_cast<double>(view.n) + l1_term(model, l1);
  if (accuracy_out)
    *accuracy_out = static_cast<double>(correct) / static_cast<double>(view.n);
  return loss;
}

void check_labels(const Split& split, int n_classes, const char* name) {
  for (auto label : split.y) {
    require(label < n_classes, Status::invalid_argument,
            std::string(name) + " split holds a label outside the class set");
  }
}

}  // namespace

void validate(const TrainConfig& config) {
  for (int h : config.hidden)
    require(h >= 1, Status::invalid_argument,
            "hidden layer widths must be >= 1");
  require(config.batch_size >= 1, Status::invalid_argument,
          "batch_size must be >= 1");
  require(config.max_epochs >= 1, Status::invalid_argument,
          "max_epochs must be >= 1");
  require(config.early_stop_patience >= 0, Status::invalid_argument,
          "early_stop_patience must be >= 0");
  require(std::isfinite(config.learning_rate) && config.learning_rate > 0.0,
          Status::invalid_argument, "learning_rate must be positive");
  require(std::isfinite(config.l1_coeff) && config.l1_coeff >= 0.0,
          Status::invalid_argument, "l1_coeff must be non-negative");
  require(config.optimizer == "adam" || config.optimizer == "sgd",
          Status::invalid_argument, "optimizer must be \"adam\" or \"sgd\"");
  require(config.threads >= 1, Status::invalid_argument,
          "threads must be >= 1");
}

Model init_model(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  require(layer_sizes.size() >= 2, Status::invalid_argument,
          "need at least input and output layers");
  for (int s : layer_sizes)
    require(s >= 1, Status::invalid_argument, "layer sizes must be >= 1");
  Model model;
  model.layer_sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    Layer layer;
    layer.in = layer_sizes[l];
    layer.out = layer_sizes[l + 1];
    layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
    layer.b.assign(layer.out, 0.0);
    Stream stream(seed, "init", {static_cast<std::uint64_t>(l)});
    double limit = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (double& w : layer.w) w = stream.uniform(-limit, limit);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

double batch_loss(const Model& model, const double* x, const std::uint16_t* y,
                  int n, double l1) {
  require(n > 0, Status::invalid_argument, "batch must be non-empty");
  Scratch scratch(model.layer_sizes);
  double loss = 0.0;
  int dim = model.layer_sizes.front();
  for (int k = 0; k < n; ++k)
    loss += forward_sample(model, x + static_cast<std::size_t>(k) * dim, y[k],
                           scratch);
  return loss / n + l1_term(model, l1);
}

void batch_gradient(const Model& model, const double* x,
                    const std::uint16_t* y, int n, double l1,
                    std::vector<std::vector<double>>& grad_w,
                    std::vector<std::vector<double>>& grad_b) {
  require(n > 0, Status::invalid_argument, "batch must be non-empty");
  Scratch scratch(model.layer_sizes);
  GradAcc acc(model);
  int dim = model.layer_sizes.front();
  for (int k = 0; k < n; ++k) {
    forward_sample(model, x + static_cast<std::size_t>(k) * dim, y[k],
                   scratch);
    backward_sample(model, y[k], scratch, acc);
  }
  grad_w.assign(acc.w.begin(), acc.w.end());
  grad_b.assign(acc.b.begin(), acc.b.end());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (std::size_t j = 0; j < grad_w[l].size(); ++j) {
      grad_w[l][j] = grad_w[l][j] / n + l1 * sign_of(model.layers[l].w[j]);
    }
    for (double& g : grad_b[l]) g /= n;
  }
}

Model train(const Bundle& bundle, const TrainConfig& config,
            TrainReport* report) {
  validate(config);
  require(bundle.n_classes >= 2, Status::invalid_argument,
          "training needs at least two classes");
  require(bundle.train.size() > 0 && bundle.val.size() > 0,
          Status::invalid_argument,
          "training needs non-empty train and val splits");
  check_labels(bundle.train, bundle.n_classes, "train");
  check_labels(bundle.val, bundle.n_classes, "val");

  std::vector<int> sizes;
  sizes.push_back(kFeatureDim);
  for (int h : config.hidden) sizes.push_back(h);
  sizes.push_back(bundle.n_classes);
  Model model = init_model(sizes, config.seed);
  model.config = config;

  bool adam = (config.optimizer == "adam");
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  std::vector<std::vector<double>> mw, vw, mb, vb;
  if (adam) {
    for (const auto& layer : model.layers) {
      mw.emplace_back(layer.w.size(), 0.0);
      vw.emplace_back(layer.w.size(), 0.0);
      mb.emplace_back(layer.b.size(), 0.0);
      vb.emplace_back(layer.b.size(), 0.0);
    }
  }

  std::size_t n_train = bundle.train.size();
  std::size_t batch = static_cast<std::size_t>(config.batch_size);
  std::size_t max_chunks = (std::min(batch, n_train) + kChunk - 1) / kChunk;
  std::vector<GradAcc> slots;
  std::vector<Scratch> scratches;
  int threads = std::max(1, std::min<int>(config.threads,
                                          static_cast<int>(max_chunks)));
  for (std::size_t c = 0; c < max_chunks; ++c) slots.emplace_back(model);
  for (int t = 0; t < threads; ++t) scratches.emplace_back(model.layer_sizes);
  std::vector<ChunkStat> stats(max_chunks);
  GradAcc grad(model);

  std::vector<std::uint64_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;

  SplitView val_view{bundle.val.x.data(), bundle.val.y.data(),
                     bundle.val.size()};
  Scratch eval_scratch(model.layer_sizes);

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Layer> best_layers = model.layers;
  int best_epoch = 0, bad_epochs = 0, stopped_epoch = 0;
  long long step = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Stream epoch_stream(config.seed, "epoch",
                        {static_cast<std::uint64_t>(epoch)});
    epoch_stream.shuffle(order);

    double epoch_loss_sum = 0.0;
    long long epoch_correct = 0;
    for (std::size_t start = 0; start < n_train; start += batch) {
      std::size_t bn = std::min(batch, n_train - start);
      std::size_t n_chunks = (bn + kChunk - 1) / kChunk;
      auto work = [&](int tid) {
        for (std::size_t c = tid; c < n_chunks; c += threads) {
          std::size_t lo = start + c * kChunk;
          std::size_t hi = std::min(lo + kChunk, start + bn);
          slots[c].zero();
          stats[c] = run_chunk(model, bundle.train.x.data(),
                               bundle.train.y.data(), order, lo, hi,
                               scratches[tid], slots[c]);
        }
      };
      if (threads == 1 || n_chunks == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
      }

      double batch_loss_sum = 0.0;
      grad.zero();
      for (std::size_t c = 0; c < n_chunks; ++c) {
        batch_loss_sum += stats[c].loss_sum;
        epoch_correct += stats[c].correct;
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
          const auto& sw = slots[c].w[l];
          const auto& sb = slots[c].b[l];
          for (std::size_t j = 0; j < sw.size(); ++j) grad.w[l][j] += sw[j];
          for (std::size_t j = 0; j < sb.size(); ++j) grad.b[l][j] += sb[j];
        }
      }
      double inv = 1.0 / static_cast<double>(bn);
      double step_loss = batch_loss_sum * inv + l1_term(model, config.l1_coeff);
      require(std::isfinite(step_loss), Status::diverged,
              "training loss became non-finite");
      epoch_loss_sum += step_loss * static_cast<double>(bn);

      ++step;
      double corr1 = adam ? 1.0 - std::pow(b1, static_cast<double>(step)) : 0.0;
      double corr2 = adam ? 1.0 - std::pow(b2, static_cast<double>(step)) : 0.0;
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Layer& layer = model.layers[l];
        for (std::size_t j = 0; j < layer.w.size(); ++j) {
          double g = grad.w[l][j] * inv +
                     config.l1_coeff * sign_of(layer.w[j]);
          if (adam) {
            mw[l][j] = b1 * mw[l][j] + (1.0 - b1) * g;
            vw[l][j] = b2 * vw[l][j] + (1.0 - b2) * g * g;
            layer.w[j] -= config.learning_rate * (mw[l][j] / corr1) /
                          (std::sqrt(vw[l][j] / corr2) + eps);
          } else {
            layer.w[j] -= config.learning_rate * g;
          }
        }
        for (std::size_t j = 0; j < layer.b.size(); ++j) {
          double g = grad.b[l][j] * inv;
          if (adam) {
            mb[l][j] = b1 * mb[l][j] + (1.0 - b1) * g;
            vb[l][j] = b2 * vb[l][j] + (1.0 - b2) * g * g;
            layer.b[j] -= config.learning_rate * (mb[l][j] / corr1) /
                          (std::sqrt(vb[l][j] / corr2) + eps);
          } else {
            layer.b[j] -= config.learning_rate * g;
          }
        }
      }
    }

    double val_accuracy = 0.0;
    double val_loss = split_loss(model, val_view, config.l1_coeff,
                                 eval_scratch, &val_accuracy);
    require(std::isfinite(val_loss), Status::diverged,
            "validation loss became non-finite");
    if (report) {
      EpochRecord rec;
      rec.epoch = epoch;
      rec.train_loss = epoch_loss_sum / static_cast<double>(n_train);
      rec.train_accuracy =
          static_cast<double>(epoch_correct) / static_cast<double>(n_train);
      rec.val_loss = val_loss;
      rec.val_accuracy = val_accuracy;
      report->curves.push_back(rec);
    }
    stopped_epoch = epoch;
    if (val_loss < best_val) {
      best_val = val_loss;
      best_layers = model.layers;
      best_epoch = epoch;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
      if (config.early_stop_patience > 0 &&
          bad_epochs >= config.early_stop_patience) {
        break;
      }
    }
  }

  model.layers = best_layers;
  if (report) {
    report->best_epoch = best_epoch;
    report->stopped_epoch = stopped_epoch;
    report->best_val_loss = best_val;
  }
  return model;
}

std::vector<double> forward_probs(const Model& model, const double* x) {
  Scratch scratch(model.layer_sizes);
  forward_sample(model, x, 0, scratch);
  return scratch.probs;
}

int predict(const Model& model, const double* x) {
  auto probs = forward_probs(model, x);
  int arg = 0;
  for (int c = 1; c < static_cast<int>(probs.size()); ++c)
    if (probs[c] > probs[arg]) arg = c;
  return arg;
}

void save_model(const Model& model, const std::string& path) {
  std::vector<char> payload;
  for (const auto& layer : model.layers) {
    std::size_t off = payload.size();
    payload.resize(off + (layer.w.size() + layer.b.size()) * sizeof(double));
    std::memcpy(payload.data() + off, layer.w.data(),
                layer.w.size() * sizeof(double));
    std::memcpy(payload.data() + off + layer.w.size() * sizeof(double),
                layer.b.data(), layer.b.size() * sizeof(double));
  }
  json header{{"layer_sizes", model.layer_sizes},
              {"config", to_json(model.config)},
              {"params_crc32", crc32(payload.data(), payload.size())}};
  std::string htext = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), Status::io, "cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kFormatVersion), 1);
  std::uint32_t len = static_cast<std::uint32_t>(htext.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  out.close();
  require(out.good(), Status::io, "write failed for " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), Status::io, "cannot open " + path);
  char magic[4];
  std::uint8_t version = 0;
  std::uint32_t len = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 1);
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  require(in.good(), Status::truncated, path + ": truncated header");
  require(std::memcmp(magic, kMagic, 4) == 0, Status::malformed,
          path + ": bad magic");
  require(version == kFormatVersion, Status::malformed,
          path + ": unsupported format version");
  std::string htext(len, '\0');
  in.read(htext.data(), len);
  require(in.good(), Status::truncated, path + ": truncated header");
  json header = json::parse(htext, nullptr, false);
  require(!header.is_discarded(), Status::malformed,
          path + ": bad header JSON");
  require(header.contains("layer_sizes") && header.contains("config") &&
              header.contains("params_crc32"),
          Status::malformed, path + ": incomplete header");

  Model model;
  model.layer_sizes = header["layer_sizes"].get<std::vector<int>>();
  require(model.layer_sizes.size() >= 2, Status::malformed,
          path + ": fewer than two layers");
  std::size_t n_params = 0;
  for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    require(model.layer_sizes[l] >= 1 && model.layer_sizes[l + 1] >= 1,
            Status::malformed, path + ": bad layer size");
    n_params += static_cast<std::size_t>(model.layer_sizes[l]) *
                    model.layer_sizes[l + 1] +
                model.layer_sizes[l + 1];
  }
  model.config = trainconfig_from_json(header["config"]);

  std::vector<char> payload(n_params * sizeof(double));
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  require(in.gcount() == static_cast<std::streamsize>(payload.size()),
          Status::truncated, path + ": truncated parameters");
  require(header["params_crc32"].get<std::uint64_t>() ==
              crc32(payload.data(), payload.size()),
          Status::checksum, path + ": parameter checksum mismatch");

  const char* p = payload.data();
  for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    Layer layer;
    layer.in = model.layer_sizes[l];
    layer.out = model.layer_sizes[l + 1];
    layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
    layer.b.resize(layer.out);
    std::memcpy(layer.w.data(), p, layer.w.size() * sizeof(double));
    p += layer.w.size() * sizeof(double);
    std::memcpy(layer.b.data(), p, layer.b.size() * sizeof(double));
    p += layer.b.size() * sizeof(double);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

}  // namespace dphc
