#include "dphc.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "channel.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "mlp.hpp"
#include "pipeline.hpp"
#include "special.hpp"

#include "json.hpp"

struct dphc_bundle {
  dphc::Bundle value;
};

struct dphc_model {
  dphc::Model value;
};

struct dphc_eval {
  dphc::Evaluation value;
};

namespace {

thread_local std::string g_last_error;

dphc_status to_status(dphc::Status status) {
  return static_cast<dphc_status>(static_cast<int>(status));
}

// Runs fn, translating exceptions into status codes + the thread-local
// message.  fn performs all out-parameter writes itself.
template <class Fn>
dphc_status guarded(Fn&& fn) {
  try {
    fn();
    return DPHC_OK;
  } catch (const dphc::Error& e) {
    g_last_error = e.what();
    return to_status(e.status());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DPHC_ERR_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DPHC_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return DPHC_ERR_UNKNOWN;
  }
}

void require_arg(bool cond, const char* what) {
  dphc::require(cond, dphc::Status::invalid_argument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json report_json(const dphc::TrainReport& report) {
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& rec : report.curves) {
    curves.push_back({{"epoch", rec.epoch},
                      {"train_loss", rec.train_loss},
                      {"train_accuracy", rec.train_accuracy},
                      {"val_loss", rec.val_loss},
                      {"val_accuracy", rec.val_accuracy}});
  }
  return {{"best_epoch", report.best_epoch},
          {"stopped_epoch", report.stopped_epoch},
          {"best_val_loss", report.best_val_loss},
          {"curves", curves}};
}

}  // namespace

extern "C" {

const char* dphc_version(void) { return "1.0.0"; }

const char* dphc_last_error(void) { return g_last_error.c_str(); }

void dphc_string_free(char* s) { std::free(s); }

dphc_status dphc_rtn_kernel(double t, double gamma, double* out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    *out = dphc::rtn_kernel(t, gamma);
  });
}

dphc_status dphc_color_weight(double gamma, double alpha, double gamma1,
                              double gamma2, double* out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    dphc::ColoredNoiseParams p;
    p.alpha = alpha;
    p.gamma1 = gamma1;
    p.gamma2 = gamma2;
    *out = dphc::color_weight(gamma, p);
  });
}

dphc_status dphc_lambda_classical(double t, double alpha, double gamma1,
                                  double gamma2, double quad_tol,
                                  double* out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    dphc::ColoredNoiseParams p;
    p.alpha = alpha;
    p.gamma1 = gamma1;
    p.gamma2 = gamma2;
    p.quad_tol = quad_tol;
    *out = dphc::lambda_classical(t, p);
  });
}

dphc_status dphc_lambda_quantum(double t, double s, double omega_c,
                                double* out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    dphc::OhmicBathParams p;
    p.s = s;
    p.omega_c = omega_c;
    *out = dphc::lambda_quantum(t, p);
  });
}

dphc_status dphc_gamma_function(double x, double* out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    *out = dphc::gamma_function(x);
  });
}

dphc_status dphc_generate(const char* genspec_json, int threads,
                          dphc_bundle** out) {
  return guarded([&] {
    require_arg(genspec_json != nullptr, "genspec_json must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    dphc::GenSpec spec = dphc::genspec_from_text(genspec_json);
    auto handle = std::make_unique<dphc_bundle>();
    handle->value = dphc::generate(spec, threads);
    *out = handle.release();
  });
}

dphc_status dphc_bundle_save(const dphc_bundle* bundle,
                             const char* basename) {
  return guarded([&] {
    require_arg(bundle != nullptr, "bundle must not be NULL");
    require_arg(basename != nullptr, "basename must not be NULL");
    dphc::save_bundle(bundle->value, basename);
  });
}

dphc_status dphc_bundle_load(const char* basename, dphc_bundle** out) {
  return guarded([&] {
    require_arg(basename != nullptr, "basename must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    auto handle = std::make_unique<dphc_bundle>();
    handle->value = dphc::load_bundle(basename);
    *out = handle.release();
  });
}

dphc_status dphc_bundle_info(const dphc_bundle* bundle, char** json_out) {
  return guarded([&] {
    require_arg(bundle != nullptr, "bundle must not be NULL");
    require_arg(json_out != nullptr, "json_out must not be NULL");
    nlohmann::json info{
        {"spec", dphc::to_json(bundle->value.spec)},
        {"class_values", bundle->value.class_values},
        {"n_classes", bundle->value.n_classes},
        {"splits",
         {{"train", bundle->value.train.size()},
          {"val", bundle->value.val.size()},
          {"test", bundle->value.test.size()}}}};
    *json_out = dup_string(info.dump(2) + "\n");
  });
}

dphc_status dphc_bundle_counts(const dphc_bundle* bundle, const char* split,
                               int64_t* n_samples, int* feature_dim,
                               int* n_classes) {
  return guarded([&] {
    require_arg(bundle != nullptr, "bundle must not be NULL");
    require_arg(split != nullptr, "split must not be NULL");
    const dphc::Split& s = bundle->value.split(split);
    if (n_samples) *n_samples = static_cast<int64_t>(s.size());
    if (feature_dim) *feature_dim = dphc::kFeatureDim;
    if (n_classes) *n_classes = bundle->value.n_classes;
  });
}

dphc_status dphc_bundle_sample(const dphc_bundle* bundle, const char* split,
                               int64_t i, double* x, int* label) {
  return guarded([&] {
    require_arg(bundle != nullptr, "bundle must not be NULL");
    require_arg(split != nullptr, "split must not be NULL");
    require_arg(x != nullptr, "x must not be NULL");
    require_arg(label != nullptr, "label must not be NULL");
    const dphc::Split& s = bundle->value.split(split);
    require_arg(i >= 0 && static_cast<std::size_t>(i) < s.size(),
                "sample index out of range");
    for (int d = 0; d < dphc::kFeatureDim; ++d) {
      x[d] = s.x[static_cast<std::size_t>(i) * dphc::kFeatureDim + d];
    }
    *label = s.y[static_cast<std::size_t>(i)];
  });
}

void dphc_bundle_free(dphc_bundle* bundle) { delete bundle; }

dphc_status dphc_train(const dphc_bundle* bundle, const char* config_json,
                       dphc_model** out, char** report_json_out) {
  return guarded([&] {
    require_arg(bundle != nullptr, "bundle must not be NULL");
    require_arg(config_json != nullptr, "config_json must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    dphc::TrainConfig config = dphc::trainconfig_from_text(config_json);
    dphc::TrainReport report;
    auto handle = std::make_unique<dphc_model>();
    handle->value = dphc::train(bundle->value, config, &report);
    if (report_json_out) {
      *report_json_out = dup_string(report_json(report).dump(2) + "\n");
    }
    *out = handle.release();
  });
}

dphc_status dphc_model_save(const dphc_model* model, const char* path) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be NULL");
    require_arg(path != nullptr, "path must not be NULL");
    dphc::save_model(model->value, path);
  });
}

dphc_status dphc_model_load(const char* path, dphc_model** out) {
  return guarded([&] {
    require_arg(path != nullptr, "path must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    auto handle = std::make_unique<dphc_model>();
    handle->value = dphc::load_model(path);
    *out = handle.release();
  });
}

dphc_status dphc_model_info(const dphc_model* model, char** json_out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be NULL");
    require_arg(json_out != nullptr, "json_out must not be NULL");
    nlohmann::json info{{"layer_sizes", model->value.layer_sizes},
                        {"config", dphc::to_json(model->value.config)}};
    *json_out = dup_string(info.dump(2) + "\n");
  });
}

dphc_status dphc_model_predict(const dphc_model* model, const double* x,
                               int dim, int* label_out, double* probs_out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be NULL");
    require_arg(x != nullptr, "x must not be NULL");
    require_arg(label_out != nullptr, "label_out must not be NULL");
    dphc::require(dim == model->value.layer_sizes.front(),
                  dphc::Status::dimension,
                  "feature dimension does not match the model input size");
    auto probs = dphc::forward_probs(model->value, x);
    int arg = 0;
    for (int c = 1; c < static_cast<int>(probs.size()); ++c) {
      if (probs[c] > probs[arg]) arg = c;
    }
    if (probs_out) {
      for (std::size_t c = 0; c < probs.size(); ++c) probs_out[c] = probs[c];
    }
    *label_out = arg;
  });
}

void dphc_model_free(dphc_model* model) { delete model; }

dphc_status dphc_evaluate(const dphc_model* model, const dphc_bundle* bundle,
                          const char* split, dphc_eval** out) {
  return guarded([&] {
    require_arg(model != nullptr, "model must not be NULL");
    require_arg(bundle != nullptr, "bundle must not be NULL");
    require_arg(split != nullptr, "split must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    auto handle = std::make_unique<dphc_eval>();
    handle->value = dphc::evaluate(model->value, bundle->value, split);
    *out = handle.release();
  });
}

dphc_status dphc_eval_accuracy(const dphc_eval* ev, double* out) {
  return guarded([&] {
    require_arg(ev != nullptr, "ev must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    *out = ev->value.accuracy;
  });
}

dphc_status dphc_eval_macro_f1(const dphc_eval* ev, double* out) {
  return guarded([&] {
    require_arg(ev != nullptr, "ev must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    *out = ev->value.macro_f1;
  });
}

dphc_status dphc_eval_confusion(const dphc_eval* ev, int actual,
                                int predicted, int64_t* out) {
  return guarded([&] {
    require_arg(ev != nullptr, "ev must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    int m = ev->value.n_classes;
    require_arg(actual >= 0 && actual < m && predicted >= 0 && predicted < m,
                "confusion index out of range");
    *out = ev->value.confusion[static_cast<std::size_t>(actual) * m +
                               predicted];
  });
}

dphc_status dphc_eval_scores_json(const dphc_eval* ev, char** out) {
  return guarded([&] {
    require_arg(ev != nullptr, "ev must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    *out = dup_string(dphc::scores_json(ev->value));
  });
}

dphc_status dphc_eval_confusion_csv(const dphc_eval* ev, char** out) {
  return guarded([&] {
    require_arg(ev != nullptr, "ev must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    *out = dup_string(dphc::confusion_csv(ev->value));
  });
}

dphc_status dphc_eval_confusion_svg(const dphc_eval* ev, char** out) {
  return guarded([&] {
    require_arg(ev != nullptr, "ev must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    *out = dup_string(dphc::confusion_svg(ev->value));
  });
}

void dphc_eval_free(dphc_eval* ev) { delete ev; }

dphc_status dphc_curves_csv(const char* report_json_text, char** out) {
  return guarded([&] {
    require_arg(report_json_text != nullptr, "report_json must not be NULL");
    require_arg(out != nullptr, "out must not be NULL");
    nlohmann::json j = nlohmann::json::parse(report_json_text, nullptr, false);
    dphc::require(!j.is_discarded(), dphc::Status::invalid_argument,
                  "report: not valid JSON");
    dphc::require(j.contains("curves") && j["curves"].is_array(),
                  dphc::Status::invalid_argument,
                  "report: missing \"curves\" array");
    dphc::TrainReport report;
    try {
      report.best_epoch = j.value("best_epoch", 0);
      report.stopped_epoch = j.value("stopped_epoch", 0);
      report.best_val_loss = j.value("best_val_loss", 0.0);
      for (const auto& rj : j["curves"]) {
        dphc::EpochRecord rec;
        rec.epoch = rj.at("epoch").get<int>();
        rec.train_loss = rj.at("train_loss").get<double>();
        rec.train_accuracy = rj.at("train_accuracy").get<double>();
        rec.val_loss = rj.at("val_loss").get<double>();
        rec.val_accuracy = rj.at("val_accuracy").get<double>();
        report.curves.push_back(rec);
      }
    } catch (const nlohmann::json::exception&) {
      dphc::fail(dphc::Status::invalid_argument,
                 "report: malformed curves entry");
    }
    *out = dup_string(dphc::curves_csv(report));
  });
}

dphc_status dphc_run_preset(const char* name_or_path, const char* presets_dir,
                            const char* outdir, int paper_scale, int threads,
                            int64_t seed, int quiet, char** summary_json_out,
                            int* all_passed_out) {
  return guarded([&] {
    require_arg(name_or_path != nullptr, "name_or_path must not be NULL");
    require_arg(outdir != nullptr, "outdir must not be NULL");
    dphc::Preset preset =
        dphc::load_preset(name_or_path, presets_dir ? presets_dir : "");
    dphc::PresetOptions options;
    options.paper_scale = paper_scale != 0;
    options.threads = threads;
    options.seed_override = seed;
    options.quiet = quiet != 0;
    dphc::PresetOutcome outcome = dphc::run_preset(preset, outdir, options);
    if (summary_json_out) *summary_json_out = dup_string(outcome.summary_json);
    if (all_passed_out) *all_passed_out = outcome.pass ? 1 : 0;
  });
}

}  // extern "C"
