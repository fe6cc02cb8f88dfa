// Command-line front end.  Everything goes through the public C API in
// dphc.h; this translation unit knows nothing about the library internals.
//
// Exit codes: 0 success, 2 usage or runtime error, 3 experiment scores
// outside their expected bands.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dphc.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 2;
constexpr int kExitBandFailure = 3;

[[noreturn]] void die(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  std::exit(kExitError);
}

void check(dphc_status status, const std::string& doing) {
  if (status != DPHC_OK) {
    die(doing + ": " + dphc_last_error());
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) die("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) die("cannot open " + path + " for writing");
  out << text;
  if (!out.good()) die("write failed for " + path);
}

json parse_object(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) die(what + ": not a JSON object");
  return j;
}

std::vector<int> arch_hidden(const std::string& arch) {
  if (arch == "lp") return {};
  if (arch == "nn1") return {5};
  if (arch == "nn5") return {30, 30, 30, 30, 30};
  die("unknown architecture \"" + arch + "\" (expected lp, nn1, or nn5)");
}

// Owned C string -> std::string.
std::string take(char* s) {
  std::string out = s ? s : "";
  dphc_string_free(s);
  return out;
}

struct GenArgs {
  std::string spec_path;
  std::string out_base;
  std::int64_t seed = -1;
  int threads = 1;
};

int cmd_gen(const GenArgs& args) {
  json spec = parse_object(slurp(args.spec_path), args.spec_path);
  if (args.seed >= 0) spec["seed"] = args.seed;
  dphc_bundle* bundle = nullptr;
  check(dphc_generate(spec.dump().c_str(), args.threads, &bundle),
        "generate");
  check(dphc_bundle_save(bundle, args.out_base.c_str()), "save bundle");
  char* info = nullptr;
  check(dphc_bundle_info(bundle, &info), "bundle info");
  std::fputs(take(info).c_str(), stdout);
  dphc_bundle_free(bundle);
  return kExitOk;
}

struct TrainArgs {
  std::string data_base;
  std::string config_path;
  std::string arch;
  std::string out_path;
  std::string curves_path;
  std::string report_path;
  std::int64_t seed = -1;
  int threads = 1;
  int batch_size = -1;
  int max_epochs = -1;
  int patience = -1;
  double learning_rate = -1.0;
  double l1 = -1.0;
  std::string optimizer;
};

int cmd_train(const TrainArgs& args) {
  json config = args.config_path.empty()
                    ? json::object()
                    : parse_object(slurp(args.config_path), args.config_path);
  if (!args.arch.empty()) config["hidden"] = arch_hidden(args.arch);
  if (!config.contains("hidden")) {
    die("no architecture: pass --arch or a config with \"hidden\"");
  }
  if (args.batch_size >= 0) config["batch_size"] = args.batch_size;
  if (args.max_epochs >= 0) config["max_epochs"] = args.max_epochs;
  if (args.patience >= 0) config["early_stop_patience"] = args.patience;
  if (args.learning_rate >= 0.0) config["learning_rate"] = args.learning_rate;
  if (args.l1 >= 0.0) config["l1_coeff"] = args.l1;
  if (!args.optimizer.empty()) config["optimizer"] = args.optimizer;
  if (args.seed >= 0) config["seed"] = args.seed;
  config["threads"] = args.threads;

  dphc_bundle* bundle = nullptr;
  check(dphc_bundle_load(args.data_base.c_str(), &bundle), "load bundle");
  dphc_model* model = nullptr;
  char* report = nullptr;
  check(dphc_train(bundle, config.dump().c_str(), &model, &report), "train");
  std::string report_text = take(report);
  check(dphc_model_save(model, args.out_path.c_str()), "save model");
  if (!args.report_path.empty()) spill(args.report_path, report_text);
  if (!args.curves_path.empty()) {
    char* csv = nullptr;
    check(dphc_curves_csv(report_text.c_str(), &csv), "curves");
    spill(args.curves_path, take(csv));
  }
  json rj = json::parse(report_text);
  std::printf("trained %s: best epoch %d of %d, best val loss %.6f\n",
              args.out_path.c_str(), rj.value("best_epoch", 0),
              rj.value("stopped_epoch", 0), rj.value("best_val_loss", 0.0));
  dphc_model_free(model);
  dphc_bundle_free(bundle);
  return kExitOk;
}

struct EvalArgs {
  std::string model_path;
  std::string data_base;
  std::string split = "test";
  std::string out_dir;
};

int cmd_eval(const EvalArgs& args) {
  dphc_model* model = nullptr;
  check(dphc_model_load(args.model_path.c_str(), &model), "load model");
  dphc_bundle* bundle = nullptr;
  check(dphc_bundle_load(args.data_base.c_str(), &bundle), "load bundle");
  dphc_eval* ev = nullptr;
  check(dphc_evaluate(model, bundle, args.split.c_str(), &ev), "evaluate");
  double accuracy = 0.0, macro_f1 = 0.0;
  check(dphc_eval_accuracy(ev, &accuracy), "accuracy");
  check(dphc_eval_macro_f1(ev, &macro_f1), "macro F1");
  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    auto dir = std::filesystem::path(args.out_dir);
    char* text = nullptr;
    check(dphc_eval_scores_json(ev, &text), "scores");
    spill((dir / "scores.json").string(), take(text));
    check(dphc_eval_confusion_csv(ev, &text), "confusion CSV");
    spill((dir / "confusion.csv").string(), take(text));
    check(dphc_eval_confusion_svg(ev, &text), "confusion SVG");
    spill((dir / "confusion.svg").string(), take(text));
  }
  std::printf("%s split of %s: accuracy %.4f, macro-F1 %.4f\n",
              args.split.c_str(), args.data_base.c_str(), accuracy, macro_f1);
  dphc_eval_free(ev);
  dphc_bundle_free(bundle);
  dphc_model_free(model);
  return kExitOk;
}

struct CurvesArgs {
  std::string report_path;
  std::string out_path;
};

int cmd_curves(const CurvesArgs& args) {
  char* csv = nullptr;
  check(dphc_curves_csv(slurp(args.report_path).c_str(), &csv), "curves");
  std::string text = take(csv);
  if (args.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    spill(args.out_path, text);
  }
  return kExitOk;
}

struct ExperimentArgs {
  std::string preset;
  std::string presets_dir;
  std::string out_dir = "runs";
  bool paper_scale = false;
  std::int64_t seed = -1;
  int threads = 1;
  bool quiet = false;
};

int cmd_experiment(const ExperimentArgs& args) {
  char* summary = nullptr;
  int all_passed = 0;
  check(dphc_run_preset(args.preset.c_str(),
                        args.presets_dir.empty() ? nullptr
                                                 : args.presets_dir.c_str(),
                        args.out_dir.c_str(), args.paper_scale ? 1 : 0,
                        args.threads, args.seed, args.quiet ? 1 : 0, &summary,
                        &all_passed),
        "experiment");
  std::string summary_text = take(summary);
  if (!args.quiet) std::fputs(summary_text.c_str(), stdout);
  if (!all_passed) {
    std::fprintf(stderr,
                 "experiment %s: at least one run scored outside its "
                 "expected band\n",
                 args.preset.c_str());
    return kExitBandFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dephasing-channel datasets, classifiers, and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", []() {
    return std::string("dphc ") + dphc_version();
  });

  GenArgs gen_args;
  auto* gen = app.add_subcommand(
      "gen", "generate a dataset bundle from a generation-spec JSON file");
  gen->add_option("--spec", gen_args.spec_path, "generation spec JSON file")
      ->required();
  gen->add_option("--out", gen_args.out_base,
                  "output basename (writes <out>.train.dphc etc.)")
      ->required();
  gen->add_option("--seed", gen_args.seed, "override the spec's seed");
  gen->add_option("--threads", gen_args.threads, "worker threads")
      ->check(CLI::PositiveNumber);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train a classifier on a bundle");
  train->add_option("--data", train_args.data_base,
                    "dataset basename from gen")
      ->required();
  train->add_option("--out", train_args.out_path, "model output path")
      ->required();
  train->add_option("--config", train_args.config_path,
                    "train-config JSON file");
  train->add_option("--arch", train_args.arch,
                    "architecture: lp, nn1, or nn5");
  train->add_option("--batch-size", train_args.batch_size, "mini-batch size");
  train->add_option("--max-epochs", train_args.max_epochs, "epoch cap");
  train->add_option("--patience", train_args.patience,
                    "early-stopping patience (0 disables)");
  train->add_option("--lr", train_args.learning_rate, "learning rate");
  train->add_option("--l1", train_args.l1, "L1 penalty on weights");
  train->add_option("--optimizer", train_args.optimizer, "adam or sgd");
  train->add_option("--seed", train_args.seed, "training seed");
  train->add_option("--threads", train_args.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  train->add_option("--curves", train_args.curves_path,
                    "write per-epoch curves CSV here");
  train->add_option("--report", train_args.report_path,
                    "write the training report JSON here");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval",
                                  "score a model on one split of a bundle");
  eval->add_option("--model", eval_args.model_path, "model path")->required();
  eval->add_option("--data", eval_args.data_base, "dataset basename")
      ->required();
  eval->add_option("--split", eval_args.split, "train, val, or test");
  eval->add_option("--out", eval_args.out_dir,
                   "directory for scores.json / confusion.csv / "
                   "confusion.svg");

  CurvesArgs curves_args;
  auto* curves = app.add_subcommand(
      "curves", "convert a training report JSON to a curves CSV");
  curves->add_option("--report", curves_args.report_path,
                     "training report JSON file")
      ->required();
  curves->add_option("--out", curves_args.out_path,
                     "output CSV path (stdout when omitted)");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand(
      "experiment", "run a named preset end to end and gate its scores");
  experiment->add_option("--preset", exp_args.preset,
                         "preset name or JSON path")
      ->required();
  experiment->add_option("--presets", exp_args.presets_dir,
                         "directory holding preset JSON files");
  experiment->add_option("--out", exp_args.out_dir,
                         "artifact directory (default: runs)");
  experiment->add_flag("--paper-scale", exp_args.paper_scale,
                       "full-size datasets (140625 samples per class)");
  experiment->add_option("--seed", exp_args.seed,
                         "override generation and training seeds");
  experiment->add_option("--threads", exp_args.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  experiment->add_flag("--quiet", exp_args.quiet,
                       "suppress progress and summary output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (train->parsed()) return cmd_train(train_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (curves->parsed()) return cmd_curves(curves_args);
    if (experiment->parsed()) return cmd_experiment(exp_args);
  } catch (const std::exception& e) {
    die(e.what());
  }
  return kExitError;
}
