#pragma once

// Experiment presets: a named generation spec plus a list of training runs,
// each with an architecture, optional generation overrides (e.g. a mixed
// test probe for transfer experiments), and optional expected score bands.
// Running a preset writes every artifact (datasets, model, scores, curves,
// confusion renderings) under an output directory and gates each run
// against its bands.

#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "mlp.hpp"

namespace dphc {

struct Band {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct RunSpec {
  std::string tag;
  std::string arch;  // "lp", "nn1", or "nn5"
  TrainConfig train;
  GenSpec gen;                  // resolved: preset gen + this run's override
  std::optional<GenSpec> test_gen;  // if set, its test split replaces gen's
  std::optional<Band> expect_accuracy;
  std::optional<Band> expect_macro_f1;
};

struct Preset {
  std::string name;
  GenSpec gen;
  std::vector<RunSpec> runs;
};

// The hidden-layer widths behind an architecture name.
std::vector<int> arch_hidden(const std::string& arch);

Preset preset_from_text(const std::string& text);

// Resolution order for a preset argument: a path containing '/' or ending
// in .json is used as-is; otherwise <dir>/<name>.json for the explicit dir,
// then $DPHC_PRESETS, then ./presets.
std::string resolve_preset_path(const std::string& name_or_path,
                                const std::string& presets_dir);
Preset load_preset(const std::string& name_or_path,
                   const std::string& presets_dir);

struct RunOutcome {
  std::string tag;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  int best_epoch = 0;
  int stopped_epoch = 0;
  bool pass = true;
};

struct PresetOutcome {
  std::string name;
  std::vector<RunOutcome> runs;
  bool pass = true;
  std::string summary_json;
};

struct PresetOptions {
  bool paper_scale = false;   // 140625 samples/class, 0.68/0.16/0.16 splits
  int threads = 1;
  long long seed_override = -1;  // >= 0 replaces generation and train seeds
  bool quiet = false;            // suppress per-run progress on stdout
};

PresetOutcome run_preset(const Preset& preset, const std::string& outdir,
                         const PresetOptions& options);

}  // namespace dphc
