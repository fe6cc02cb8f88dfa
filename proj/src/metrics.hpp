#pragma once

// Multiclass evaluation: confusion matrix, accuracy, per-class F1 from the
// two confusion-matrix marginals, and macro-F1.  Renderers emit the matrix
// as CSV (class values as headers) and as an SVG heatmap.

#include <string>
#include <vector>

#include "dataset.hpp"
#include "mlp.hpp"

namespace dphc {

struct Evaluation {
  int n_classes = 0;
  std::vector<double> class_values;    // header value per class index
  std::vector<long long> confusion;    // [actual * n_classes + predicted]
  long long n_samples = 0;
  double accuracy = 0.0;
  // Per class j: diagonal over the actual-class marginal (row sum) and over
  // the predicted-class marginal (column sum); F1 is their harmonic mean,
  // defined as 0 (and flagged) when both marginals vanish.
  std::vector<double> diag_over_actual;
  std::vector<double> diag_over_predicted;
  std::vector<double> f1;
  std::vector<bool> f1_degenerate;
  double macro_f1 = 0.0;
};

// Fills the derived scores from a raw count matrix.
Evaluation evaluation_from_confusion(const std::vector<long long>& confusion,
                                     const std::vector<double>& class_values);

// Runs the model over one split of the bundle.
Evaluation evaluate(const Model& model, const Bundle& bundle,
                    const std::string& split);

std::string scores_json(const Evaluation& ev);
std::string confusion_csv(const Evaluation& ev);
std::string confusion_svg(const Evaluation& ev);

std::string curves_csv(const TrainReport& report);

}  // namespace dphc
