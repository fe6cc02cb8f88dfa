#include "metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "errors.hpp"

#include "json.hpp"

namespace dphc {

namespace {

using nlohmann::json;

std::string format_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Light blue (low) to red (high).
std::string heat_color(double t) {
  auto lerp = [t](int lo, int hi) {
    return static_cast<int>(std::lround(lo + t * (hi - lo)));
  };
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", lerp(219, 220),
                lerp(234, 38), lerp(254, 38));
  return buf;
}

}  // namespace

Evaluation evaluation_from_confusion(const std::vector<long long>& confusion,
                                     const std::vector<double>& class_values) {
  int m = static_cast<int>(class_values.size());
  require(m >= 2, Status::invalid_argument, "need at least two classes");
  require(confusion.size() == static_cast<std::size_t>(m) * m,
          Status::dimension, "confusion matrix shape mismatch");
  Evaluation ev;
  ev.n_classes = m;
  ev.class_values = class_values;
  ev.confusion = confusion;
  long long total = 0, diagonal = 0;
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      long long c = confusion[static_cast<std::size_t>(j) * m + k];
      require(c >= 0, Status::invalid_argument,
              "confusion counts must be non-negative");
      total += c;
      if (j == k) diagonal += c;
    }
  }
  ev.n_samples = total;
  ev.accuracy = total > 0 ? static_cast<double>(diagonal) / total : 0.0;
  double f1_sum = 0.0;
  for (int j = 0; j < m; ++j) {
    long long row = 0, col = 0;
    for (int k = 0; k < m; ++k) {
      row += confusion[static_cast<std::size_t>(j) * m + k];
      col += confusion[static_cast<std::size_t>(k) * m + j];
    }
    long long diag = confusion[static_cast<std::size_t>(j) * m + j];
    double a = row > 0 ? static_cast<double>(diag) / row : 0.0;
    double b = col > 0 ? static_cast<double>(diag) / col : 0.0;
    ev.diag_over_actual.push_back(a);
    ev.diag_over_predicted.push_back(b);
    bool degenerate = (a + b == 0.0);
    ev.f1_degenerate.push_back(degenerate);
    double f1 = degenerate ? 0.0 : 2.0 * a * b / (a + b);
    ev.f1.push_back(f1);
    f1_sum += f1;
  }
  ev.macro_f1 = f1_sum / m;
  return ev;
}

Evaluation evaluate(const Model& model, const Bundle& bundle,
                    const std::string& split_name) {
  const Split& split = bundle.split(split_name);
  int m = bundle.n_classes;
  require(model.layer_sizes.back() == m, Status::dimension,
          "model output size does not match the bundle's class count");
  require(model.layer_sizes.front() == kFeatureDim, Status::dimension,
          "model input size does not match the feature dimension");
  std::vector<long long> confusion(static_cast<std::size_t>(m) * m, 0);
  std::vector<double> x(kFeatureDim);
  for (std::size_t i = 0; i < split.size(); ++i) {
    for (int d = 0; d < kFeatureDim; ++d)
      x[d] = split.x[i * kFeatureDim + d];
    int pred = predict(model, x.data());
    int actual = split.y[i];
    require(actual < m, Status::invalid_argument, "label outside class set");
    ++confusion[static_cast<std::size_t>(actual) * m + pred];
  }
  return evaluation_from_confusion(confusion, bundle.class_values);
}

std::string scores_json(const Evaluation& ev) {
  json per_class = json::array();
  for (int j = 0; j < ev.n_classes; ++j) {
    per_class.push_back({{"value", ev.class_values[j]},
                         {"diag_over_actual", ev.diag_over_actual[j]},
                         {"diag_over_predicted", ev.diag_over_predicted[j]},
                         {"f1", ev.f1[j]},
                         {"degenerate", static_cast<bool>(ev.f1_degenerate[j])}});
  }
  json rows = json::array();
  for (int j = 0; j < ev.n_classes; ++j) {
    json row = json::array();
    for (int k = 0; k < ev.n_classes; ++k)
      row.push_back(ev.confusion[static_cast<std::size_t>(j) * ev.n_classes + k]);
    rows.push_back(row);
  }
  json out{{"n_samples", ev.n_samples},
           {"n_classes", ev.n_classes},
           {"accuracy", ev.accuracy},
           {"macro_f1", ev.macro_f1},
           {"per_class", per_class},
           {"confusion", rows}};
  return out.dump(2) + "\n";
}

std::string confusion_csv(const Evaluation& ev) {
  std::ostringstream out;
  out << "actual\\predicted";
  for (int k = 0; k < ev.n_classes; ++k)
    out << "," << format_value(ev.class_values[k]);
  out << "\n";
  for (int j = 0; j < ev.n_classes; ++j) {
    out << format_value(ev.class_values[j]);
    for (int k = 0; k < ev.n_classes; ++k)
      out << ","
          << ev.confusion[static_cast<std::size_t>(j) * ev.n_classes + k];
    out << "\n";
  }
  return out.str();
}

std::string confusion_svg(const Evaluation& ev) {
  int m = ev.n_classes;
  const int cell = 28, left = 64, top = 56, legend = 24;
  int width = left + m * cell + 16;
  int height = top + m * cell + legend + 16;
  long long peak = 1;
  for (long long c : ev.confusion) peak = std::max(peak, c);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"18\" font-family=\"sans-serif\" "
         "font-size=\"13\">confusion matrix (rows: actual, columns: "
         "predicted)</text>\n";
  for (int k = 0; k < m; ++k) {
    out << "<text x=\"" << left + k * cell + cell / 2 << "\" y=\"" << top - 6
        << "\" font-family=\"sans-serif\" font-size=\"8\" "
           "text-anchor=\"middle\">"
        << format_value(ev.class_values[k]) << "</text>\n";
  }
  for (int j = 0; j < m; ++j) {
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + j * cell + cell / 2 + 3
        << "\" font-family=\"sans-serif\" font-size=\"8\" "
           "text-anchor=\"end\">"
        << format_value(ev.class_values[j]) << "</text>\n";
    for (int k = 0; k < m; ++k) {
      long long c = ev.confusion[static_cast<std::size_t>(j) * m + k];
      double t = static_cast<double>(c) / static_cast<double>(peak);
      out << "<rect x=\"" << left + k * cell << "\" y=\"" << top + j * cell
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
          << heat_color(t) << "\" stroke=\"white\" stroke-width=\"1\">"
          << "<title>actual " << format_value(ev.class_values[j])
          << ", predicted " << format_value(ev.class_values[k]) << ": " << c
          << "</title></rect>\n";
    }
  }
  out << "<text x=\"" << left << "\" y=\"" << top + m * cell + 16
      << "\" font-family=\"sans-serif\" font-size=\"10\">0</text>\n";
  out << "<rect x=\"" << left + 16 << "\" y=\"" << top + m * cell + 8
      << "\" width=\"120\" height=\"10\" fill=\"url(#g)\"/>\n";
  out << "<defs><linearGradient id=\"g\"><stop offset=\"0\" stop-color=\""
      << heat_color(0.0) << "\"/><stop offset=\"1\" stop-color=\""
      << heat_color(1.0) << "\"/></linearGradient></defs>\n";
  out << "<text x=\"" << left + 142 << "\" y=\"" << top + m * cell + 16
      << "\" font-family=\"sans-serif\" font-size=\"10\">" << peak
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string curves_csv(const TrainReport& report) {
  std::ostringstream out;
  out << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  for (const auto& rec : report.curves) {
    out << rec.epoch << "," << format_value(rec.train_loss) << ","
        << format_value(rec.train_accuracy) << ","
        << format_value(rec.val_loss) << "," << format_value(rec.val_accuracy)
        << "\n";
  }
  return out.str();
}

}  // namespace dphc
