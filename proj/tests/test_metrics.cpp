#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "dataset.hpp"
#include "doctest.h"
#include "json.hpp"
#include "metrics.hpp"
#include "mlp.hpp"
#include "rng.hpp"

using dphc::Evaluation;
using dphc::Status;
using dphc::evaluation_from_confusion;
using testutil::status_of;

namespace {

std::vector<long long> transpose(const std::vector<long long>& m, int n) {
  std::vector<long long> t(m.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[j * n + i] = m[i * n + j];
  return t;
}

}  // namespace

TEST_CASE("confusion-derived scores match a hand computation") {
  // rows = actual, columns = predicted
  std::vector<long long> c{5, 1, 0,   //
                           2, 6, 0,   //
                           0, 3, 3};
  Evaluation ev = evaluation_from_confusion(c, {0.5, 1.0, 1.5});
  CHECK(ev.n_classes == 3);
  CHECK(ev.n_samples == 20);
  CHECK(std::abs(ev.accuracy - 0.7) < 1e-15);

  CHECK(std::abs(ev.diag_over_actual[0] - 5.0 / 6.0) < 1e-15);
  CHECK(std::abs(ev.diag_over_actual[1] - 0.75) < 1e-15);
  CHECK(std::abs(ev.diag_over_actual[2] - 0.5) < 1e-15);
  CHECK(std::abs(ev.diag_over_predicted[0] - 5.0 / 7.0) < 1e-15);
  CHECK(std::abs(ev.diag_over_predicted[1] - 0.6) < 1e-15);
  CHECK(std::abs(ev.diag_over_predicted[2] - 1.0) < 1e-15);

  CHECK(std::abs(ev.f1[0] - 10.0 / 13.0) < 1e-15);
  CHECK(std::abs(ev.f1[1] - 2.0 / 3.0) < 1e-15);
  CHECK(std::abs(ev.f1[2] - 2.0 / 3.0) < 1e-15);
  CHECK(std::abs(ev.macro_f1 - 82.0 / 117.0) < 1e-15);
  for (int j = 0; j < 3; ++j) CHECK(!ev.f1_degenerate[j]);
}

TEST_CASE("absent classes get a flagged zero F1 that still averages in") {
  std::vector<long long> c{2, 0, 0,  //
                           1, 3, 0,  //
                           0, 0, 0};
  Evaluation ev = evaluation_from_confusion(c, {0.0, 1.0, 2.0});
  CHECK(ev.f1_degenerate[2]);
  CHECK(!ev.f1_degenerate[0]);
  CHECK(ev.f1[2] == 0.0);
  CHECK(std::abs(ev.macro_f1 - (ev.f1[0] + ev.f1[1]) / 3.0) < 1e-15);
  CHECK(ev.diag_over_actual[2] == 0.0);
  CHECK(ev.diag_over_predicted[2] == 0.0);
}

TEST_CASE("an all-zero matrix produces finite zero scores") {
  std::vector<long long> c(16, 0);
  Evaluation ev = evaluation_from_confusion(c, std::vector<double>(4, 0.0));
  CHECK(ev.n_samples == 0);
  CHECK(ev.accuracy == 0.0);
  CHECK(ev.macro_f1 == 0.0);
  for (double f : ev.f1) CHECK(f == 0.0);
}

TEST_CASE("macro F1 is exactly invariant under marginal swap") {
  // transposing the confusion matrix swaps the two marginals; F1 is their
  // harmonic mean, so every class score -- and the macro average -- must be
  // bitwise identical, not merely close
  dphc::Stream rng(55, "confusions");
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + int(rng.below(5));
    std::vector<long long> c(n * n);
    for (auto& v : c) v = long(rng.below(17));
    Evaluation a = evaluation_from_confusion(c, std::vector<double>(n, 0.0));
    Evaluation b = evaluation_from_confusion(transpose(c, n),
                                             std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j) {
      CHECK(a.f1[j] == b.f1[j]);
      CHECK(a.diag_over_actual[j] == b.diag_over_predicted[j]);
    }
    CHECK(a.macro_f1 == b.macro_f1);
    CHECK(a.accuracy == b.accuracy);
  }
}

TEST_CASE("evaluate runs a model over a bundle split") {
  // quick end-to-end: tiny generated bundle, tiny linear probe
  dphc::GenSpec spec;
  spec.n_states = 40;
  spec.n_times = 12;
  spec.n_pairs = 20;
  spec.samples_per_class = 24;
  spec.quad_tol = 1e-8;
  spec.seed = 17;
  dphc::Bundle bundle = dphc::generate(spec);
  dphc::TrainConfig config;
  config.max_epochs = 3;
  config.early_stop_patience = 0;
  dphc::Model m = dphc::train(bundle, config);

  Evaluation ev = dphc::evaluate(m, bundle, "test");
  CHECK(ev.n_classes == 16);
  CHECK(ev.n_samples == long(bundle.test.size()));
  long long total = 0, diag = 0;
  for (int i = 0; i < 16; ++i) {
    long long row = 0;
    for (int j = 0; j < 16; ++j) row += ev.confusion[i * 16 + j];
    // row marginal = number of test samples actually labelled i
    long long have = 0;
    for (auto y : bundle.test.y) have += (y == i);
    CHECK(row == have);
    total += row;
    diag += ev.confusion[i * 16 + i];
  }
  CHECK(total == ev.n_samples);
  CHECK(ev.accuracy == double(diag) / double(total));

  // dimension mismatches are rejected
  dphc::Model wrong = dphc::init_model({4, 16}, 1);
  CHECK(status_of([&] { dphc::evaluate(wrong, bundle, "test"); }) ==
        Status::dimension);
  dphc::Model narrow = dphc::init_model({8, 5}, 1);
  CHECK(status_of([&] { dphc::evaluate(narrow, bundle, "test"); }) ==
        Status::dimension);
}

TEST_CASE("scores serialise to parseable JSON") {
  std::vector<long long> c{5, 1, 0, 2, 6, 0, 0, 3, 3};
  Evaluation ev = evaluation_from_confusion(c, {0.5, 1.0, 1.5});
  auto j = nlohmann::json::parse(dphc::scores_json(ev));
  CHECK(j["n_classes"] == 3);
  CHECK(j["n_samples"] == 20);
  CHECK(std::abs(j["accuracy"].get<double>() - 0.7) < 1e-15);
  CHECK(std::abs(j["macro_f1"].get<double>() - 82.0 / 117.0) < 1e-15);
  REQUIRE(j["confusion"].is_array());
  REQUIRE(j["confusion"].size() == 3);
  CHECK(j["confusion"][1][0] == 2);
  REQUIRE(j["per_class"].size() == 3);
  CHECK(std::abs(j["per_class"][0]["value"].get<double>() - 0.5) < 1e-15);
  CHECK(std::abs(j["per_class"][0]["f1"].get<double>() - 10.0 / 13.0) <
        1e-15);
  CHECK(j["per_class"][2].contains("degenerate"));
}

TEST_CASE("confusion renders as CSV and SVG") {
  std::vector<long long> c{5, 1, 0, 2, 6, 0, 0, 3, 3};
  Evaluation ev = evaluation_from_confusion(c, {0.5, 1.0, 1.5});

  std::string csv = dphc::confusion_csv(ev);
  std::istringstream lines(csv);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line))
    if (!line.empty()) rows.push_back(line);
  REQUIRE(rows.size() == 4);  // header + one row per actual class
  CHECK(rows[0].rfind("actual", 0) == 0);
  CHECK(rows[0].find("0.5") != std::string::npos);
  CHECK(rows[1].find("5") != std::string::npos);

  std::string svg = dphc::confusion_svg(ev);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t rects = 0, at = 0;
  while ((at = svg.find("<rect", at)) != std::string::npos) {
    ++rects;
    at += 5;
  }
  CHECK(rects >= 9);  // at least one cell per matrix entry
  CHECK(svg.find("<title>") != std::string::npos);
}

TEST_CASE("training curves render as CSV") {
  dphc::TrainReport report;
  report.best_epoch = 2;
  report.stopped_epoch = 2;
  report.best_val_loss = 0.5;
  report.curves = {{1, 1.0, 0.25, 0.9, 0.3}, {2, 0.8, 0.5, 0.5, 0.6}};
  std::string csv = dphc::curves_csv(report);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "epoch,train_loss,train_accuracy,val_loss,val_accuracy");
  std::string row;
  int count = 0;
  while (std::getline(lines, row))
    if (!row.empty()) ++count;
  CHECK(count == 2);
}
