#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "doctest.h"
#include "json.hpp"
#include "mlp.hpp"

using dphc::Bundle;
using dphc::GenSpec;
using dphc::Status;
using testutil::artifact_dir;
using testutil::slurp;
using testutil::spit;
using testutil::status_of;

namespace {

GenSpec tiny_spec() {
  GenSpec spec;
  spec.n_states = 40;
  spec.n_times = 10;
  spec.n_pairs = 16;
  spec.samples_per_class = 20;
  spec.quad_tol = 1e-8;
  spec.seed = 23;
  return spec;
}

Bundle tiny_bundle() { return dphc::generate(tiny_spec()); }

// Flips one byte of the file at the given offset (negative = from the end).
void corrupt(const std::filesystem::path& path, long long offset) {
  auto bytes = slurp(path);
  REQUIRE(!bytes.empty());
  std::size_t at = offset >= 0 ? std::size_t(offset)
                               : bytes.size() - std::size_t(-offset);
  REQUIRE(at < bytes.size());
  bytes[at] ^= 0x5a;
  spit(path, bytes);
}

void truncate_to(const std::filesystem::path& path, std::size_t keep) {
  auto bytes = slurp(path);
  REQUIRE(bytes.size() > keep);
  bytes.resize(keep);
  spit(path, bytes);
}

}  // namespace

TEST_CASE("bundles round-trip bit for bit") {
  Bundle b = tiny_bundle();
  auto dir = artifact_dir("io-bundle");
  std::string base = (dir / "rt").string();
  dphc::save_bundle(b, base);

  for (const char* suffix : {".train.dphc", ".val.dphc", ".test.dphc"}) {
    CHECK(std::filesystem::exists(dir / ("rt" + std::string(suffix))));
  }
  auto meta_bytes = slurp(dir / "rt.meta.json");
  auto meta = nlohmann::json::parse(meta_bytes.begin(), meta_bytes.end());
  CHECK(meta.contains("spec"));
  CHECK(meta["n_classes"] == 16);

  Bundle back = dphc::load_bundle(base);
  CHECK(back.n_classes == b.n_classes);
  CHECK(back.class_values == b.class_values);
  for (const char* name : {"train", "val", "test"}) {
    CHECK(back.split(name).x == b.split(name).x);
    CHECK(back.split(name).y == b.split(name).y);
  }
  CHECK(dphc::to_json(back.spec) == dphc::to_json(b.spec));

  // saving the reloaded bundle reproduces identical files
  std::string again = (dir / "rt2").string();
  dphc::save_bundle(back, again);
  for (const char* split : {"train", "val", "test"}) {
    CHECK(testutil::same_bytes(
        dir / ("rt." + std::string(split) + ".dphc"),
        dir / ("rt2." + std::string(split) + ".dphc")));
  }
}

TEST_CASE("bundle loading reports precise failure modes") {
  Bundle b = tiny_bundle();
  auto dir = artifact_dir("io-bundle-bad");
  std::string base = (dir / "bad").string();
  auto val_file = dir / "bad.val.dphc";
  auto fresh = [&] { dphc::save_bundle(b, base); };

  fresh();
  corrupt(val_file, 0);  // magic
  CHECK(status_of([&] { dphc::load_bundle(base); }) == Status::malformed);

  fresh();
  corrupt(val_file, 4);  // format version
  CHECK(status_of([&] { dphc::load_bundle(base); }) == Status::malformed);

  fresh();
  corrupt(val_file, 9);  // first header byte: JSON no longer parses
  CHECK(status_of([&] { dphc::load_bundle(base); }) == Status::malformed);

  fresh();
  corrupt(val_file, -3);  // payload byte
  CHECK(status_of([&] { dphc::load_bundle(base); }) == Status::checksum);

  fresh();
  truncate_to(val_file, std::filesystem::file_size(val_file) - 7);
  CHECK(status_of([&] { dphc::load_bundle(base); }) == Status::truncated);

  fresh();
  truncate_to(val_file, 6);  // ends inside the header-length field
  CHECK(status_of([&] { dphc::load_bundle(base); }) == Status::truncated);

  fresh();
  std::filesystem::remove(val_file);
  CHECK(status_of([&] { dphc::load_bundle(base); }) == Status::io);

  CHECK(status_of([&] { dphc::load_bundle((dir / "nowhere").string()); }) ==
        Status::io);
}

TEST_CASE("models survive corruption checks of their own") {
  GenSpec spec = tiny_spec();
  Bundle bundle = dphc::generate(spec);
  dphc::TrainConfig config;
  config.max_epochs = 2;
  config.early_stop_patience = 0;
  dphc::Model m = dphc::train(bundle, config);

  auto dir = artifact_dir("io-model");
  auto path = dir / "m.dphm";
  auto fresh = [&] { dphc::save_model(m, path.string()); };

  fresh();
  dphc::Model back = dphc::load_model(path.string());
  REQUIRE(back.layers.size() == m.layers.size());
  CHECK(back.layers[0].w == m.layers[0].w);
  CHECK(back.layers[0].b == m.layers[0].b);

  fresh();
  corrupt(path, 0);
  CHECK(status_of([&] { dphc::load_model(path.string()); }) ==
        Status::malformed);

  fresh();
  corrupt(path, 4);
  CHECK(status_of([&] { dphc::load_model(path.string()); }) ==
        Status::malformed);

  fresh();
  corrupt(path, -5);  // inside the f64 parameter payload
  CHECK(status_of([&] { dphc::load_model(path.string()); }) ==
        Status::checksum);

  fresh();
  truncate_to(path, std::filesystem::file_size(path) / 2);
  CHECK(status_of([&] { dphc::load_model(path.string()); }) ==
        Status::truncated);

  CHECK(status_of([&] { dphc::load_model((dir / "ghost.dphm").string()); }) ==
        Status::io);

  // artifact kinds do not cross-load
  std::string base = (dir / "asbundle").string();
  dphc::save_bundle(bundle, base);
  CHECK(status_of([&] { dphc::load_model(base + ".train.dphc"); }) ==
        Status::malformed);
}

TEST_CASE("config JSON round-trips and rejects junk") {
  GenSpec spec = tiny_spec();
  spec.kind = dphc::NoiseKind::ohmic;
  spec.two_class = true;
  spec.region_enabled = true;
  spec.region_lo = 0.1;
  spec.region_hi = 0.9;
  GenSpec back = dphc::genspec_from_json(dphc::to_json(spec));
  CHECK(dphc::to_json(back) == dphc::to_json(spec));

  dphc::TrainConfig config;
  config.hidden = {30, 30};
  config.l1_coeff = 1e-4;
  config.optimizer = "sgd";
  dphc::TrainConfig cback = dphc::trainconfig_from_json(dphc::to_json(config));
  CHECK(dphc::to_json(cback) == dphc::to_json(config));

  CHECK(status_of([] { dphc::genspec_from_text("not json"); }) ==
        Status::invalid_argument);
  CHECK(status_of([] { dphc::genspec_from_text("{\"t_mni\": 0.5}"); }) ==
        Status::invalid_argument);  // unknown key
  CHECK(status_of([] { dphc::genspec_from_text("{\"t_min\": \"low\"}"); }) ==
        Status::invalid_argument);  // wrong type
  CHECK(status_of([] { dphc::genspec_from_text("{\"kind\": \"pink\"}"); }) ==
        Status::invalid_argument);
  CHECK(status_of([] {
          dphc::trainconfig_from_text("{\"batch_size\": -3}");
        }) == Status::invalid_argument);
  CHECK(status_of([] {
          dphc::trainconfig_from_text("{\"optimizer\": \"lbfgs\"}");
        }) == Status::invalid_argument);
}
