#include "dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "channel.hpp"
#include "config.hpp"
#include "crc32.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "sic.hpp"

#include "json.hpp"

namespace dphc {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'D', 'P', 'H', 'C'};
constexpr std::uint8_t kFormatVersion = 1;
constexpr std::size_t kRecordBytes = kFeatureDim * sizeof(float) +
                                     sizeof(std::uint16_t);
constexpr double kMinTimeGap = 1e-12;

std::vector<double> draw_times(const GenSpec& spec) {
  Stream stream(spec.seed, "times");
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> t(spec.n_times);
    for (double& v : t) v = stream.uniform(spec.t_min, spec.t_max);
    std::sort(t.begin(), t.end());
    bool ok = true;
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i] - t[i - 1] < kMinTimeGap) { ok = false; break; }
    }
    if (ok) return t;
  }
  fail(Status::invalid_argument,
       "could not draw distinct readout times; window too narrow");
}

std::vector<std::array<int, 2>> draw_pairs(const GenSpec& spec) {
  std::vector<std::array<int, 2>> all;
  all.reserve(static_cast<std::size_t>(spec.n_times) * (spec.n_times - 1) / 2);
  for (int i = 0; i < spec.n_times; ++i)
    for (int j = i + 1; j < spec.n_times; ++j) all.push_back({i, j});
  require(spec.n_pairs <= static_cast<int>(all.size()),
          Status::invalid_argument,
          "n_pairs exceeds the number of distinct ordered time pairs");
  Stream stream(spec.seed, "pairs");
  auto pick = stream.sample_without_replacement(all.size(), spec.n_pairs);
  std::vector<std::array<int, 2>> pairs(pick.size());
  for (std::size_t k = 0; k < pick.size(); ++k) pairs[k] = all[pick[k]];
  return pairs;
}

std::vector<std::array<double, 3>> draw_states(const GenSpec& spec) {
  Stream stream(spec.seed, "states");
  double shrink = std::sqrt(2.0 * spec.purity - 1.0);
  std::vector<std::array<double, 3>> states(spec.n_states);
  long attempts = 0;
  for (auto& b : states) {
    double z;
    for (;;) {
      require(++attempts <= 1000000, Status::invalid_argument,
              "Bloch-region filter rejected too many candidates");
      z = stream.uniform(-1.0, 1.0);
      if (!spec.region_enabled) break;
      double a = std::fabs(z);
      if (a >= spec.region_lo && a < spec.region_hi) break;
    }
    double phi = stream.uniform(0.0, 2.0 * M_PI);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    b = {shrink * r * std::cos(phi), shrink * r * std::sin(phi), shrink * z};
  }
  return states;
}

// Dephasing coefficient per [class][time index].
std::vector<std::vector<double>> lambda_table(
    const GenSpec& spec, const std::vector<double>& grid,
    const std::vector<double>& times) {
  std::vector<std::vector<double>> table(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    table[c].resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (spec.kind == NoiseKind::colored) {
        ColoredNoiseParams p;
        p.alpha = grid[c];
        p.gamma1 = spec.gamma1;
        p.gamma2 = spec.gamma2;
        p.quad_tol = spec.quad_tol;
        table[c][i] = lambda_classical(times[i], p);
      } else {
        OhmicBathParams p;
        p.s = grid[c];
        p.omega_c = spec.omega_c;
        table[c][i] = lambda_quantum(times[i], p);
      }
    }
  }
  return table;
}

// One class's block of samples, written into out[0 .. spc*record).
void fill_class(const GenSpec& spec, int ci, const std::vector<double>& grid,
                const std::vector<std::array<double, 3>>& states,
                const std::vector<std::array<int, 2>>& pairs,
                const std::vector<double>& lam, float* feats,
                std::uint16_t* labels) {
  Stream combo_stream(spec.seed, "combos", {static_cast<std::uint64_t>(ci)});
  Stream noise_stream(spec.seed, "noise", {static_cast<std::uint64_t>(ci)});
  std::uint64_t n_combos = static_cast<std::uint64_t>(spec.n_states) *
                           static_cast<std::uint64_t>(spec.n_pairs);
  auto combos = combo_stream.sample_without_replacement(
      n_combos, spec.samples_per_class);
  std::uint16_t label = spec.two_class ? (grid[ci] > 1.0 ? 1 : 0)
                                       : static_cast<std::uint16_t>(ci);
  const auto& dirs = sic_directions();
  for (int k = 0; k < spec.samples_per_class; ++k) {
    std::uint64_t c = combos[k];
    const auto& b = states[c / spec.n_pairs];
    const auto& pair = pairs[c % spec.n_pairs];
    for (int slot = 0; slot < 2; ++slot) {
      double L = lam[pair[slot]];
      double bx = b[0] * L, by = b[1] * L, bz = b[2];
      for (int d = 0; d < 4; ++d) {
        double p = 0.25 * (1.0 + dirs[d][0] * bx + dirs[d][1] * by +
                           dirs[d][2] * bz);
        if (spec.sigma > 0.0) p += noise_stream.normal(0.0, spec.sigma);
        feats[8 * k + 4 * slot + d] = static_cast<float>(p);
      }
    }
    labels[k] = label;
  }
}

void write_exact(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  require(out.good(), Status::io, "write failed");
}

json split_header(const Bundle& bundle, const std::string& name,
                  std::size_t n_samples, std::uint32_t payload_crc) {
  return json{{"split", name},
              {"n_samples", n_samples},
              {"feature_dim", kFeatureDim},
              {"n_classes", bundle.n_classes},
              {"payload_crc32", payload_crc},
              {"class_values", bundle.class_values},
              {"spec", to_json(bundle.spec)}};
}

void save_split(const Bundle& bundle, const Split& split,
                const std::string& name, const std::string& path) {
  std::vector<char> payload(split.size() * kRecordBytes);
  char* p = payload.data();
  for (std::size_t i = 0; i < split.size(); ++i) {
    std::memcpy(p, &split.x[i * kFeatureDim], kFeatureDim * sizeof(float));
    p += kFeatureDim * sizeof(float);
    std::memcpy(p, &split.y[i], sizeof(std::uint16_t));
    p += sizeof(std::uint16_t);
  }
  std::uint32_t crc = crc32(payload.data(), payload.size());
  std::string header = split_header(bundle, name, split.size(), crc).dump();
  require(header.size() < (1u << 30), Status::io, "header too large");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), Status::io, "cannot open " + path + " for writing");
  write_exact(out, kMagic, sizeof(kMagic));
  write_exact(out, &kFormatVersion, 1);
  std::uint32_t len = static_cast<std::uint32_t>(header.size());
  write_exact(out, &len, sizeof(len));
  write_exact(out, header.data(), header.size());
  write_exact(out, payload.data(), payload.size());
  out.close();
  require(out.good(), Status::io, "close failed for " + path);
}

Split load_split(const std::string& path, json& header_out) {
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
  std::string header(len, '\0');
  in.read(header.data(), len);
  require(in.good(), Status::truncated, path + ": truncated header");
  json meta = json::parse(header, nullptr, false);
  require(!meta.is_discarded(), Status::malformed, path + ": bad header JSON");
  require(meta.value("feature_dim", -1) == kFeatureDim, Status::dimension,
          path + ": unexpected feature dimension");
  std::size_t n = meta.value("n_samples", std::size_t{0});
  std::vector<char> payload(n * kRecordBytes);
  if (!payload.empty()) {
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    require(in.gcount() == static_cast<std::streamsize>(payload.size()),
            Status::truncated, path + ": truncated payload");
  }
  std::uint32_t crc = crc32(payload.data(), payload.size());
  require(meta.value("payload_crc32", std::uint64_t{0}) == crc,
          Status::checksum, path + ": payload checksum mismatch");
  Split split;
  split.x.resize(n * kFeatureDim);
  split.y.resize(n);
  const char* p = payload.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::memcpy(&split.x[i * kFeatureDim], p, kFeatureDim * sizeof(float));
    p += kFeatureDim * sizeof(float);
    std::memcpy(&split.y[i], p, sizeof(std::uint16_t));
    p += sizeof(std::uint16_t);
  }
  header_out = std::move(meta);
  return split;
}

}  // namespace

std::vector<double> class_grid(NoiseKind kind) {
  std::vector<double> grid(16);
  double lo = (kind == NoiseKind::colored) ? 0.5 : 0.1;
  double hi = (kind == NoiseKind::colored) ? 2.0 : 3.0;
  for (int i = 0; i < 16; ++i) grid[i] = lo + i * (hi - lo) / 15.0;
  return grid;
}

const Split& Bundle::split(const std::string& name) const {
  if (name == "train") return train;
  if (name == "val") return val;
  if (name == "test") return test;
  fail(Status::invalid_argument, "unknown split: " + name);
}

Split& Bundle::split(const std::string& name) {
  return const_cast<Split&>(
      static_cast<const Bundle*>(this)->split(name));
}

void validate(const GenSpec& spec) {
  require(spec.t_min >= 0.0 && spec.t_max > spec.t_min,
          Status::invalid_argument, "time window requires 0 <= t_min < t_max");
  require(spec.purity >= 0.5 && spec.purity <= 1.0, Status::invalid_argument,
          "purity must lie in [0.5, 1]");
  require(spec.sigma >= 0.0, Status::invalid_argument,
          "sigma must be non-negative");
  require(spec.n_states > 0 && spec.n_times > 1 && spec.n_pairs > 0,
          Status::invalid_argument, "counts must be positive");
  require(spec.samples_per_class > 0, Status::invalid_argument,
          "samples_per_class must be positive");
  std::uint64_t n_combos = static_cast<std::uint64_t>(spec.n_states) *
                           static_cast<std::uint64_t>(spec.n_pairs);
  require(static_cast<std::uint64_t>(spec.samples_per_class) <= n_combos,
          Status::invalid_argument,
          "samples_per_class exceeds distinct state/pair combinations");
  require(spec.train_fraction > 0.0 && spec.val_fraction >= 0.0 &&
              spec.train_fraction + spec.val_fraction < 1.0,
          Status::invalid_argument, "split fractions must leave a test share");
  if (spec.region_enabled) {
    require(spec.region_lo >= 0.0 && spec.region_hi > spec.region_lo &&
                spec.region_lo < 1.0,
            Status::invalid_argument, "region bounds require 0 <= lo < hi");
  }
  if (spec.kind == NoiseKind::colored) {
    require(spec.gamma1 > 0.0 && spec.gamma2 > spec.gamma1,
            Status::invalid_argument, "need 0 < gamma1 < gamma2");
    require(spec.quad_tol > 0.0, Status::invalid_argument,
            "quad_tol must be positive");
  } else {
    require(spec.omega_c > 0.0, Status::invalid_argument,
            "omega_c must be positive");
  }
}

Bundle generate(const GenSpec& spec, int threads) {
  validate(spec);
  require(threads >= 1, Status::invalid_argument, "threads must be >= 1");
  auto grid = class_grid(spec.kind);
  auto times = draw_times(spec);
  auto pairs = draw_pairs(spec);
  auto states = draw_states(spec);
  auto table = lambda_table(spec, grid, times);

  int n_classes = static_cast<int>(grid.size());
  std::size_t spc = static_cast<std::size_t>(spec.samples_per_class);
  std::size_t total = spc * n_classes;
  std::vector<float> feats(total * kFeatureDim);
  std::vector<std::uint16_t> labels(total);

  auto worker = [&](int first) {
    for (int ci = first; ci < n_classes; ci += threads) {
      fill_class(spec, ci, grid, states, pairs, table[ci],
                 &feats[ci * spc * kFeatureDim], &labels[ci * spc]);
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(threads, n_classes); ++t)
      pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  // Global shuffle, then a stratified split by final label so every class
  // keeps the same train/val/test proportions.
  std::vector<std::uint64_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  Stream shuffle_stream(spec.seed, "shuffle");
  shuffle_stream.shuffle(order);

  int n_labels = spec.two_class ? 2 : n_classes;
  std::vector<std::vector<std::uint64_t>> by_class(n_labels);
  for (std::uint64_t idx : order) by_class[labels[idx]].push_back(idx);

  Bundle bundle;
  bundle.spec = spec;
  bundle.n_classes = n_labels;
  if (spec.two_class) {
    bundle.class_values = {0.0, 1.0};
  } else {
    bundle.class_values = grid;
  }

  std::array<std::vector<std::uint64_t>, 3> split_indices;
  for (int c = 0; c < n_labels; ++c) {
    const auto& idx = by_class[c];
    std::size_t n = idx.size();
    std::size_t n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(n)));
    std::size_t n_val = static_cast<std::size_t>(
        std::llround(spec.val_fraction * static_cast<double>(n)));
    n_train = std::min(n_train, n);
    n_val = std::min(n_val, n - n_train);
    split_indices[0].insert(split_indices[0].end(), idx.begin(),
                            idx.begin() + n_train);
    split_indices[1].insert(split_indices[1].end(), idx.begin() + n_train,
                            idx.begin() + n_train + n_val);
    split_indices[2].insert(split_indices[2].end(),
                            idx.begin() + n_train + n_val, idx.end());
  }

  Split* outs[3] = {&bundle.train, &bundle.val, &bundle.test};
  for (int sidx = 0; sidx < 3; ++sidx) {
    auto& idx = split_indices[sidx];
    Stream order_stream(spec.seed, "order",
                        {static_cast<std::uint64_t>(sidx)});
    order_stream.shuffle(idx);
    Split& out = *outs[sidx];
    out.x.resize(idx.size() * kFeatureDim);
    out.y.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::memcpy(&out.x[i * kFeatureDim], &feats[idx[i] * kFeatureDim],
                  kFeatureDim * sizeof(float));
      out.y[i] = labels[idx[i]];
    }
  }
  return bundle;
}

void save_bundle(const Bundle& bundle, const std::string& basename) {
  save_split(bundle, bundle.train, "train", basename + ".train.dphc");
  save_split(bundle, bundle.val, "val", basename + ".val.dphc");
  save_split(bundle, bundle.test, "test", basename + ".test.dphc");
  json meta{{"spec", to_json(bundle.spec)},
            {"class_values", bundle.class_values},
            {"n_classes", bundle.n_classes},
            {"splits",
             {{"train", bundle.train.size()},
              {"val", bundle.val.size()},
              {"test", bundle.test.size()}}}};
  std::ofstream out(basename + ".meta.json", std::ios::trunc);
  require(out.is_open(), Status::io,
          "cannot open " + basename + ".meta.json for writing");
  out << meta.dump(2) << "\n";
  require(out.good(), Status::io, "write failed");
}

Bundle load_bundle(const std::string& basename) {
  Bundle bundle;
  json headers[3];
  bundle.train = load_split(basename + ".train.dphc", headers[0]);
  bundle.val = load_split(basename + ".val.dphc", headers[1]);
  bundle.test = load_split(basename + ".test.dphc", headers[2]);
  for (const auto& h : headers) {
    require(h.contains("spec") && h.contains("class_values") &&
                h.contains("n_classes"),
            Status::malformed, basename + ": incomplete split header");
  }
  for (int i = 1; i < 3; ++i) {
    require(headers[i]["spec"] == headers[0]["spec"], Status::malformed,
            basename + ": split files disagree on the generation record");
  }
  bundle.spec = genspec_from_json(headers[0]["spec"]);
  bundle.class_values = headers[0]["class_values"].get<std::vector<double>>();
  bundle.n_classes = headers[0]["n_classes"].get<int>();
  require(bundle.n_classes >= 2, Status::malformed, "bad class count");
  for (auto* s : {&bundle.train, &bundle.val, &bundle.test}) {
    for (auto label : s->y) {
      require(label < bundle.n_classes, Status::malformed,
              basename + ": label out of range");
    }
  }
  return bundle;
}

}  // namespace dphc
