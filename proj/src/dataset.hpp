#pragma once

// Tomographic dataset generation.  A bundle holds three splits of
// 8-feature samples: the SIC-POVM outcome probabilities of one probe state
// read out at two distinct times under a dephasing channel, labelled by the
// discretised channel parameter (16 classes, or 2 after coarse-graining).

#include <cstdint>
#include <string>
#include <vector>

namespace dphc {

enum class NoiseKind { colored, ohmic };

struct GenSpec {
  NoiseKind kind = NoiseKind::colored;
  double t_min = 0.2;
  double t_max = 3.14;
  double purity = 1.0;   // probe purity; Bloch vectors shrink by sqrt(2p-1)
  double sigma = 0.0;    // iid Gaussian noise added to every feature
  int n_states = 2500;   // probe states drawn uniformly on the Bloch sphere
  int n_times = 110;     // readout times drawn uniformly in [t_min, t_max]
  int n_pairs = 1000;    // distinct ordered time pairs (t1 < t2)
  int samples_per_class = 2500;
  double train_fraction = 0.8;
  double val_fraction = 0.1;  // test split takes the remainder
  bool two_class = false;     // collapse labels to parameter <= 1 vs > 1
  bool region_enabled = false;  // restrict probe |z| to [region_lo, region_hi)
  double region_lo = 0.0;
  double region_hi = 1.0;
  std::uint64_t seed = 1;
  // channel family parameters
  double gamma1 = 1e-4;  // colored: switching-rate support
  double gamma2 = 1e4;
  double quad_tol = 1e-10;
  double omega_c = 1.0;  // ohmic: cutoff frequency
};

// The 16 grid values the labels discretise: alpha = 0.5..2.0 for colored
// noise, s = 0.1..3.0 for the Ohmic family (both evenly spaced).
std::vector<double> class_grid(NoiseKind kind);

struct Split {
  std::vector<float> x;         // row-major [n, 8]
  std::vector<std::uint16_t> y;
  std::size_t size() const { return y.size(); }
};

struct Bundle {
  GenSpec spec;
  std::vector<double> class_values;  // per label class: grid value, or 0/1
  int n_classes = 0;
  Split train, val, test;

  const Split& split(const std::string& name) const;
  Split& split(const std::string& name);
};

constexpr int kFeatureDim = 8;

void validate(const GenSpec& spec);

Bundle generate(const GenSpec& spec, int threads = 1);

// Serialisation: basename.train.dphc / .val.dphc / .test.dphc plus a
// basename.meta.json sidecar with the generation record.
void save_bundle(const Bundle& bundle, const std::string& basename);
Bundle load_bundle(const std::string& basename);

}  // namespace dphc
