#include "config.hpp"

#include <set>

#include "errors.hpp"

namespace dphc {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& known,
                const char* what) {
  require(j.is_object(), Status::invalid_argument,
          std::string(what) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    require(known.count(item.key()) != 0, Status::invalid_argument,
            std::string(what) + ": unknown key \"" + item.key() + "\"");
  }
}

template <class T>
T get_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(Status::invalid_argument,
         std::string("bad value for \"") + key + "\"");
  }
}

json parse_text(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), Status::invalid_argument,
          std::string(what) + ": not valid JSON");
  return j;
}

}  // namespace

json to_json(const GenSpec& spec) {
  json j{{"kind", spec.kind == NoiseKind::colored ? "colored" : "ohmic"},
         {"t_min", spec.t_min},
         {"t_max", spec.t_max},
         {"purity", spec.purity},
         {"sigma", spec.sigma},
         {"n_states", spec.n_states},
         {"n_times", spec.n_times},
         {"n_pairs", spec.n_pairs},
         {"samples_per_class", spec.samples_per_class},
         {"train_fraction", spec.train_fraction},
         {"val_fraction", spec.val_fraction},
         {"two_class", spec.two_class},
         {"seed", spec.seed}};
  if (spec.region_enabled) {
    j["region"] = {{"lo", spec.region_lo}, {"hi", spec.region_hi}};
  }
  if (spec.kind == NoiseKind::colored) {
    j["gamma1"] = spec.gamma1;
    j["gamma2"] = spec.gamma2;
    j["quad_tol"] = spec.quad_tol;
  } else {
    j["omega_c"] = spec.omega_c;
  }
  return j;
}

GenSpec genspec_from_json(const json& j) {
  check_keys(j, {"kind", "t_min", "t_max", "purity", "sigma", "n_states",
                 "n_times", "n_pairs", "samples_per_class", "train_fraction",
                 "val_fraction", "two_class", "region", "seed", "gamma1",
                 "gamma2", "quad_tol", "omega_c"},
             "generation spec");
  GenSpec spec;
  std::string kind = get_field<std::string>(j, "kind", "colored");
  if (kind == "colored") {
    spec.kind = NoiseKind::colored;
  } else if (kind == "ohmic") {
    spec.kind = NoiseKind::ohmic;
  } else {
    fail(Status::invalid_argument,
         "kind must be \"colored\" or \"ohmic\", got \"" + kind + "\"");
  }
  spec.t_min = get_field(j, "t_min", spec.t_min);
  spec.t_max = get_field(j, "t_max", spec.t_max);
  spec.purity = get_field(j, "purity", spec.purity);
  spec.sigma = get_field(j, "sigma", spec.sigma);
  spec.n_states = get_field(j, "n_states", spec.n_states);
  spec.n_times = get_field(j, "n_times", spec.n_times);
  spec.n_pairs = get_field(j, "n_pairs", spec.n_pairs);
  spec.samples_per_class =
      get_field(j, "samples_per_class", spec.samples_per_class);
  spec.train_fraction = get_field(j, "train_fraction", spec.train_fraction);
  spec.val_fraction = get_field(j, "val_fraction", spec.val_fraction);
  spec.two_class = get_field(j, "two_class", spec.two_class);
  spec.seed = get_field(j, "seed", spec.seed);
  spec.gamma1 = get_field(j, "gamma1", spec.gamma1);
  spec.gamma2 = get_field(j, "gamma2", spec.gamma2);
  spec.quad_tol = get_field(j, "quad_tol", spec.quad_tol);
  spec.omega_c = get_field(j, "omega_c", spec.omega_c);
  if (j.contains("region")) {
    check_keys(j.at("region"), {"lo", "hi"}, "region");
    spec.region_enabled = true;
    spec.region_lo = get_field(j.at("region"), "lo", 0.0);
    spec.region_hi = get_field(j.at("region"), "hi", 1.0);
  }
  validate(spec);
  return spec;
}

json to_json(const TrainConfig& config) {
  return json{{"hidden", config.hidden},
              {"batch_size", config.batch_size},
              {"max_epochs", config.max_epochs},
              {"early_stop_patience", config.early_stop_patience},
              {"learning_rate", config.learning_rate},
              {"l1_coeff", config.l1_coeff},
              {"optimizer", config.optimizer},
              {"seed", config.seed},
              {"threads", config.threads}};
}

TrainConfig trainconfig_from_json(const json& j) {
  check_keys(j, {"hidden", "batch_size", "max_epochs", "early_stop_patience",
                 "learning_rate", "l1_coeff", "optimizer", "seed", "threads"},
             "train config");
  TrainConfig config;
  config.hidden = get_field(j, "hidden", config.hidden);
  config.batch_size = get_field(j, "batch_size", config.batch_size);
  config.max_epochs = get_field(j, "max_epochs", config.max_epochs);
  config.early_stop_patience =
      get_field(j, "early_stop_patience", config.early_stop_patience);
  config.learning_rate = get_field(j, "learning_rate", config.learning_rate);
  config.l1_coeff = get_field(j, "l1_coeff", config.l1_coeff);
  config.optimizer = get_field(j, "optimizer", config.optimizer);
  config.seed = get_field(j, "seed", config.seed);
  config.threads = get_field(j, "threads", config.threads);
  validate(config);
  return config;
}

GenSpec genspec_from_text(const std::string& text) {
  return genspec_from_json(parse_text(text, "generation spec"));
}

TrainConfig trainconfig_from_text(const std::string& text) {
  return trainconfig_from_json(parse_text(text, "train config"));
}

}  // namespace dphc
