#pragma once

// JSON run configurations for the command-line tool: every field optional on
// input (defaults fill the rest), unknown keys rejected, lossless round trip.

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "geo2vec/error.hpp"
#include "geo2vec/evaluation.hpp"
#include "geo2vec/ingest.hpp"
#include "geo2vec/training.hpp"

namespace geo2vec {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
  if (!j.is_object()) throw DataError(std::string(what) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (std::string_view a : allowed) known = known || a == it.key();
    if (!known) throw DataError("unknown " + std::string(what) + " key '" + it.key() + "'");
  }
}

// Reads j[key] into out when present; a type mismatch names the field.
template <class T>
void read_field(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("config field '") + key + "' has the wrong type");
  }
}

inline Mode parse_mode(std::string_view s) {
  if (s == "shape") return Mode::Shape;
  if (s == "location") return Mode::Location;
  throw DataError("mode must be 'shape' or 'location', got '" + std::string(s) + "'");
}

}  // namespace detail

inline json to_json(const TrainConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["epsilon"] = c.sampling.epsilon;
  j["n_axis"] = c.sampling.n_axis;
  j["sigma"] = c.sampling.sigma;
  j["estimate_sigma"] = c.estimate_sigma;
  j["k"] = c.sampling.k;
  j["subset"] = c.sampling.subset;
  j["quadratic_counts"] = c.sampling.quadratic_counts;
  j["freq_count"] = c.freq_count;
  j["rotation_invariant"] = c.rotation_invariant;
  j["headroom"] = c.headroom;
  j["clamp"] = c.loss.clamp ? json(*c.loss.clamp) : json(nullptr);
  j["gamma"] = c.loss.gamma;
  j["sigma_z"] = c.loss.sigma_z;
  j["hidden"] = c.hidden;
  j["latent_dim"] = c.latent_dim;
  j["alpha"] = c.alpha;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["lr_network"] = c.lr_network;
  j["lr_latent"] = c.lr_latent;
  j["seed"] = c.seed;
  j["resample_each_epoch"] = c.resample_each_epoch;
  j["checkpoint_every"] = c.checkpoint_every;
  return j;
}

// Starts from the defaults of the mode named in j (or `mode` when absent).
inline TrainConfig train_config_from_json(const json& j, Mode mode = Mode::Shape) {
  detail::reject_unknown_keys(j,
                              {"mode", "epsilon", "n_axis", "sigma", "estimate_sigma", "k", "subset", "quadratic_counts",
                               "freq_count", "rotation_invariant", "headroom", "clamp", "gamma", "sigma_z", "hidden",
                               "latent_dim", "alpha", "batch_size", "epochs", "lr_network", "lr_latent", "seed",
                               "resample_each_epoch", "checkpoint_every"},
                              "train config");
  if (auto it = j.find("mode"); it != j.end()) {
    if (!it->is_string()) throw DataError("config field 'mode' has the wrong type");
    mode = detail::parse_mode(it->get<std::string>());
  }
  TrainConfig c = TrainConfig::defaults(mode);
  detail::read_field(j, "epsilon", c.sampling.epsilon);
  detail::read_field(j, "n_axis", c.sampling.n_axis);
  detail::read_field(j, "sigma", c.sampling.sigma);
  detail::read_field(j, "estimate_sigma", c.estimate_sigma);
  detail::read_field(j, "k", c.sampling.k);
  detail::read_field(j, "subset", c.sampling.subset);
  detail::read_field(j, "quadratic_counts", c.sampling.quadratic_counts);
  detail::read_field(j, "freq_count", c.freq_count);
  detail::read_field(j, "rotation_invariant", c.rotation_invariant);
  detail::read_field(j, "headroom", c.headroom);
  if (auto it = j.find("clamp"); it != j.end()) {
    if (it->is_null()) c.loss.clamp.reset();
    else if (it->is_number()) c.loss.clamp = it->get<double>();
    else throw DataError("config field 'clamp' has the wrong type");
  }
  detail::read_field(j, "gamma", c.loss.gamma);
  detail::read_field(j, "sigma_z", c.loss.sigma_z);
  detail::read_field(j, "hidden", c.hidden);
  detail::read_field(j, "latent_dim", c.latent_dim);
  detail::read_field(j, "alpha", c.alpha);
  detail::read_field(j, "batch_size", c.batch_size);
  detail::read_field(j, "epochs", c.epochs);
  detail::read_field(j, "lr_network", c.lr_network);
  detail::read_field(j, "lr_latent", c.lr_latent);
  detail::read_field(j, "seed", c.seed);
  detail::read_field(j, "resample_each_epoch", c.resample_each_epoch);
  detail::read_field(j, "checkpoint_every", c.checkpoint_every);
  return c;
}

inline json to_json(const ProbeConfig& c) {
  return json{{"hidden", c.hidden},          {"epochs", c.epochs},         {"learning_rate", c.learning_rate},
              {"train_fraction", c.train_fraction}, {"batch_size", c.batch_size}, {"seed", c.seed}};
}

inline ProbeConfig probe_config_from_json(const json& j) {
  detail::reject_unknown_keys(j, {"hidden", "epochs", "learning_rate", "train_fraction", "batch_size", "seed"},
                              "probe config");
  ProbeConfig c;
  detail::read_field(j, "hidden", c.hidden);
  detail::read_field(j, "epochs", c.epochs);
  detail::read_field(j, "learning_rate", c.learning_rate);
  detail::read_field(j, "train_fraction", c.train_fraction);
  detail::read_field(j, "batch_size", c.batch_size);
  detail::read_field(j, "seed", c.seed);
  return c;
}

// Synthesis specs carry their generator: "shapes" (labelled families) or
// "scattered" (mixed points, polylines and polygons).
struct SynthesisRequest {
  std::string kind = "shapes";
  SynthesisSpec spec;
};

inline json to_json(const SynthesisRequest& r) {
  const SynthesisSpec& s = r.spec;
  return json{{"kind", r.kind},
              {"classes", s.classes},
              {"count_per_class", s.count_per_class},
              {"vertex_noise", s.vertex_noise},
              {"rotation", {s.rotation_min, s.rotation_max}},
              {"scale", {s.scale_min, s.scale_max}},
              {"placement", {s.placement.min.x, s.placement.min.y, s.placement.max.x, s.placement.max.y}},
              {"overlap_fraction", s.overlap_fraction},
              {"seed", s.seed}};
}

// The seed is mandatory so that a spec file alone pins the dataset.
inline SynthesisRequest synthesis_request_from_json(const json& j) {
  detail::reject_unknown_keys(j,
                              {"kind", "classes", "count_per_class", "vertex_noise", "rotation", "scale", "placement",
                               "overlap_fraction", "seed"},
                              "synthesis spec");
  if (!j.contains("seed")) throw DataError("synthesis spec field 'seed' is required");
  SynthesisRequest r;
  SynthesisSpec& s = r.spec;
  detail::read_field(j, "kind", r.kind);
  if (r.kind != "shapes" && r.kind != "scattered")
    throw DataError("synthesis spec field 'kind' must be 'shapes' or 'scattered'");
  detail::read_field(j, "classes", s.classes);
  detail::read_field(j, "count_per_class", s.count_per_class);
  detail::read_field(j, "vertex_noise", s.vertex_noise);
  auto range = [&](const char* key, double& lo, double& hi) {
    std::vector<double> v{lo, hi};
    detail::read_field(j, key, v);
    if (v.size() != 2) throw DataError(std::string("synthesis spec field '") + key + "' must be [min, max]");
    lo = v[0];
    hi = v[1];
  };
  range("rotation", s.rotation_min, s.rotation_max);
  range("scale", s.scale_min, s.scale_max);
  std::vector<double> box{s.placement.min.x, s.placement.min.y, s.placement.max.x, s.placement.max.y};
  detail::read_field(j, "placement", box);
  if (box.size() != 4) throw DataError("synthesis spec field 'placement' must be [xmin, ymin, xmax, ymax]");
  s.placement = BBox{{box[0], box[1]}, {box[2], box[3]}};
  detail::read_field(j, "overlap_fraction", s.overlap_fraction);
  detail::read_field(j, "seed", s.seed);
  if (r.kind == "shapes")
    for (const std::string& c : s.classes) {
      try {
        (void)shape_family_from_name(c);
      } catch (const DataError&) {
        throw DataError("synthesis spec field 'classes' names unknown family '" + c + "'");
      }
    }
  try {
    s.validate();
  } catch (const DataError& e) {
    throw DataError(std::string("synthesis spec: ") + e.what());
  }
  return r;
}

inline Dataset synthesize(const SynthesisRequest& r) {
  return r.kind == "scattered" ? synthesize_scattered(r.spec) : synthesize_shapes(r.spec);
}

}  // namespace geo2vec
