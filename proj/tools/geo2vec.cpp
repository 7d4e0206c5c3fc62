// geo2vec command-line tool: synth, train, eval, render.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geo2vec/config.hpp"
#include "geo2vec/evaluation.hpp"
#include "geo2vec/geometry.hpp"
#include "geo2vec/ingest.hpp"
#include "geo2vec/io.hpp"
#include "geo2vec/training.hpp"

namespace fs = std::filesystem;
using namespace geo2vec;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in '") + path + "'", e.byte);
  }
}

void write_config_echo(const std::string& path, json config) {
  write_file(path, config.dump(2) + "\n");
}

// Writes to a sibling temporary and renames, so a crash never leaves a torn file.
void write_atomically(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  write_file(tmp, bytes);
  fs::rename(tmp, path);
}

Dataset load_dataset(const std::string& path) { return parse_geojson(read_file(path)); }

PairType parse_pair_type(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "pt-pl") return PairType::PtPl;
  if (s == "pt-pg") return PairType::PtPg;
  if (s == "pl-pl") return PairType::PlPl;
  if (s == "pl-pg") return PairType::PlPg;
  if (s == "pg-pg") return PairType::PgPg;
  throw UsageError("unknown pair type '" + s + "' (expected pt-pl, pt-pg, pl-pl, pl-pg or pg-pg)");
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string spec;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  const SynthesisRequest req = synthesis_request_from_json(read_json_file(a.spec));
  const Dataset ds = synthesize(req);
  write_file(a.out, serialize_geojson(ds));
  write_config_echo(a.out + ".config.json", to_json(req));
  std::cout << "wrote " << ds.size() << " features to " << a.out << "\n";
  return 0;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string out;
  std::string mode = "shape";
  std::string config;
  std::string resume;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<int> n_axis;
  std::optional<std::size_t> batch;
  std::optional<int> epochs;
  std::optional<int> latent_dim;
  std::optional<int> freq_count;
  bool no_rotation_invariant = false;
};

TrainConfig resolve_train_config(const TrainArgs& a) {
  const Mode mode = detail::parse_mode(a.mode);
  json j = a.config.empty() ? json::object() : read_json_file(a.config);
  if (!j.is_object()) throw DataError("train config must be a JSON object");
  if (j.contains("mode") && j["mode"] != a.mode)
    throw UsageError("config mode '" + j["mode"].dump() + "' conflicts with --mode " + a.mode);
  j["mode"] = a.mode;
  if (!a.seed && !j.contains("seed")) throw UsageError("a seed is required (--seed or config 'seed')");
  TrainConfig cfg = train_config_from_json(j, mode);
  if (a.seed) cfg.seed = *a.seed;
  if (a.epsilon) cfg.sampling.epsilon = *a.epsilon;
  if (a.n_axis) cfg.sampling.n_axis = *a.n_axis;
  if (a.batch) cfg.batch_size = *a.batch;
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.latent_dim) cfg.latent_dim = *a.latent_dim;
  if (a.freq_count) cfg.freq_count = *a.freq_count;
  if (a.no_rotation_invariant) cfg.rotation_invariant = false;
  cfg.validate();
  return cfg;
}

int run_train(const TrainArgs& a) {
  const TrainConfig cfg = resolve_train_config(a);
  const Dataset data = load_dataset(a.dataset);
  fs::create_directories(a.out);
  const std::string ck_path = (fs::path(a.out) / "checkpoint.g2v").string();
  const std::string emb_path = (fs::path(a.out) / "embeddings.g2ve").string();
  const std::string loss_path = (fs::path(a.out) / "loss.csv").string();

  json echo = to_json(cfg);
  echo["dataset"] = a.dataset;
  if (!a.resume.empty()) echo["resume"] = a.resume;
  write_config_echo((fs::path(a.out) / "config.json").string(), echo);

  std::optional<Checkpoint> resume;
  if (!a.resume.empty()) resume = load_checkpoint(a.resume, cfg.mode);

  auto on_epoch = [&](const Checkpoint& ck, const std::vector<LossRecord>& history) {
    write_atomically(ck_path, serialize_checkpoint(ck));
    write_atomically(loss_path, loss_history_csv(history));
  };
  const TrainResult result = train(data, cfg, resume ? &*resume : nullptr, on_epoch);

  write_atomically(ck_path, serialize_checkpoint(result.checkpoint));
  write_atomically(loss_path, loss_history_csv(result.history));
  const EmbeddingSet emb =
      cfg.mode == Mode::Shape ? complete_shape_embeddings(data, result.embeddings) : result.embeddings;
  write_atomically(emb_path, serialize_embeddings(emb));
  std::cout << "trained " << to_string(cfg.mode) << " model on " << data.size() << " entities for "
            << result.checkpoint.epochs_completed << " epochs; final loss "
            << (result.history.empty() ? 0.0 : result.history.back().loss) << "\n";
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string dataset;
  std::vector<std::string> embeddings;
  std::string task;
  std::string out;
  std::string config;
  std::string pair_type = "pt-pg";
  std::size_t pairs = 2000;
  std::optional<std::uint64_t> seed;
};

int run_eval(const EvalArgs& a) {
  static const std::vector<std::string> tasks{"shape", "edge", "length", "distance", "topology"};
  if (std::find(tasks.begin(), tasks.end(), a.task) == tasks.end())
    throw UsageError("unknown task '" + a.task + "' (expected shape, edge, length, distance or topology)");
  json j = a.config.empty() ? json::object() : read_json_file(a.config);
  if (!a.seed && !(j.is_object() && j.contains("seed")))
    throw UsageError("a seed is required (--seed or config 'seed')");
  ProbeConfig probe = probe_config_from_json(j);
  if (a.seed) probe.seed = *a.seed;
  probe.validate();
  const PairType pair_type = parse_pair_type(a.pair_type);

  const Dataset data = load_dataset(a.dataset);
  if (a.embeddings.empty() || a.embeddings.size() > 2)
    throw UsageError("give one embedding file, or two (location then shape) for the length task");
  std::vector<EmbeddingSet> sets;
  for (const std::string& p : a.embeddings) sets.push_back(load_embeddings(p));
  if (sets.size() == 2 && a.task != "length") throw UsageError("two embedding files are only used by the length task");
  const EmbeddingSet emb = sets.size() == 2 ? combine(sets[0], sets[1]) : sets[0];

  ProbeReport report;
  json echo{{"dataset", a.dataset}, {"embeddings", a.embeddings}, {"task", a.task}, {"probe", to_json(probe)}};
  if (a.task == "shape") {
    report = task_shape_classification(data, emb, probe);
  } else if (a.task == "edge") {
    report = task_edge_count(data, emb, probe);
  } else if (a.task == "length") {
    report = task_line_length(data, emb, probe);
  } else if (a.task == "distance") {
    report = task_distance(emb, make_distance_pairs(data, a.pairs, probe.seed), probe);
    echo["pairs"] = a.pairs;
  } else {
    report = task_topology(emb, make_topology_pairs(data, pair_type, a.pairs, probe.seed), probe);
    echo["pairs"] = a.pairs;
    echo["pair_type"] = to_string(pair_type);
  }
  const std::string csv = metrics_csv_header() + metrics_csv_row(report);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_file(a.out, csv);
    write_config_echo(a.out + ".config.json", echo);
  }
  std::cerr << summary_table({report});
  return 0;
}

// --- render -----------------------------------------------------------------

struct RenderArgs {
  std::string truth;
  std::string learned;
  std::string id;
  std::string out;
  std::string mode = "shape";
  int resolution = 64;
  std::optional<double> range;
};

// Fraction of the domain added on each side so boundary-touching shapes show
// an outside margin.
constexpr double kRenderMargin = 0.1;

BBox render_window(const BBox& domain) {
  const double dx = kRenderMargin * domain.width(), dy = kRenderMargin * domain.height();
  return BBox{{domain.min.x - dx, domain.min.y - dy}, {domain.max.x + dx, domain.max.y + dy}};
}

std::string to_pgm(const std::vector<double>& field, int res, double range) {
  std::string out = "P5\n" + std::to_string(res) + " " + std::to_string(res) + "\n255\n";
  for (double v : field) {
    const double px = std::clamp(std::round(128.0 + 127.0 * v / range), 0.0, 255.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(px)));
  }
  return out;
}

int run_render(const RenderArgs& a) {
  if (a.truth.empty() == a.learned.empty()) throw UsageError("give exactly one of --truth or --learned");
  if (a.resolution < 2) throw UsageError("resolution must be >= 2");
  std::vector<double> field;
  double range = 1.0;
  json echo{{"id", a.id}, {"resolution", a.resolution}};
  if (!a.learned.empty()) {
    const Checkpoint ck = load_checkpoint(a.learned);
    field = reconstruct_field(ck, a.id, a.resolution, render_window(ck.domain));
    range = ck.loss.clamp.value_or(1.0);
    echo["learned"] = a.learned;
    echo["mode"] = to_string(ck.mode);
  } else {
    const Dataset data = load_dataset(a.truth);
    const Mode mode = detail::parse_mode(a.mode);
    if (!data.contains(a.id)) throw DataError("unknown entity id '" + a.id + "'");
    GeoEntity e;
    BBox domain = BBox::canonical();
    if (mode == Mode::Shape) {
      e = normalize_shape(data.at(a.id)).entity;
      range = LossConfig::for_mode(Mode::Shape).clamp.value_or(1.0);
    } else {
      const NormalizedDataset nd = normalize_dataset(data.entities());
      e = nd.entities[data.index_of(a.id)];
      domain = bbox(std::span<const GeoEntity>(nd.entities));
    }
    for (Coord p : grid_points(render_window(domain), a.resolution)) field.push_back(sdf(p, e));
    echo["truth"] = a.truth;
    echo["mode"] = a.mode;
  }
  if (a.range) range = *a.range;
  if (!(range > 0.0)) throw UsageError("range must be > 0");
  echo["range"] = range;
  write_file(a.out, to_pgm(field, a.resolution, range));
  write_config_echo(a.out + ".config.json", echo);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geo2vec: signed-distance embeddings of vector geometry"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic GeoJSON dataset from a JSON spec");
  synth->add_option("spec", sa.spec, "Synthesis spec (JSON)")->required();
  synth->add_option("--out", sa.out, "Output GeoJSON path")->required();

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train shape or location embeddings");
  tr->add_option("dataset", ta.dataset, "GeoJSON dataset")->required();
  tr->add_option("--out", ta.out, "Output directory (checkpoint, embeddings, loss history, config echo)")->required();
  tr->add_option("--mode", ta.mode, "shape or location")->check(CLI::IsMember({"shape", "location"}));
  tr->add_option("--config", ta.config, "Train config (JSON); flags override it");
  tr->add_option("--resume", ta.resume, "Continue from a checkpoint written by an earlier run");
  tr->add_option("--seed", ta.seed, "Random seed (required here or in the config)");
  tr->add_option("--epsilon", ta.epsilon, "Sample density: samples per canonical unit");
  tr->add_option("--n-axis", ta.n_axis, "Uniform grid samples per axis");
  tr->add_option("--batch", ta.batch, "Mini-batch size");
  tr->add_option("--epochs", ta.epochs, "Passes over the pooled samples");
  tr->add_option("--latent-dim", ta.latent_dim, "Embedding dimension");
  tr->add_option("--freq-count", ta.freq_count, "Positional-encoding frequencies per component");
  tr->add_flag("--no-rotation-invariant", ta.no_rotation_invariant, "Encode (x, y) only, without the radial block");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Probe frozen embeddings on a downstream task");
  ev->add_option("dataset", ea.dataset, "GeoJSON dataset the embeddings were trained on")->required();
  ev->add_option("--embeddings", ea.embeddings, "Embedding file; for length give location then shape, or one combined file")
      ->required();
  ev->add_option("--task", ea.task, "shape, edge, length, distance or topology")->required();
  ev->add_option("--out", ea.out, "Metrics CSV path (stdout when omitted)");
  ev->add_option("--config", ea.config, "Probe config (JSON)");
  ev->add_option("--pair-type", ea.pair_type, "Topology pair type: pt-pl, pt-pg, pl-pl, pl-pg or pg-pg");
  ev->add_option("--pairs", ea.pairs, "Number of pairs for distance and topology tasks")->check(CLI::PositiveNumber);
  ev->add_option("--seed", ea.seed, "Random seed (required here or in the config)");

  RenderArgs ra;
  auto* rd = app.add_subcommand("render", "Render a signed distance field as a binary PGM over the domain padded 10% per side (zero level at gray 128)");
  rd->add_option("--truth", ra.truth, "Dataset to render the exact field from");
  rd->add_option("--learned", ra.learned, "Checkpoint to render the network's field from");
  rd->add_option("--id", ra.id, "Entity id")->required();
  rd->add_option("--resolution", ra.resolution, "Pixels per side (>= 2)");
  rd->add_option("--mode", ra.mode, "Space for --truth: shape (per-entity) or location (dataset)")
      ->check(CLI::IsMember({"shape", "location"}));
  rd->add_option("--range", ra.range, "Distance mapped to full black or white (default: the loss clamp, else 1)");
  rd->add_option("--out", ra.out, "Output PGM path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth) return run_synth(sa);
    if (*tr) return run_train(ta);
    if (*ev) return run_eval(ea);
    if (*rd) return run_render(ra);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
