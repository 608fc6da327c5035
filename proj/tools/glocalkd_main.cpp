// Command-line front end: ingest benchmark directories, generate synthetic
// corpora, train distillation models, score graphs, and run the experiment
// suites. Every command writes a reproducibility manifest before any result
// file. Exit codes: 0 success, 2 input/parse error, 3 config/compatibility
// error, 4 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "glocalkd/dataset.hpp"
#include "glocalkd/errors.hpp"
#include "glocalkd/eval.hpp"
#include "glocalkd/model.hpp"
#include "glocalkd/synth.hpp"
#include "glocalkd/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace glocalkd;

namespace {

std::string fnv1a_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "absent";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Written before any result file so a run is reproducible even if it dies.
void write_manifest(const fs::path& primary_out, const std::string& command, const json& config,
                    const fs::path& input_path, const std::vector<fs::path>& artifacts) {
  json j{{"tool", "glocalkd"},
         {"version", kVersion},
         {"command", command},
         {"config", config},
         {"input", input_path.string()},
         {"input_checksum_fnv1a", fnv1a_hex(input_path)},
         {"artifacts", json::array()}};
  for (const fs::path& p : artifacts) j["artifacts"].push_back(p.string());
  const fs::path manifest_path = primary_out.string() + ".manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw InputError("cannot write " + manifest_path.string());
  out << j.dump(2) << "\n";
}

std::vector<int> parse_dims(const std::string& spec) {
  std::vector<int> dims;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      dims.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw ConfigError("bad layer width '" + cell + "' in --dims");
    }
  }
  if (dims.empty()) throw ConfigError("--dims names no layers");
  return dims;
}

struct TrainFlags {
  TrainConfig cfg;
  std::string dims = "512,512,256";
  bool no_graph_term = false;
  bool no_node_term = false;
  bool keep_anomalies = false;
  std::string config_path;
  CLI::App* cmd = nullptr;

  void attach(CLI::App* app) {
    cmd = app;
    cmd->add_option("--lr", cfg.lr, "Learning rate")->envname("GLOCALKD_LR");
    cmd->add_option("--batch-size", cfg.batch_size, "Graphs per optimizer step");
    cmd->add_option("--epochs", cfg.epochs, "Training epochs");
    cmd->add_option("--lambda", cfg.lambda, "Weight of the node-level loss term");
    cmd->add_option("--dims", dims, "Comma-separated GCN layer widths");
    cmd->add_flag("--no-graph-term", no_graph_term, "Drop the graph-level loss term");
    cmd->add_flag("--no-node-term", no_node_term, "Drop the node-level loss term");
    cmd->add_option("--seed-target", cfg.seed_target, "Target network init seed")
        ->envname("GLOCALKD_SEED_TARGET");
    cmd->add_option("--seed-predictor", cfg.seed_predictor, "Predictor network init seed")
        ->envname("GLOCALKD_SEED_PREDICTOR");
    cmd->add_option("--seed-shuffle", cfg.seed_shuffle, "Epoch shuffle seed")
        ->envname("GLOCALKD_SEED_SHUFFLE");
    cmd->add_flag("--keep-anomalies", keep_anomalies,
                  "Keep anomalous graphs in the training set (unsupervised mode)");
    cmd->add_option("--config", config_path, "Flat key=value config file; flags override it")
        ->envname("GLOCALKD_CONFIG");
  }

  // Flat key=value file; a key is ignored when the matching flag was given
  // on the command line. Every bad key or value is reported at once.
  void apply_config_file() {
    std::ifstream in(config_path);
    if (!in) throw InputError("missing file: " + config_path);
    std::string problems;
    auto complain = [&](const std::string& msg) {
      if (!problems.empty()) problems += "; ";
      problems += msg;
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        complain("line " + std::to_string(lineno) + ": expected key=value");
        continue;
      }
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (cmd->count("--" + key) > 0) continue;  // flag wins
      try {
        if (key == "lr") cfg.lr = std::stod(value);
        else if (key == "batch-size") cfg.batch_size = std::stoi(value);
        else if (key == "epochs") cfg.epochs = std::stoi(value);
        else if (key == "lambda") cfg.lambda = std::stod(value);
        else if (key == "dims") dims = value;
        else if (key == "seed-target") cfg.seed_target = std::stoull(value);
        else if (key == "seed-predictor") cfg.seed_predictor = std::stoull(value);
        else if (key == "seed-shuffle") cfg.seed_shuffle = std::stoull(value);
        else if (key == "no-graph-term") no_graph_term = value == "1" || value == "true";
        else if (key == "no-node-term") no_node_term = value == "1" || value == "true";
        else if (key == "keep-anomalies") keep_anomalies = value == "1" || value == "true";
        else complain("unknown key '" + key + "'");
      } catch (const std::exception&) {
        complain("bad value for '" + key + "': " + value);
      }
    }
    if (!problems.empty()) throw ConfigError("config file " + config_path + ": " + problems);
  }

  TrainConfig resolve() {
    if (!config_path.empty()) apply_config_file();
    cfg.layer_dims = parse_dims(dims);
    cfg.use_graph_term = !no_graph_term;
    cfg.use_node_term = !no_node_term;
    cfg.validate();
    return cfg;
  }

  json snapshot(const TrainConfig& resolved) const {
    return {{"lr", resolved.lr},
            {"batch_size", resolved.batch_size},
            {"epochs", resolved.epochs},
            {"lambda", resolved.lambda},
            {"layer_dims", resolved.layer_dims},
            {"use_graph_term", resolved.use_graph_term},
            {"use_node_term", resolved.use_node_term},
            {"seed_target", resolved.seed_target},
            {"seed_predictor", resolved.seed_predictor},
            {"seed_shuffle", resolved.seed_shuffle},
            {"keep_anomalies", keep_anomalies}};
  }
};

void print_summary(const GraphDataset& ds) {
  double nodes = 0.0, edges = 0.0;
  for (const Graph& g : ds.graphs) {
    nodes += g.num_nodes;
    edges += g.num_edges();
  }
  const int anomalies = ds.count_label(1);
  std::cout << ds.name << ": " << ds.size() << " graphs, mean nodes " << nodes / ds.size()
            << ", mean edges " << edges / ds.size() << ", anomaly rate "
            << static_cast<double>(anomalies) / ds.size() << " (" << anomalies << " anomalous), "
            << to_string(ds.feature_kind) << "\n";
}

GraphDataset training_view(const GraphDataset& ds, bool keep_anomalies) {
  if (keep_anomalies) return ds;
  GraphDataset out;
  out.name = ds.name;
  out.feature_kind = ds.feature_kind;
  for (int i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] == 0) {
      out.graphs.push_back(ds.graphs[i]);
      out.labels.push_back(0);
    }
  }
  return out;
}

void cmd_ingest(const std::string& dir, const std::string& out, std::optional<int> anomaly_class) {
  GraphDataset ds = parse_benchmark_dir(dir);
  ds = to_anomaly_labels(ds, anomaly_class);
  json config{{"anomaly_class", anomaly_class ? json(*anomaly_class) : json(nullptr)}};
  write_manifest(out, "ingest", config, dir, {out});
  write_snapshot(fs::path(out), ds);
  print_summary(ds);
}

void cmd_synth(const std::string& spec_path, std::uint64_t seed, const std::string& out) {
  const SynthSpec spec = load_synth_spec(spec_path);
  const GraphDataset ds = synth_corpus(spec, seed);
  json config{{"seed", seed}};
  {
    std::ifstream spec_in(spec_path);
    json spec_json;
    spec_in >> spec_json;
    config["spec"] = spec_json;
  }
  write_manifest(out, "synth", config, spec_path, {out});
  write_snapshot(fs::path(out), ds);
  print_summary(ds);
}

void cmd_train(const std::string& dataset_path, const std::string& out, const std::string& trace,
               TrainFlags& flags) {
  const TrainConfig cfg = flags.resolve();
  const GraphDataset full = read_snapshot(fs::path(dataset_path));
  const GraphDataset train_set = training_view(full, flags.keep_anomalies);

  const fs::path trace_path = trace.empty() ? fs::path(out + ".trace.csv") : fs::path(trace);
  write_manifest(out, "train", flags.snapshot(cfg), dataset_path, {out, trace_path});

  const TrainResult result = train(train_set, cfg);
  save_model(out, result.model);

  std::ofstream trace_out(trace_path);
  if (!trace_out) throw InputError("cannot write " + trace_path.string());
  trace_out << "epoch,loss,graph_loss,node_loss\n";
  char buf[160];
  for (const TraceRow& row : result.trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", row.epoch, row.loss, row.graph_loss,
                  row.node_loss);
    trace_out << buf;
  }
  std::cout << "trained on " << train_set.size() << " graphs for " << cfg.epochs
            << " epochs; final loss " << result.trace.back().loss << "; model " << out << "\n";
}

void cmd_score(const std::string& model_path, const std::string& dataset_path,
               const std::string& out) {
  const DistillModel model = load_model(model_path);
  const GraphDataset ds = read_snapshot(fs::path(dataset_path));
  if (model.feature_kind != ds.feature_kind) {
    throw ConfigError("model featurizes by " + to_string(model.feature_kind) + " but dataset " +
                      ds.name + " is " + to_string(ds.feature_kind));
  }

  json config{{"model", model_path}};
  write_manifest(out, "score", config, dataset_path, {out});

  std::vector<GraphScore> rows;
  rows.reserve(ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    rows.push_back({i,
                    score_variant(model, ds.graphs[i], model.use_graph_term, model.use_node_term),
                    ds.labels[i]});
  }
  const bool with_auc = ds.count_label(0) > 0 && ds.count_label(1) > 0;

  std::ofstream csv(out);
  if (!csv) throw InputError("cannot write " + out);
  write_scores_csv(csv, rows, with_auc);
  std::cout << "scored " << ds.size() << " graphs";
  if (with_auc) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (const GraphScore& r : rows) {
      scores.push_back(r.score);
      labels.push_back(r.label);
    }
    std::cout << ", auc " << auc(scores, labels);
  }
  std::cout << "; wrote " << out << "\n";
}

void cmd_experiment(const std::string& kind_name, const std::string& dataset_path,
                    const std::string& out_prefix, const std::string& grid_path,
                    const std::string& split_file, int k, std::uint64_t fold_seed, int jobs,
                    TrainFlags& flags) {
  ExperimentGrid grid;
  grid.kind = grid_kind_from_string(kind_name);
  grid.base = flags.resolve();
  grid.cv.k = k;
  grid.cv.fold_seed = fold_seed;
  grid.cv.jobs = jobs;
  if (!grid_path.empty()) {
    std::ifstream in(grid_path);
    if (!in) throw InputError("missing file: " + grid_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InputError("bad grid file " + grid_path + ": " + e.what());
    }
    if (j.contains("axis")) grid.axis = j["axis"].get<std::vector<double>>();
    if (j.contains("k")) grid.cv.k = j["k"].get<int>();
    if (j.contains("fold_seed")) grid.cv.fold_seed = j["fold_seed"].get<std::uint64_t>();
  }

  const GraphDataset ds = read_snapshot(fs::path(dataset_path));
  const fs::path csv_path = out_prefix + ".csv";
  const fs::path json_path = out_prefix + ".json";

  json config = flags.snapshot(grid.base);
  config["kind"] = kind_name;
  config["k"] = grid.cv.k;
  config["fold_seed"] = grid.cv.fold_seed;
  config["jobs"] = jobs;
  config["axis"] = grid.axis;
  config["split_file"] = split_file;
  write_manifest(out_prefix, "experiment", config, dataset_path, {csv_path, json_path});

  GridResult result;
  if (!split_file.empty()) {
    if (grid.kind != GridKind::cv) {
      throw ConfigError("--split-file is only valid with kind=cv");
    }
    const CvSummary summary = run_fixed_split(ds, grid.base, split_file);
    result.kind = GridKind::cv;
    for (const ScoreReport& fold : summary.folds) {
      result.rows.push_back({"split", 1.0, fold.fold, fold.auc, fold.train_size,
                             static_cast<int>(fold.rows.size())});
    }
    result.aggregates.push_back(
        {"split", 1.0, summary.mean_auc, summary.std_auc, static_cast<int>(summary.folds.size())});
  } else {
    result = run_grid(ds, grid);
  }

  std::ofstream csv(csv_path);
  if (!csv) throw InputError("cannot write " + csv_path.string());
  write_grid_csv(csv, result);
  std::ofstream js(json_path);
  if (!js) throw InputError("cannot write " + json_path.string());
  write_grid_json(js, result, grid, ds);

  for (const GridAggregate& agg : result.aggregates) {
    std::cout << kind_name << " " << agg.axis_label << ": auc " << agg.mean_auc << " +/- "
              << agg.std_auc << " over " << agg.folds << " fold(s)\n";
  }
  std::cout << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GLocalKD: graph-level anomaly detection by glocal knowledge distillation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert a benchmark directory into a snapshot");
  std::string ingest_dir, ingest_out;
  int anomaly_class = -1;
  bool have_anomaly_class = false;
  ingest->add_option("dataset_dir", ingest_dir, "Benchmark directory")->required();
  ingest->add_option("--out", ingest_out, "Snapshot path")->required()->envname("GLOCALKD_OUT");
  ingest->add_option("--anomaly-class", anomaly_class,
                     "Class id to treat as anomalous (default: minority class)")
      ->trigger_on_parse()
      ->each([&](const std::string&) { have_anomaly_class = true; });

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus snapshot");
  std::string synth_spec, synth_out;
  std::uint64_t synth_seed = 7;
  synth->add_option("--spec", synth_spec, "Synth spec JSON file")->required();
  synth->add_option("--seed", synth_seed, "Corpus seed")->envname("GLOCALKD_SEED");
  synth->add_option("--out", synth_out, "Snapshot path")->required()->envname("GLOCALKD_OUT");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a distillation model on a snapshot");
  std::string train_dataset, train_out, train_trace;
  TrainFlags train_flags;
  train_cmd->add_option("dataset", train_dataset, "Dataset snapshot")->required();
  train_cmd->add_option("--out", train_out, "Model path")->required()->envname("GLOCALKD_OUT");
  train_cmd->add_option("--trace", train_trace, "Loss trace CSV (default <out>.trace.csv)");
  train_flags.attach(train_cmd);

  // score
  auto* score_cmd = app.add_subcommand("score", "Score every graph in a snapshot");
  std::string score_model, score_dataset, score_out;
  score_cmd->add_option("model", score_model, "Model file")->required();
  score_cmd->add_option("dataset", score_dataset, "Dataset snapshot")->required();
  score_cmd->add_option("--out", score_out, "Score CSV path")->required()->envname("GLOCALKD_OUT");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a cross-validated experiment suite");
  std::string exp_kind, exp_dataset, exp_out, exp_grid, exp_split;
  int exp_k = 5, exp_jobs = 1;
  std::uint64_t exp_fold_seed = 17;
  TrainFlags exp_flags;
  exp->add_option("kind", exp_kind,
                  "cv | sample_efficiency | contamination | dim_sweep | depth_sweep | ablation")
      ->required();
  exp->add_option("dataset", exp_dataset, "Dataset snapshot")->required();
  exp->add_option("--out", exp_out, "Report path prefix")->required()->envname("GLOCALKD_OUT");
  exp->add_option("--grid", exp_grid, "Grid JSON file (axis, k, fold_seed)");
  exp->add_option("--split-file", exp_split, "Fixed train/test split file (kind=cv only)");
  exp->add_option("--k", exp_k, "Fold count");
  exp->add_option("--fold-seed", exp_fold_seed, "Fold assignment seed");
  exp->add_option("--jobs", exp_jobs, "Max parallel fold workers")->envname("GLOCALKD_JOBS");
  exp_flags.attach(exp);

  ingest->callback([&] {
    cmd_ingest(ingest_dir, ingest_out,
               have_anomaly_class ? std::optional<int>(anomaly_class) : std::nullopt);
  });
  synth->callback([&] { cmd_synth(synth_spec, synth_seed, synth_out); });
  train_cmd->callback([&] { cmd_train(train_dataset, train_out, train_trace, train_flags); });
  score_cmd->callback([&] { cmd_score(score_model, score_dataset, score_out); });
  exp->callback([&] {
    cmd_experiment(exp_kind, exp_dataset, exp_out, exp_grid, exp_split, exp_k, exp_fold_seed,
                   exp_jobs, exp_flags);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
