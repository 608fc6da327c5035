#include "glocalkd/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "glocalkd/errors.hpp"
#include "glocalkd/rng.hpp"

namespace glocalkd {

using json = nlohmann::json;

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw ConfigError("auc: " + std::to_string(scores.size()) + " scores vs " +
                      std::to_string(labels.size()) + " labels");
  }
  const long n = static_cast<long>(scores.size());
  long positives = 0;
  for (int l : labels) positives += l;
  const long negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw ConfigError("auc needs both classes present");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericError("auc: non-finite score");
  }

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return scores[a] < scores[b]; });

  // Average ranks across tie blocks, then the Mann-Whitney statistic.
  double positive_rank_sum = 0.0;
  long i = 0;
  while (i < n) {
    long j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (long t = i; t < j; ++t) {
      if (labels[idx[t]] == 1) positive_rank_sum += avg_rank;
    }
    i = j;
  }
  const double u = positive_rank_sum - 0.5 * static_cast<double>(positives) * (positives + 1);
  return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

namespace {

struct FoldJob {
  GraphDataset train;
  std::vector<int> test_ids;  // indices into the full dataset
};

ScoreReport run_fold(const GraphDataset& ds, const TrainConfig& cfg, const FoldJob& job,
                     int fold) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult trained = train(job.train, cfg);

  ScoreReport report;
  report.fold = fold;
  report.train_size = job.train.size();
  std::vector<double> scores;
  std::vector<int> labels;
  for (int id : job.test_ids) {
    const double s = score_variant(trained.model, ds.graphs[id], trained.model.use_graph_term,
                                   trained.model.use_node_term);
    report.rows.push_back({id, s, ds.labels[id]});
    scores.push_back(s);
    labels.push_back(ds.labels[id]);
  }
  report.auc = auc(scores, labels);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

void finalize(CvSummary& summary) {
  double sum = 0.0;
  for (const auto& f : summary.folds) sum += f.auc;
  summary.mean_auc = sum / summary.folds.size();
  if (summary.folds.size() > 1) {
    double sq = 0.0;
    for (const auto& f : summary.folds) sq += (f.auc - summary.mean_auc) * (f.auc - summary.mean_auc);
    summary.std_auc = std::sqrt(sq / (summary.folds.size() - 1));
  }
}

}  // namespace

CvSummary run_cv(const GraphDataset& ds, const TrainConfig& cfg, const CvOptions& opts) {
  if (ds.count_label(1) == 0 || ds.count_label(0) == 0) {
    throw ConfigError("cross-validation needs both classes in the dataset");
  }
  const FoldPlan plan = stratified_kfold(ds, opts.k, opts.fold_seed);

  std::vector<FoldJob> jobs(opts.k);
  std::vector<TrainConfig> configs(opts.k, cfg);
  for (int fold = 0; fold < opts.k; ++fold) {
    FoldJob& job = jobs[fold];
    for (int i = 0; i < ds.size(); ++i) {
      if (plan.assignments[i] == fold) job.test_ids.push_back(i);
    }
    GraphDataset normals = select_fold(ds, plan, fold, /*in_fold=*/false, /*normals_only=*/true);
    if (opts.subsample_fraction < 1.0) {
      normals = subsample_training(normals, opts.subsample_fraction,
                                   derive_seed(opts.fold_seed, 1000 + fold));
    }
    if (opts.contamination_rate >= 0.0) {
      GraphDataset pool;
      pool.name = ds.name;
      pool.feature_kind = ds.feature_kind;
      for (int i = 0; i < ds.size(); ++i) {
        if (plan.assignments[i] != fold && ds.labels[i] == 1) {
          pool.graphs.push_back(ds.graphs[i]);
          pool.labels.push_back(1);
        }
      }
      normals = inject_contamination(normals, pool, opts.contamination_rate,
                                     derive_seed(opts.fold_seed, 2000 + fold));
    }
    job.train = std::move(normals);

    TrainConfig& fold_cfg = configs[fold];
    fold_cfg.seed_target = derive_seed(cfg.seed_target, fold);
    fold_cfg.seed_predictor = derive_seed(cfg.seed_predictor, fold);
    fold_cfg.seed_shuffle = derive_seed(cfg.seed_shuffle, fold);
  }

  CvSummary summary;
  summary.folds.resize(opts.k);
  if (opts.jobs > 1) {
    // Folds are independent jobs; results land in fold order either way.
    std::vector<std::future<ScoreReport>> pending(opts.k);
    int launched = 0, collected = 0;
    while (collected < opts.k) {
      while (launched < opts.k && launched - collected < opts.jobs) {
        pending[launched] = std::async(std::launch::async, run_fold, std::cref(ds),
                                       std::cref(configs[launched]), std::cref(jobs[launched]),
                                       launched);
        ++launched;
      }
      summary.folds[collected] = pending[collected].get();
      ++collected;
    }
  } else {
    for (int fold = 0; fold < opts.k; ++fold) {
      summary.folds[fold] = run_fold(ds, configs[fold], jobs[fold], fold);
    }
  }
  finalize(summary);
  return summary;
}

CvSummary run_fixed_split(const GraphDataset& ds, const TrainConfig& cfg,
                          const std::filesystem::path& split_file) {
  std::ifstream in(split_file);
  if (!in) throw InputError("missing file: " + split_file.string());

  std::vector<int> role(ds.size(), -1);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int id;
    std::string kind;
    if (!(ls >> id >> kind) || (kind != "train" && kind != "test") || id < 0 || id >= ds.size()) {
      throw InputError(split_file.string() + ":" + std::to_string(lineno) +
                       ": expected '<index> train|test'");
    }
    role[id] = kind == "train" ? 0 : 1;
  }
  for (int i = 0; i < ds.size(); ++i) {
    if (role[i] < 0) {
      throw InputError(split_file.string() + ": graph " + std::to_string(i) + " unassigned");
    }
  }

  FoldJob job;
  job.train.name = ds.name;
  job.train.feature_kind = ds.feature_kind;
  for (int i = 0; i < ds.size(); ++i) {
    if (role[i] == 0 && ds.labels[i] == 0) {
      job.train.graphs.push_back(ds.graphs[i]);
      job.train.labels.push_back(0);
    } else if (role[i] == 1) {
      job.test_ids.push_back(i);
    }
  }

  CvSummary summary;
  summary.folds.push_back(run_fold(ds, cfg, job, 0));
  finalize(summary);
  return summary;
}

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::cv: return "cv";
    case GridKind::sample_efficiency: return "sample_efficiency";
    case GridKind::contamination: return "contamination";
    case GridKind::dim_sweep: return "dim_sweep";
    case GridKind::depth_sweep: return "depth_sweep";
    case GridKind::ablation: return "ablation";
  }
  return "cv";
}

GridKind grid_kind_from_string(const std::string& s) {
  if (s == "cv") return GridKind::cv;
  if (s == "sample_efficiency") return GridKind::sample_efficiency;
  if (s == "contamination") return GridKind::contamination;
  if (s == "dim_sweep") return GridKind::dim_sweep;
  if (s == "depth_sweep") return GridKind::depth_sweep;
  if (s == "ablation") return GridKind::ablation;
  throw ConfigError("unknown experiment kind: " + s);
}

std::vector<double> default_axis(GridKind kind) {
  switch (kind) {
    case GridKind::cv: return {1.0};
    case GridKind::sample_efficiency: return {0.05, 0.25, 0.5, 0.75, 1.0};
    case GridKind::contamination: return {0.0, 0.04, 0.08, 0.16};
    case GridKind::dim_sweep: return {32, 64, 128, 256, 512};
    case GridKind::depth_sweep: return {1, 2, 3, 5};
    case GridKind::ablation: return {0, 1, 2};  // full, w/o node term, w/o graph term
  }
  return {};
}

namespace {

std::string fmt_axis(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void check_axis(GridKind kind, double v) {
  switch (kind) {
    case GridKind::cv:
      break;
    case GridKind::sample_efficiency:
      if (v <= 0.0 || v > 1.0) {
        throw ConfigError("invalid training fraction " + fmt_axis(v) + ", need (0, 1]");
      }
      break;
    case GridKind::contamination:
      if (v < 0.0 || v > 0.5) {
        throw ConfigError("invalid contamination rate " + fmt_axis(v) + ", need [0, 0.5]");
      }
      break;
    case GridKind::dim_sweep:
    case GridKind::depth_sweep:
      if (v < 1.0 || v != std::floor(v)) {
        throw ConfigError("invalid " + to_string(kind) + " value " + fmt_axis(v) +
                          ", need a positive integer");
      }
      break;
    case GridKind::ablation:
      if (v != 0.0 && v != 1.0 && v != 2.0) {
        throw ConfigError("invalid ablation variant " + fmt_axis(v) + ", need 0, 1 or 2");
      }
      break;
  }
}

std::string axis_label(GridKind kind, double v) {
  switch (kind) {
    case GridKind::cv: return "cv";
    case GridKind::sample_efficiency: return fmt_axis(v);
    case GridKind::contamination: return fmt_axis(v);
    case GridKind::dim_sweep: return fmt_axis(v);
    case GridKind::depth_sweep: return fmt_axis(v);
    case GridKind::ablation:
      return v == 0.0 ? "full" : (v == 1.0 ? "wo_node_term" : "wo_graph_term");
  }
  return fmt_axis(v);
}

}  // namespace

GridResult run_grid(const GraphDataset& ds, const ExperimentGrid& grid) {
  const std::vector<double> axis = grid.axis.empty() ? default_axis(grid.kind) : grid.axis;
  for (double v : axis) check_axis(grid.kind, v);

  GridResult result;
  result.kind = grid.kind;
  for (double v : axis) {
    TrainConfig cfg = grid.base;
    CvOptions opts = grid.cv;
    switch (grid.kind) {
      case GridKind::cv:
        break;
      case GridKind::sample_efficiency:
        opts.subsample_fraction = v;
        break;
      case GridKind::contamination:
        opts.contamination_rate = v;
        break;
      case GridKind::dim_sweep:
        cfg.layer_dims.back() = static_cast<int>(v);
        break;
      case GridKind::depth_sweep: {
        const int depth = static_cast<int>(v);
        const int hidden = cfg.layer_dims.front();
        const int output = cfg.layer_dims.back();
        cfg.layer_dims.assign(depth - 1, hidden);
        cfg.layer_dims.push_back(output);
        break;
      }
      case GridKind::ablation:
        cfg.use_graph_term = v != 2.0;
        cfg.use_node_term = v != 1.0;
        break;
    }

    const CvSummary summary = run_cv(ds, cfg, opts);
    const std::string label = axis_label(grid.kind, v);
    for (const ScoreReport& fold : summary.folds) {
      result.rows.push_back({label, v, fold.fold, fold.auc, fold.train_size,
                             static_cast<int>(fold.rows.size())});
    }
    result.aggregates.push_back(
        {label, v, summary.mean_auc, summary.std_auc, static_cast<int>(summary.folds.size())});
  }
  return result;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_grid_csv(std::ostream& out, const GridResult& result) {
  out << "kind,axis,fold,auc,auc_std,n_train,n_test\n";
  const std::string kind = to_string(result.kind);
  for (const GridRow& row : result.rows) {
    out << kind << "," << row.axis_label << "," << row.fold << "," << fmt_double(row.auc) << ",,"
        << row.train_size << "," << row.test_size << "\n";
  }
  for (const GridAggregate& agg : result.aggregates) {
    out << kind << "," << agg.axis_label << ",agg," << fmt_double(agg.mean_auc) << ","
        << fmt_double(agg.std_auc) << ",,\n";
  }
}

void write_grid_json(std::ostream& out, const GridResult& result, const ExperimentGrid& grid,
                     const GraphDataset& ds) {
  json axes = json::array();
  for (const GridAggregate& agg : result.aggregates) {
    json folds = json::array();
    for (const GridRow& row : result.rows) {
      if (row.axis_label == agg.axis_label) folds.push_back(row.auc);
    }
    axes.push_back({{"axis", agg.axis_label},
                    {"value", agg.axis_value},
                    {"mean_auc", agg.mean_auc},
                    {"std_auc", agg.std_auc},
                    {"fold_aucs", folds}});
  }
  const json j{
      {"kind", to_string(result.kind)},
      {"dataset", {{"name", ds.name}, {"graphs", ds.size()}, {"anomalies", ds.count_label(1)}}},
      {"config",
       {{"lr", grid.base.lr},
        {"batch_size", grid.base.batch_size},
        {"epochs", grid.base.epochs},
        {"lambda", grid.base.lambda},
        {"layer_dims", grid.base.layer_dims},
        {"use_graph_term", grid.base.use_graph_term},
        {"use_node_term", grid.base.use_node_term}}},
      {"seeds",
       {{"target", grid.base.seed_target},
        {"predictor", grid.base.seed_predictor},
        {"shuffle", grid.base.seed_shuffle},
        {"fold", grid.cv.fold_seed}}},
      {"k", grid.cv.k},
      {"results", axes}};
  out << j.dump(2) << "\n";
}

void write_scores_csv(std::ostream& out, const std::vector<GraphScore>& rows, bool with_auc) {
  out << "id,score,label\n";
  std::vector<double> scores;
  std::vector<int> labels;
  for (const GraphScore& row : rows) {
    out << row.id << "," << fmt_double(row.score) << "," << row.label << "\n";
    scores.push_back(row.score);
    labels.push_back(row.label);
  }
  if (with_auc) {
    out << "# auc," << fmt_double(auc(scores, labels)) << "\n";
  }
}

}  // namespace glocalkd
