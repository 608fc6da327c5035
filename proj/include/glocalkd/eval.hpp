#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "glocalkd/dataset.hpp"
#include "glocalkd/model.hpp"

namespace glocalkd {

/// Rank-based (Mann-Whitney) AUC; tied scores contribute 1/2. Requires
/// both classes present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct GraphScore {
  int id = 0;  // index into the evaluated dataset
  double score = 0.0;
  int label = 0;
};

/// One scored test fold.
struct ScoreReport {
  int fold = 0;
  std::vector<GraphScore> rows;
  double auc = 0.0;
  int train_size = 0;
  double wall_seconds = 0.0;  // logged, never serialized: reports are byte-stable
};

struct CvOptions {
  int k = 5;
  std::uint64_t fold_seed = 17;
  double subsample_fraction = 1.0;   // applied to the training normals
  double contamination_rate = -1.0;  // < 0 disables injection
  int jobs = 1;                      // folds run in parallel up to this cap
};

struct CvSummary {
  std::vector<ScoreReport> folds;
  double mean_auc = 0.0;
  double std_auc = 0.0;  // sample standard deviation over folds
};

/// Per fold: train on the complement's normal graphs (optionally
/// subsampled, optionally contaminated with complement anomalies), score
/// the whole test fold with the model's trained loss terms, compute AUC.
/// Per-fold seeds are derived from the config seeds and the fold index.
CvSummary run_cv(const GraphDataset& ds, const TrainConfig& cfg, const CvOptions& opts);

/// Fixed train/test split read from a file with one "<index> train|test"
/// line per graph; training keeps normals only.
CvSummary run_fixed_split(const GraphDataset& ds, const TrainConfig& cfg,
                          const std::filesystem::path& split_file);

enum class GridKind { cv, sample_efficiency, contamination, dim_sweep, depth_sweep, ablation };

std::string to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& s);

struct ExperimentGrid {
  GridKind kind = GridKind::cv;
  std::vector<double> axis;  // empty selects the kind's default axis
  TrainConfig base;
  CvOptions cv;
};

/// The axis run when ExperimentGrid::axis is empty.
std::vector<double> default_axis(GridKind kind);

struct GridRow {
  std::string axis_label;
  double axis_value = 0.0;
  int fold = 0;
  double auc = 0.0;
  int train_size = 0;
  int test_size = 0;
};

struct GridAggregate {
  std::string axis_label;
  double axis_value = 0.0;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  int folds = 0;
};

struct GridResult {
  GridKind kind = GridKind::cv;
  std::vector<GridRow> rows;
  std::vector<GridAggregate> aggregates;
};

/// Runs run_cv once per axis point with the kind-specific modification
/// (training subsample, contamination rate, output dimension, depth, or
/// ablated loss terms). Throws ConfigError naming any invalid axis value.
GridResult run_grid(const GraphDataset& ds, const ExperimentGrid& grid);

/// CSV: header kind,axis,fold,auc,auc_std,n_train,n_test; one row per
/// (axis point, fold) and one aggregate row per axis point with fold=agg.
void write_grid_csv(std::ostream& out, const GridResult& result);

/// JSON summary: config snapshot, seeds, per-axis aggregates and fold AUCs.
void write_grid_json(std::ostream& out, const GridResult& result, const ExperimentGrid& grid,
                     const GraphDataset& ds);

/// CSV rows id,score,label plus a "# auc,<value>" footer when both classes
/// are present.
void write_scores_csv(std::ostream& out, const std::vector<GraphScore>& rows, bool with_auc);

}  // namespace glocalkd
