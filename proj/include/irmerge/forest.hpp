#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irmerge/costmodel.hpp"

namespace irmerge {

// CART regression tree stored as a flat pre-order node array.
struct TreeNode {
  bool leaf = true;
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  int left = -1, right = -1;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;
  double predict(const std::vector<double> &x) const;
};

struct ForestModel {
  std::vector<RegressionTree> trees;
  int max_depth = 1;
  int n_estimators = 1;
  double max_features_fraction = 0.5;
  uint64_t seed = 0;
  std::vector<std::string> feature_names;

  double predict(const std::vector<double> &x) const;  // mean over trees
};

struct TrainRow {
  std::vector<double> features;
  double target = 0.0;
};

struct TrainConfig {
  int cv_folds = 5;
  uint64_t seed = 0;

  // the fixed hyperparameter grid: 10 x 10 x 3 = 300 points
  static std::vector<int> depth_grid();        // ten equidistant in [1, 30]
  static std::vector<int> estimator_grid();    // ten equidistant in [10, 250]
  static std::vector<double> fraction_grid();  // {0.125, 0.25, 0.5}
};

struct GridPoint {
  int depth = 0;
  int estimators = 0;
  double fraction = 0.0;
  double cv_mse = 0.0;
};

struct TrainReport {
  std::vector<GridPoint> grid;
  GridPoint best;
  std::string to_csv() const;
};

// Bagged CART forest with per-split feature subsampling; fully determined
// by (data, hyperparameters, seed).
ForestModel fit_forest(const std::vector<TrainRow> &data,
                       const std::vector<std::string> &feature_names, int max_depth,
                       int n_estimators, double fraction, uint64_t seed);

// Grid search with k-fold cross validation, then a refit on the full data
// with the winning configuration.
ForestModel train_forest(const std::vector<TrainRow> &data,
                         const std::vector<std::string> &feature_names,
                         const TrainConfig &cfg, TrainReport *report = nullptr);

std::string forest_to_text(const ForestModel &m);
ForestModel forest_from_text(const std::string &text);
ForestModel load_forest_file(const std::string &path);

std::vector<std::string> opcode_feature_names();

// Training CSV: opcode-delta columns plus a trailing "target" column.
std::string train_rows_to_csv(const std::vector<TrainRow> &rows);
std::vector<TrainRow> train_rows_from_csv(const std::string &text);

}  // namespace irmerge
