#include "irmerge/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "irmerge/printer.hpp"
#include "irmerge/rng.hpp"

namespace irmerge {

double RegressionTree::predict(const std::vector<double> &x) const {
  int n = 0;
  while (!nodes[static_cast<size_t>(n)].leaf) {
    const TreeNode &node = nodes[static_cast<size_t>(n)];
    n = x[static_cast<size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<size_t>(n)].value;
}

double ForestModel::predict(const std::vector<double> &x) const {
  if (x.size() != feature_names.size())
    throw std::invalid_argument("feature arity mismatch: model expects " +
                                std::to_string(feature_names.size()) + ", got " +
                                std::to_string(x.size()));
  double sum = 0;
  for (const auto &t : trees) sum += t.predict(x);
  return trees.empty() ? 0.0 : sum / static_cast<double>(trees.size());
}

std::vector<int> TrainConfig::depth_grid() {
  std::vector<int> g;
  for (int i = 0; i < 10; ++i)
    g.push_back(static_cast<int>(std::llround(1.0 + i * (30.0 - 1.0) / 9.0)));
  return g;
}

std::vector<int> TrainConfig::estimator_grid() {
  std::vector<int> g;
  for (int i = 0; i < 10; ++i)
    g.push_back(static_cast<int>(std::llround(10.0 + i * (250.0 - 10.0) / 9.0)));
  return g;
}

std::vector<double> TrainConfig::fraction_grid() { return {0.125, 0.25, 0.5}; }

namespace {

struct TreeBuilder {
  const std::vector<TrainRow> *data;
  int n_features = 0;
  int max_depth = 1;
  int features_per_split = 1;
  Rng *rng;
  std::vector<TreeNode> nodes;

  double mean_of(const std::vector<int> &idx) const {
    double s = 0;
    for (int i : idx) s += (*data)[static_cast<size_t>(i)].target;
    return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
  }

  int build(std::vector<int> idx, int depth) {
    int self = static_cast<int>(nodes.size());
    nodes.push_back({});

    bool constant = true;
    for (size_t k = 1; k < idx.size(); ++k)
      if ((*data)[static_cast<size_t>(idx[k])].target !=
          (*data)[static_cast<size_t>(idx[0])].target) {
        constant = false;
        break;
      }
    if (depth >= max_depth || idx.size() < 2 || constant) {
      nodes[static_cast<size_t>(self)].value = mean_of(idx);
      return self;
    }

    // random feature subset (partial Fisher-Yates)
    std::vector<int> features(static_cast<size_t>(n_features));
    std::iota(features.begin(), features.end(), 0);
    for (int k = 0; k < features_per_split; ++k) {
      size_t pick = static_cast<size_t>(k) +
                    static_cast<size_t>(rng->below(static_cast<uint64_t>(n_features - k)));
      std::swap(features[static_cast<size_t>(k)], features[pick]);
    }

    int best_feature = -1;
    double best_threshold = 0, best_cost = 0;
    bool have_split = false;
    std::vector<std::pair<double, double>> vt;   // (value, target)
    for (int fi = 0; fi < features_per_split; ++fi) {
      int f = features[static_cast<size_t>(fi)];
      vt.clear();
      for (int i : idx)
        vt.push_back({(*data)[static_cast<size_t>(i)].features[static_cast<size_t>(f)],
                      (*data)[static_cast<size_t>(i)].target});
      std::sort(vt.begin(), vt.end());
      double total = 0, total_sq = 0;
      for (auto &[v, t] : vt) {
        total += t;
        total_sq += t * t;
      }
      double left = 0, left_sq = 0;
      for (size_t k = 0; k + 1 < vt.size(); ++k) {
        left += vt[k].second;
        left_sq += vt[k].second * vt[k].second;
        if (vt[k].first == vt[k + 1].first) continue;
        double nl = static_cast<double>(k + 1);
        double nr = static_cast<double>(vt.size() - k - 1);
        double cost = (left_sq - left * left / nl) +
                      ((total_sq - left_sq) - (total - left) * (total - left) / nr);
        if (!have_split || cost < best_cost) {
          have_split = true;
          best_cost = cost;
          best_feature = f;
          best_threshold = (vt[k].first + vt[k + 1].first) / 2.0;
        }
      }
    }
    if (!have_split) {
      nodes[static_cast<size_t>(self)].value = mean_of(idx);
      return self;
    }

    std::vector<int> li, ri;
    for (int i : idx) {
      if ((*data)[static_cast<size_t>(i)].features[static_cast<size_t>(best_feature)] <=
          best_threshold)
        li.push_back(i);
      else
        ri.push_back(i);
    }
    nodes[static_cast<size_t>(self)].leaf = false;
    nodes[static_cast<size_t>(self)].feature = best_feature;
    nodes[static_cast<size_t>(self)].threshold = best_threshold;
    int l = build(std::move(li), depth + 1);
    int r = build(std::move(ri), depth + 1);
    nodes[static_cast<size_t>(self)].left = l;
    nodes[static_cast<size_t>(self)].right = r;
    return self;
  }
};

RegressionTree fit_tree(const std::vector<TrainRow> &data, const std::vector<int> &subset,
                        int n_features, int max_depth, int features_per_split,
                        uint64_t seed) {
  Rng rng(seed);
  // bootstrap with replacement, sample size = |subset|
  std::vector<int> sample;
  sample.reserve(subset.size());
  for (size_t k = 0; k < subset.size(); ++k)
    sample.push_back(subset[static_cast<size_t>(rng.below(subset.size()))]);

  TreeBuilder b;
  b.data = &data;
  b.n_features = n_features;
  b.max_depth = max_depth;
  b.features_per_split = features_per_split;
  b.rng = &rng;
  b.build(sample, 0);
  RegressionTree t;
  t.nodes = std::move(b.nodes);
  return t;
}

double eval_mse(const ForestModel &m, const std::vector<TrainRow> &data,
                const std::vector<int> &idx) {
  if (idx.empty()) return 0.0;
  double s = 0;
  for (int i : idx) {
    double p = m.predict(data[static_cast<size_t>(i)].features);
    double d = p - data[static_cast<size_t>(i)].target;
    s += d * d;
  }
  return s / static_cast<double>(idx.size());
}

ForestModel fit_forest_subset(const std::vector<TrainRow> &data,
                              const std::vector<int> &subset,
                              const std::vector<std::string> &names, int max_depth,
                              int n_estimators, double fraction, uint64_t seed) {
  ForestModel m;
  m.max_depth = max_depth;
  m.n_estimators = n_estimators;
  m.max_features_fraction = fraction;
  m.seed = seed;
  m.feature_names = names;
  int nf = static_cast<int>(names.size());
  int per_split = std::min(nf, static_cast<int>(std::ceil(fraction * nf)));
  m.trees.resize(static_cast<size_t>(n_estimators));
  for (int t = 0; t < n_estimators; ++t)
    m.trees[static_cast<size_t>(t)] =
        fit_tree(data, subset, nf, max_depth, per_split,
                 derive_seed(seed, static_cast<uint64_t>(t)));
  return m;
}

}  // namespace

ForestModel fit_forest(const std::vector<TrainRow> &data,
                       const std::vector<std::string> &feature_names, int max_depth,
                       int n_estimators, double fraction, uint64_t seed) {
  std::vector<int> all(data.size());
  std::iota(all.begin(), all.end(), 0);
  return fit_forest_subset(data, all, feature_names, max_depth, n_estimators, fraction,
                           seed);
}

ForestModel train_forest(const std::vector<TrainRow> &data,
                         const std::vector<std::string> &feature_names,
                         const TrainConfig &cfg, TrainReport *report) {
  if (data.empty()) throw std::invalid_argument("train_forest: empty dataset");
  if (cfg.cv_folds < 2 || data.size() < static_cast<size_t>(cfg.cv_folds) * 2)
    throw std::invalid_argument("train_forest: need at least 2 rows per fold");
  for (const auto &row : data)
    if (row.features.size() != feature_names.size())
      throw std::invalid_argument("train_forest: row arity mismatch");

  // one shuffled fold assignment shared by the whole grid
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(cfg.seed, 0xf01d));
  for (size_t i = order.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(shuffle_rng.below(i));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::vector<int>> fold_of(static_cast<size_t>(cfg.cv_folds));
  for (size_t i = 0; i < order.size(); ++i)
    fold_of[i % static_cast<size_t>(cfg.cv_folds)].push_back(order[i]);

  std::vector<GridPoint> grid;
  for (int d : TrainConfig::depth_grid())
    for (int e : TrainConfig::estimator_grid())
      for (double f : TrainConfig::fraction_grid()) grid.push_back({d, e, f, 0.0});

  const int n_grid = static_cast<int>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (int g = 0; g < n_grid; ++g) {
    double mse_sum = 0;
    for (int fold = 0; fold < cfg.cv_folds; ++fold) {
      std::vector<int> train_idx;
      for (int other = 0; other < cfg.cv_folds; ++other)
        if (other != fold)
          train_idx.insert(train_idx.end(), fold_of[static_cast<size_t>(other)].begin(),
                           fold_of[static_cast<size_t>(other)].end());
      uint64_t seed = derive_seed(cfg.seed, static_cast<uint64_t>(g) * 131 +
                                                static_cast<uint64_t>(fold));
      ForestModel m = fit_forest_subset(data, train_idx, feature_names, grid[g].depth,
                                        grid[g].estimators, grid[g].fraction, seed);
      mse_sum += eval_mse(m, data, fold_of[static_cast<size_t>(fold)]);
    }
    grid[static_cast<size_t>(g)].cv_mse = mse_sum / cfg.cv_folds;
  }

  size_t best = 0;
  for (size_t g = 1; g < grid.size(); ++g)
    if (grid[g].cv_mse < grid[best].cv_mse) best = g;

  if (report) {
    report->grid = grid;
    report->best = grid[best];
  }
  return fit_forest(data, feature_names, grid[best].depth, grid[best].estimators,
                    grid[best].fraction, cfg.seed);
}

std::string TrainReport::to_csv() const {
  std::ostringstream os;
  os << "max_depth,n_estimators,max_features_fraction,cv_mse\n";
  for (const auto &g : grid)
    os << g.depth << ',' << g.estimators << ',' << format_double(g.fraction) << ','
       << format_double(g.cv_mse) << '\n';
  return os.str();
}

std::string forest_to_text(const ForestModel &m) {
  std::ostringstream os;
  os << "forest v1 seed=" << m.seed << " features=";
  for (size_t i = 0; i < m.feature_names.size(); ++i) {
    if (i) os << ',';
    os << m.feature_names[i];
  }
  os << " depth=" << m.max_depth << " estimators=" << m.n_estimators
     << " frac=" << format_double(m.max_features_fraction) << '\n';
  for (const auto &t : m.trees) {
    os << "tree\n";
    // nodes are already stored in pre-order
    auto emit = [&](auto &&self, int n) -> void {
      const TreeNode &node = t.nodes[static_cast<size_t>(n)];
      if (node.leaf) {
        os << "leaf " << format_double(node.value) << '\n';
        return;
      }
      os << "node " << node.feature << ' ' << format_double(node.threshold) << '\n';
      self(self, node.left);
      self(self, node.right);
    };
    emit(emit, 0);
    os << "end\n";
  }
  return os.str();
}

ForestModel forest_from_text(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("forest v1 ", 0) != 0)
    throw std::invalid_argument("bad forest file header");
  ForestModel m;
  {
    std::istringstream hs(line);
    std::string tok;
    while (hs >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "seed") m.seed = std::stoull(val);
      if (key == "depth") m.max_depth = std::stoi(val);
      if (key == "estimators") m.n_estimators = std::stoi(val);
      if (key == "frac") m.max_features_fraction = std::stod(val);
      if (key == "features") {
        std::istringstream fs(val);
        std::string f;
        while (std::getline(fs, f, ',')) m.feature_names.push_back(f);
      }
    }
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line != "tree") throw std::invalid_argument("expected 'tree', got: " + line);
    RegressionTree t;
    auto parse_node = [&](auto &&self) -> int {
      if (!std::getline(is, line)) throw std::invalid_argument("truncated tree");
      std::istringstream ls(line);
      std::string kind;
      ls >> kind;
      int idx = static_cast<int>(t.nodes.size());
      t.nodes.push_back({});
      if (kind == "leaf") {
        double v;
        ls >> v;
        t.nodes[static_cast<size_t>(idx)].value = v;
        return idx;
      }
      if (kind != "node") throw std::invalid_argument("bad tree line: " + line);
      int feature;
      double threshold;
      ls >> feature >> threshold;
      t.nodes[static_cast<size_t>(idx)].leaf = false;
      t.nodes[static_cast<size_t>(idx)].feature = feature;
      t.nodes[static_cast<size_t>(idx)].threshold = threshold;
      int l = self(self);
      int r = self(self);
      t.nodes[static_cast<size_t>(idx)].left = l;
      t.nodes[static_cast<size_t>(idx)].right = r;
      return idx;
    };
    parse_node(parse_node);
    if (!std::getline(is, line) || line != "end")
      throw std::invalid_argument("tree block not closed with 'end'");
    m.trees.push_back(std::move(t));
  }
  if (static_cast<int>(m.trees.size()) != m.n_estimators)
    throw std::invalid_argument("tree count does not match estimators header");
  return m;
}

ForestModel load_forest_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open forest file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return forest_from_text(ss.str());
}

std::vector<std::string> opcode_feature_names() {
  std::vector<std::string> names;
  for (int k = 0; k < kNumOpcodes; ++k) names.push_back(opcode_name(static_cast<Opcode>(k)));
  return names;
}

std::string train_rows_to_csv(const std::vector<TrainRow> &rows) {
  std::ostringstream os;
  for (const auto &n : opcode_feature_names()) os << n << ',';
  os << "target\n";
  for (const auto &r : rows) {
    for (double f : r.features) os << format_double(f) << ',';
    os << format_double(r.target) << '\n';
  }
  return os.str();
}

std::vector<TrainRow> train_rows_from_csv(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty training csv");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.back() != "target")
    throw std::invalid_argument("training csv must end with a 'target' column");
  std::vector<TrainRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    TrainRow row;
    for (size_t k = 0; k + 1 < header.size(); ++k) {
      if (!std::getline(ls, cell, ',')) throw std::invalid_argument("short training row");
      row.features.push_back(std::stod(cell));
    }
    if (!std::getline(ls, cell, ',')) throw std::invalid_argument("short training row");
    row.target = std::stod(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace irmerge
