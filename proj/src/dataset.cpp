#include "glocalkd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "glocalkd/errors.hpp"
#include "glocalkd/rng.hpp"

namespace glocalkd {

namespace fs = std::filesystem;

std::string to_string(FeatureKind kind) {
  return kind == FeatureKind::attributed ? "attributed" : "degree-one-hot";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "attributed") return FeatureKind::attributed;
  if (s == "degree-one-hot") return FeatureKind::degree_one_hot;
  throw InputError("unknown feature kind: " + s);
}

int GraphDataset::feature_dim() const {
  if (feature_kind == FeatureKind::degree_one_hot || graphs.empty()) return 0;
  return graphs.front().feature_dim();
}

int GraphDataset::count_label(int label) const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), label));
}

int max_degree(const GraphDataset& ds) {
  int best = 0;
  for (const Graph& g : ds.graphs) {
    for (int d : node_degrees(g)) best = std::max(best, d);
  }
  return best;
}

namespace {

// Smallest integer >= x, ignoring float dust from decimal rates like 0.16.
int robust_ceil(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<double> parse_csv_row(const std::string& line, const fs::path& file, int lineno) {
  std::vector<double> row;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    try {
      row.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InputError(file.string() + ":" + std::to_string(lineno) + ": bad number '" + cell +
                       "'");
    }
  }
  return row;
}

int parse_int(const std::string& s, const fs::path& file, int lineno) {
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw InputError(file.string() + ":" + std::to_string(lineno) + ": bad integer '" + s + "'");
  }
}

fs::path find_prefix(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 6 && name.ends_with("_A.txt")) {
      return dir / name.substr(0, name.size() - 6);
    }
  }
  throw InputError("missing file: no *_A.txt under " + dir.string());
}

}  // namespace

GraphDataset parse_benchmark_dir(const fs::path& dir) {
  const fs::path prefix = find_prefix(dir);
  const fs::path adj_file = fs::path(prefix.string() + "_A.txt");
  const fs::path indicator_file = fs::path(prefix.string() + "_graph_indicator.txt");
  const fs::path label_file = fs::path(prefix.string() + "_graph_labels.txt");
  const fs::path attr_file = fs::path(prefix.string() + "_node_attributes.txt");
  const fs::path node_label_file = fs::path(prefix.string() + "_node_labels.txt");

  const std::vector<std::string> indicator_lines = read_lines(indicator_file);
  const std::vector<std::string> label_lines = read_lines(label_file);
  const int num_graphs = static_cast<int>(label_lines.size());
  const int num_nodes = static_cast<int>(indicator_lines.size());

  // Global 1-based node id -> (graph index, local node index).
  std::vector<int> node_graph(num_nodes);
  std::vector<int> node_local(num_nodes);
  std::vector<int> graph_sizes(num_graphs, 0);
  for (int v = 0; v < num_nodes; ++v) {
    const int gid = parse_int(indicator_lines[v], indicator_file, v + 1);
    if (gid < 1 || gid > num_graphs) {
      throw InputError(indicator_file.string() + ":" + std::to_string(v + 1) + ": node " +
                       std::to_string(v + 1) + " assigned to graph " + std::to_string(gid) +
                       " but there are " + std::to_string(num_graphs) + " graph labels");
    }
    node_graph[v] = gid - 1;
    node_local[v] = graph_sizes[gid - 1]++;
  }

  std::vector<std::vector<std::pair<int, int>>> edges(num_graphs);
  const std::vector<std::string> adj_lines = read_lines(adj_file);
  for (int i = 0; i < static_cast<int>(adj_lines.size()); ++i) {
    if (adj_lines[i].empty()) continue;
    const std::vector<double> pair = parse_csv_row(adj_lines[i], adj_file, i + 1);
    if (pair.size() != 2) {
      throw InputError(adj_file.string() + ":" + std::to_string(i + 1) +
                       ": expected 'node, node'");
    }
    const int a = static_cast<int>(pair[0]);
    const int b = static_cast<int>(pair[1]);
    if (a < 1 || a > num_nodes || b < 1 || b > num_nodes) {
      throw InputError(adj_file.string() + ":" + std::to_string(i + 1) + ": edge endpoint " +
                       std::to_string(a < 1 || a > num_nodes ? a : b) +
                       " has no graph assignment");
    }
    if (node_graph[a - 1] != node_graph[b - 1]) {
      throw InputError(adj_file.string() + ":" + std::to_string(i + 1) + ": edge " +
                       std::to_string(a) + "-" + std::to_string(b) + " crosses graphs " +
                       std::to_string(node_graph[a - 1] + 1) + " and " +
                       std::to_string(node_graph[b - 1] + 1));
    }
    edges[node_graph[a - 1]].emplace_back(node_local[a - 1], node_local[b - 1]);
  }

  // Node features: attributes win over node labels if both files exist.
  std::vector<std::vector<double>> node_rows;
  bool attributed = false;
  if (fs::exists(attr_file)) {
    const std::vector<std::string> attr_lines = read_lines(attr_file);
    if (static_cast<int>(attr_lines.size()) != num_nodes) {
      throw InputError(attr_file.string() + ": " + std::to_string(attr_lines.size()) +
                       " attribute rows for " + std::to_string(num_nodes) + " nodes");
    }
    node_rows.reserve(num_nodes);
    for (int v = 0; v < num_nodes; ++v) {
      node_rows.push_back(parse_csv_row(attr_lines[v], attr_file, v + 1));
      if (node_rows.back().size() != node_rows.front().size()) {
        throw InputError(attr_file.string() + ":" + std::to_string(v + 1) + ": ragged row, " +
                         std::to_string(node_rows.back().size()) + " values vs " +
                         std::to_string(node_rows.front().size()) + " in row 1");
      }
    }
    attributed = true;
  } else if (fs::exists(node_label_file)) {
    const std::vector<std::string> nl_lines = read_lines(node_label_file);
    if (static_cast<int>(nl_lines.size()) != num_nodes) {
      throw InputError(node_label_file.string() + ": " + std::to_string(nl_lines.size()) +
                       " node labels for " + std::to_string(num_nodes) + " nodes");
    }
    std::vector<int> values(num_nodes);
    int lo = 0, hi = 0;
    for (int v = 0; v < num_nodes; ++v) {
      values[v] = parse_int(nl_lines[v], node_label_file, v + 1);
      lo = v == 0 ? values[v] : std::min(lo, values[v]);
      hi = v == 0 ? values[v] : std::max(hi, values[v]);
    }
    const int dim = hi - lo + 1;
    node_rows.assign(num_nodes, std::vector<double>(dim, 0.0));
    for (int v = 0; v < num_nodes; ++v) node_rows[v][values[v] - lo] = 1.0;
    attributed = true;
  }

  GraphDataset ds;
  ds.name = prefix.filename().string();
  ds.feature_kind = attributed ? FeatureKind::attributed : FeatureKind::degree_one_hot;
  ds.graphs.reserve(num_graphs);
  ds.labels.reserve(num_graphs);

  std::vector<std::vector<int>> graph_nodes(num_graphs);
  for (int v = 0; v < num_nodes; ++v) graph_nodes[node_graph[v]].push_back(v);

  for (int gi = 0; gi < num_graphs; ++gi) {
    std::optional<Matrix> features;
    if (attributed) {
      Matrix x(graph_sizes[gi], static_cast<int>(node_rows.front().size()));
      for (int v : graph_nodes[gi]) {
        for (int c = 0; c < x.cols(); ++c) x(node_local[v], c) = node_rows[v][c];
      }
      features = std::move(x);
    }
    ds.graphs.push_back(build_graph(graph_sizes[gi], edges[gi], std::move(features)));
    ds.labels.push_back(parse_int(label_lines[gi], label_file, gi + 1));
  }
  return ds;
}

GraphDataset to_anomaly_labels(const GraphDataset& ds, std::optional<int> anomaly_class) {
  std::map<int, int> counts;
  for (int c : ds.labels) ++counts[c];

  int anomaly;
  if (anomaly_class) {
    if (!counts.count(*anomaly_class)) {
      throw InputError("unknown class id " + std::to_string(*anomaly_class));
    }
    anomaly = *anomaly_class;
  } else {
    anomaly = counts.begin()->first;
    for (const auto& [cls, n] : counts) {
      if (n < counts[anomaly]) anomaly = cls;  // map order breaks ties toward smaller id
    }
  }

  GraphDataset out = ds;
  for (int i = 0; i < out.size(); ++i) {
    out.labels[i] = ds.labels[i] == anomaly ? 1 : 0;
    out.graphs[i].label = out.labels[i];
  }
  return out;
}

FoldPlan stratified_kfold(const GraphDataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2, got " + std::to_string(k));
  if (k > ds.size()) {
    throw ConfigError("fold count " + std::to_string(k) + " exceeds dataset size " +
                      std::to_string(ds.size()));
  }

  std::map<int, std::vector<int>> by_class;
  for (int i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);

  Rng rng(seed);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(ds.size(), -1);

  std::vector<int> fill(k, 0);
  for (auto& [cls, members] : by_class) {
    rng.shuffle(members);
    for (int idx : members) {
      const int fold = static_cast<int>(
          std::min_element(fill.begin(), fill.end()) - fill.begin());
      plan.assignments[idx] = fold;
      ++fill[fold];
    }
  }
  return plan;
}

GraphDataset select_fold(const GraphDataset& ds, const FoldPlan& plan, int fold, bool in_fold,
                         bool normals_only) {
  if (static_cast<int>(plan.assignments.size()) != ds.size()) {
    throw ConfigError("fold plan covers " + std::to_string(plan.assignments.size()) +
                      " graphs, dataset has " + std::to_string(ds.size()));
  }
  GraphDataset out;
  out.name = ds.name;
  out.feature_kind = ds.feature_kind;
  for (int i = 0; i < ds.size(); ++i) {
    if ((plan.assignments[i] == fold) != in_fold) continue;
    if (normals_only && ds.labels[i] == 1) continue;
    out.graphs.push_back(ds.graphs[i]);
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

GraphDataset subsample_training(const GraphDataset& train, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction > 1.0) {
    throw ConfigError("fraction must be in (0, 1], got " + std::to_string(fraction));
  }
  const int m = robust_ceil(fraction * train.size());
  if (m == 0) throw InputError("subsample of " + std::to_string(train.size()) + " graphs is empty");

  std::vector<int> indices(train.size());
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  rng.shuffle(indices);
  indices.resize(m);
  std::sort(indices.begin(), indices.end());

  GraphDataset out;
  out.name = train.name;
  out.feature_kind = train.feature_kind;
  for (int i : indices) {
    out.graphs.push_back(train.graphs[i]);
    out.labels.push_back(train.labels[i]);
  }
  return out;
}

GraphDataset inject_contamination(const GraphDataset& train_normals,
                                  const GraphDataset& anomaly_pool, double rate,
                                  std::uint64_t seed) {
  if (rate < 0.0 || rate > 0.5) {
    throw ConfigError("contamination rate must be in [0, 0.5], got " + std::to_string(rate));
  }
  const int n = train_normals.size();
  const int m = rate == 0.0 ? 0 : robust_ceil(rate * n / (1.0 - rate));
  if (m > anomaly_pool.size()) {
    throw InputError("anomaly pool has " + std::to_string(anomaly_pool.size()) +
                     " graphs, need " + std::to_string(m) + " for rate " + std::to_string(rate));
  }

  GraphDataset out = train_normals;
  std::vector<int> indices(anomaly_pool.size());
  std::iota(indices.begin(), indices.end(), 0);
  Rng rng(seed);
  rng.shuffle(indices);
  indices.resize(m);
  std::sort(indices.begin(), indices.end());
  for (int i : indices) {
    out.graphs.push_back(anomaly_pool.graphs[i]);
    out.labels.push_back(0);
  }
  // Training is unlabeled: hide any label the normals carried too.
  for (int i = 0; i < out.size(); ++i) {
    out.labels[i] = 0;
    out.graphs[i].label.reset();
  }
  return out;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_snapshot(std::ostream& out, const GraphDataset& ds) {
  out << "glocalkd-dataset 1\n";
  out << "name " << ds.name << "\n";
  out << "feature_kind " << to_string(ds.feature_kind) << "\n";
  out << "feature_dim " << ds.feature_dim() << "\n";
  out << "graphs " << ds.size() << "\n";
  for (int i = 0; i < ds.size(); ++i) {
    const Graph& g = ds.graphs[i];
    out << "graph " << g.num_nodes << " " << g.num_edges() << " " << ds.labels[i] << "\n";
    for (const auto& [a, b] : g.edges) out << a << " " << b << "\n";
    if (g.has_features()) {
      for (int r = 0; r < g.num_nodes; ++r) {
        for (int c = 0; c < g.features->cols(); ++c) {
          if (c) out << " ";
          out << fmt_double((*g.features)(r, c));
        }
        out << "\n";
      }
    }
  }
}

void write_snapshot(const fs::path& path, const GraphDataset& ds) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_snapshot(out, ds);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(const std::string& what) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw InputError("snapshot truncated at line " + std::to_string(lineno_ + 1) +
                       ", expected " + what);
    }
    ++lineno_;
    return line;
  }

  int lineno() const { return lineno_; }

 private:
  std::istream& in_;
  int lineno_ = 0;
};

}  // namespace

GraphDataset read_snapshot(std::istream& in) {
  LineReader reader(in);
  if (reader.next("header") != "glocalkd-dataset 1") {
    throw InputError("not a glocalkd dataset snapshot");
  }

  auto field = [&](const std::string& key) {
    const std::string line = reader.next(key);
    if (line.rfind(key + " ", 0) != 0) {
      throw InputError("snapshot line " + std::to_string(reader.lineno()) + ": expected '" + key +
                       " ...'");
    }
    return line.substr(key.size() + 1);
  };

  GraphDataset ds;
  ds.name = field("name");
  ds.feature_kind = feature_kind_from_string(field("feature_kind"));
  const int feature_dim = std::stoi(field("feature_dim"));
  const int count = std::stoi(field("graphs"));

  for (int gi = 0; gi < count; ++gi) {
    std::istringstream head(reader.next("graph header"));
    std::string tag;
    int n = 0, e = 0, label = 0;
    if (!(head >> tag >> n >> e >> label) || tag != "graph") {
      throw InputError("snapshot line " + std::to_string(reader.lineno()) +
                       ": expected 'graph N E label'");
    }
    std::vector<std::pair<int, int>> edges(e);
    for (auto& [a, b] : edges) {
      std::istringstream es(reader.next("edge"));
      if (!(es >> a >> b)) {
        throw InputError("snapshot line " + std::to_string(reader.lineno()) + ": bad edge");
      }
    }
    std::optional<Matrix> features;
    if (ds.feature_kind == FeatureKind::attributed) {
      Matrix x(n, feature_dim);
      for (int r = 0; r < n; ++r) {
        std::istringstream fs_row(reader.next("feature row"));
        for (int c = 0; c < feature_dim; ++c) {
          if (!(fs_row >> x(r, c))) {
            throw InputError("snapshot line " + std::to_string(reader.lineno()) +
                             ": short feature row");
          }
        }
      }
      features = std::move(x);
    }
    Graph g = build_graph(n, edges, std::move(features));
    g.label = label;
    ds.graphs.push_back(std::move(g));
    ds.labels.push_back(label);
  }
  return ds;
}

GraphDataset read_snapshot(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("missing file: " + path.string());
  return read_snapshot(in);
}

}  // namespace glocalkd
