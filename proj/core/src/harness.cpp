#include "sattree/harness.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sattree/errors.hpp"

namespace sattree {

namespace {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Random instance generation
// ---------------------------------------------------------------------------

DecisionTree random_tree(const GeneratorSpec& spec, std::mt19937_64& rng) {
  const int k = spec.depth;
  const int num_nodes = (1 << k) - 1;
  const int num_leaves = 1 << k;

  std::vector<int> features(static_cast<std::size_t>(num_nodes));
  for (int q = 1; q <= num_nodes; q++) {
    // Features already tested on the path from the root are off limits.
    std::vector<char> banned(static_cast<std::size_t>(spec.num_features), 0);
    for (int anc = q / 2; anc >= 1; anc /= 2) {
      banned[static_cast<std::size_t>(features[static_cast<std::size_t>(anc - 1)])] = 1;
    }
    std::vector<int> allowed;
    for (int f = 0; f < spec.num_features; f++) {
      if (!banned[static_cast<std::size_t>(f)]) allowed.push_back(f);
    }
    std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
    features[static_cast<std::size_t>(q - 1)] = allowed[pick(rng)];
  }

  std::vector<int> leaves(static_cast<std::size_t>(num_leaves));
  std::uniform_int_distribution<int> cls(0, spec.num_classes - 1);
  bool covered = false;
  for (int attempt = 0; attempt < 1000 && !covered; attempt++) {
    std::vector<char> present(static_cast<std::size_t>(spec.num_classes), 0);
    for (int& leaf : leaves) {
      leaf = cls(rng);
      present[static_cast<std::size_t>(leaf)] = 1;
    }
    covered = std::all_of(present.begin(), present.end(), [](char p) { return p != 0; });
  }
  if (!covered) {
    // Tight c vs 2^k: place each class once on distinct leaves, fill the rest.
    std::vector<int> order(static_cast<std::size_t>(num_leaves));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int& leaf : leaves) leaf = cls(rng);
    for (int a = 0; a < spec.num_classes; a++) {
      leaves[static_cast<std::size_t>(order[static_cast<std::size_t>(a)])] = a;
    }
  }
  return DecisionTree(k, std::move(features), std::move(leaves));
}

FeatureRow row_from_mask(std::uint64_t mask, int width) {
  FeatureRow row(static_cast<std::size_t>(width));
  for (int j = 0; j < width; j++) row[static_cast<std::size_t>(j)] = (mask >> j) & 1u;
  return row;
}

std::vector<FeatureRow> sample_rows(const GeneratorSpec& spec, std::mt19937_64& rng) {
  const int f = spec.num_features;
  const std::size_t n = spec.num_examples;
  std::vector<FeatureRow> rows;
  rows.reserve(n);

  if (!spec.distinct_examples) {
    if (f > 63) throw GeneratorError("feature count too large for sampling");
    std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << f) - 1);
    for (std::size_t i = 0; i < n; i++) rows.push_back(row_from_mask(pick(rng), f));
    return rows;
  }

  if (f <= 63) {
    const std::uint64_t total = std::uint64_t{1} << f;
    if (n > total) {
      throw GeneratorError("requested " + std::to_string(n) + " distinct examples from " +
                           std::to_string(total) + " possible vectors");
    }
    if (f <= 24 && n * 2 >= total) {
      std::vector<std::uint64_t> all(total);
      std::iota(all.begin(), all.end(), 0);
      std::shuffle(all.begin(), all.end(), rng);
      for (std::size_t i = 0; i < n; i++) rows.push_back(row_from_mask(all[i], f));
      return rows;
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    std::set<std::uint64_t> seen;
    while (seen.size() < n) {
      std::uint64_t mask = pick(rng);
      if (seen.insert(mask).second) rows.push_back(row_from_mask(mask, f));
    }
    return rows;
  }

  std::set<FeatureRow> seen;
  std::uniform_int_distribution<int> bit(0, 1);
  while (seen.size() < n) {
    FeatureRow row(static_cast<std::size_t>(f));
    for (auto& b : row) b = static_cast<std::uint8_t>(bit(rng));
    if (seen.insert(row).second) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::pair<BinaryDataset, DecisionTree> generate_random_instance(const GeneratorSpec& spec) {
  if (spec.depth < 0) throw GeneratorError("depth must be non-negative");
  if (spec.num_classes < 1) throw GeneratorError("at least one class required");
  if (spec.num_examples < 1) throw GeneratorError("at least one example required");
  if (spec.num_features < std::max(spec.depth, 1)) {
    throw GeneratorError("need at least max(k, 1) features");
  }
  if (spec.num_classes > (1 << spec.depth)) {
    throw GeneratorError("a depth-" + std::to_string(spec.depth) + " tree cannot carry " +
                         std::to_string(spec.num_classes) + " classes");
  }

  std::mt19937_64 rng(spec.seed);
  DecisionTree tree = spec.depth == 0 ? DecisionTree::leaf(0) : random_tree(spec, rng);
  std::vector<FeatureRow> rows = sample_rows(spec, rng);

  BinaryDataset data;
  data.num_features = spec.num_features;
  data.num_classes = spec.num_classes;
  data.labels.reserve(rows.size());
  for (const FeatureRow& row : rows) data.labels.push_back(classify(tree, row));
  data.rows = std::move(rows);
  return {std::move(data), std::move(tree)};
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

namespace {

RawDataset subset(const RawDataset& raw, std::span<const std::size_t> indices) {
  RawDataset out;
  out.columns = raw.columns;
  out.class_column = raw.class_column;
  out.rows.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.rows.push_back(raw.rows[i]);
    out.labels.push_back(raw.labels[i]);
  }
  return out;
}

double score_fold(const OptimizeMode mode, const BinaryDataset& train,
                  const BinaryDataset& test, const InferenceConfig& cfg,
                  InferenceReport& inference_out) {
  std::size_t correct = 0;
  if (mode == OptimizeMode::kDepth) {
    DepthResult res = infer_min_depth(train, cfg);
    inference_out = res.report;
    for (std::size_t i = 0; i < test.rows.size(); i++) {
      const int predicted = classify(res.tree, test.rows[i]);
      if (test.labels[i] >= 0 && predicted == test.labels[i]) correct++;
    }
  } else {
    SizeResult res = infer_min_size(train, cfg);
    inference_out = res.report;
    for (std::size_t i = 0; i < test.rows.size(); i++) {
      const int predicted = classify(res.tree, test.rows[i]);
      if (test.labels[i] >= 0 && predicted == test.labels[i]) correct++;
    }
  }
  return test.rows.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.rows.size());
}

}  // namespace

CrossValidationResult kfold_cross_validate(const RawDataset& raw, const ExperimentSpec& spec) {
  if (!spec.folds) throw Error("cross-validation requires a fold count");
  const int folds = *spec.folds;
  if (folds < 2) throw Error("at least two folds required");
  if (static_cast<std::size_t>(folds) > raw.rows.size()) {
    throw Error("more folds than dataset rows");
  }

  std::vector<std::size_t> order(raw.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<std::size_t>> fold_indices(static_cast<std::size_t>(folds));
  for (std::size_t pos = 0; pos < order.size(); pos++) {
    fold_indices[pos % static_cast<std::size_t>(folds)].push_back(order[pos]);
  }

  CrossValidationResult result;
  double accuracy_sum = 0.0;
  std::size_t scored_folds = 0;
  for (std::size_t t = 0; t < fold_indices.size(); t++) {
    std::vector<std::size_t> train_rows;
    for (std::size_t other = 0; other < fold_indices.size(); other++) {
      if (other == t) continue;
      train_rows.insert(train_rows.end(), fold_indices[other].begin(), fold_indices[other].end());
    }
    const RawDataset train_raw = subset(raw, train_rows);
    const RawDataset test_raw = subset(raw, fold_indices[t]);

    FoldReport fold;
    fold.train_size = train_rows.size();
    fold.test_size = fold_indices[t].size();

    auto [train_all, schema] = binarize(train_raw);
    ValidationReport validated = validate(train_all);
    if (!validated.feasible()) {
      fold.failed = true;
      result.folds.push_back(std::move(fold));
      continue;
    }
    const BinaryDataset test = apply_schema(test_raw, schema);

    InferenceConfig cfg;
    cfg.policy = spec.policy;
    cfg.seed = spec.seed + t;
    cfg.time_budget = spec.time_budget;
    fold.accuracy = score_fold(spec.mode, validated.data, test, cfg, fold.inference);
    accuracy_sum += fold.accuracy;
    scored_folds++;
    result.folds.push_back(std::move(fold));
  }
  result.accuracy = scored_folds == 0 ? 0.0 : accuracy_sum / static_cast<double>(scored_folds);
  return result;
}

// ---------------------------------------------------------------------------
// Scaling sweeps
// ---------------------------------------------------------------------------

std::vector<SweepPoint> scaling_sweep(const GeneratorSpec& base, SweepParameter vary,
                                      std::span<const int> points, int runs_per_point,
                                      OptimizeMode mode,
                                      std::optional<std::chrono::duration<double>> budget) {
  if (points.empty()) throw Error("sweep needs at least one point");
  if (runs_per_point < 1) throw Error("sweep needs at least one run per point");

  std::vector<SweepPoint> table;
  table.reserve(points.size());
  for (int value : points) {
    GeneratorSpec spec = base;
    switch (vary) {
      case SweepParameter::kDepth:
        spec.depth = value;
        break;
      case SweepParameter::kFeatures:
        spec.num_features = value;
        break;
      case SweepParameter::kClasses:
        spec.num_classes = value;
        break;
      case SweepParameter::kExamples:
        spec.num_examples = static_cast<std::size_t>(value);
        break;
    }
    SweepPoint point;
    point.value = value;
    double seconds = 0.0;
    double examples = 0.0;
    for (int r = 0; r < runs_per_point; r++) {
      spec.seed = base.seed + static_cast<std::uint64_t>(r);
      auto [data, tree] = generate_random_instance(spec);
      ValidationReport validated = validate(data);
      InferenceConfig cfg;
      cfg.seed = spec.seed;
      cfg.time_budget = budget;
      try {
        InferenceReport report;
        if (mode == OptimizeMode::kDepth) {
          report = infer_min_depth(validated.data, cfg).report;
        } else {
          SizeResult res = infer_min_size(validated.data, cfg);
          if (!res.report.complete) continue;  // missing cell
          report = res.report;
        }
        seconds += report.wall_seconds;
        examples += static_cast<double>(report.examples_used);
        point.completed_runs++;
      } catch (const TimeoutError&) {
        // missing cell
      }
    }
    if (point.completed_runs > 0) {
      point.mean_seconds = seconds / static_cast<double>(point.completed_runs);
      point.mean_examples_used = examples / static_cast<double>(point.completed_runs);
    }
    table.push_back(point);
  }
  return table;
}

std::string sweep_to_csv(std::span<const SweepPoint> table) {
  std::ostringstream os;
  os << "value,mean_seconds,mean_examples_used,completed_runs\n";
  for (const SweepPoint& p : table) {
    os << p.value << ',';
    if (p.completed_runs == 0) {
      os << ",";  // missing cells
    } else {
      os << p.mean_seconds << ',' << p.mean_examples_used;
    }
    os << ',' << p.completed_runs << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Command line interface
// ---------------------------------------------------------------------------

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw IoError("cannot write " + path);
}

void emit_or_print(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_text(path, content);
  }
}

RawDataset load_csv_file(const std::string& path, const std::string& class_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load_csv(in, class_column);
}

std::string dataset_to_csv(const BinaryDataset& data) {
  std::ostringstream os;
  for (int f = 0; f < data.num_features; f++) os << 'f' << f << ',';
  os << "class\n";
  for (std::size_t i = 0; i < data.rows.size(); i++) {
    for (std::uint8_t bit : data.rows[i]) os << int{bit} << ',';
    os << data.labels[i] << '\n';
  }
  return os.str();
}

struct InferOptions {
  std::string data_path;
  std::string class_column;
  std::string mode = "depth";
  std::string policy = "first";
  std::uint64_t seed = 0;
  double timeout_seconds = 0.0;
  int max_depth = 0;  // 0 = default cap (the feature count)
  std::string out_tree;
  std::string out_dot;
  std::string out_schema;
  std::string stats_path;
};

InferenceConfig config_from(const InferOptions& opt) {
  InferenceConfig cfg;
  cfg.policy = opt.policy == "random" ? CounterexamplePolicy::kSeededRandom
                                      : CounterexamplePolicy::kFirstInOrder;
  cfg.seed = opt.seed;
  if (opt.timeout_seconds > 0.0) {
    cfg.time_budget = std::chrono::duration<double>(opt.timeout_seconds);
  }
  if (opt.max_depth > 0) cfg.max_depth = opt.max_depth;
  return cfg;
}

int report_contradictions(const ValidationReport& validated, const BinarizationSchema* schema) {
  std::cerr << "dataset is contradictory; no consistent tree exists:\n";
  for (const Contradiction& c : validated.contradictions) {
    std::cerr << "  vector (";
    for (std::size_t j = 0; j < c.row.size(); j++) {
      if (j) std::cerr << ',';
      std::cerr << int{c.row[j]};
    }
    std::cerr << ") appears under labels ";
    for (std::size_t j = 0; j < c.labels.size(); j++) {
      if (j) std::cerr << ", ";
      if (schema && c.labels[j] >= 0 &&
          c.labels[j] < static_cast<int>(schema->class_labels.size())) {
        std::cerr << schema->class_labels[static_cast<std::size_t>(c.labels[j])];
      } else {
        std::cerr << c.labels[j];
      }
    }
    std::cerr << '\n';
  }
  return 4;
}

int cmd_infer(const InferOptions& opt) {
  const RawDataset raw = load_csv_file(opt.data_path, opt.class_column);
  auto [all_data, schema] = binarize(raw);
  const ValidationReport validated = validate(all_data);
  if (!validated.feasible()) return report_contradictions(validated, &schema);
  if (validated.duplicates_collapsed > 0) {
    std::cerr << "note: collapsed " << validated.duplicates_collapsed << " duplicate rows\n";
  }

  const InferenceConfig cfg = config_from(opt);
  ordered_json stats;
  stats["mode"] = opt.mode;
  int exit_code = 0;
  std::string tree_json;
  std::string dot;

  try {
    if (opt.mode == "size") {
      SizeResult res = infer_min_size(validated.data, cfg);
      stats["status"] = res.report.complete ? "ok" : "incomplete";
      stats["k"] = res.report.depth;
      stats["nodes"] = res.report.node_count;
      stats["examples_used"] = res.report.examples_used;
      stats["iterations"] = res.report.iterations;
      stats["clauses"] = res.report.clauses;
      stats["variables"] = res.report.variables;
      stats["seed"] = opt.seed;
      stats["time_seconds"] = res.report.wall_seconds;
      tree_json = res.tree.serialize();
      dot = res.tree.to_dot();
      if (!res.report.complete) exit_code = 3;
    } else {
      DepthResult res = infer_min_depth(validated.data, cfg);
      stats["status"] = "ok";
      stats["k"] = res.report.depth;
      stats["nodes"] = res.report.node_count;
      stats["examples_used"] = res.report.examples_used;
      stats["iterations"] = res.report.iterations;
      stats["clauses"] = res.report.clauses;
      stats["variables"] = res.report.variables;
      stats["defaulted_leaves"] = res.report.defaulted_leaves;
      stats["seed"] = opt.seed;
      stats["time_seconds"] = res.report.wall_seconds;
      tree_json = serialize(res.tree);
      dot = to_dot(res.tree);
    }
  } catch (const TimeoutError& e) {
    stats["status"] = "timeout";
    stats["error"] = e.what();
    emit_or_print(opt.stats_path, stats.dump(2) + "\n");
    return 3;
  } catch (const DepthCapExceeded& e) {
    stats["status"] = "no_solution";
    stats["error"] = e.what();
    emit_or_print(opt.stats_path, stats.dump(2) + "\n");
    return 2;
  }

  if (!opt.out_tree.empty()) write_text(opt.out_tree, tree_json + "\n");
  if (!opt.out_dot.empty()) write_text(opt.out_dot, dot);
  if (!opt.out_schema.empty()) write_text(opt.out_schema, schema.to_json() + "\n");
  emit_or_print(opt.stats_path, stats.dump(2) + "\n");
  return exit_code;
}

int cmd_cv(const InferOptions& opt, int folds) {
  const RawDataset raw = load_csv_file(opt.data_path, opt.class_column);
  ExperimentSpec spec;
  spec.mode = opt.mode == "size" ? OptimizeMode::kSize : OptimizeMode::kDepth;
  spec.folds = folds;
  spec.seed = opt.seed;
  spec.policy = opt.policy == "random" ? CounterexamplePolicy::kSeededRandom
                                       : CounterexamplePolicy::kFirstInOrder;
  if (opt.timeout_seconds > 0.0) {
    spec.time_budget = std::chrono::duration<double>(opt.timeout_seconds);
  }
  const CrossValidationResult result = kfold_cross_validate(raw, spec);

  ordered_json stats;
  stats["mode"] = opt.mode;
  stats["folds"] = folds;
  stats["seed"] = opt.seed;
  stats["accuracy"] = result.accuracy;
  ordered_json fold_list = ordered_json::array();
  for (std::size_t t = 0; t < result.folds.size(); t++) {
    const FoldReport& fold = result.folds[t];
    ordered_json entry;
    entry["fold"] = t;
    entry["failed"] = fold.failed;
    entry["accuracy"] = fold.accuracy;
    entry["train_size"] = fold.train_size;
    entry["test_size"] = fold.test_size;
    if (!fold.failed) {
      entry["k"] = fold.inference.depth;
      entry["nodes"] = fold.inference.node_count;
      entry["examples_used"] = fold.inference.examples_used;
      entry["time_seconds"] = fold.inference.wall_seconds;
    }
    fold_list.push_back(entry);
  }
  stats["fold_reports"] = fold_list;
  emit_or_print(opt.stats_path, stats.dump(2) + "\n");
  return 0;
}

int cmd_encode(const std::string& data_path, const std::string& class_column, int depth,
               int max_nodes, const std::string& out_path) {
  const RawDataset raw = load_csv_file(data_path, class_column);
  auto [all_data, schema] = binarize(raw);
  const ValidationReport validated = validate(all_data);
  if (!validated.feasible()) return report_contradictions(validated, &schema);
  const BinaryDataset& data = validated.data;
  if (depth >= 1 && data.num_features < 1) {
    std::cerr << "dataset has no usable features\n";
    return 4;
  }

  VarMap vm(depth, data.num_features, std::max(data.num_classes, 1));
  CnfBuffer buffer;
  emit_node_feature_constraints(buffer, vm);
  for (std::size_t i = 0; i < data.rows.size(); i++) {
    vm.alloc_example(static_cast<int>(i));
    emit_feature_constraints(buffer, vm, static_cast<int>(i), data.rows[i]);
    emit_class_constraints(buffer, vm, static_cast<int>(i), data.labels[i]);
  }
  if (max_nodes > 0) {
    const int max_allowed = 2 * (1 << depth) - 1;
    if (max_nodes > max_allowed) {
      std::cerr << "--max-nodes exceeds " << max_allowed << " for depth " << depth << '\n';
      return 4;
    }
    emit_cardinality(buffer, vm);
    // The DIMACS file cannot carry assumptions; bake the bound in as a unit.
    const int max_leaves = max_nodes / 2 + 1;
    buffer.add({leaf_bound_literal(vm, max_leaves)});
  }

  std::ostringstream os;
  export_dimacs(buffer, vm, os);
  emit_or_print(out_path, os.str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Optimal decision tree inference via incremental SAT solving"};
  app.require_subcommand(1);

  InferOptions opt;
  int folds = 10;

  auto add_common = [&](CLI::App* cmd, bool with_outputs) {
    cmd->add_option("--data", opt.data_path, "input CSV file")->required();
    cmd->add_option("--class", opt.class_column, "class column name (default: last column)");
    cmd->add_option("--mode", opt.mode, "optimization target")
        ->check(CLI::IsMember({"depth", "size"}))
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "random seed")->capture_default_str();
    cmd->add_option("--timeout", opt.timeout_seconds, "time budget in seconds (0 = none)");
    cmd->add_option("--policy", opt.policy, "counterexample choice")
        ->check(CLI::IsMember({"first", "random"}))
        ->capture_default_str();
    cmd->add_option("--stats", opt.stats_path, "write stats JSON here instead of stdout");
    if (with_outputs) {
      cmd->add_option("--out-tree", opt.out_tree, "write the tree as JSON");
      cmd->add_option("--out-dot", opt.out_dot, "write the tree as DOT");
      cmd->add_option("--out-schema", opt.out_schema, "write the binarization schema as JSON");
    }
  };

  CLI::App* infer = app.add_subcommand("infer", "infer an optimal tree from a CSV dataset");
  add_common(infer, true);
  infer->add_option("--max-depth", opt.max_depth, "depth cap (0 = feature count)")
      ->check(CLI::Range(0, 30));

  CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation");
  add_common(cv, false);
  cv->add_option("--folds", folds, "number of folds")->capture_default_str();

  GeneratorSpec gen_spec;
  std::string gen_out;
  bool allow_repeats = false;
  std::uint64_t gen_n = 1;
  CLI::App* gen = app.add_subcommand("gen", "generate a random tree-labelled dataset (CSV)");
  gen->add_option("--k", gen_spec.depth, "tree depth")->required();
  gen->add_option("--f", gen_spec.num_features, "feature count")->required();
  gen->add_option("--c", gen_spec.num_classes, "class count")->required();
  gen->add_option("--n", gen_n, "example count")->required();
  gen->add_option("--seed", gen_spec.seed, "random seed")->capture_default_str();
  gen->add_flag("--allow-repeats", allow_repeats,
                "sample examples with replacement instead of requiring distinct vectors");
  gen->add_option("--out", gen_out, "output CSV path (default: stdout)");

  std::string enc_data;
  std::string enc_class;
  int enc_depth = 1;
  int enc_max_nodes = 0;
  std::string enc_out;
  CLI::App* encode = app.add_subcommand("encode", "export the CNF encoding as DIMACS");
  encode->add_option("--data", enc_data, "input CSV file")->required();
  encode->add_option("--class", enc_class, "class column name (default: last column)");
  encode->add_option("--depth", enc_depth, "tree depth to encode")->required()
      ->check(CLI::Range(0, 30));
  encode->add_option("--max-nodes", enc_max_nodes, "bake in a node-count bound (0 = none)")
      ->check(CLI::Range(0, 1 << 30));
  encode->add_option("--out", enc_out, "output path (default: stdout)");

  GeneratorSpec sweep_base;
  std::string sweep_vary = "n";
  std::vector<int> sweep_points;
  int sweep_runs = 3;
  std::string sweep_mode = "depth";
  std::string sweep_out;
  double sweep_timeout = 0.0;
  std::uint64_t sweep_n = 100;
  CLI::App* sweep = app.add_subcommand("sweep", "average time/examples over generated instances");
  sweep->add_option("--vary", sweep_vary, "parameter to sweep")
      ->check(CLI::IsMember({"k", "f", "c", "n"}))
      ->capture_default_str();
  sweep->add_option("--points", sweep_points, "values for the varied parameter")
      ->required()
      ->delimiter(',');
  sweep->add_option("--runs", sweep_runs, "runs per point")->capture_default_str();
  sweep->add_option("--mode", sweep_mode, "optimization target")
      ->check(CLI::IsMember({"depth", "size"}))
      ->capture_default_str();
  sweep->add_option("--k", sweep_base.depth, "base depth")->capture_default_str();
  sweep->add_option("--f", sweep_base.num_features, "base feature count")->capture_default_str();
  sweep->add_option("--c", sweep_base.num_classes, "base class count")->capture_default_str();
  sweep->add_option("--n", sweep_n, "base example count")->capture_default_str();
  sweep->add_option("--seed", sweep_base.seed, "base seed")->capture_default_str();
  sweep->add_option("--timeout", sweep_timeout, "per-run time budget in seconds (0 = none)");
  sweep->add_flag("--allow-repeats", allow_repeats,
                  "sample examples with replacement instead of requiring distinct vectors");
  sweep->add_option("--out", sweep_out, "output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  try {
    if (infer->parsed()) return cmd_infer(opt);
    if (cv->parsed()) return cmd_cv(opt, folds);
    if (gen->parsed()) {
      gen_spec.num_examples = static_cast<std::size_t>(gen_n);
      gen_spec.distinct_examples = !allow_repeats;
      auto [data, tree] = generate_random_instance(gen_spec);
      emit_or_print(gen_out, dataset_to_csv(data));
      return 0;
    }
    if (encode->parsed()) return cmd_encode(enc_data, enc_class, enc_depth, enc_max_nodes, enc_out);
    if (sweep->parsed()) {
      sweep_base.num_examples = static_cast<std::size_t>(sweep_n);
      sweep_base.distinct_examples = !allow_repeats;
      SweepParameter vary = SweepParameter::kExamples;
      if (sweep_vary == "k") vary = SweepParameter::kDepth;
      if (sweep_vary == "f") vary = SweepParameter::kFeatures;
      if (sweep_vary == "c") vary = SweepParameter::kClasses;
      std::optional<std::chrono::duration<double>> budget;
      if (sweep_timeout > 0.0) budget = std::chrono::duration<double>(sweep_timeout);
      OptimizeMode mode = sweep_mode == "size" ? OptimizeMode::kSize : OptimizeMode::kDepth;
      auto table = scaling_sweep(sweep_base, vary, sweep_points, sweep_runs, mode, budget);
      emit_or_print(sweep_out, sweep_to_csv(table));
      return 0;
    }
  } catch (const TimeoutError& e) {
    std::cerr << "timeout: " << e.what() << '\n';
    return 3;
  } catch (const DepthCapExceeded& e) {
    std::cerr << "no solution: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 4;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 4;
  } catch (const EmptyDatasetError& e) {
    std::cerr << "empty dataset: " << e.what() << '\n';
    return 4;
  } catch (const DecodeError& e) {
    std::cerr << "decode error: " << e.what() << '\n';
    return 4;
  } catch (const GeneratorError& e) {
    std::cerr << "generator error: " << e.what() << '\n';
    return 4;
  } catch (const ContradictoryDataset& e) {
    std::cerr << "contradictory dataset: " << e.what() << '\n';
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("sattree");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sattree
