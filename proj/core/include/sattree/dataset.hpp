#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sattree/tree.hpp"  // FeatureRow

namespace sattree {

enum class ColumnKind { kBoolean, kOrdinal, kCategorical };

// Tabular data as loaded, before binarization. Cells are kept verbatim;
// column kinds are inferred at load time.
struct RawColumn {
  std::string name;
  ColumnKind kind;
};

struct RawDataset {
  std::vector<RawColumn> columns;  // feature columns, class column excluded
  std::vector<std::vector<std::string>> rows;
  std::string class_column;
  std::vector<std::string> labels;  // one per row
};

// Recipe turning one raw column into boolean features. Ordinal columns use
// strictly increasing thresholds (feature true iff value >= threshold);
// categorical columns use membership tests. Boolean columns pass through and
// need no entry.
struct SchemaColumn {
  std::string name;
  ColumnKind kind;
  std::vector<double> thresholds;        // ordinal
  std::vector<std::string> categories;   // categorical
};

struct BinarizationSchema {
  std::vector<SchemaColumn> columns;   // original column order, all columns
  std::vector<std::string> class_labels;  // class index -> label

  // Number of derived boolean features.
  int feature_width() const;
  // Name of derived feature j, e.g. "age>=30", "color=red", "flag".
  std::string feature_name(int j) const;
  bool empty() const;

  std::string to_json() const;
  static BinarizationSchema from_json(const std::string& text);
};

struct BinaryDataset {
  int num_features = 0;
  int num_classes = 0;
  std::vector<FeatureRow> rows;
  std::vector<int> labels;
  std::optional<BinarizationSchema> schema;

  std::size_t size() const { return rows.size(); }
};

// One feature vector that appears under two or more distinct labels; no tree
// of any depth can classify it consistently.
struct Contradiction {
  FeatureRow row;
  std::vector<int> labels;
};

struct ValidationReport {
  std::size_t duplicates_collapsed = 0;
  std::vector<Contradiction> contradictions;
  BinaryDataset data;  // duplicates removed, order of first appearance kept

  bool feasible() const { return contradictions.empty(); }
};

// Parses RFC-4180-style CSV with a mandatory header row. Column kinds are
// inferred: values all in {0,1,true,false} give boolean, otherwise
// all-numeric gives ordinal, anything else categorical. Missing (empty)
// values are rejected.
RawDataset load_csv(std::istream& source, const std::string& class_column = "");

// Derives boolean features per column: ordinal columns with d distinct
// values yield d-1 thresholds (>= each value except the smallest),
// categorical columns one membership feature per category, boolean columns
// pass through. Constant derived features are dropped. Labels map to class
// indices in order of first appearance. Row order and labels are preserved.
std::pair<BinaryDataset, BinarizationSchema> binarize(const RawDataset& raw);

// Re-applies a fitted schema to new raw rows (e.g. a held-out fold). Labels
// absent from the schema map to index -1, which no tree can predict.
BinaryDataset apply_schema(const RawDataset& raw, const BinarizationSchema& schema);

// Collapses exact duplicate (row, label) pairs and reports every feature
// vector that occurs under more than one label.
ValidationReport validate(const BinaryDataset& data);

}  // namespace sattree
