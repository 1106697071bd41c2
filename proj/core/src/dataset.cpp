#include "sattree/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "sattree/errors.hpp"

namespace sattree {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_boolean_literal(const std::string& cell) {
  const std::string v = lower(cell);
  return v == "0" || v == "1" || v == "true" || v == "false";
}

bool boolean_value(const std::string& cell) {
  const std::string v = lower(cell);
  return v == "1" || v == "true";
}

bool parse_number(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

// RFC-4180-style reader: quoted fields, doubled quotes, CRLF or LF record
// separators, newlines allowed inside quotes.
std::vector<std::vector<std::string>> read_csv_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool record_started = false;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    if (!record_started && fields.empty()) return;  // blank line
    end_field();
    records.push_back(std::move(fields));
    fields.clear();
    record_started = false;
  };

  char ch;
  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        record_started = true;
        break;
      case ',':
        record_started = true;
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(ch);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        record_started = true;
        field.push_back(ch);
        break;
    }
  }
  if (in_quotes) throw ParseError(records.size(), "unterminated quoted field");
  if (record_started || !fields.empty()) end_record();
  return records;
}

ColumnKind infer_kind(const std::vector<std::vector<std::string>>& rows, std::size_t col) {
  bool all_boolean = true;
  bool all_numeric = true;
  for (const auto& row : rows) {
    const std::string& cell = row[col];
    if (all_boolean && !is_boolean_literal(cell)) all_boolean = false;
    double unused;
    if (all_numeric && !parse_number(cell, unused)) all_numeric = false;
    if (!all_boolean && !all_numeric) break;
  }
  if (all_boolean) return ColumnKind::kBoolean;
  if (all_numeric) return ColumnKind::kOrdinal;
  return ColumnKind::kCategorical;
}

const char* kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kBoolean:
      return "boolean";
    case ColumnKind::kOrdinal:
      return "ordinal";
    case ColumnKind::kCategorical:
      return "categorical";
  }
  return "?";
}

ColumnKind kind_from_name(const std::string& name) {
  if (name == "boolean") return ColumnKind::kBoolean;
  if (name == "ordinal") return ColumnKind::kOrdinal;
  if (name == "categorical") return ColumnKind::kCategorical;
  throw DecodeError("unknown column kind: " + name);
}

}  // namespace

RawDataset load_csv(std::istream& source, const std::string& class_column) {
  auto records = read_csv_records(source);
  if (records.empty()) throw EmptyDatasetError("no header row");
  const std::vector<std::string> header = records.front();
  records.erase(records.begin());
  if (records.empty()) throw EmptyDatasetError("no data rows");

  std::size_t class_idx = header.size() - 1;
  if (!class_column.empty()) {
    auto it = std::find(header.begin(), header.end(), class_column);
    if (it == header.end()) throw SchemaError("class column not found: " + class_column);
    class_idx = static_cast<std::size_t>(it - header.begin());
  }

  for (std::size_t r = 0; r < records.size(); r++) {
    if (records[r].size() != header.size()) {
      throw ParseError(r + 1, "expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(records[r].size()));
    }
    for (const std::string& cell : records[r]) {
      if (cell.empty()) throw ParseError(r + 1, "missing value");
    }
  }

  RawDataset raw;
  raw.class_column = header[class_idx];
  raw.labels.reserve(records.size());
  raw.rows.reserve(records.size());
  for (auto& record : records) {
    raw.labels.push_back(record[class_idx]);
    std::vector<std::string> row;
    row.reserve(header.size() - 1);
    for (std::size_t c = 0; c < record.size(); c++) {
      if (c != class_idx) row.push_back(std::move(record[c]));
    }
    raw.rows.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < header.size(); c++) {
    if (c == class_idx) continue;
    std::size_t feature_col = raw.columns.size();
    raw.columns.push_back({header[c], infer_kind(raw.rows, feature_col)});
  }
  return raw;
}

int BinarizationSchema::feature_width() const {
  int width = 0;
  for (const auto& col : columns) {
    switch (col.kind) {
      case ColumnKind::kBoolean:
        width += 1;
        break;
      case ColumnKind::kOrdinal:
        width += static_cast<int>(col.thresholds.size());
        break;
      case ColumnKind::kCategorical:
        width += static_cast<int>(col.categories.size());
        break;
    }
  }
  return width;
}

std::string BinarizationSchema::feature_name(int j) const {
  int offset = j;
  for (const auto& col : columns) {
    switch (col.kind) {
      case ColumnKind::kBoolean:
        if (offset == 0) return col.name;
        offset -= 1;
        break;
      case ColumnKind::kOrdinal:
        if (offset < static_cast<int>(col.thresholds.size())) {
          std::ostringstream os;
          os << col.name << ">=" << col.thresholds[static_cast<std::size_t>(offset)];
          return os.str();
        }
        offset -= static_cast<int>(col.thresholds.size());
        break;
      case ColumnKind::kCategorical:
        if (offset < static_cast<int>(col.categories.size())) {
          return col.name + "=" + col.categories[static_cast<std::size_t>(offset)];
        }
        offset -= static_cast<int>(col.categories.size());
        break;
    }
  }
  throw Error("feature index out of range: " + std::to_string(j));
}

bool BinarizationSchema::empty() const {
  return std::all_of(columns.begin(), columns.end(),
                     [](const SchemaColumn& c) { return c.kind == ColumnKind::kBoolean; });
}

std::string BinarizationSchema::to_json() const {
  json cols = json::array();
  for (const auto& col : columns) {
    json entry;
    entry["name"] = col.name;
    entry["kind"] = kind_name(col.kind);
    if (col.kind == ColumnKind::kOrdinal) entry["thresholds"] = col.thresholds;
    if (col.kind == ColumnKind::kCategorical) entry["categories"] = col.categories;
    cols.push_back(entry);
  }
  json doc;
  doc["classes"] = class_labels;
  doc["columns"] = cols;
  return doc.dump(2);
}

BinarizationSchema BinarizationSchema::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DecodeError(std::string("malformed schema JSON: ") + e.what());
  }
  BinarizationSchema schema;
  try {
    schema.class_labels = doc.at("classes").get<std::vector<std::string>>();
    for (const auto& entry : doc.at("columns")) {
      SchemaColumn col;
      col.name = entry.at("name").get<std::string>();
      col.kind = kind_from_name(entry.at("kind").get<std::string>());
      if (col.kind == ColumnKind::kOrdinal) {
        col.thresholds = entry.at("thresholds").get<std::vector<double>>();
      }
      if (col.kind == ColumnKind::kCategorical) {
        col.categories = entry.at("categories").get<std::vector<std::string>>();
      }
      schema.columns.push_back(std::move(col));
    }
  } catch (const json::exception& e) {
    throw DecodeError(std::string("invalid schema JSON: ") + e.what());
  }
  return schema;
}

namespace {

BinarizationSchema fit_schema(const RawDataset& raw) {
  BinarizationSchema schema;
  for (std::size_t c = 0; c < raw.columns.size(); c++) {
    SchemaColumn col;
    col.name = raw.columns[c].name;
    col.kind = raw.columns[c].kind;
    switch (col.kind) {
      case ColumnKind::kBoolean:
        break;
      case ColumnKind::kOrdinal: {
        std::set<double> values;
        for (const auto& row : raw.rows) {
          double v;
          if (!parse_number(row[c], v)) throw Error("non-numeric cell in ordinal column");
          values.insert(v);
        }
        // d distinct values give d-1 thresholds; ">= smallest" would be
        // constant and is omitted.
        auto it = values.begin();
        ++it;
        col.thresholds.assign(it, values.end());
        break;
      }
      case ColumnKind::kCategorical: {
        std::vector<std::string> seen;
        for (const auto& row : raw.rows) {
          if (std::find(seen.begin(), seen.end(), row[c]) == seen.end()) {
            seen.push_back(row[c]);
          }
        }
        // A lone category would be a constant membership feature.
        if (seen.size() >= 2) col.categories = std::move(seen);
        break;
      }
    }
    schema.columns.push_back(std::move(col));
  }
  for (const std::string& label : raw.labels) {
    if (std::find(schema.class_labels.begin(), schema.class_labels.end(), label) ==
        schema.class_labels.end()) {
      schema.class_labels.push_back(label);
    }
  }
  return schema;
}

FeatureRow encode_row(const std::vector<std::string>& row, const BinarizationSchema& schema) {
  FeatureRow bits;
  bits.reserve(static_cast<std::size_t>(schema.feature_width()));
  for (std::size_t c = 0; c < schema.columns.size(); c++) {
    const SchemaColumn& col = schema.columns[c];
    switch (col.kind) {
      case ColumnKind::kBoolean: {
        if (!is_boolean_literal(row[c])) {
          throw ParseError(0, "non-boolean cell '" + row[c] + "' in boolean column " + col.name);
        }
        bits.push_back(boolean_value(row[c]) ? 1 : 0);
        break;
      }
      case ColumnKind::kOrdinal: {
        double v;
        if (!parse_number(row[c], v)) {
          throw ParseError(0, "non-numeric cell '" + row[c] + "' in ordinal column " + col.name);
        }
        for (double t : col.thresholds) bits.push_back(v >= t ? 1 : 0);
        break;
      }
      case ColumnKind::kCategorical: {
        for (const std::string& cat : col.categories) {
          bits.push_back(row[c] == cat ? 1 : 0);
        }
        break;
      }
    }
  }
  return bits;
}

}  // namespace

std::pair<BinaryDataset, BinarizationSchema> binarize(const RawDataset& raw) {
  BinarizationSchema schema = fit_schema(raw);
  BinaryDataset data = apply_schema(raw, schema);
  data.schema = schema;
  return {std::move(data), std::move(schema)};
}

BinaryDataset apply_schema(const RawDataset& raw, const BinarizationSchema& schema) {
  if (raw.columns.size() != schema.columns.size()) {
    throw SchemaError("schema has " + std::to_string(schema.columns.size()) +
                      " columns, dataset has " + std::to_string(raw.columns.size()));
  }
  for (std::size_t c = 0; c < schema.columns.size(); c++) {
    if (raw.columns[c].name != schema.columns[c].name) {
      throw SchemaError("column mismatch: " + raw.columns[c].name + " vs " +
                        schema.columns[c].name);
    }
  }
  BinaryDataset data;
  data.num_features = schema.feature_width();
  data.num_classes = static_cast<int>(schema.class_labels.size());
  data.rows.reserve(raw.rows.size());
  data.labels.reserve(raw.labels.size());
  for (const auto& row : raw.rows) data.rows.push_back(encode_row(row, schema));
  for (const std::string& label : raw.labels) {
    auto it = std::find(schema.class_labels.begin(), schema.class_labels.end(), label);
    data.labels.push_back(it == schema.class_labels.end()
                              ? -1
                              : static_cast<int>(it - schema.class_labels.begin()));
  }
  return data;
}

ValidationReport validate(const BinaryDataset& data) {
  ValidationReport report;
  report.data.num_features = data.num_features;
  report.data.num_classes = data.num_classes;
  report.data.schema = data.schema;

  std::map<FeatureRow, std::set<int>> seen;
  for (std::size_t i = 0; i < data.rows.size(); i++) {
    std::set<int>& labels_here = seen[data.rows[i]];
    if (labels_here.insert(data.labels[i]).second) {
      report.data.rows.push_back(data.rows[i]);
      report.data.labels.push_back(data.labels[i]);
    } else {
      report.duplicates_collapsed++;
    }
  }
  for (const auto& [row, labels] : seen) {
    if (labels.size() > 1) {
      report.contradictions.push_back({row, std::vector<int>(labels.begin(), labels.end())});
    }
  }
  return report;
}

}  // namespace sattree
