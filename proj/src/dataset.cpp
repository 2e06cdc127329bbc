#include "bart/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "bart/errors.hpp"
#include "bart/rng.hpp"

namespace bart {

namespace {

constexpr double kMasked = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_missing_marker(const std::string& cell) {
  const std::string t = lower(strip(cell));
  return t.empty() || t == "na" || t == "nan";
}

bool parse_number(const std::string& cell, double& out) {
  const std::string t = strip(cell);
  if (t.empty()) return false;
  const char* begin = t.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + t.size();
}

// RFC 4180: quoted fields may contain commas, CRLF and doubled quotes.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
        } else {
          field += c;
        }
        field_started = true;
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++i;
        break;
      default:
        field += c;
        field_started = true;
        ++i;
        break;
    }
  }
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

}  // namespace

std::vector<std::size_t> RawTable::rows_with_missing() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (const auto& col : predictors) {
      if (col.is_missing(i)) {
        rows.push_back(i);
        break;
      }
    }
  }
  return rows;
}

namespace {

RawTable parse_csv_impl(const std::string& text, const std::string& response_column,
                        const LoadOptions& options, bool require_response) {
  const auto records = parse_csv_records(text);
  if (records.size() < 2) throw DataError("csv: need a header row and at least one data row");
  const auto& header = records.front();
  std::set<std::string> seen;
  for (const auto& name : header) {
    if (!seen.insert(name).second) throw DataError("csv: duplicate column name '" + name + "'");
  }
  std::size_t resp_idx = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == response_column) resp_idx = j;
  }
  if (resp_idx == header.size() && require_response) {
    throw DataError("csv: response column '" + response_column + "' not found");
  }
  const bool has_response = resp_idx != header.size();
  const std::size_t n = records.size() - 1;
  const std::size_t p = header.size();
  for (std::size_t i = 1; i <= n; ++i) {
    if (records[i].size() != p) {
      throw DataError("csv: row " + std::to_string(i) + " has " +
                      std::to_string(records[i].size()) + " fields, expected " +
                      std::to_string(p));
    }
  }

  // Type each column: categorical iff any non-missing cell is non-numeric.
  std::vector<bool> numeric(p, true);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 1; i <= n && numeric[j]; ++i) {
      const std::string& cell = records[i][j];
      double v;
      if (!is_missing_marker(cell) && !parse_number(cell, v)) numeric[j] = false;
    }
  }

  RawTable table;
  table.n_rows = n;
  table.response_name = response_column;

  for (std::size_t j = 0; j < p; ++j) {
    if (j == resp_idx) continue;
    RawColumn col;
    col.name = header[j];
    col.missing.assign(n, 0);
    if (numeric[j]) {
      col.kind = ColumnKind::Numeric;
      col.values.assign(n, kMasked);
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = records[i + 1][j];
        if (is_missing_marker(cell)) {
          col.missing[i] = 1;
        } else {
          parse_number(cell, col.values[i]);
        }
      }
    } else {
      col.kind = ColumnKind::Categorical;
      std::set<std::string> levels;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = records[i + 1][j];
        if (!is_missing_marker(cell)) levels.insert(strip(cell));
      }
      col.levels.assign(levels.begin(), levels.end());
      col.level_index.assign(n, -1);
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& cell = records[i + 1][j];
        if (is_missing_marker(cell)) {
          col.missing[i] = 1;
        } else {
          const auto it = std::lower_bound(col.levels.begin(), col.levels.end(), strip(cell));
          col.level_index[i] = static_cast<int>(it - col.levels.begin());
        }
      }
    }
    table.predictors.push_back(std::move(col));
  }

  if (!has_response) return table;

  // Response: never missing; classification resolves the positive level.
  std::vector<std::string> resp_cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    resp_cells[i] = strip(records[i + 1][resp_idx]);
    if (is_missing_marker(resp_cells[i])) {
      throw DataError("csv: response column '" + response_column +
                      "' has a missing value at row " + std::to_string(i + 1));
    }
  }
  bool resp_numeric = true;
  for (const auto& cell : resp_cells) {
    double v;
    if (!parse_number(cell, v)) resp_numeric = false;
  }
  std::set<std::string> resp_levels(resp_cells.begin(), resp_cells.end());
  table.classification =
      (!resp_numeric && resp_levels.size() == 2) ||
      (options.force_classification && resp_levels.size() == 2);
  if (!resp_numeric && !table.classification) {
    throw DataError("csv: non-numeric response must have exactly 2 levels, found " +
                    std::to_string(resp_levels.size()));
  }
  table.response.resize(n);
  if (table.classification) {
    std::vector<std::string> lv(resp_levels.begin(), resp_levels.end());
    std::string pos = options.positive_level.value_or(lv.back());
    if (pos != lv[0] && pos != lv[1]) {
      throw DataError("csv: positive level '" + pos + "' not a response level");
    }
    table.positive_level = pos;
    table.negative_level = (pos == lv[0]) ? lv[1] : lv[0];
    for (std::size_t i = 0; i < n; ++i) {
      table.response[i] = (resp_cells[i] == pos) ? 1.0 : 0.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) parse_number(resp_cells[i], table.response[i]);
  }
  return table;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

RawTable parse_csv(const std::string& text, const std::string& response_column,
                   const LoadOptions& options) {
  return parse_csv_impl(text, response_column, options, true);
}

RawTable load_csv(const std::string& path, const std::string& response_column,
                  const LoadOptions& options) {
  return parse_csv_impl(slurp(path), response_column, options, true);
}

RawTable load_csv_features(const std::string& path,
                           const std::string& response_column,
                           const LoadOptions& options) {
  return parse_csv_impl(slurp(path), response_column, options, false);
}

RawTable drop_missing_rows(const RawTable& raw) {
  std::vector<bool> drop(raw.n_rows, false);
  for (const auto& idx : raw.rows_with_missing()) drop[idx] = true;
  RawTable out;
  out.response_name = raw.response_name;
  out.classification = raw.classification;
  out.positive_level = raw.positive_level;
  out.negative_level = raw.negative_level;
  for (std::size_t i = 0; i < raw.n_rows; ++i) {
    if (!drop[i]) out.response.push_back(raw.response[i]);
  }
  out.n_rows = out.response.size();
  if (out.n_rows == 0) throw DataError("drop_missing_rows: no complete rows remain");
  for (const auto& col : raw.predictors) {
    RawColumn c;
    c.name = col.name;
    c.kind = col.kind;
    for (std::size_t i = 0; i < raw.n_rows; ++i) {
      if (drop[i]) continue;
      c.missing.push_back(0);
      if (col.kind == ColumnKind::Numeric) {
        c.values.push_back(col.values[i]);
      } else {
        c.level_index.push_back(col.level_index[i]);
      }
    }
    if (col.kind == ColumnKind::Categorical) {
      // Re-derive the observed level set: levels may vanish with the rows.
      std::set<int> used(c.level_index.begin(), c.level_index.end());
      std::vector<int> remap(col.levels.size(), -1);
      for (std::size_t l = 0; l < col.levels.size(); ++l) {
        if (used.count(static_cast<int>(l))) {
          remap[l] = static_cast<int>(c.levels.size());
          c.levels.push_back(col.levels[l]);
        }
      }
      for (int& idx : c.level_index) idx = remap[idx];
    }
    out.predictors.push_back(std::move(c));
  }
  return out;
}

void ModelFrame::rebuild_indexes() {
  dummy_groups_.clear();
  missing_dummies_.clear();
  for (std::size_t j = 0; j < meta_.size(); ++j) {
    if (meta_[j].is_missing_dummy) {
      missing_dummies_[meta_[j].source] = j;
    } else if (!meta_[j].level.empty()) {
      dummy_groups_[meta_[j].source].push_back(j);
    }
  }
}

bool ModelFrame::column_has_missing(std::size_t col) const {
  for (auto m : mask_[col]) {
    if (m) return true;
  }
  return false;
}

bool ModelFrame::any_missing() const {
  for (std::size_t j = 0; j < n_cols(); ++j) {
    if (column_has_missing(j)) return true;
  }
  return false;
}

std::optional<std::size_t> ModelFrame::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < meta_.size(); ++j) {
    if (meta_[j].name == name) return j;
  }
  return std::nullopt;
}

std::vector<std::size_t> ModelFrame::columns_for(const std::string& name) const {
  std::vector<std::size_t> cols;
  if (auto group = dummy_groups_.find(name); group != dummy_groups_.end()) {
    cols = group->second;
  } else if (auto idx = column_index(name)) {
    cols.push_back(*idx);
  } else {
    throw DataError("unknown covariate '" + name + "'");
  }
  // The missingness indicator travels with its source column so that the
  // mask and the indicator stay consistent under joint permutation.
  if (auto md = missing_dummies_.find(name); md != missing_dummies_.end()) {
    cols.push_back(md->second);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  return cols;
}

ModelFrame ModelFrame::subset_rows(std::span<const std::size_t> rows) const {
  ModelFrame out;
  out.n_rows_ = rows.size();
  out.meta_ = meta_;
  out.preprocess_ = preprocess_;
  out.columns_.resize(n_cols());
  out.mask_.resize(n_cols());
  for (std::size_t j = 0; j < n_cols(); ++j) {
    out.columns_[j].reserve(rows.size());
    out.mask_[j].reserve(rows.size());
    for (auto r : rows) {
      out.columns_[j].push_back(columns_[j][r]);
      out.mask_[j].push_back(mask_[j][r]);
    }
  }
  out.response_.reserve(rows.size());
  for (auto r : rows) out.response_.push_back(response_[r]);
  out.rebuild_indexes();
  return out;
}

ModelFrame ModelFrame::select_columns(std::span<const std::size_t> cols) const {
  ModelFrame out;
  out.n_rows_ = n_rows_;
  out.preprocess_ = preprocess_;
  out.preprocess_.columns.clear();
  for (auto j : cols) {
    out.columns_.push_back(columns_[j]);
    out.mask_.push_back(mask_[j]);
    out.meta_.push_back(meta_[j]);
    out.preprocess_.columns.push_back(meta_[j]);
  }
  out.response_ = response_;
  out.rebuild_indexes();
  return out;
}

ModelFrame ModelFrame::permute_response(std::uint64_t seed) const {
  ModelFrame out = *this;
  Rng rng(derive_seed(seed, SeedStream::Permutation, 1));
  rng.shuffle(out.response_);
  return out;
}

ModelFrame ModelFrame::with_column_fixed(std::size_t col, double value) const {
  if (col >= n_cols()) throw DataError("with_column_fixed: column out of range");
  ModelFrame out = *this;
  std::fill(out.columns_[col].begin(), out.columns_[col].end(), value);
  std::fill(out.mask_[col].begin(), out.mask_[col].end(), 0);
  return out;
}

std::string ModelFrame::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t j = 0; j < n_cols(); ++j) os << meta_[j].name << ",";
  os << preprocess_.response_name << "\n";
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t j = 0; j < n_cols(); ++j) {
      if (missing(i, j)) {
        os << "NA";
      } else {
        os << value(i, j);
      }
      os << ",";
    }
    if (preprocess_.classification) {
      os << (response_[i] > 0.5 ? preprocess_.positive_level : preprocess_.negative_level);
    } else {
      os << response_[i];
    }
    os << "\n";
  }
  return os.str();
}

ModelFrame build_model_frame(const RawTable& raw, bool use_missing_data,
                             bool use_missing_dummies) {
  if (use_missing_dummies && !use_missing_data) {
    throw DataError("missingness dummies require the missing-data feature");
  }
  const std::size_t n = raw.n_rows;
  if (!use_missing_data && !raw.rows_with_missing().empty()) {
    throw DataError(
        "missing predictor cells present; enable missing-data support or drop "
        "incomplete rows first");
  }

  ModelFrame frame;
  frame.n_rows_ = n;
  frame.preprocess_.use_missing_data = use_missing_data;
  frame.preprocess_.use_missing_dummies = use_missing_dummies;
  frame.preprocess_.response_name = raw.response_name;
  frame.preprocess_.classification = raw.classification;
  frame.preprocess_.positive_level = raw.positive_level;
  frame.preprocess_.negative_level = raw.negative_level;
  frame.response_ = raw.response;

  auto add_column = [&](ColumnMeta meta, std::vector<double> vals,
                        std::vector<std::uint8_t> mask) {
    frame.columns_.push_back(std::move(vals));
    frame.mask_.push_back(std::move(mask));
    frame.meta_.push_back(std::move(meta));
  };

  for (const auto& col : raw.predictors) {
    PreprocessMeta::SourceColumn src;
    src.name = col.name;
    src.kind = col.kind;
    if (col.kind == ColumnKind::Numeric) {
      std::vector<double> vals(n);
      std::vector<std::uint8_t> mask(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (col.is_missing(i)) {
          vals[i] = kMasked;
          mask[i] = 1;
        } else {
          vals[i] = col.values[i];
        }
      }
      add_column({col.name, col.name, false, ""}, std::move(vals), std::move(mask));
    } else {
      src.levels = col.levels;
      for (std::size_t l = 0; l < col.levels.size(); ++l) {
        std::vector<double> vals(n, 0.0);
        std::vector<std::uint8_t> mask(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
          if (col.is_missing(i)) {
            vals[i] = kMasked;
            mask[i] = 1;
          } else if (col.level_index[i] == static_cast<int>(l)) {
            vals[i] = 1.0;
          }
        }
        add_column({col.name + "_" + col.levels[l], col.name, false, col.levels[l]},
                   std::move(vals), std::move(mask));
      }
    }
    frame.preprocess_.sources.push_back(std::move(src));
  }

  if (use_missing_dummies) {
    for (std::size_t c = 0; c < raw.predictors.size(); ++c) {
      const auto& col = raw.predictors[c];
      bool has_missing = false;
      for (std::size_t i = 0; i < n; ++i) has_missing |= col.is_missing(i);
      if (!has_missing) continue;
      frame.preprocess_.sources[c].has_missing_dummy = true;
      std::vector<double> vals(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (col.is_missing(i)) vals[i] = 1.0;
      }
      add_column({"M_" + col.name, col.name, true, ""}, std::move(vals),
                 std::vector<std::uint8_t>(n, 0));
    }
  }

  frame.preprocess_.columns = frame.meta_;
  frame.rebuild_indexes();
  return frame;
}

ModelFrame conform_to(const PreprocessMeta& meta, const RawTable& raw) {
  const std::size_t n = raw.n_rows;
  ModelFrame frame;
  frame.n_rows_ = n;
  frame.preprocess_ = meta;
  frame.meta_ = meta.columns;
  frame.response_ = raw.response;
  if (frame.response_.empty()) frame.response_.assign(n, 0.0);

  for (const auto& src : meta.sources) {
    const RawColumn* col = nullptr;
    for (const auto& c : raw.predictors) {
      if (c.name == src.name) col = &c;
    }
    if (col == nullptr) {
      throw ModelError("data is missing column '" + src.name +
                       "' required by the model");
    }
    if (src.kind == ColumnKind::Numeric) {
      if (col->kind != ColumnKind::Numeric) {
        throw ModelError("column '" + src.name + "' was numeric at training time");
      }
      std::vector<double> vals(n);
      std::vector<std::uint8_t> mask(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (col->is_missing(i)) {
          vals[i] = kMasked;
          mask[i] = 1;
        } else {
          vals[i] = col->values[i];
        }
      }
      frame.columns_.push_back(std::move(vals));
      frame.mask_.push_back(std::move(mask));
    } else {
      // Values outside the training level set leave the whole block zero.
      for (const auto& level : src.levels) {
        std::vector<double> vals(n, 0.0);
        std::vector<std::uint8_t> mask(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
          if (col->is_missing(i)) {
            vals[i] = kMasked;
            mask[i] = 1;
          } else {
            const std::string& cell =
                col->kind == ColumnKind::Categorical
                    ? (col->level_index[i] >= 0 ? col->levels[col->level_index[i]]
                                                : std::string())
                    : std::string();
            if (col->kind == ColumnKind::Categorical) {
              if (cell == level) vals[i] = 1.0;
            } else {
              // Numeric payload offered for a factor column: match by text.
              std::ostringstream os;
              os << col->values[i];
              if (os.str() == level) vals[i] = 1.0;
            }
          }
        }
        frame.columns_.push_back(std::move(vals));
        frame.mask_.push_back(std::move(mask));
      }
    }
    if (src.has_missing_dummy) {
      std::vector<double> vals(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (col->is_missing(i)) vals[i] = 1.0;
      }
      frame.columns_.push_back(std::move(vals));
      frame.mask_.push_back(std::vector<std::uint8_t>(n, 0));
    }
  }
  if (frame.columns_.size() != meta.columns.size()) {
    throw ModelError("conformed data has " + std::to_string(frame.columns_.size()) +
                     " columns, model expects " + std::to_string(meta.columns.size()));
  }
  frame.rebuild_indexes();
  return frame;
}

ModelFrame frame_from_matrix(std::vector<std::vector<double>> columns,
                             std::vector<double> response,
                             bool classification) {
  ModelFrame frame;
  frame.n_rows_ = response.size();
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != frame.n_rows_) {
      throw DataError("frame_from_matrix: ragged columns");
    }
    ColumnMeta meta;
    meta.name = "x" + std::to_string(j + 1);
    meta.source = meta.name;
    frame.meta_.push_back(meta);
    frame.mask_.emplace_back(frame.n_rows_, 0);
    PreprocessMeta::SourceColumn src;
    src.name = meta.name;
    frame.preprocess_.sources.push_back(src);
  }
  frame.columns_ = std::move(columns);
  frame.response_ = std::move(response);
  frame.preprocess_.response_name = "y";
  frame.preprocess_.classification = classification;
  if (classification) {
    frame.preprocess_.positive_level = "1";
    frame.preprocess_.negative_level = "0";
  }
  frame.preprocess_.columns = frame.meta_;
  frame.rebuild_indexes();
  return frame;
}

std::vector<std::size_t> FoldAssignment::rows_in_fold(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::rows_not_in_fold(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    throw DataError("kfold_split: need 2 <= k <= n");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, SeedStream::Fold, 0));
  rng.shuffle(order);
  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold_of_row.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    out.fold_of_row[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k)) + 1;
  }
  return out;
}

double friedman_mean(std::span<const double> x) {
  constexpr double kPi = 3.141592653589793238462643383279502884;
  return 10.0 * std::sin(kPi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) +
         10.0 * x[3] + 5.0 * x[4];
}

ModelFrame generate_friedman(std::size_t n, std::size_t p, double sigma,
                             std::uint64_t seed) {
  if (p < 5) throw DataError("generate_friedman: need p >= 5");
  Rng rng(derive_seed(seed, SeedStream::Data, 0));
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) cols[j][i] = rng.uniform();
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x[5] = {cols[0][i], cols[1][i], cols[2][i], cols[3][i], cols[4][i]};
    y[i] = friedman_mean(x);
    if (sigma > 0.0) y[i] += sigma * rng.normal();
  }
  return frame_from_matrix(std::move(cols), std::move(y));
}

ModelFrame permute_columns(const ModelFrame& frame,
                           std::span<const std::size_t> columns,
                           std::uint64_t seed) {
  for (auto j : columns) {
    if (j >= frame.n_cols()) throw DataError("permute_columns: column index out of range");
  }
  // A one-hot block must move as a unit; partial selections would break the
  // per-row one-hot property.
  for (const auto& [factor, group] : frame.dummy_groups_) {
    bool any = false, all = true;
    for (auto g : group) {
      const bool in = std::find(columns.begin(), columns.end(), g) != columns.end();
      any |= in;
      all &= in;
    }
    if (any && !all) {
      throw DataError("permute_columns: partial selection of factor '" + factor + "'");
    }
  }
  ModelFrame out = frame;
  if (columns.empty()) return out;
  std::vector<std::size_t> perm(frame.n_rows());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(seed, SeedStream::Permutation, 0));
  rng.shuffle(perm);
  for (auto j : columns) {
    for (std::size_t i = 0; i < frame.n_rows(); ++i) {
      out.columns_[j][i] = frame.columns_[j][perm[i]];
      out.mask_[j][i] = frame.mask_[j][perm[i]];
    }
  }
  return out;
}

}  // namespace bart
