#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bart {

// ---- raw tables (typed CSV contents) ---------------------------------------

enum class ColumnKind { Numeric, Categorical };

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  // Numeric columns use `values` + `missing`; categorical columns use
  // `level_index` into `levels` (-1 when missing) and keep `missing` in sync.
  std::vector<double> values;
  std::vector<int> level_index;
  std::vector<std::uint8_t> missing;
  std::vector<std::string> levels;  // sorted, observed levels

  bool is_missing(std::size_t row) const { return missing[row] != 0; }
};

// A parsed data file: predictors plus one response column.
struct RawTable {
  std::vector<RawColumn> predictors;
  std::string response_name;
  bool classification = false;
  std::vector<double> response;       // regression values, or 0/1 labels
  std::string positive_level;         // classification only
  std::string negative_level;         // classification only
  std::size_t n_rows = 0;

  // Rows with at least one missing predictor cell.
  std::vector<std::size_t> rows_with_missing() const;
};

struct LoadOptions {
  std::optional<std::string> positive_level;
  // Force classification for a two-valued numeric response; categorical
  // two-level responses switch automatically.
  bool force_classification = false;
};

// RFC 4180 CSV reader. Header row required. A column is categorical iff any
// non-missing cell fails to parse as a number. Missing markers: empty cell,
// "NA", "nan" (case-insensitive). Missing responses are rejected.
RawTable load_csv(const std::string& path, const std::string& response_column,
                  const LoadOptions& options = {});

// Same parser over an in-memory string (used by tests and fixtures).
RawTable parse_csv(const std::string& text, const std::string& response_column,
                   const LoadOptions& options = {});

// Prediction-time loader: the response column is used when present and the
// table is valid without it (raw.response stays empty).
RawTable load_csv_features(const std::string& path,
                           const std::string& response_column,
                           const LoadOptions& options = {});

// Copy of `raw` without the rows that have missing predictor cells.
RawTable drop_missing_rows(const RawTable& raw);

// ---- model frames (numeric design matrices) --------------------------------

struct ColumnMeta {
  std::string name;
  std::string source;         // original column this one came from
  bool is_missing_dummy = false;
  std::string level;          // factor level, for one-hot columns
};

// Preprocessing description retained by trained models so that new data can
// be conformed to the training layout.
struct PreprocessMeta {
  struct SourceColumn {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<std::string> levels;   // training-time levels (one-hot order)
    bool has_missing_dummy = false;
  };
  std::vector<SourceColumn> sources;
  std::vector<ColumnMeta> columns;
  bool use_missing_data = false;
  bool use_missing_dummies = false;
  std::string response_name;
  bool classification = false;
  std::string positive_level;
  std::string negative_level;
};

// Fully numeric design matrix with a missingness mask, plus the response.
// Factors are expanded to full one-hot blocks; when missing-data support is
// on, one 0/1 "column was missing here" dummy may be appended per source
// column that exhibits missingness.
class ModelFrame {
 public:
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }

  double value(std::size_t row, std::size_t col) const {
    return columns_[col][row];
  }
  bool missing(std::size_t row, std::size_t col) const {
    return mask_[col][row] != 0;
  }
  std::span<const double> column(std::size_t col) const { return columns_[col]; }
  std::span<const std::uint8_t> column_mask(std::size_t col) const {
    return mask_[col];
  }
  bool column_has_missing(std::size_t col) const;
  bool any_missing() const;

  const std::vector<ColumnMeta>& column_meta() const { return meta_; }
  const std::string& column_name(std::size_t col) const { return meta_[col].name; }
  std::optional<std::size_t> column_index(const std::string& name) const;
  // Name -> indices of the one-hot block for that factor.
  const std::map<std::string, std::vector<std::size_t>>& dummy_groups() const {
    return dummy_groups_;
  }
  // Source column name -> index of its missingness dummy.
  const std::map<std::string, std::size_t>& missing_dummy_columns() const {
    return missing_dummies_;
  }

  const std::vector<double>& response() const { return response_; }
  bool classification() const { return preprocess_.classification; }
  const PreprocessMeta& preprocess() const { return preprocess_; }

  // Expands a user-facing name (source column or matrix column) to the set of
  // matrix columns that move as one unit: a factor name yields its whole
  // one-hot block plus its missingness dummy, a plain column yields itself
  // (plus its missingness dummy). Unknown names throw DataError.
  std::vector<std::size_t> columns_for(const std::string& name) const;

  ModelFrame subset_rows(std::span<const std::size_t> rows) const;
  ModelFrame select_columns(std::span<const std::size_t> cols) const;
  // Copy with the response shuffled (permutation-test nulls).
  ModelFrame permute_response(std::uint64_t seed) const;
  // Copy with one column pinned to a constant, its mask cleared.
  ModelFrame with_column_fixed(std::size_t col, double value) const;

  // Writes the matrix plus response as CSV, masked cells as "NA".
  std::string to_csv() const;

  // Construction is via build_model_frame / conform_to / generate_friedman.
  ModelFrame() = default;

 private:
  friend ModelFrame build_model_frame(const RawTable&, bool, bool);
  friend ModelFrame conform_to(const PreprocessMeta&, const RawTable&);
  friend ModelFrame generate_friedman(std::size_t, std::size_t, double,
                                      std::uint64_t);
  friend ModelFrame permute_columns(const ModelFrame&,
                                    std::span<const std::size_t>,
                                    std::uint64_t);
  friend ModelFrame frame_from_matrix(std::vector<std::vector<double>> columns,
                                      std::vector<double> response,
                                      bool classification);
  void rebuild_indexes();

  std::size_t n_rows_ = 0;
  std::vector<std::vector<double>> columns_;
  std::vector<std::vector<std::uint8_t>> mask_;
  std::vector<ColumnMeta> meta_;
  std::map<std::string, std::vector<std::size_t>> dummy_groups_;
  std::map<std::string, std::size_t> missing_dummies_;
  std::vector<double> response_;
  PreprocessMeta preprocess_;
};

// Dummifies factors and applies the missing-data policy. With
// use_missing_data off, any missing predictor cell is an error (drop rows
// first via drop_missing_rows). A missing categorical cell masks the whole
// one-hot block for that row.
ModelFrame build_model_frame(const RawTable& raw, bool use_missing_data,
                             bool use_missing_dummies);

// Lays out new data using a trained model's preprocessing: same columns,
// same one-hot order (training levels only; unseen levels leave the block
// all-zero), same missingness dummies.
ModelFrame conform_to(const PreprocessMeta& meta, const RawTable& raw);

// Plain numeric frame from columns already in matrix form (tests, fixtures).
ModelFrame frame_from_matrix(std::vector<std::vector<double>> columns,
                             std::vector<double> response,
                             bool classification = false);

// ---- folds ------------------------------------------------------------------

struct FoldAssignment {
  std::vector<int> fold_of_row;  // values in [1, k]
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> rows_in_fold(int fold) const;
  std::vector<std::size_t> rows_not_in_fold(int fold) const;
};

// Balanced random partition of [0, n) into k folds; sizes differ by at most
// one and the assignment is a pure function of (n, k, seed).
FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed);

// ---- synthetic data ----------------------------------------------------------

// The noiseless benchmark surface
//   10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5.
double friedman_mean(std::span<const double> x);

// n rows of p iid Uniform(0,1) predictors named x1..xp; response is
// friedman_mean plus Normal(0, sigma^2) noise. Columns past the fifth never
// enter the response. Requires p >= 5.
ModelFrame generate_friedman(std::size_t n, std::size_t p, double sigma,
                             std::uint64_t seed);

// Jointly shuffles the selected columns' rows with one shared permutation
// (values and masks travel together); all other columns are untouched.
// Selecting part of a one-hot block without the rest is an error.
ModelFrame permute_columns(const ModelFrame& frame,
                           std::span<const std::size_t> columns,
                           std::uint64_t seed);

}  // namespace bart
