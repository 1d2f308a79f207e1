#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "itct/common.hpp"

namespace itct {

enum class ColumnKind { categorical, continuous, label };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

struct Schema {
    struct Column {
        std::string name;
        ColumnKind kind;
    };
    std::vector<Column> columns;

    static Schema parse(const std::string& text);
    static Schema load_file(const std::string& path);
    // 25 features + is_attack label, mirroring the MQTT-IoT-IDS2020 packet CSV
    static Schema default_mqtt();

    void validate() const;
    int label_index() const;
    int find(const std::string& name) const;  // -1 when absent
    std::vector<int> categorical_indices() const;
    std::vector<int> continuous_indices() const;
    std::vector<std::string> feature_names() const;
    std::string to_text() const;
};

// Categorical column storage with per-column string interning; pool ids are
// storage-local, distinct from vocabulary ids.
class TokenColumn {
  public:
    static constexpr int32_t kMissing = -1;

    int32_t intern(const std::string& token);
    void push_id(int32_t pool_id) { cells_.push_back(pool_id); }
    void push_token(const std::string& token) { cells_.push_back(intern(token)); }
    void push_missing() { cells_.push_back(kMissing); }

    int32_t cell(size_t row) const { return cells_[row]; }
    void set_cell(size_t row, int32_t pool_id) { cells_[row] = pool_id; }
    const std::string& token(int32_t pool_id) const { return pool_[pool_id]; }
    bool is_missing(size_t row) const { return cells_[row] == kMissing; }
    size_t size() const { return cells_.size(); }
    size_t pool_size() const { return pool_.size(); }
    void reserve(size_t n) { cells_.reserve(n); }

  private:
    std::vector<std::string> pool_;
    std::unordered_map<std::string, int32_t> pool_ids_;
    std::vector<int32_t> cells_;
};

// Raw tabular records; continuous missing = NaN, categorical missing = -1.
class DatasetTable {
  public:
    DatasetTable() = default;
    explicit DatasetTable(Schema schema);

    const Schema& schema() const { return schema_; }
    size_t rows() const { return rows_; }
    size_t n_categorical() const { return cat_.size(); }
    size_t n_continuous() const { return cont_.size(); }

    void reserve(size_t n);
    // cells aligned with schema columns; empty string = missing
    void append_row(const std::vector<std::string>& cells, size_t line_no = 0);
    // fast path: pool ids per categorical column (pre-interned), values per
    // continuous column (NaN = missing)
    void append_row_values(const int32_t* cat_pool_ids, const double* cont_values, uint8_t label);
    void append_row_from(const DatasetTable& src, size_t src_row);
    int32_t intern_token(size_t cat_col, const std::string& token) { return cat_[cat_col].intern(token); }

    TokenColumn& cat_column(size_t i) { return cat_[i]; }
    const TokenColumn& cat_column(size_t i) const { return cat_[i]; }
    std::vector<double>& cont_column(size_t i) { return cont_[i]; }
    const std::vector<double>& cont_column(size_t i) const { return cont_[i]; }
    const std::vector<uint8_t>& labels() const { return labels_; }
    uint8_t label(size_t row) const { return labels_[row]; }

    const std::string& cat_name(size_t i) const { return cat_names_[i]; }
    const std::string& cont_name(size_t i) const { return cont_names_[i]; }
    const std::vector<std::string>& cat_names() const { return cat_names_; }
    const std::vector<std::string>& cont_names() const { return cont_names_; }

    std::pair<size_t, size_t> class_counts() const;  // (normal, attack)
    DatasetTable select_rows(const std::vector<uint32_t>& rows) const;

  private:
    Schema schema_;
    std::vector<TokenColumn> cat_;            // schema order among categorical
    std::vector<std::vector<double>> cont_;   // schema order among continuous
    std::vector<std::string> cat_names_;
    std::vector<std::string> cont_names_;
    std::vector<uint8_t> labels_;
    size_t rows_ = 0;
    int label_schema_idx_ = -1;
    std::vector<std::pair<ColumnKind, int>> col_map_;  // schema idx -> (kind, local idx)
};

struct ImputationStats {
    std::vector<std::string> names;  // continuous columns, schema order
    std::vector<double> means;
};

struct NormalizationStats {
    std::vector<std::string> names;
    std::vector<double> means;
    std::vector<double> stds;  // population std; 0 flags a constant column

    int find(const std::string& name) const;
};

class Vocabulary {
  public:
    void add_column(const std::string& name);
    int32_t add_token(size_t col, const std::string& token);  // id of existing or new token
    int column_index(const std::string& name) const;          // -1 when absent
    int32_t encode(size_t col, const std::string& token) const;  // 0 for UNK/unseen
    int32_t size(size_t col) const;                              // includes UNK
    size_t n_columns() const { return columns_.size(); }
    const std::string& column_name(size_t col) const { return columns_[col]; }
    const std::vector<std::string>& tokens(size_t col) const { return id_to_token_[col]; }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> id_to_token_;
    std::vector<std::unordered_map<std::string, int32_t>> token_to_id_;
};

struct FeatureRef {
    std::string name;
    ColumnKind kind;
};

// Integer/float-encoded rows ready for the model; cat/cont are row-major.
struct EncodedDataset {
    std::vector<FeatureRef> features;  // schema-ordered selected features
    std::vector<std::string> cat_names;
    std::vector<std::string> cont_names;
    std::vector<int32_t> vocab_sizes;  // per categorical column
    size_t n = 0;
    int m = 0;
    int c = 0;
    std::vector<int32_t> cat;
    std::vector<float> cont;
    std::vector<uint8_t> labels;

    const int32_t* cat_row(size_t r) const { return cat.data() + r * m; }
    const float* cont_row(size_t r) const { return cont.data() + r * c; }
    std::pair<size_t, size_t> class_counts() const;
};

struct SplitSpec {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
    uint64_t seed = 0;

    void validate() const;
};

struct Batch {
    size_t n = 0;
    int m = 0;
    int c = 0;
    std::vector<int32_t> cat;
    std::vector<float> cont;
    std::vector<uint8_t> labels;
};

// ---------------------------------------------------------------------------
// operations

DatasetTable load_csv(const std::string& path, const Schema& schema);

std::pair<DatasetTable, ImputationStats> impute_missing(const DatasetTable& table);

// Undersamples the majority class of files 1-4 and rebalances file 5 with the
// pooled surplus attack rows.
std::vector<DatasetTable> balance_files(const std::vector<DatasetTable>& tables, uint64_t seed);

NormalizationStats fit_normalization(const DatasetTable& train);
DatasetTable apply_normalization(const DatasetTable& table, const NormalizationStats& stats);

Vocabulary build_vocabulary(const DatasetTable& train);

EncodedDataset encode(const DatasetTable& table, const Vocabulary& vocab, const NormalizationStats& stats,
                      const std::vector<std::string>& selected);

struct SplitIndices {
    std::vector<uint32_t> train, val, test;
};
SplitIndices split_indices(size_t n, const SplitSpec& spec);

struct EncodedSplits {
    EncodedDataset train, val, test;
};
EncodedSplits split(const EncodedDataset& dataset, const SplitSpec& spec);

struct TableSplits {
    DatasetTable train, val, test;
};
TableSplits split_table(const DatasetTable& table, const SplitSpec& spec);

std::vector<std::vector<uint32_t>> make_batches(size_t n, size_t batch_size, bool shuffle, uint64_t seed);
Batch gather(const EncodedDataset& ds, const std::vector<uint32_t>& rows);

DatasetTable concat_tables(const std::vector<DatasetTable>& tables);

EncodedDataset subset_rows(const EncodedDataset& ds, const std::vector<uint32_t>& rows);
EncodedDataset select_columns(const EncodedDataset& ds, const std::vector<std::string>& selected);

// Per-class sampling without replacement; keeps max(1, floor(count*fraction))
// rows per class. Returned indices are sorted ascending.
std::vector<uint32_t> stratified_sample_indices(const std::vector<uint8_t>& labels, double fraction, uint64_t seed);

}  // namespace itct
