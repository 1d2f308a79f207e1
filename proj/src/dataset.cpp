#include "itct/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace itct {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_double(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    while (*end != '\0') {
        if (!std::isspace(static_cast<unsigned char>(*end))) return std::nullopt;
        ++end;
    }
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

// partial Fisher-Yates: first k entries of a seeded shuffle of [0, n)
std::vector<uint32_t> sample_without_replacement(size_t n, size_t k, Rng& rng) {
    std::vector<uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    for (size_t i = 0; i < k && i + 1 < n; ++i) {
        const size_t j = i + rng.below(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace

// ---------------------------------------------------------------------------
// Schema

std::string to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::continuous: return "continuous";
        case ColumnKind::label: return "label";
    }
    return "?";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "categorical") return ColumnKind::categorical;
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "label") return ColumnKind::label;
    throw DataError("schema: unknown column kind '" + s + "'");
}

Schema Schema::parse(const std::string& text) {
    Schema schema;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = split_line(line, ',');
        if (parts.size() != 2) throw DataError("schema: expected '<name>,<kind>' but got '" + line + "'");
        schema.columns.push_back({trim(parts[0]), column_kind_from_string(trim(parts[1]))});
    }
    schema.validate();
    return schema;
}

Schema Schema::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("schema file not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

Schema Schema::default_mqtt() {
    Schema s;
    const auto cat = ColumnKind::categorical;
    const auto cont = ColumnKind::continuous;
    s.columns = {
        {"protocol", cat},          {"ttl", cont},
        {"ip_len", cont},           {"ip_flag_df", cont},
        {"ip_flag_mf", cont},       {"ip_flag_rb", cont},
        {"tcp_flag_res", cont},     {"tcp_flag_ns", cont},
        {"tcp_flag_cwr", cont},     {"tcp_flag_ecn", cont},
        {"tcp_flag_urg", cont},     {"tcp_flag_ack", cont},
        {"tcp_flag_push", cat},     {"tcp_flag_rst", cont},
        {"tcp_flag_syn", cont},     {"tcp_flag_fin", cont},
        {"mqtt_message_type", cat}, {"mqtt_message_length", cont},
        {"mqtt_flag_uname", cont},  {"mqtt_flag_passwd", cont},
        {"mqtt_flag_retain", cont}, {"mqtt_flag_qos", cont},
        {"mqtt_flag_willflag", cont}, {"mqtt_flag_clean", cont},
        {"mqtt_flag_reserved", cont}, {"is_attack", ColumnKind::label},
    };
    s.validate();
    return s;
}

void Schema::validate() const {
    int labels = 0, cats = 0, conts = 0;
    std::unordered_map<std::string, int> seen;
    for (const auto& col : columns) {
        if (col.name.empty()) throw DataError("schema: empty column name");
        if (++seen[col.name] > 1) throw DataError("schema: duplicate column name '" + col.name + "'");
        switch (col.kind) {
            case ColumnKind::label: ++labels; break;
            case ColumnKind::categorical: ++cats; break;
            case ColumnKind::continuous: ++conts; break;
        }
    }
    if (labels != 1) throw DataError("schema: expected exactly one label column, found " + std::to_string(labels));
    if (cats < 1) throw DataError("schema: at least one categorical column required");
    if (conts < 1) throw DataError("schema: at least one continuous column required");
}

int Schema::label_index() const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].kind == ColumnKind::label) return static_cast<int>(i);
    return -1;
}

int Schema::find(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<int> Schema::categorical_indices() const {
    std::vector<int> out;
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].kind == ColumnKind::categorical) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> Schema::continuous_indices() const {
    std::vector<int> out;
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].kind == ColumnKind::continuous) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<std::string> Schema::feature_names() const {
    std::vector<std::string> out;
    for (const auto& col : columns)
        if (col.kind != ColumnKind::label) out.push_back(col.name);
    return out;
}

std::string Schema::to_text() const {
    std::string out;
    for (const auto& col : columns) out += col.name + "," + to_string(col.kind) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// TokenColumn / DatasetTable

int32_t TokenColumn::intern(const std::string& token) {
    auto it = pool_ids_.find(token);
    if (it != pool_ids_.end()) return it->second;
    const int32_t id = static_cast<int32_t>(pool_.size());
    pool_.push_back(token);
    pool_ids_.emplace(token, id);
    return id;
}

DatasetTable::DatasetTable(Schema schema) : schema_(std::move(schema)) {
    schema_.validate();
    col_map_.resize(schema_.columns.size());
    for (size_t i = 0; i < schema_.columns.size(); ++i) {
        const auto& col = schema_.columns[i];
        switch (col.kind) {
            case ColumnKind::categorical:
                col_map_[i] = {col.kind, static_cast<int>(cat_.size())};
                cat_.emplace_back();
                cat_names_.push_back(col.name);
                break;
            case ColumnKind::continuous:
                col_map_[i] = {col.kind, static_cast<int>(cont_.size())};
                cont_.emplace_back();
                cont_names_.push_back(col.name);
                break;
            case ColumnKind::label:
                col_map_[i] = {col.kind, 0};
                label_schema_idx_ = static_cast<int>(i);
                break;
        }
    }
}

void DatasetTable::reserve(size_t n) {
    for (auto& c : cat_) c.reserve(n);
    for (auto& c : cont_) c.reserve(n);
    labels_.reserve(n);
}

void DatasetTable::append_row(const std::vector<std::string>& cells, size_t line_no) {
    if (cells.size() != schema_.columns.size())
        throw DataError("row " + (line_no ? "at line " + std::to_string(line_no) + " " : "") + "has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(schema_.columns.size()));
    for (size_t i = 0; i < cells.size(); ++i) {
        const auto [kind, local] = col_map_[i];
        const std::string cell = trim(cells[i]);
        switch (kind) {
            case ColumnKind::categorical:
                if (cell.empty())
                    cat_[local].push_missing();
                else
                    cat_[local].push_token(cell);
                break;
            case ColumnKind::continuous: {
                const auto v = parse_double(cell);
                cont_[local].push_back(v ? *v : kNaN);
                break;
            }
            case ColumnKind::label: {
                const auto v = parse_double(cell);
                if (!v || (*v != 0.0 && *v != 1.0))
                    throw DataError("invalid label '" + cell + "'" +
                                    (line_no ? " at line " + std::to_string(line_no) : "") +
                                    " (expected 0 or 1)");
                labels_.push_back(static_cast<uint8_t>(*v));
                break;
            }
        }
    }
    ++rows_;
}

void DatasetTable::append_row_values(const int32_t* cat_pool_ids, const double* cont_values, uint8_t label) {
    for (size_t i = 0; i < cat_.size(); ++i) cat_[i].push_id(cat_pool_ids[i]);
    for (size_t i = 0; i < cont_.size(); ++i) cont_[i].push_back(cont_values[i]);
    labels_.push_back(label);
    ++rows_;
}

void DatasetTable::append_row_from(const DatasetTable& src, size_t src_row) {
    for (size_t i = 0; i < cat_.size(); ++i) {
        const auto& col = src.cat_[i];
        if (col.is_missing(src_row))
            cat_[i].push_missing();
        else
            cat_[i].push_token(col.token(col.cell(src_row)));
    }
    for (size_t i = 0; i < cont_.size(); ++i) cont_[i].push_back(src.cont_[i][src_row]);
    labels_.push_back(src.labels_[src_row]);
    ++rows_;
}

std::pair<size_t, size_t> DatasetTable::class_counts() const {
    size_t attack = 0;
    for (uint8_t y : labels_) attack += y;
    return {rows_ - attack, attack};
}

DatasetTable DatasetTable::select_rows(const std::vector<uint32_t>& rows) const {
    DatasetTable out(schema_);
    out.reserve(rows.size());
    for (uint32_t r : rows) out.append_row_from(*this, r);
    return out;
}

// ---------------------------------------------------------------------------
// load_csv

DatasetTable load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("dataset file not found: " + path);

    std::string header;
    if (!std::getline(in, header)) throw DataError("empty dataset file (no header): " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    auto header_cells = split_line(header, ',');
    for (auto& cell : header_cells) cell = trim(cell);

    // order-insensitive match by name; both directions reported
    std::vector<int> file_pos_for_schema(schema.columns.size(), -1);
    std::vector<std::string> missing, extra;
    for (size_t s = 0; s < schema.columns.size(); ++s) {
        const auto& name = schema.columns[s].name;
        auto it = std::find(header_cells.begin(), header_cells.end(), name);
        if (it == header_cells.end())
            missing.push_back(name);
        else
            file_pos_for_schema[s] = static_cast<int>(it - header_cells.begin());
    }
    for (const auto& cell : header_cells)
        if (schema.find(cell) < 0) extra.push_back(cell);
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "header/schema mismatch in " + path + ":";
        if (!missing.empty()) {
            msg += " missing from file:";
            for (const auto& n : missing) msg += " " + n;
            msg += ";";
        }
        if (!extra.empty()) {
            msg += " not in schema:";
            for (const auto& n : extra) msg += " " + n;
        }
        throw DataError(msg);
    }

    DatasetTable table(schema);
    std::vector<std::string> reordered(schema.columns.size());
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line, ',');
        if (cells.size() != header_cells.size())
            throw DataError(path + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(header_cells.size()));
        for (size_t s = 0; s < schema.columns.size(); ++s) reordered[s] = cells[file_pos_for_schema[s]];
        table.append_row(reordered, line_no);
    }
    return table;
}

// ---------------------------------------------------------------------------
// imputation

std::pair<DatasetTable, ImputationStats> impute_missing(const DatasetTable& table) {
    ImputationStats stats;
    DatasetTable out = table;
    for (size_t i = 0; i < out.n_continuous(); ++i) {
        auto& col = out.cont_column(i);
        double sum = 0.0;
        size_t count = 0;
        for (double v : col)
            if (!std::isnan(v)) {
                sum += v;
                ++count;
            }
        if (table.rows() > 0 && count == 0)
            throw DataError("continuous column '" + out.cont_name(i) + "' has no non-missing values to impute from");
        const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
        for (double& v : col)
            if (std::isnan(v)) v = mean;
        stats.names.push_back(out.cont_name(i));
        stats.means.push_back(mean);
    }
    for (size_t i = 0; i < out.n_categorical(); ++i) {
        auto& col = out.cat_column(i);
        int32_t unk_id = -1;
        for (size_t r = 0; r < col.size(); ++r)
            if (col.is_missing(r)) {
                if (unk_id < 0) unk_id = col.intern(kUnkToken);
                col.set_cell(r, unk_id);
            }
    }
    return {std::move(out), std::move(stats)};
}

// ---------------------------------------------------------------------------
// balancing

std::vector<DatasetTable> balance_files(const std::vector<DatasetTable>& tables, uint64_t seed) {
    if (tables.size() != 5) throw DataError("balance_files: expected 5 tables, got " + std::to_string(tables.size()));

    const auto [n5_normal, n5_attack] = tables[4].class_counts();
    if (n5_attack != 0)
        throw DataError("balance_files: table 5 must contain only normal rows, found " + std::to_string(n5_attack) +
                        " attack rows");

    std::vector<DatasetTable> out;
    out.reserve(5);
    std::vector<std::pair<uint32_t, uint32_t>> surplus_pool;  // (table idx, row idx), attack rows only

    for (size_t k = 0; k < 4; ++k) {
        const auto& t = tables[k];
        const auto [n_normal, n_attack] = t.class_counts();
        if (n_normal == 0 || n_attack == 0)
            throw DataError("balance_files: table " + std::to_string(k + 1) + " is missing one class (normal=" +
                            std::to_string(n_normal) + ", attack=" + std::to_string(n_attack) + ")");
        if (n_normal == n_attack) {
            out.push_back(t);
            continue;
        }
        const uint8_t majority = n_attack > n_normal ? 1 : 0;
        const size_t majority_count = std::max(n_normal, n_attack);
        const size_t minority_count = std::min(n_normal, n_attack);

        std::vector<uint32_t> majority_rows;
        majority_rows.reserve(majority_count);
        for (size_t r = 0; r < t.rows(); ++r)
            if (t.label(r) == majority) majority_rows.push_back(static_cast<uint32_t>(r));

        Rng rng(mix_seed(seed, k));
        auto chosen_pos = sample_without_replacement(majority_rows.size(), minority_count, rng);
        std::vector<uint8_t> keep(majority_rows.size(), 0);
        for (uint32_t p : chosen_pos) keep[p] = 1;

        std::vector<uint32_t> keep_rows;
        keep_rows.reserve(2 * minority_count);
        size_t maj_seen = 0;
        for (size_t r = 0; r < t.rows(); ++r) {
            if (t.label(r) != majority) {
                keep_rows.push_back(static_cast<uint32_t>(r));
            } else {
                if (keep[maj_seen])
                    keep_rows.push_back(static_cast<uint32_t>(r));
                else if (majority == 1)
                    surplus_pool.emplace_back(static_cast<uint32_t>(k), static_cast<uint32_t>(r));
                ++maj_seen;
            }
        }
        out.push_back(t.select_rows(keep_rows));
    }

    // file 5: append a seeded sample of the pooled surplus attack rows
    DatasetTable t5 = tables[4];
    const size_t take = std::min(surplus_pool.size(), n5_normal);
    Rng rng(mix_seed(seed, 4));
    auto chosen = sample_without_replacement(surplus_pool.size(), take, rng);
    std::sort(chosen.begin(), chosen.end());
    t5.reserve(t5.rows() + take);
    for (uint32_t p : chosen) {
        const auto [ti, ri] = surplus_pool[p];
        t5.append_row_from(tables[ti], ri);
    }
    out.push_back(std::move(t5));
    return out;
}

// ---------------------------------------------------------------------------
// normalization

NormalizationStats fit_normalization(const DatasetTable& train) {
    NormalizationStats stats;
    for (size_t i = 0; i < train.n_continuous(); ++i) {
        const auto& col = train.cont_column(i);
        double sum = 0.0;
        size_t count = 0;
        for (double v : col)
            if (!std::isnan(v)) {
                sum += v;
                ++count;
            }
        const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
        double var = 0.0;
        for (double v : col)
            if (!std::isnan(v)) var += (v - mean) * (v - mean);
        if (count > 0) var /= static_cast<double>(count);
        stats.names.push_back(train.cont_name(i));
        stats.means.push_back(mean);
        stats.stds.push_back(std::sqrt(var));
    }
    return stats;
}

int NormalizationStats::find(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

DatasetTable apply_normalization(const DatasetTable& table, const NormalizationStats& stats) {
    DatasetTable out = table;
    for (size_t i = 0; i < out.n_continuous(); ++i) {
        const int s = stats.find(out.cont_name(i));
        if (s < 0) throw DataError("no normalization stats for column '" + out.cont_name(i) + "'");
        const double mean = stats.means[s];
        const double sd = stats.stds[s];
        for (double& v : out.cont_column(i)) {
            if (std::isnan(v)) continue;
            v = sd == 0.0 ? 0.0 : (v - mean) / sd;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// vocabulary

void Vocabulary::add_column(const std::string& name) {
    columns_.push_back(name);
    id_to_token_.push_back({kUnkToken});
    token_to_id_.push_back({{kUnkToken, 0}});
}

int32_t Vocabulary::add_token(size_t col, const std::string& token) {
    auto& map = token_to_id_[col];
    auto it = map.find(token);
    if (it != map.end()) return it->second;
    const int32_t id = static_cast<int32_t>(id_to_token_[col].size());
    id_to_token_[col].push_back(token);
    map.emplace(token, id);
    return id;
}

int Vocabulary::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == name) return static_cast<int>(i);
    return -1;
}

int32_t Vocabulary::encode(size_t col, const std::string& token) const {
    const auto& map = token_to_id_[col];
    auto it = map.find(token);
    return it == map.end() ? 0 : it->second;
}

int32_t Vocabulary::size(size_t col) const { return static_cast<int32_t>(id_to_token_[col].size()); }

Vocabulary build_vocabulary(const DatasetTable& train) {
    Vocabulary vocab;
    for (size_t i = 0; i < train.n_categorical(); ++i) {
        vocab.add_column(train.cat_name(i));
        const auto& col = train.cat_column(i);
        // first-appearance order over pool ids seen in row order
        std::vector<uint8_t> seen(col.pool_size(), 0);
        for (size_t r = 0; r < col.size(); ++r) {
            if (col.is_missing(r)) continue;
            const int32_t pid = col.cell(r);
            if (seen[pid]) continue;
            seen[pid] = 1;
            const std::string& tok = col.token(pid);
            if (tok != kUnkToken) vocab.add_token(i, tok);
        }
    }
    return vocab;
}

// ---------------------------------------------------------------------------
// encoding

EncodedDataset encode(const DatasetTable& table, const Vocabulary& vocab, const NormalizationStats& stats,
                      const std::vector<std::string>& selected) {
    const auto& schema = table.schema();
    // canonical order: schema order, independent of the selection ranking
    std::vector<int> sel_schema_idx;
    for (const auto& name : selected) {
        const int idx = schema.find(name);
        if (idx < 0 || schema.columns[idx].kind == ColumnKind::label)
            throw DataError("selected feature not in schema: " + name);
        sel_schema_idx.push_back(idx);
    }
    std::sort(sel_schema_idx.begin(), sel_schema_idx.end());
    sel_schema_idx.erase(std::unique(sel_schema_idx.begin(), sel_schema_idx.end()), sel_schema_idx.end());

    EncodedDataset ds;
    std::vector<std::pair<int, int>> cat_srcs;   // (vocab col, table cat col)
    std::vector<std::pair<int, int>> cont_srcs;  // (stats idx, table cont col)
    for (int idx : sel_schema_idx) {
        const auto& col = schema.columns[idx];
        ds.features.push_back({col.name, col.kind});
        if (col.kind == ColumnKind::categorical) {
            const int vcol = vocab.column_index(col.name);
            if (vcol < 0) throw DataError("vocabulary missing column '" + col.name + "'");
            int local = -1;
            for (size_t i = 0; i < table.n_categorical(); ++i)
                if (table.cat_name(i) == col.name) local = static_cast<int>(i);
            cat_srcs.emplace_back(vcol, local);
            ds.cat_names.push_back(col.name);
            ds.vocab_sizes.push_back(vocab.size(vcol));
        } else {
            const int s = stats.find(col.name);
            if (s < 0) throw DataError("no normalization stats for column '" + col.name + "'");
            int local = -1;
            for (size_t i = 0; i < table.n_continuous(); ++i)
                if (table.cont_name(i) == col.name) local = static_cast<int>(i);
            cont_srcs.emplace_back(s, local);
            ds.cont_names.push_back(col.name);
        }
    }

    ds.m = static_cast<int>(cat_srcs.size());
    ds.c = static_cast<int>(cont_srcs.size());
    ds.n = table.rows();
    ds.cat.resize(ds.n * ds.m);
    ds.cont.resize(ds.n * ds.c);
    ds.labels.assign(table.labels().begin(), table.labels().end());

    for (int j = 0; j < ds.m; ++j) {
        const auto [vcol, local] = cat_srcs[j];
        const auto& col = table.cat_column(local);
        // pool id -> vocab id, computed once per column
        std::vector<int32_t> pool_to_vocab(col.pool_size());
        for (size_t p = 0; p < col.pool_size(); ++p)
            pool_to_vocab[p] = vocab.encode(vcol, col.token(static_cast<int32_t>(p)));
        for (size_t r = 0; r < ds.n; ++r) {
            if (col.is_missing(r))
                throw DataError("encode: missing categorical value in column '" + ds.cat_names[j] +
                                "' (impute first)");
            ds.cat[r * ds.m + j] = pool_to_vocab[col.cell(r)];
        }
    }
    for (int j = 0; j < ds.c; ++j) {
        const auto [s, local] = cont_srcs[j];
        const auto& col = table.cont_column(local);
        const double mean = stats.means[s];
        const double sd = stats.stds[s];
        for (size_t r = 0; r < ds.n; ++r) {
            const double v = col[r];
            if (std::isnan(v))
                throw DataError("encode: missing continuous value in column '" + ds.cont_names[j] +
                                "' (impute first)");
            ds.cont[r * ds.c + j] = sd == 0.0 ? 0.0f : static_cast<float>((v - mean) / sd);
        }
    }
    return ds;
}

std::pair<size_t, size_t> EncodedDataset::class_counts() const {
    size_t attack = 0;
    for (uint8_t y : labels) attack += y;
    return {n - attack, attack};
}

// ---------------------------------------------------------------------------
// splitting and batching

void SplitSpec::validate() const {
    if (train <= 0.0 || val <= 0.0 || test <= 0.0) throw DataError("split fractions must be positive");
    if (std::abs(train + val + test - 1.0) > 1e-9) throw DataError("split fractions must sum to 1.0");
}

SplitIndices split_indices(size_t n, const SplitSpec& spec) {
    spec.validate();
    if (n == 0) throw DataError("split: dataset is empty");
    std::vector<uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(spec.seed);
    for (size_t i = n - 1; i > 0; --i) {
        const size_t j = rng.below(i + 1);
        std::swap(idx[i], idx[j]);
    }
    const size_t cut1 = static_cast<size_t>(std::floor(spec.train * static_cast<double>(n)));
    const size_t cut2 = static_cast<size_t>(std::floor((spec.train + spec.val) * static_cast<double>(n)));
    SplitIndices out;
    out.train.assign(idx.begin(), idx.begin() + cut1);
    out.val.assign(idx.begin() + cut1, idx.begin() + cut2);
    out.test.assign(idx.begin() + cut2, idx.end());
    if (out.train.empty() || out.val.empty() || out.test.empty())
        throw DataError("split: dataset too small for an 80/10/10 split (n=" + std::to_string(n) + ")");
    return out;
}

EncodedDataset subset_rows(const EncodedDataset& ds, const std::vector<uint32_t>& rows) {
    EncodedDataset out;
    out.features = ds.features;
    out.cat_names = ds.cat_names;
    out.cont_names = ds.cont_names;
    out.vocab_sizes = ds.vocab_sizes;
    out.m = ds.m;
    out.c = ds.c;
    out.n = rows.size();
    out.cat.resize(out.n * out.m);
    out.cont.resize(out.n * out.c);
    out.labels.resize(out.n);
    for (size_t i = 0; i < rows.size(); ++i) {
        const size_t r = rows[i];
        std::copy_n(ds.cat.data() + r * ds.m, ds.m, out.cat.data() + i * ds.m);
        std::copy_n(ds.cont.data() + r * ds.c, ds.c, out.cont.data() + i * ds.c);
        out.labels[i] = ds.labels[r];
    }
    return out;
}

EncodedSplits split(const EncodedDataset& dataset, const SplitSpec& spec) {
    const auto idx = split_indices(dataset.n, spec);
    return {subset_rows(dataset, idx.train), subset_rows(dataset, idx.val), subset_rows(dataset, idx.test)};
}

TableSplits split_table(const DatasetTable& table, const SplitSpec& spec) {
    const auto idx = split_indices(table.rows(), spec);
    return {table.select_rows(idx.train), table.select_rows(idx.val), table.select_rows(idx.test)};
}

std::vector<std::vector<uint32_t>> make_batches(size_t n, size_t batch_size, bool shuffle, uint64_t seed) {
    if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
    std::vector<uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    if (shuffle && n > 1) {
        Rng rng(seed);
        for (size_t i = n - 1; i > 0; --i) {
            const size_t j = rng.below(i + 1);
            std::swap(idx[i], idx[j]);
        }
    }
    std::vector<std::vector<uint32_t>> out;
    for (size_t start = 0; start < n; start += batch_size) {
        const size_t end = std::min(n, start + batch_size);
        out.emplace_back(idx.begin() + start, idx.begin() + end);
    }
    return out;
}

Batch gather(const EncodedDataset& ds, const std::vector<uint32_t>& rows) {
    Batch b;
    b.n = rows.size();
    b.m = ds.m;
    b.c = ds.c;
    b.cat.resize(b.n * b.m);
    b.cont.resize(b.n * b.c);
    b.labels.resize(b.n);
    for (size_t i = 0; i < rows.size(); ++i) {
        const size_t r = rows[i];
        std::copy_n(ds.cat.data() + r * ds.m, ds.m, b.cat.data() + i * ds.m);
        std::copy_n(ds.cont.data() + r * ds.c, ds.c, b.cont.data() + i * ds.c);
        b.labels[i] = ds.labels[r];
    }
    return b;
}

DatasetTable concat_tables(const std::vector<DatasetTable>& tables) {
    if (tables.empty()) throw DataError("concat_tables: no tables");
    for (size_t k = 1; k < tables.size(); ++k) {
        const auto &a = tables[0].schema().columns, &b = tables[k].schema().columns;
        if (a.size() != b.size()) throw DataError("concat_tables: schema mismatch");
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i].name != b[i].name || a[i].kind != b[i].kind) throw DataError("concat_tables: schema mismatch");
    }
    DatasetTable out(tables[0].schema());
    size_t total = 0;
    for (const auto& t : tables) total += t.rows();
    out.reserve(total);
    for (const auto& t : tables)
        for (size_t r = 0; r < t.rows(); ++r) out.append_row_from(t, r);
    return out;
}

EncodedDataset select_columns(const EncodedDataset& ds, const std::vector<std::string>& selected) {
    std::vector<uint8_t> keep(ds.features.size(), 0);
    for (const auto& name : selected) {
        bool found = false;
        for (size_t i = 0; i < ds.features.size(); ++i)
            if (ds.features[i].name == name) {
                keep[i] = 1;
                found = true;
            }
        if (!found) throw DataError("select_columns: feature '" + name + "' not present in encoded dataset");
    }
    EncodedDataset out;
    std::vector<int> cat_keep, cont_keep;
    int cat_pos = 0, cont_pos = 0;
    for (size_t i = 0; i < ds.features.size(); ++i) {
        const bool is_cat = ds.features[i].kind == ColumnKind::categorical;
        if (keep[i]) {
            out.features.push_back(ds.features[i]);
            if (is_cat) {
                cat_keep.push_back(cat_pos);
                out.cat_names.push_back(ds.features[i].name);
                out.vocab_sizes.push_back(ds.vocab_sizes[cat_pos]);
            } else {
                cont_keep.push_back(cont_pos);
                out.cont_names.push_back(ds.features[i].name);
            }
        }
        if (is_cat)
            ++cat_pos;
        else
            ++cont_pos;
    }
    out.m = static_cast<int>(cat_keep.size());
    out.c = static_cast<int>(cont_keep.size());
    out.n = ds.n;
    out.cat.resize(out.n * out.m);
    out.cont.resize(out.n * out.c);
    out.labels = ds.labels;
    for (size_t r = 0; r < ds.n; ++r) {
        for (int j = 0; j < out.m; ++j) out.cat[r * out.m + j] = ds.cat[r * ds.m + cat_keep[j]];
        for (int j = 0; j < out.c; ++j) out.cont[r * out.c + j] = ds.cont[r * ds.c + cont_keep[j]];
    }
    return out;
}

std::vector<uint32_t> stratified_sample_indices(const std::vector<uint8_t>& labels, double fraction, uint64_t seed) {
    if (fraction <= 0.0 || fraction > 1.0) throw std::invalid_argument("stratified fraction must be in (0, 1]");
    std::vector<uint32_t> result;
    if (fraction == 1.0) {
        result.resize(labels.size());
        std::iota(result.begin(), result.end(), 0u);
        return result;
    }
    for (uint8_t cls : {uint8_t(0), uint8_t(1)}) {
        std::vector<uint32_t> rows;
        for (size_t r = 0; r < labels.size(); ++r)
            if (labels[r] == cls) rows.push_back(static_cast<uint32_t>(r));
        if (rows.empty()) continue;
        const size_t k = std::max<size_t>(1, static_cast<size_t>(std::floor(fraction * static_cast<double>(rows.size()))));
        Rng rng(mix_seed(seed, cls));
        auto pos = sample_without_replacement(rows.size(), k, rng);
        for (uint32_t p : pos) result.push_back(rows[p]);
    }
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace itct
