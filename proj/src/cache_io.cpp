#include "itct/cache_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little, "cache format is little-endian");

namespace itct {

namespace {

constexpr char kMagic[] = "ITCTDS1";
constexpr int32_t kVersion = 1;

void write_i32(std::ofstream& out, int32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

int32_t read_i32(std::ifstream& in, const std::string& path) {
    int32_t v;
    if (!in.read(reinterpret_cast<char*>(&v), 4)) throw DataError("truncated cache file: " + path);
    return v;
}

template <class T>
void write_array(std::ofstream& out, const std::vector<T>& v) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
void read_array(std::ifstream& in, std::vector<T>& v, size_t count, const std::string& path) {
    v.resize(count);
    if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(T))))
        throw DataError("truncated cache file: " + path);
}

void write_split(std::ofstream& out, const EncodedDataset& ds) {
    write_i32(out, static_cast<int32_t>(ds.n));
    write_array(out, ds.cat);
    write_array(out, ds.cont);
    std::vector<int32_t> labels(ds.labels.begin(), ds.labels.end());
    write_array(out, labels);
}

void read_split(std::ifstream& in, EncodedDataset& ds, int m, int c, const std::string& path) {
    ds.m = m;
    ds.c = c;
    ds.n = static_cast<size_t>(read_i32(in, path));
    read_array(in, ds.cat, ds.n * m, path);
    read_array(in, ds.cont, ds.n * c, path);
    std::vector<int32_t> labels;
    read_array(in, labels, ds.n, path);
    ds.labels.assign(labels.begin(), labels.end());
}

}  // namespace

void write_dataset_cache(const DatasetCache& cache, const std::string& bin_path, const std::string& json_path) {
    std::ofstream out(bin_path, std::ios::binary);
    if (!out) throw DataError("cannot write cache file: " + bin_path);
    out.write(kMagic, 7);
    write_i32(out, kVersion);
    write_i32(out, cache.train.m);
    write_i32(out, cache.train.c);
    write_split(out, cache.train);
    write_split(out, cache.val);
    write_split(out, cache.test);
    if (!out) throw DataError("write failed: " + bin_path);

    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["seed"] = cache.seed;
    auto features = nlohmann::ordered_json::array();
    for (const auto& f : cache.train.features) features.push_back({{"name", f.name}, {"kind", to_string(f.kind)}});
    j["features"] = features;
    auto vocab = nlohmann::ordered_json::array();
    for (size_t i = 0; i < cache.vocab.n_columns(); ++i)
        vocab.push_back({{"name", cache.vocab.column_name(i)}, {"tokens", cache.vocab.tokens(i)}});
    j["vocabulary"] = vocab;
    auto norm = nlohmann::ordered_json::array();
    for (size_t i = 0; i < cache.stats.names.size(); ++i)
        norm.push_back({{"name", cache.stats.names[i]}, {"mean", cache.stats.means[i]}, {"std", cache.stats.stds[i]}});
    j["normalization"] = norm;
    j["summary"] = cache.summary;

    std::ofstream js(json_path);
    if (!js) throw DataError("cannot write cache sidecar: " + json_path);
    js << j.dump(2) << "\n";
}

DatasetCache read_dataset_cache(const std::string& bin_path, const std::string& json_path) {
    std::ifstream js(json_path);
    if (!js) throw DataError("cache sidecar not found: " + json_path);
    nlohmann::ordered_json j;
    try {
        js >> j;
    } catch (const std::exception& e) {
        throw DataError("invalid cache sidecar " + json_path + ": " + e.what());
    }
    if (j.value("version", 0) != kVersion)
        throw DataError("cache sidecar " + json_path + " has unsupported version " +
                        std::to_string(j.value("version", 0)));

    DatasetCache cache;
    cache.seed = j.value("seed", uint64_t(0));
    cache.summary = j.value("summary", nlohmann::ordered_json::object());

    std::vector<FeatureRef> features;
    for (const auto& f : j.at("features"))
        features.push_back({f.at("name").get<std::string>(), column_kind_from_string(f.at("kind").get<std::string>())});
    for (const auto& v : j.at("vocabulary")) {
        const std::string name = v.at("name").get<std::string>();
        cache.vocab.add_column(name);
        const int col = cache.vocab.column_index(name);
        const auto tokens = v.at("tokens").get<std::vector<std::string>>();
        for (size_t t = 1; t < tokens.size(); ++t) cache.vocab.add_token(col, tokens[t]);
    }
    for (const auto& s : j.at("normalization")) {
        cache.stats.names.push_back(s.at("name").get<std::string>());
        cache.stats.means.push_back(s.at("mean").get<double>());
        cache.stats.stds.push_back(s.at("std").get<double>());
    }

    std::ifstream in(bin_path, std::ios::binary);
    if (!in) throw DataError("cache file not found: " + bin_path);
    char magic[7];
    if (!in.read(magic, 7) || std::memcmp(magic, kMagic, 7) != 0)
        throw DataError("not a dataset cache (bad magic): " + bin_path);
    if (read_i32(in, bin_path) != kVersion) throw DataError("unsupported cache version in " + bin_path);
    const int m = read_i32(in, bin_path);
    const int c = read_i32(in, bin_path);

    std::vector<std::string> cat_names, cont_names;
    std::vector<int32_t> vocab_sizes;
    for (const auto& f : features) {
        if (f.kind == ColumnKind::categorical) {
            cat_names.push_back(f.name);
            const int col = cache.vocab.column_index(f.name);
            if (col < 0) throw DataError("cache sidecar missing vocabulary for column '" + f.name + "'");
            vocab_sizes.push_back(cache.vocab.size(col));
        } else {
            cont_names.push_back(f.name);
        }
    }
    if (static_cast<int>(cat_names.size()) != m || static_cast<int>(cont_names.size()) != c)
        throw DataError("cache sidecar feature list does not match binary dims in " + bin_path);

    for (EncodedDataset* ds : {&cache.train, &cache.val, &cache.test}) {
        read_split(in, *ds, m, c, bin_path);
        ds->features = features;
        ds->cat_names = cat_names;
        ds->cont_names = cont_names;
        ds->vocab_sizes = vocab_sizes;
    }
    return cache;
}

}  // namespace itct
