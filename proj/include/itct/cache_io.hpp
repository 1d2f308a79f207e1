#pragma once

#include <string>

#include "itct/dataset.hpp"
#include "json.hpp"

namespace itct {

// Preprocessed splits plus everything needed to encode new data the same way.
struct DatasetCache {
    EncodedDataset train, val, test;
    Vocabulary vocab;
    NormalizationStats stats;
    uint64_t seed = 0;
    nlohmann::ordered_json summary;  // free-form preprocessing counts
};

// Binary: magic "ITCTDS1", then little-endian 32-bit ints for ids/dims and
// 32-bit floats for continuous values; vocab and stats live in the sidecar.
void write_dataset_cache(const DatasetCache& cache, const std::string& bin_path, const std::string& json_path);
DatasetCache read_dataset_cache(const std::string& bin_path, const std::string& json_path);

}  // namespace itct
