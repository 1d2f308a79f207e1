#pragma once

#include <string>
#include <vector>

#include "itct/dataset.hpp"

namespace itct {

// Synthetic stand-in for the five MQTT-IoT-IDS2020 capture files, used when
// the real CSVs are not available. Five scenarios: aggressive scan, UDP scan,
// SSH brute-force, MQTT brute-force, normal-only. Attack rows shift protocol
// mix, TCP flag patterns, ttl, packet lengths and MQTT connect behaviour;
// a noise fraction of attack rows is drawn from the normal profile so classes
// overlap. MQTT fields are empty on non-MQTT rows and TCP flags are empty on
// UDP rows, which exercises imputation and UNK handling.
struct SurrogateSpec {
    uint64_t seed = 7;
    double scale = 1.0;        // multiplies the base per-file row counts
    double noise_rate = 0.18;  // fraction of attack rows drawn from the normal profile
};

inline const std::vector<std::string>& surrogate_file_stems() {
    static const std::vector<std::string> stems = {"scan_a", "scan_su", "sparta", "mqtt_bruteforce", "normal"};
    return stems;
}

std::vector<DatasetTable> make_surrogate_tables(const SurrogateSpec& spec);

// Writes the five CSVs plus schema.txt into dir; returns the CSV paths.
std::vector<std::string> write_surrogate_csvs(const SurrogateSpec& spec, const std::string& dir);

void write_csv(const DatasetTable& table, const std::string& path);

}  // namespace itct
