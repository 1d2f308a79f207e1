#include "itct/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace itct {

namespace {

enum class Scenario { scan_a, scan_su, sparta, mqtt_bf, normal_op };

std::string num(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string flag(Rng& rng, double p) { return rng.bernoulli(p) ? "1" : "0"; }

const char* pick_mqtt_type(Rng& rng, bool bruteforce) {
    const double u = rng.uniform();
    if (bruteforce) {
        if (u < 0.80) return "CONNECT";
        if (u < 0.95) return "CONNACK";
        return "DISCONNECT";
    }
    if (u < 0.58) return "PUBLISH";
    if (u < 0.70) return "PUBACK";
    if (u < 0.80) return "PINGREQ";
    if (u < 0.90) return "PINGRESP";
    if (u < 0.95) return "SUBSCRIBE";
    if (u < 0.98) return "CONNECT";
    return "CONNACK";
}

// cells in Schema::default_mqtt() column order
std::vector<std::string> make_row(Rng& rng, Scenario scenario, bool attack) {
    std::string protocol;
    double ttl, ip_len;
    double p_df = 0.6;
    double p_syn = 0.07, p_rst = 0.03, p_ack = 0.85, p_push = 0.45, p_fin = 0.08;
    bool mqtt_bruteforce = false;

    if (!attack) {
        const double u = rng.uniform();
        protocol = u < 0.55 ? "TCP" : (u < 0.85 ? "MQTT" : "UDP");
        ttl = rng.bernoulli(0.7) ? 64.0 + 4.0 * rng.normal() : 128.0 + 8.0 * rng.normal();
        ip_len = 130.0 + 35.0 * rng.normal();
    } else {
        switch (scenario) {
            case Scenario::scan_a:
                protocol = "TCP";
                ttl = 44.0 + 6.0 * rng.normal();
                ip_len = 60.0 + 8.0 * rng.normal();
                p_syn = 0.85;
                p_rst = 0.50;
                p_ack = 0.20;
                p_push = 0.05;
                p_df = 0.3;
                break;
            case Scenario::scan_su:
                protocol = "UDP";
                ttl = 46.0 + 6.0 * rng.normal();
                ip_len = 56.0 + 7.0 * rng.normal();
                p_df = 0.25;
                break;
            case Scenario::sparta:
                protocol = "TCP";
                ttl = 52.0 + 5.0 * rng.normal();
                ip_len = 95.0 + 18.0 * rng.normal();
                p_push = 0.75;
                p_ack = 0.90;
                p_syn = 0.20;
                p_df = 0.35;
                break;
            default:  // mqtt_bf
                protocol = "MQTT";
                ttl = 48.0 + 5.0 * rng.normal();
                ip_len = 70.0 + 12.0 * rng.normal();
                p_push = 0.60;
                p_ack = 0.90;
                mqtt_bruteforce = true;
                break;
        }
    }
    ttl = std::max(1.0, std::min(255.0, ttl));
    ip_len = std::max(40.0, ip_len);

    const bool is_tcpish = protocol != "UDP";
    const bool is_mqtt = protocol == "MQTT";

    std::vector<std::string> cells;
    cells.reserve(26);
    cells.push_back(protocol);
    cells.push_back(rng.bernoulli(0.005) ? "" : num(ttl, 0));  // sporadic missing ttl
    cells.push_back(rng.bernoulli(0.002) ? "" : num(ip_len, 0));
    cells.push_back(flag(rng, p_df));
    cells.push_back(flag(rng, 0.01));
    cells.push_back("0");
    // tcp flags: empty on UDP rows
    if (is_tcpish) {
        cells.push_back("0");                       // tcp_flag_res
        cells.push_back("0");                       // tcp_flag_ns
        cells.push_back(flag(rng, 0.01));           // tcp_flag_cwr
        cells.push_back(flag(rng, 0.01));           // tcp_flag_ecn
        cells.push_back(flag(rng, 0.01));           // tcp_flag_urg
        cells.push_back(flag(rng, p_ack));          // tcp_flag_ack
        cells.push_back(flag(rng, p_push));         // tcp_flag_push (categorical)
        cells.push_back(flag(rng, p_rst));          // tcp_flag_rst
        cells.push_back(flag(rng, p_syn));          // tcp_flag_syn
        cells.push_back(flag(rng, p_fin));          // tcp_flag_fin
    } else {
        for (int i = 0; i < 10; ++i) cells.push_back("");
    }
    // mqtt fields: empty on non-MQTT rows
    if (is_mqtt) {
        cells.push_back(pick_mqtt_type(rng, mqtt_bruteforce));  // mqtt_message_type
        const double mlen = mqtt_bruteforce ? 42.0 + 7.0 * rng.normal() : 86.0 + 22.0 * rng.normal();
        cells.push_back(num(std::max(2.0, mlen), 0));           // mqtt_message_length
        cells.push_back(flag(rng, mqtt_bruteforce ? 0.90 : 0.05));  // uname
        cells.push_back(flag(rng, mqtt_bruteforce ? 0.90 : 0.04));  // passwd
        cells.push_back(flag(rng, mqtt_bruteforce ? 0.01 : 0.10));  // retain
        cells.push_back(num(rng.bernoulli(0.3) ? 1.0 : 0.0, 0));    // qos
        cells.push_back(flag(rng, 0.05));                            // willflag
        cells.push_back(flag(rng, mqtt_bruteforce ? 0.95 : 0.30));   // clean
        cells.push_back("0");                                        // reserved
    } else {
        for (int i = 0; i < 9; ++i) cells.push_back("");
    }
    cells.push_back(attack ? "1" : "0");
    return cells;
}

DatasetTable make_file(const Schema& schema, Scenario scenario, size_t n_normal, size_t n_attack,
                       const SurrogateSpec& spec, uint64_t stream) {
    Rng rng(mix_seed(spec.seed, stream));
    DatasetTable table(schema);
    table.reserve(n_normal + n_attack);
    // interleave classes deterministically so balancing sees mixed row order
    size_t normal_left = n_normal, attack_left = n_attack;
    while (normal_left + attack_left > 0) {
        const bool emit_attack =
            attack_left > 0 &&
            (normal_left == 0 || rng.uniform() < static_cast<double>(attack_left) / (normal_left + attack_left));
        if (emit_attack) {
            const bool noisy = rng.bernoulli(spec.noise_rate);
            auto cells = make_row(rng, scenario, !noisy);
            cells.back() = "1";  // noisy rows keep the attack label but a normal profile
            table.append_row(cells);
            --attack_left;
        } else {
            table.append_row(make_row(rng, scenario, false));
            --normal_left;
        }
    }
    return table;
}

}  // namespace

std::vector<DatasetTable> make_surrogate_tables(const SurrogateSpec& spec) {
    const Schema schema = Schema::default_mqtt();
    const auto scaled = [&](double base) { return static_cast<size_t>(std::lround(base * spec.scale)); };
    std::vector<DatasetTable> tables;
    tables.push_back(make_file(schema, Scenario::scan_a, scaled(1770), scaled(1020), spec, 1));
    tables.push_back(make_file(schema, Scenario::scan_su, scaled(5270), scaled(560), spec, 2));
    tables.push_back(make_file(schema, Scenario::sparta, scaled(2360), scaled(9000), spec, 3));
    tables.push_back(make_file(schema, Scenario::mqtt_bf, scaled(800), scaled(4000), spec, 4));
    tables.push_back(make_file(schema, Scenario::normal_op, scaled(6000), 0, spec, 5));
    return tables;
}

void write_csv(const DatasetTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write CSV: " + path);
    const auto& cols = table.schema().columns;
    for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
    out << "\n";
    std::vector<std::pair<ColumnKind, int>> layout;
    {
        int cat_i = 0, cont_i = 0;
        for (const auto& col : cols) {
            if (col.kind == ColumnKind::categorical)
                layout.emplace_back(col.kind, cat_i++);
            else if (col.kind == ColumnKind::continuous)
                layout.emplace_back(col.kind, cont_i++);
            else
                layout.emplace_back(col.kind, 0);
        }
    }
    for (size_t r = 0; r < table.rows(); ++r) {
        for (size_t i = 0; i < cols.size(); ++i) {
            if (i) out << ",";
            const auto [kind, local] = layout[i];
            if (kind == ColumnKind::categorical) {
                const auto& col = table.cat_column(local);
                if (!col.is_missing(r)) out << col.token(col.cell(r));
            } else if (kind == ColumnKind::continuous) {
                const double v = table.cont_column(local)[r];
                if (!std::isnan(v)) out << num(v, 6);
            } else {
                out << static_cast<int>(table.label(r));
            }
        }
        out << "\n";
    }
    if (!out) throw DataError("write failed: " + path);
}

std::vector<std::string> write_surrogate_csvs(const SurrogateSpec& spec, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto tables = make_surrogate_tables(spec);
    const auto& stems = surrogate_file_stems();
    std::vector<std::string> paths;
    for (size_t i = 0; i < tables.size(); ++i) {
        const std::string path = (std::filesystem::path(dir) / (stems[i] + ".csv")).string();
        write_csv(tables[i], path);
        paths.push_back(path);
    }
    std::ofstream schema_out(std::filesystem::path(dir) / "schema.txt");
    schema_out << Schema::default_mqtt().to_text();
    return paths;
}

}  // namespace itct
