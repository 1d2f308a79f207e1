#include <iostream>

#include "CLI11.hpp"
#include "itct/surrogate.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate synthetic MQTT-IoT-IDS2020-shaped capture CSVs"};
    std::string out_dir = "data";
    itct::SurrogateSpec spec;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", spec.seed, "generator seed");
    app.add_option("--scale", spec.scale, "row-count multiplier");
    app.add_option("--noise", spec.noise_rate, "fraction of attack rows drawn from the normal profile");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto paths = itct::write_surrogate_csvs(spec, out_dir);
        for (const auto& p : paths) std::cout << p << "\n";
        std::cout << out_dir << "/schema.txt\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
