// Regenerates the replay fixture data files. The builder is deterministic,
// so rerunning this tool must leave a clean checkout unchanged.

#include <iostream>

#include "evalgate/sim_agent.hpp"

int main(int argc, char** argv) {
    std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
    try {
        for (const auto& label : evalgate::replay_fixture_labels()) {
            evalgate::write_replay_fixture(evalgate::build_replay_fixture(label), dir);
            std::cout << "wrote " << label << " fixture to " << dir.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
