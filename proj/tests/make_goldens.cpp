// Regenerates tests/golden/ from the oracle run over the bundled fixture.
//   make_goldens <source-dir>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "oracle/oracle.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_goldens <source-dir>\n";
        return 1;
    }
    const fs::path src = argv[1];
    const fs::path data = src / "tests" / "data";
    const fs::path golden = src / "tests" / "golden";
    const auto res = oracle::run({{2020, (data / "fixture_2020.csv").string()}, {2021, (data / "fixture_2021.csv").string()}}, 16);
    fs::remove_all(golden);
    for (const auto& [rel, body] : oracle::expected_artifacts(res)) {
        const fs::path p = golden / rel;
        fs::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << body;
    }
    std::cout << "wrote " << golden.string() << " (cohort " << res.cohort.size() << ")\n";
    return 0;
}
