#include "support.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace testsupport {

TempDir::TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / ("oobr-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(rng()));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& bytes) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << bytes;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

fs::path source_dir() { return OOBR_SOURCE_DIR; }
fs::path fixture(const std::string& name) { return source_dir() / "tests" / "data" / name; }

oobr::RunConfig csv_config(const std::vector<oobr::InputSpec>& inputs, int week, const fs::path& out) {
    oobr::RunConfig cfg;
    cfg.inputs = inputs;
    cfg.current_week = week;
    cfg.out_dir = out;
    cfg.formats = {"csv"};
    cfg.generated_at = "@0";
    return cfg;
}

std::string first_difference(const std::string& want, const std::string& got) {
    std::istringstream a(want), b(got);
    std::string la, lb;
    for (int line = 1;; ++line) {
        const bool ha = static_cast<bool>(std::getline(a, la));
        const bool hb = static_cast<bool>(std::getline(b, lb));
        if (!ha && !hb) return "identical";
        if (!ha || !hb || la != lb)
            return "line " + std::to_string(line) + ": want [" + (ha ? la : "<eof>") + "] got [" + (hb ? lb : "<eof>") +
                   "]";
    }
}

std::vector<std::string> diff_against_oracle(const std::vector<oobr::InputSpec>& inputs, int week, const fs::path& out,
                                             const std::string& encoding) {
    std::vector<oracle::Input> oin;
    for (const auto& in : inputs) oin.push_back({in.year, in.path, encoding, ';'});
    const auto expect = oracle::expected_artifacts(oracle::run(oin, week));
    std::vector<std::string> diffs;
    for (const auto& [rel, body] : expect) {
        const fs::path p = out / rel;
        if (!fs::exists(p)) {
            diffs.push_back(rel + ": missing");
            continue;
        }
        const std::string got = slurp(p);
        if (got != body) diffs.push_back(rel + ": " + first_difference(body, got));
    }
    return diffs;
}

}  // namespace testsupport
