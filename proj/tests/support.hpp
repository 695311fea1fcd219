// Shared helpers for the unit and acceptance tests.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oobr/pipeline.hpp"
#include "oracle/oracle.hpp"

namespace testsupport {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& p) const { return path_ / p; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p);
void spit(const fs::path& p, const std::string& bytes);

fs::path source_dir();
fs::path fixture(const std::string& name);

/// Build config with csv output only, quiet defaults.
oobr::RunConfig csv_config(const std::vector<oobr::InputSpec>& inputs, int week, const fs::path& out);

/// Runs the oracle on the same inputs and compares every expected artifact
/// with the file under `out`. Returns a description per mismatch.
std::vector<std::string> diff_against_oracle(const std::vector<oobr::InputSpec>& inputs, int week, const fs::path& out,
                                             const std::string& encoding = "ISO-8859-2");

/// First differing line of two texts, for messages.
std::string first_difference(const std::string& want, const std::string& got);

}  // namespace testsupport
