// End-to-end build: ingest -> selection -> derivation -> validation -> tables.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oobr/cohort.hpp"
#include "oobr/encoding.hpp"
#include "oobr/ingest.hpp"
#include "oobr/tabulate.hpp"
#include "oobr/validate.hpp"

namespace oobr {

struct InputSpec {
    int year = 0;
    std::string path;
};

/// Parses "2020=path/to/file.csv". Throws ConfigError.
InputSpec parse_input_spec(std::string_view text);

/// Which records a table is computed over.
enum class TableScope : std::uint8_t {
    Window,   // passed the epi window, stamp before week-53 correction
    Current,  // passed the current-week cut, corrected stamp
    Cohort,   // obstetric cohort, derived variables available
};

struct TableDef {
    std::string name;
    TableScope scope;
    std::string row;
    std::string col;  // empty for frequency tables
    std::string title;
};

/// Every table the build can emit, in output order.
std::span<const TableDef> table_catalogue();

/// "all" or a comma-separated list of catalogue names. Throws ConfigError.
std::vector<std::string> parse_table_selection(std::string_view text);

struct RunConfig {
    std::vector<InputSpec> inputs;
    int current_week = 0;
    std::filesystem::path out_dir;
    /// Any of "text", "csv", "json"; applies to funnel and tables.
    std::vector<std::string> formats{"text", "csv", "json"};
    /// Catalogue names; empty means all.
    std::vector<std::string> tables;
    bool strict = false;
    Encoding encoding = Encoding::Iso8859_2;
    char delimiter = ';';
    DateFormat date_format = DateFormat::DayMonthYear;
    std::size_t jobs = 1;
    std::size_t chunk_bytes = SnapshotReader::kDefaultChunkBytes;
    /// Only findings (and the funnel) are written.
    bool validate_only = false;
    /// Value of the manifest's generated_at field; now when unset.
    std::optional<std::string> generated_at;

    /// Throws ConfigError.
    void validate() const;
};

struct InputSummary {
    InputSpec spec;
    std::string sha256;
    std::uint64_t bytes = 0;
    IngestStats stats;
};

struct RunResult {
    int exit_code = 0;
    FunnelReport funnel;
    FindingsReport findings;
    std::vector<RenderedTable> tables;
    std::vector<InputSummary> inputs;
    std::uint64_t cohort_size = 0;
    std::uint64_t stream_records = 0;
};

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitInconsistent = 2;

/// Runs the build and writes its artifacts into cfg.out_dir. Throws
/// IngestError/ConfigError on fatal problems; strict mode turns
/// inconsistencies into kExitInconsistent.
RunResult run_build(const RunConfig& cfg);

/// Column names of cohort.csv for the given passthrough columns.
std::vector<std::string> cohort_columns(std::span<const std::string> extra_names);

}  // namespace oobr
