// Decoding of yearly SIVEP-Gripe snapshot files into SurveillanceRecords.
//
// A snapshot is read in two steps so that parsing can be spread over worker
// threads without changing the result:
//
//   1. SnapshotReader::next_chunk() scans the file sequentially and cuts it
//      into chunks of whole records. Record boundaries depend only on the
//      file bytes (a newline outside double quotes ends a record), so the
//      chunk contents never depend on the degree of parallelism.
//   2. SnapshotReader::parse() turns a chunk into records, quarantined rows
//      and statistics. It is const and may run concurrently.
#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oobr/digest.hpp"
#include "oobr/encoding.hpp"
#include "oobr/schema.hpp"

namespace oobr {

enum class DateFormat { DayMonthYear, YearMonthDay };

DateFormat parse_date_format(std::string_view name);

struct DateParse {
    std::optional<std::chrono::year_month_day> date;
    /// Non-empty text that is not a valid civil date in the expected layout.
    bool warning = false;
};

/// "dd/mm/yyyy" (or "yyyy-mm-dd"). Empty or "NA" text is missing without a warning.
DateParse parse_onset_date(std::string_view text, DateFormat format = DateFormat::DayMonthYear);

/// Raised when a snapshot cannot be read at all (unreadable file, missing
/// required column).
class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SnapshotSource {
    std::string path;
    int year = 0;
    char delimiter = ';';
    Encoding encoding = Encoding::Iso8859_2;
    DateFormat date_format = DateFormat::DayMonthYear;
    /// Header columns whose absence is fatal.
    std::vector<std::string> required_fields{downstream_required_fields().begin(),
                                             downstream_required_fields().end()};
};

struct IngestStats {
    std::uint64_t data_rows = 0;
    std::uint64_t records = 0;
    std::uint64_t malformed = 0;
    std::uint64_t blank_lines = 0;
    std::uint64_t date_parse_warnings = 0;
    /// Indexed like modeled_fields().
    std::vector<std::uint64_t> missing_per_field = std::vector<std::uint64_t>(modeled_fields().size(), 0);

    void merge(const IngestStats& other);
    bool operator==(const IngestStats&) const = default;
};

struct SnapshotHeader {
    std::vector<std::string> columns;
    /// Modeled field per column, nullopt for passthrough columns.
    std::vector<std::optional<FieldId>> mapping;
    /// Names of the passthrough columns, in source order.
    std::vector<std::string> extra_names;
    /// Raw header line, as read (without line terminator).
    std::string raw;
};

struct QuarantinedRow {
    /// 0-based data row index within the file.
    std::uint64_t data_row = 0;
    /// Original bytes of the row, line terminator stripped.
    std::string raw;
    std::string reason;
};

struct RawChunk {
    std::string bytes;
    /// Data row index (within the file) of the first non-blank record.
    std::uint64_t first_data_row = 0;
    std::uint64_t index = 0;
};

struct ParsedChunk {
    std::vector<SurveillanceRecord> records;
    /// Data row index of each record, parallel to `records`.
    std::vector<std::uint64_t> record_rows;
    std::vector<QuarantinedRow> quarantined;
    IngestStats stats;
};

class SnapshotReader {
public:
    static constexpr std::size_t kDefaultChunkBytes = std::size_t{4} << 20;

    /// Opens the file and reads the header. Throws IngestError.
    explicit SnapshotReader(SnapshotSource source, std::size_t chunk_bytes = kDefaultChunkBytes);

    const SnapshotSource& source() const { return source_; }
    const SnapshotHeader& header() const { return header_; }

    /// Next run of whole records; nullopt at end of file.
    std::optional<RawChunk> next_chunk();

    /// Thread-safe.
    ParsedChunk parse(const RawChunk& chunk) const;

    /// SHA-256 of every byte read; valid once next_chunk() returned nullopt.
    const std::string& digest() const { return digest_; }
    std::uint64_t bytes_read() const { return bytes_read_; }

private:
    bool fill();
    void parse_record(std::string_view rec, std::uint64_t data_row, ParsedChunk& out) const;

    SnapshotSource source_;
    std::size_t chunk_bytes_;
    std::ifstream in_;
    std::string pending_;
    bool eof_ = false;
    std::uint64_t next_row_ = 0;
    std::uint64_t next_index_ = 0;
    SnapshotHeader header_;
    Sha256 hash_;
    std::string digest_;
    std::uint64_t bytes_read_ = 0;
};

/// Whole-file convenience result of read_snapshot().
struct Snapshot {
    SnapshotHeader header;
    std::vector<SurveillanceRecord> records;
    std::vector<QuarantinedRow> quarantined;
    IngestStats stats;
    std::string digest;
};

/// Sequentially reads a snapshot into memory. Meant for tests and small
/// files; the pipeline streams via SnapshotReader.
Snapshot read_snapshot(const SnapshotSource& source);

/// Concatenation: every record of `a`, then every record of `b`.
std::vector<SurveillanceRecord> merge_snapshots(std::vector<SurveillanceRecord> a, std::vector<SurveillanceRecord> b);

// Low-level CSV helpers shared with the writers.

/// Splits one record into fields. Returns an error reason on malformed input.
/// Unescaped quoted content is stored in `scratch`, which the returned views
/// may point into.
std::optional<std::string> split_record(std::string_view rec, char delimiter, std::vector<std::string_view>& fields,
                                        std::string& scratch);

/// Quotes a field if it contains the delimiter, a quote or a line break.
void append_csv_field(std::string& out, std::string_view value, char delimiter);

/// True for "" and "NA" (the missing-value tokens of the source dialect).
bool is_missing_token(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace oobr
