#include "oobr/ingest.hpp"

#include <algorithm>
#include <charconv>

namespace oobr {

namespace {

constexpr std::size_t kReadBlock = std::size_t{1} << 20;

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

std::string_view strip_cr(std::string_view rec) {
    if (!rec.empty() && rec.back() == '\r') rec.remove_suffix(1);
    return rec;
}

// Calls fn(record) for every record of `bytes`, using the same boundary rule
// as the chunk splitter.
template <typename Fn>
void for_each_record(std::string_view bytes, Fn&& fn) {
    bool in_quote = false;
    std::size_t start = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        char c = bytes[i];
        if (c == '"') {
            in_quote = !in_quote;
        } else if (c == '\n' && !in_quote) {
            fn(bytes.substr(start, i - start));
            start = i + 1;
        }
    }
    if (start < bytes.size()) fn(bytes.substr(start));
}

std::size_t modeled_index(FieldId f) {
    static const auto table = [] {
        std::array<std::size_t, kIntFieldCount + kTextFieldCount> t{};
        auto fields = modeled_fields();
        for (std::size_t i = 0; i < fields.size(); ++i)
            t[fields[i].kind == FieldId::Kind::Int ? fields[i].index : kIntFieldCount + fields[i].index] = i;
        return t;
    }();
    return table[f.kind == FieldId::Kind::Int ? f.index : kIntFieldCount + f.index];
}

}  // namespace

DateFormat parse_date_format(std::string_view name) {
    if (name == "dmy" || name == "%d/%m/%Y" || name == "dd/mm/yyyy") return DateFormat::DayMonthYear;
    if (name == "ymd" || name == "%Y-%m-%d" || name == "yyyy-mm-dd") return DateFormat::YearMonthDay;
    throw ConfigError("unsupported date format: " + std::string(name));
}

DateParse parse_onset_date(std::string_view text, DateFormat format) {
    text = trim(text);
    if (is_missing_token(text)) return {};
    const char sep = format == DateFormat::DayMonthYear ? '/' : '-';
    auto a = text.find(sep);
    auto b = a == std::string_view::npos ? a : text.find(sep, a + 1);
    if (b == std::string_view::npos) return {std::nullopt, true};
    std::string_view p0 = text.substr(0, a), p1 = text.substr(a + 1, b - a - 1), p2 = text.substr(b + 1);
    std::string_view ys = format == DateFormat::DayMonthYear ? p2 : p0;
    std::string_view ds = format == DateFormat::DayMonthYear ? p0 : p2;
    unsigned y = 0, m = 0, d = 0;
    if (ys.size() != 4 || p1.empty() || p1.size() > 2 || ds.empty() || ds.size() > 2 || !parse_uint(ys, y) ||
        !parse_uint(p1, m) || !parse_uint(ds, d))
        return {std::nullopt, true};
    std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return {std::nullopt, true};
    return {ymd, false};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool is_missing_token(std::string_view s) { return s.empty() || s == "NA"; }

std::optional<std::string> split_record(std::string_view rec, char delimiter, std::vector<std::string_view>& fields,
                                        std::string& scratch) {
    fields.clear();
    scratch.clear();
    scratch.reserve(rec.size());
    std::size_t pos = 0;
    while (true) {
        // Leading blanks before an opening quote are tolerated.
        std::size_t q = pos;
        while (q < rec.size() && (rec[q] == ' ' || rec[q] == '\t')) ++q;
        if (q < rec.size() && rec[q] == '"') {
            const std::size_t begin = scratch.size();
            std::size_t i = q + 1;
            bool closed = false;
            while (i < rec.size()) {
                if (rec[i] == '"') {
                    if (i + 1 < rec.size() && rec[i + 1] == '"') {
                        scratch += '"';
                        i += 2;
                        continue;
                    }
                    closed = true;
                    ++i;
                    break;
                }
                scratch += rec[i++];
            }
            if (!closed) return "unterminated quoted field";
            while (i < rec.size() && (rec[i] == ' ' || rec[i] == '\t')) ++i;
            fields.emplace_back(scratch.data() + begin, scratch.size() - begin);
            if (i == rec.size()) return std::nullopt;
            if (rec[i] != delimiter) return "unexpected characters after closing quote";
            pos = i + 1;
            continue;
        }
        std::size_t end = rec.find(delimiter, pos);
        std::string_view field = rec.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        if (field.find('"') != std::string_view::npos) return "stray quote in unquoted field";
        fields.push_back(field);
        if (end == std::string_view::npos) return std::nullopt;
        pos = end + 1;
    }
}

void append_csv_field(std::string& out, std::string_view value, char delimiter) {
    bool quote = value.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
    if (!quote) {
        out += value;
        return;
    }
    out += '"';
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void IngestStats::merge(const IngestStats& o) {
    data_rows += o.data_rows;
    records += o.records;
    malformed += o.malformed;
    blank_lines += o.blank_lines;
    date_parse_warnings += o.date_parse_warnings;
    for (std::size_t i = 0; i < missing_per_field.size(); ++i) missing_per_field[i] += o.missing_per_field[i];
}

// ---------------------------------------------------------------------------

SnapshotReader::SnapshotReader(SnapshotSource source, std::size_t chunk_bytes)
    : source_(std::move(source)), chunk_bytes_(std::max<std::size_t>(chunk_bytes, 1)) {
    in_.open(source_.path, std::ios::binary);
    if (!in_) throw IngestError("cannot open snapshot " + source_.path);

    // Header: the first record of the file.
    std::size_t nl = std::string::npos;
    bool in_quote = false;
    std::size_t scanned = 0;
    while (nl == std::string::npos) {
        for (; scanned < pending_.size(); ++scanned) {
            if (pending_[scanned] == '"') in_quote = !in_quote;
            else if (pending_[scanned] == '\n' && !in_quote) {
                nl = scanned;
                break;
            }
        }
        if (nl != std::string::npos || !fill()) break;
    }
    std::string_view head = nl == std::string::npos ? std::string_view(pending_) : std::string_view(pending_).substr(0, nl);
    if (head.starts_with("\xEF\xBB\xBF")) head.remove_prefix(3);
    head = strip_cr(head);
    if (head.empty()) throw IngestError("snapshot " + source_.path + " has no header row");
    header_.raw = std::string(head);

    std::vector<std::string_view> fields;
    std::string scratch;
    if (auto err = split_record(head, source_.delimiter, fields, scratch))
        throw IngestError("snapshot " + source_.path + ": malformed header: " + *err);
    for (auto f : fields) {
        std::string name = decode_to_utf8(trim(f), source_.encoding);
        auto id = find_field(name);
        if (id && std::ranges::find(header_.mapping, std::optional<FieldId>(id)) != header_.mapping.end())
            id.reset();  // duplicate column: keep the first, pass the rest through
        if (!id) header_.extra_names.push_back(name);
        header_.mapping.push_back(id);
        header_.columns.push_back(std::move(name));
    }
    for (const auto& req : source_.required_fields)
        if (std::ranges::find(header_.columns, req) == header_.columns.end())
            throw IngestError("snapshot " + source_.path + " is missing required column " + req);

    pending_.erase(0, nl == std::string::npos ? pending_.size() : nl + 1);
}

bool SnapshotReader::fill() {
    if (eof_) return false;
    const std::size_t old = pending_.size();
    pending_.resize(old + kReadBlock);
    in_.read(pending_.data() + old, static_cast<std::streamsize>(kReadBlock));
    const auto got = static_cast<std::size_t>(in_.gcount());
    pending_.resize(old + got);
    hash_.update(std::string_view(pending_).substr(old, got));
    bytes_read_ += got;
    if (got < kReadBlock) {
        if (in_.bad()) throw IngestError("read error on " + source_.path);
        eof_ = true;
        digest_ = hash_.hex();
    }
    return got > 0;
}

std::optional<RawChunk> SnapshotReader::next_chunk() {
    bool in_quote = false;
    std::size_t pos = 0, rec_start = 0, cut = std::string::npos;
    std::uint64_t rows = 0;
    auto count_record = [&](std::size_t end) {
        if (!strip_cr(std::string_view(pending_).substr(rec_start, end - rec_start)).empty()) ++rows;
    };
    while (cut == std::string::npos) {
        for (; pos < pending_.size(); ++pos) {
            char c = pending_[pos];
            if (c == '"') {
                in_quote = !in_quote;
            } else if (c == '\n' && !in_quote) {
                count_record(pos);
                rec_start = pos + 1;
                if (rec_start >= chunk_bytes_) {
                    cut = rec_start;
                    ++pos;
                    break;
                }
            }
        }
        if (cut != std::string::npos) break;
        if (!fill()) {
            if (pending_.empty()) return std::nullopt;
            if (rec_start < pending_.size()) count_record(pending_.size());
            cut = pending_.size();
        }
    }
    RawChunk chunk;
    chunk.first_data_row = next_row_;
    chunk.index = next_index_++;
    chunk.bytes.assign(pending_, 0, cut);
    pending_.erase(0, cut);
    next_row_ += rows;
    return chunk;
}

ParsedChunk SnapshotReader::parse(const RawChunk& chunk) const {
    ParsedChunk out;
    std::uint64_t row = chunk.first_data_row;
    for_each_record(chunk.bytes, [&](std::string_view rec) {
        rec = strip_cr(rec);
        if (rec.empty()) {
            ++out.stats.blank_lines;
            return;
        }
        parse_record(rec, row++, out);
    });
    return out;
}

void SnapshotReader::parse_record(std::string_view rec, std::uint64_t data_row, ParsedChunk& out) const {
    ++out.stats.data_rows;
    thread_local std::vector<std::string_view> fields;
    thread_local std::string scratch;

    auto quarantine = [&](std::string reason) {
        ++out.stats.malformed;
        out.quarantined.push_back({data_row, std::string(rec), std::move(reason)});
    };

    if (auto err = split_record(rec, source_.delimiter, fields, scratch)) return quarantine(*err);
    if (fields.size() != header_.columns.size())
        return quarantine("expected " + std::to_string(header_.columns.size()) + " fields, found " +
                          std::to_string(fields.size()));

    SurveillanceRecord r;
    r.source_year = source_.year;
    r.extra.reserve(header_.extra_names.size());
    bool date_warning = false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string_view v = trim(fields[i]);
        const auto& id = header_.mapping[i];
        if (!id) {
            r.extra.push_back(decode_to_utf8(v, source_.encoding));
            continue;
        }
        if (is_missing_token(v)) continue;
        if (id->kind == FieldId::Kind::Int) {
            int value = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
            if (ec != std::errc{} || p != v.data() + v.size())
                return quarantine("non-integer value in " + header_.columns[i]);
            if (static_cast<IntField>(id->index) == IntField::SEM_PRI && (value < 1 || value > 53))
                return quarantine("SEM_PRI outside 1..53");
            r.ints[id->index] = value;
        } else {
            r.texts[id->index] = decode_to_utf8(v, source_.encoding);
            if (static_cast<TextField>(id->index) == TextField::DT_SIN_PRI) {
                auto parsed = parse_onset_date(v, source_.date_format);
                r.onset = parsed.date;
                date_warning = parsed.warning;
            }
        }
    }

    ++out.stats.records;
    if (date_warning) ++out.stats.date_parse_warnings;
    for (auto f : modeled_fields())
        if (!r.has(f)) ++out.stats.missing_per_field[modeled_index(f)];
    out.records.push_back(std::move(r));
    out.record_rows.push_back(data_row);
}

// ---------------------------------------------------------------------------

Snapshot read_snapshot(const SnapshotSource& source) {
    SnapshotReader reader(source);
    Snapshot snap;
    snap.header = reader.header();
    while (auto chunk = reader.next_chunk()) {
        auto parsed = reader.parse(*chunk);
        std::ranges::move(parsed.records, std::back_inserter(snap.records));
        std::ranges::move(parsed.quarantined, std::back_inserter(snap.quarantined));
        snap.stats.merge(parsed.stats);
    }
    snap.digest = reader.digest();
    return snap;
}

std::vector<SurveillanceRecord> merge_snapshots(std::vector<SurveillanceRecord> a, std::vector<SurveillanceRecord> b) {
    a.reserve(a.size() + b.size());
    std::ranges::move(b, std::back_inserter(a));
    return a;
}

}  // namespace oobr
