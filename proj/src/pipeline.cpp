#include "oobr/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>

#include <json.hpp>

#include "oobr/derive.hpp"
#include "oobr/parallel.hpp"

namespace oobr {

namespace {

std::vector<TableDef> build_catalogue() {
    std::vector<TableDef> t = {
        {"sem_pri_by_ano_window", TableScope::Window, "SEM_PRI", "ano",
         "Epidemiological week by year of onset (before week-53 correction)"},
        {"sem_pri_by_ano", TableScope::Current, "SEM_PRI", "ano", "Epidemiological week by year of onset"},
        {"cs_gestant", TableScope::Current, "CS_GESTANT", "", "Frequency table for variable about pregnancy"},
        {"cs_gestant_by_sexo", TableScope::Current, "CS_GESTANT", "CS_SEXO", "Gestation by sex"},
        {"puerpera", TableScope::Current, "PUERPERA", "", "Frequency table for puerperium"},
        {"puerpera_by_sexo", TableScope::Current, "PUERPERA", "CS_SEXO", "Puerperium by sex"},
        {"classi_fin", TableScope::Cohort, "CLASSI_FIN", "", "Frequency table for final SARI classification"},
    };
    for (std::size_t i = 0; i < kDerivedCount; ++i) {
        const std::string name(derived_name(static_cast<DerivedVar>(i)));
        t.push_back({name, TableScope::Cohort, name, "", "Frequency table for " + name});
    }
    return t;
}

void write_file(const std::filesystem::path& p, std::string_view bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// A table being accumulated.
struct ActiveTable {
    const TableDef* def;
    Variable row;
    std::optional<Variable> col;
};

// Per-chunk partial results; everything here merges by addition.
struct ChunkResult {
    ParsedChunk parsed;
    FunnelCounter funnel;
    RecordAudit records;
    CohortAudit cohort;
    std::vector<FrequencyCounter> freqs;
    std::vector<CrossCounter> crosses;
    /// (chunk-local stream index, cohort.csv line without the row column).
    std::vector<std::pair<std::uint64_t, std::string>> cohort_lines;
    std::uint64_t cohort_size = 0;
};

class Builder {
public:
    explicit Builder(const RunConfig& cfg) : cfg_(cfg) {
        std::set<std::string> wanted(cfg.tables.begin(), cfg.tables.end());
        for (const auto& def : table_catalogue()) {
            if (!wanted.empty() && !wanted.contains(def.name)) continue;
            ActiveTable t{&def, resolve_variable(def.row), std::nullopt};
            if (!def.col.empty()) t.col = resolve_variable(def.col);
            tables_.push_back(std::move(t));
        }
    }

    const std::vector<ActiveTable>& tables() const { return tables_; }

    /// `extra_map[i]` is the union-column index of the file's i-th passthrough column.
    ChunkResult process(ParsedChunk parsed, const std::vector<std::size_t>& extra_map, std::size_t extra_total) const {
        ChunkResult out;
        out.freqs.resize(tables_.size());
        out.crosses.resize(tables_.size());
        const bool export_cohort = !cfg_.validate_only;
        for (std::size_t i = 0; i < parsed.records.size(); ++i) {
            const auto& rec = parsed.records[i];
            out.funnel.enter();
            const Selection sel = select_record(rec, cfg_.current_week);
            if (sel.removed_by) out.funnel.removed_at(*sel.removed_by);

            if (sel.passed(Stage::EpiWindow)) count(out, TableScope::Window, {&rec, sel.raw_stamp, nullptr});
            if (!sel.passed(Stage::CurrentWeek)) continue;
            count(out, TableScope::Current, {&rec, sel.stamp, nullptr});
            out.records.add(rec, i);
            if (!sel.selected()) continue;

            CohortRecord c;
            c.raw = rec;
            c.stamp = *sel.stamp;
            c.row = i;
            c[DerivedVar::classi_gesta_puerp] = status_label(sel.status);
            const DeriveNotes notes = derive_all(c);
            out.cohort.add(c, notes);
            count(out, TableScope::Cohort, RecordView::of(c));
            ++out.cohort_size;
            if (export_cohort) out.cohort_lines.emplace_back(i, cohort_line(c, extra_map, extra_total));
        }
        out.parsed = std::move(parsed);
        out.parsed.records.clear();
        out.parsed.records.shrink_to_fit();
        return out;
    }

private:
    void count(ChunkResult& out, TableScope scope, const RecordView& view) const {
        for (std::size_t t = 0; t < tables_.size(); ++t) {
            const auto& at = tables_[t];
            if (at.def->scope != scope) continue;
            if (at.col)
                out.crosses[t].add(at.row.extract(view), at.col->extract(view));
            else
                out.freqs[t].add(at.row.extract(view));
        }
    }

    std::string cohort_line(const CohortRecord& c, const std::vector<std::size_t>& extra_map,
                            std::size_t extra_total) const {
        const char d = ';';
        std::string line;
        line += std::to_string(c.raw.source_year);
        for (auto f : modeled_fields()) {
            line += d;
            if (auto v = c.raw.text_of(f)) append_csv_field(line, *v, d);
        }
        std::vector<const std::string*> extras(extra_total, nullptr);
        for (std::size_t k = 0; k < c.raw.extra.size() && k < extra_map.size(); ++k) extras[extra_map[k]] = &c.raw.extra[k];
        for (const auto* e : extras) {
            line += d;
            if (e) append_csv_field(line, *e, d);
        }
        line += d;
        line += std::to_string(c.stamp.ano);
        line += d;
        line += std::to_string(c.stamp.sem);
        for (const auto& v : c.derived) {
            line += d;
            if (v) append_csv_field(line, *v, d);
        }
        line += '\n';
        return line;
    }

    const RunConfig& cfg_;
    std::vector<ActiveTable> tables_;
};

std::string render_quarantine_header(const SnapshotHeader& h, char delimiter) {
    return h.raw + delimiter + "quarantine_reason\n";
}

bool wants(const RunConfig& cfg, std::string_view fmt) {
    return std::ranges::find(cfg.formats, fmt) != cfg.formats.end();
}

}  // namespace

InputSpec parse_input_spec(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size())
        throw ConfigError("input must look like <year>=<path>: " + std::string(text));
    InputSpec s;
    auto y = text.substr(0, eq);
    auto [p, ec] = std::from_chars(y.data(), y.data() + y.size(), s.year);
    if (ec != std::errc{} || p != y.data() + y.size()) throw ConfigError("bad input year: " + std::string(y));
    s.path = std::string(text.substr(eq + 1));
    return s;
}

std::span<const TableDef> table_catalogue() {
    static const std::vector<TableDef> cat = build_catalogue();
    return cat;
}

std::vector<std::string> parse_table_selection(std::string_view text) {
    std::vector<std::string> out;
    if (trim(text) == "all") return out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        const auto name = trim(text.substr(start, end - start));
        if (!name.empty()) {
            if (std::ranges::none_of(table_catalogue(), [&](const TableDef& d) { return d.name == name; }))
                throw ConfigError("unknown table: " + std::string(name));
            out.emplace_back(name);
        }
        start = end + 1;
    }
    if (out.empty()) throw ConfigError("empty table selection");
    return out;
}

void RunConfig::validate() const {
    if (inputs.empty()) throw ConfigError("at least one input is required");
    std::set<int> years;
    for (const auto& in : inputs)
        if (!years.insert(in.year).second) throw ConfigError("duplicate input year " + std::to_string(in.year));
    validate_current_week(current_week);
    for (const auto& f : formats)
        if (f != "text" && f != "csv" && f != "json") throw ConfigError("unknown format: " + f);
    for (const auto& t : tables)
        if (std::ranges::none_of(table_catalogue(), [&](const TableDef& d) { return d.name == t; }))
            throw ConfigError("unknown table: " + t);
    if (jobs == 0) throw ConfigError("jobs must be at least 1");
    if (delimiter == '"' || delimiter == '\n' || delimiter == '\r') throw ConfigError("invalid delimiter");
}

std::vector<std::string> cohort_columns(std::span<const std::string> extra_names) {
    std::vector<std::string> cols{"row", "source_year"};
    for (auto f : modeled_fields()) cols.emplace_back(field_name(f));
    for (const auto& e : extra_names) cols.push_back(e);
    cols.emplace_back("ano");
    cols.emplace_back("sem");
    for (std::size_t i = 0; i < kDerivedCount; ++i) cols.emplace_back(derived_name(static_cast<DerivedVar>(i)));
    return cols;
}

RunResult run_build(const RunConfig& cfg) {
    cfg.validate();
    check_codebook_coverage(CodeBook::standard(), coded_fields_used());
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + cfg.out_dir.string() + ": " + ec.message());
    if (!cfg.validate_only) fs::create_directories(cfg.out_dir / "tables");

    // Open every input first so header problems fail before any work.
    std::vector<std::unique_ptr<SnapshotReader>> readers;
    for (const auto& in : cfg.inputs) {
        SnapshotSource src;
        src.path = in.path;
        src.year = in.year;
        src.delimiter = cfg.delimiter;
        src.encoding = cfg.encoding;
        src.date_format = cfg.date_format;
        readers.push_back(std::make_unique<SnapshotReader>(src, cfg.chunk_bytes));
    }
    std::vector<std::string> extra_union;
    std::vector<std::vector<std::size_t>> extra_maps;
    for (const auto& r : readers) {
        std::vector<std::size_t> m;
        for (const auto& name : r->header().extra_names) {
            auto it = std::ranges::find(extra_union, name);
            if (it == extra_union.end()) {
                extra_union.push_back(name);
                it = extra_union.end() - 1;
            }
            m.push_back(static_cast<std::size_t>(it - extra_union.begin()));
        }
        extra_maps.push_back(std::move(m));
    }

    const Builder builder(cfg);
    RunResult result;
    FunnelCounter funnel;
    RecordAudit records;
    CohortAudit cohort;
    std::vector<FrequencyCounter> freqs(builder.tables().size());
    std::vector<CrossCounter> crosses(builder.tables().size());

    std::ofstream cohort_out;
    if (!cfg.validate_only) {
        cohort_out.open(cfg.out_dir / "cohort.csv", std::ios::binary | std::ios::trunc);
        if (!cohort_out) throw std::runtime_error("cannot write cohort.csv");
        std::string header;
        for (const auto& c : cohort_columns(extra_union)) {
            if (!header.empty()) header += ';';
            append_csv_field(header, c, ';');
        }
        cohort_out << header << '\n';
    }

    std::uint64_t offset = 0;
    for (std::size_t k = 0; k < readers.size(); ++k) {
        auto& reader = *readers[k];
        const auto& extra_map = extra_maps[k];
        IngestStats stats;
        std::ofstream quarantine;
        if (!cfg.validate_only) {
            quarantine.open(cfg.out_dir / ("quarantine_" + std::to_string(cfg.inputs[k].year) + ".csv"),
                            std::ios::binary | std::ios::trunc);
            if (!quarantine) throw std::runtime_error("cannot write quarantine file");
            quarantine << render_quarantine_header(reader.header(), cfg.delimiter);
        }

        ordered_pipeline(
            cfg.jobs, [&] { return reader.next_chunk(); },
            [&](const RawChunk& chunk) { return builder.process(reader.parse(chunk), extra_map, extra_union.size()); },
            [&](ChunkResult r) {
                const std::uint64_t n = r.parsed.stats.records;
                stats.merge(r.parsed.stats);
                funnel.merge(r.funnel);
                r.records.shift_rows(offset);
                records.merge(r.records);
                r.cohort.shift_rows(offset);
                cohort.merge(r.cohort);
                for (std::size_t t = 0; t < freqs.size(); ++t) {
                    freqs[t].merge(r.freqs[t]);
                    crosses[t].merge(r.crosses[t]);
                }
                result.cohort_size += r.cohort_size;
                if (cohort_out.is_open())
                    for (const auto& [row, line] : r.cohort_lines) cohort_out << (offset + row) << ';' << line;
                if (quarantine.is_open())
                    for (const auto& q : r.parsed.quarantined) {
                        std::string line = q.raw;
                        line += cfg.delimiter;
                        append_csv_field(line, q.reason, cfg.delimiter);
                        quarantine << line << '\n';
                    }
                offset += n;
            });
        result.inputs.push_back({cfg.inputs[k], reader.digest(), reader.bytes_read(), stats});
    }
    result.stream_records = offset;
    if (cohort_out.is_open()) {
        cohort_out.close();
        if (!cohort_out) throw std::runtime_error("write failed: cohort.csv");
    }

    std::uint64_t date_warnings = 0, malformed = 0;
    for (const auto& in : result.inputs) {
        date_warnings += in.stats.date_parse_warnings;
        malformed += in.stats.malformed;
    }
    result.funnel = funnel.report();
    result.findings = build_findings(records, cohort, date_warnings, malformed);
    for (std::size_t t = 0; t < builder.tables().size(); ++t) {
        const auto& at = builder.tables()[t];
        if (at.col)
            result.tables.push_back(
                crosses[t].render(at.def->name, at.def->title, at.def->row, at.def->col, at.row.order, at.col->order));
        else
            result.tables.push_back(freqs[t].render(at.def->name, at.def->title, at.def->row, at.row.order));
    }

    // Artifacts.
    const auto& out = cfg.out_dir;
    write_file(out / "findings.json", result.findings.render_json());
    write_file(out / "findings.txt", result.findings.render_text());
    if (wants(cfg, "text")) write_file(out / "funnel.txt", result.funnel.render_text());
    if (wants(cfg, "csv")) write_file(out / "funnel.csv", result.funnel.render_csv());
    if (wants(cfg, "json")) write_file(out / "funnel.json", result.funnel.render_json());
    if (!cfg.validate_only) {
        for (const auto& t : result.tables) {
            if (wants(cfg, "text")) write_file(out / "tables" / (t.name + ".txt"), t.render_text());
            if (wants(cfg, "csv")) write_file(out / "tables" / (t.name + ".csv"), t.render_csv());
            if (wants(cfg, "json")) write_file(out / "tables" / (t.name + ".json"), t.render_json());
        }
        write_file(out / "rules_manifest.txt", rules_manifest());

        nlohmann::ordered_json m;
        m["tool"] = "oobr";
        m["version"] = OOBR_VERSION;
        m["current_week"] = cfg.current_week;
        m["encoding"] = encoding_name(cfg.encoding);
        m["delimiter"] = std::string(1, cfg.delimiter);
        m["inputs"] = nlohmann::ordered_json::array();
        for (const auto& in : result.inputs) {
            nlohmann::ordered_json missing = nlohmann::ordered_json::object();
            for (std::size_t f = 0; f < modeled_fields().size(); ++f)
                missing[std::string(field_name(modeled_fields()[f]))] = in.stats.missing_per_field[f];
            m["inputs"].push_back({{"year", in.spec.year},
                                   {"path", in.spec.path},
                                   {"sha256", in.sha256},
                                   {"bytes", in.bytes},
                                   {"data_rows", in.stats.data_rows},
                                   {"records", in.stats.records},
                                   {"malformed", in.stats.malformed},
                                   {"blank_lines", in.stats.blank_lines},
                                   {"date_parse_warnings", in.stats.date_parse_warnings},
                                   {"missing_per_field", missing}});
        }
        m["stream_records"] = result.stream_records;
        m["cohort_records"] = result.cohort_size;
        m["tables"] = nlohmann::ordered_json::array();
        for (const auto& t : result.tables) m["tables"].push_back(t.name);
        m["generated_at"] = cfg.generated_at ? *cfg.generated_at : now_utc();
        write_file(out / "run_manifest.json", m.dump(2) + "\n");
    }

    result.exit_code = cfg.strict && result.findings.has_inconsistency() ? kExitInconsistent : kExitOk;
    return result;
}

}  // namespace oobr
