// Consistency checks and data-quality audits.
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oobr/derive.hpp"
#include "oobr/schema.hpp"

namespace oobr {

enum class Severity : std::uint8_t { Info, Warning, Inconsistency };
std::string_view severity_name(Severity s);

struct Finding {
    std::string check;
    Severity severity = Severity::Info;
    std::uint64_t count = 0;
    std::string description;
    /// Smallest merged-stream row indices among the offending records.
    std::vector<std::uint64_t> examples;
    bool operator==(const Finding&) const = default;
};

inline constexpr std::size_t kMaxExamples = 10;

/// Count plus a bounded, order-independent sample of row indices.
struct SampledCount {
    std::uint64_t count = 0;
    std::vector<std::uint64_t> rows;

    void add(std::uint64_t row);
    void merge(const SampledCount& o);
    /// Adds `offset` to every sampled row (chunk-local to stream indices).
    void shift(std::uint64_t offset);
    bool operator==(const SampledCount&) const = default;
};

/// Raw-field checks over the post-selection-window stream. Additive.
class RecordAudit {
public:
    explicit RecordAudit(const CodeBook& book = CodeBook::standard()) : book_(&book) {}

    void add(const SurveillanceRecord& r, std::uint64_t row);
    void merge(const RecordAudit& o);
    void shift_rows(std::uint64_t offset);

    const SampledCount& male_pregnant() const { return male_pregnant_; }
    const SampledCount& male_puerperal() const { return male_puerperal_; }
    /// (field name, code) -> count for codes without a dictionary entry.
    const std::map<std::pair<std::string, std::string>, SampledCount>& out_of_dictionary() const { return ood_; }

private:
    const CodeBook* book_;
    SampledCount male_pregnant_;
    SampledCount male_puerperal_;
    std::map<std::pair<std::string, std::string>, SampledCount> ood_;
};

/// Cohort-level audits. Additive.
class CohortAudit {
public:
    void add(const CohortRecord& r, const DeriveNotes& notes);
    void merge(const CohortAudit& o);
    void shift_rows(std::uint64_t offset);

    const SampledCount& missing_region() const { return missing_region_; }
    const std::map<std::string, SampledCount>& region_fallback() const { return region_fallback_; }
    const SampledCount& case_normalized() const { return case_normalized_; }

private:
    SampledCount missing_region_;
    std::map<std::string, SampledCount> region_fallback_;
    SampledCount case_normalized_;
};

Finding male_pregnant_finding(const SampledCount& c);
Finding male_puerperal_finding(const SampledCount& c);

/// CS_SEXO = M with CS_GESTANT in 1..4. Rows are stream positions.
Finding check_male_pregnant(std::span<const SurveillanceRecord> stream);
/// CS_SEXO = M with PUERPERA = 1.
Finding check_male_puerperal(std::span<const SurveillanceRecord> stream);

/// One warning per (field, undocumented code) pair, ordered by code book
/// field order then code, plus missing-region and region-fallback warnings
/// when the cohort has any.
std::vector<Finding> out_of_dictionary_findings(const RecordAudit& records, const CohortAudit* cohort,
                                                const CodeBook& book = CodeBook::standard());
std::vector<Finding> audit_out_of_dictionary(std::span<const SurveillanceRecord> stream,
                                             std::span<const CohortRecord> cohort = {});

struct FindingsReport {
    std::vector<Finding> findings;

    bool has_inconsistency() const;
    std::string render_json() const;
    std::string render_text() const;
};

/// Assembles every finding of a run in a fixed order.
FindingsReport build_findings(const RecordAudit& records, const CohortAudit& cohort, std::uint64_t date_parse_warnings,
                              std::uint64_t malformed_rows);

}  // namespace oobr
