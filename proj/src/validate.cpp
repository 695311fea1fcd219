#include "oobr/validate.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

namespace oobr {

namespace {

bool is_male(const SurveillanceRecord& r) {
    const auto& s = r[TextField::CS_SEXO];
    return s && *s == "M";
}

bool pregnant_code(const SurveillanceRecord& r) {
    const auto& g = r[IntField::CS_GESTANT];
    return g && *g >= 1 && *g <= 4;
}

bool puerperal_code(const SurveillanceRecord& r) {
    const auto& p = r[IntField::PUERPERA];
    return p && *p == 1;
}

bool code_less(const std::string& a, const std::string& b) {
    long x = 0, y = 0;
    auto [pa, ea] = std::from_chars(a.data(), a.data() + a.size(), x);
    auto [pb, eb] = std::from_chars(b.data(), b.data() + b.size(), y);
    const bool ia = ea == std::errc{} && pa == a.data() + a.size();
    const bool ib = eb == std::errc{} && pb == b.data() + b.size();
    if (ia && ib) return x < y;
    if (ia != ib) return ia;
    return a < b;
}

Finding sampled_finding(std::string check, Severity sev, const SampledCount& c, std::string description) {
    return {std::move(check), sev, c.count, std::move(description), c.rows};
}

}  // namespace

std::string_view severity_name(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Warning: return "warning";
        case Severity::Inconsistency: return "inconsistency";
    }
    return "?";
}

void SampledCount::add(std::uint64_t row) {
    ++count;
    if (rows.size() < kMaxExamples) {
        rows.insert(std::ranges::upper_bound(rows, row), row);
    } else if (row < rows.back()) {
        rows.pop_back();
        rows.insert(std::ranges::upper_bound(rows, row), row);
    }
}

void SampledCount::merge(const SampledCount& o) {
    count += o.count;
    std::vector<std::uint64_t> merged;
    std::ranges::merge(rows, o.rows, std::back_inserter(merged));
    if (merged.size() > kMaxExamples) merged.resize(kMaxExamples);
    rows = std::move(merged);
}

void SampledCount::shift(std::uint64_t offset) {
    for (auto& r : rows) r += offset;
}

// ---------------------------------------------------------------------------

void RecordAudit::add(const SurveillanceRecord& r, std::uint64_t row) {
    if (is_male(r) && pregnant_code(r)) male_pregnant_.add(row);
    if (is_male(r) && puerperal_code(r)) male_puerperal_.add(row);

    for (const auto& f : book_->fields()) {
        if (!r.has(f.field)) continue;
        bool known = false;
        if (f.field.kind == FieldId::Kind::Int) {
            const int v = *r.ints[f.field.index];
            // Dictionary codes are short decimal strings; compare numerically.
            known = std::ranges::any_of(f.entries, [&](const CodeEntry& e) {
                int c = 0;
                auto [p, ec] = std::from_chars(e.code.data(), e.code.data() + e.code.size(), c);
                return ec == std::errc{} && c == v;
            });
            if (!known) ood_[{std::string(field_name(f.field)), std::to_string(v)}].add(row);
        } else {
            const auto& v = *r.texts[f.field.index];
            known = std::ranges::any_of(f.entries, [&](const CodeEntry& e) { return e.code == v; });
            if (!known) ood_[{std::string(field_name(f.field)), v}].add(row);
        }
    }
}

void RecordAudit::merge(const RecordAudit& o) {
    male_pregnant_.merge(o.male_pregnant_);
    male_puerperal_.merge(o.male_puerperal_);
    for (const auto& [k, c] : o.ood_) ood_[k].merge(c);
}

void RecordAudit::shift_rows(std::uint64_t offset) {
    male_pregnant_.shift(offset);
    male_puerperal_.shift(offset);
    for (auto& [_, c] : ood_) c.shift(offset);
}

void CohortAudit::add(const CohortRecord& r, const DeriveNotes& notes) {
    if (!r.raw[TextField::SG_UF]) missing_region_.add(r.row);
    if (notes.region_fallback) region_fallback_[*r.raw[TextField::SG_UF]].add(r.row);
    if (notes.pcr_case_normalized || notes.antigen_case_normalized) case_normalized_.add(r.row);
}

void CohortAudit::merge(const CohortAudit& o) {
    missing_region_.merge(o.missing_region_);
    for (const auto& [k, c] : o.region_fallback_) region_fallback_[k].merge(c);
    case_normalized_.merge(o.case_normalized_);
}

void CohortAudit::shift_rows(std::uint64_t offset) {
    missing_region_.shift(offset);
    for (auto& [_, c] : region_fallback_) c.shift(offset);
    case_normalized_.shift(offset);
}

// ---------------------------------------------------------------------------

Finding male_pregnant_finding(const SampledCount& c) {
    return sampled_finding("male_pregnant", c.count ? Severity::Inconsistency : Severity::Info, c,
                           "records with CS_SEXO=M and CS_GESTANT in 1..4");
}

Finding male_puerperal_finding(const SampledCount& c) {
    return sampled_finding("male_puerperal", c.count ? Severity::Inconsistency : Severity::Info, c,
                           "records with CS_SEXO=M and PUERPERA=1");
}

Finding check_male_pregnant(std::span<const SurveillanceRecord> stream) {
    SampledCount c;
    for (std::size_t i = 0; i < stream.size(); ++i)
        if (is_male(stream[i]) && pregnant_code(stream[i])) c.add(i);
    return male_pregnant_finding(c);
}

Finding check_male_puerperal(std::span<const SurveillanceRecord> stream) {
    SampledCount c;
    for (std::size_t i = 0; i < stream.size(); ++i)
        if (is_male(stream[i]) && puerperal_code(stream[i])) c.add(i);
    return male_puerperal_finding(c);
}

std::vector<Finding> out_of_dictionary_findings(const RecordAudit& records, const CohortAudit* cohort,
                                                const CodeBook& book) {
    std::vector<Finding> out;
    for (const auto& f : book.fields()) {
        const std::string name(field_name(f.field));
        std::vector<std::string> codes;
        for (const auto& [k, _] : records.out_of_dictionary())
            if (k.first == name) codes.push_back(k.second);
        std::ranges::sort(codes, code_less);
        for (const auto& code : codes) {
            const auto& c = records.out_of_dictionary().at({name, code});
            const bool known = std::ranges::find(f.known_undocumented, code) != f.known_undocumented.end();
            out.push_back(sampled_finding("out_of_dictionary:" + name + "=" + code, Severity::Warning, c,
                                          name + "=" + code + " has no entry in the data dictionary" +
                                              (known ? " (known undocumented code)" : "")));
        }
    }
    if (cohort) {
        if (cohort->missing_region().count)
            out.push_back(sampled_finding("missing_region", Severity::Warning, cohort->missing_region(),
                                          "cohort records without state of residence (region unknown)"));
        for (const auto& [token, c] : cohort->region_fallback())
            out.push_back(sampled_finding("region_fallback:" + token, Severity::Warning, c,
                                          "SG_UF='" + token + "' is not a state code; mapped to north"));
    }
    return out;
}

std::vector<Finding> audit_out_of_dictionary(std::span<const SurveillanceRecord> stream,
                                             std::span<const CohortRecord> cohort) {
    RecordAudit records;
    for (std::size_t i = 0; i < stream.size(); ++i) records.add(stream[i], i);
    CohortAudit ca;
    for (const auto& c : cohort) {
        CohortRecord copy = c;
        ca.add(copy, derive_all(copy));
    }
    return out_of_dictionary_findings(records, cohort.empty() ? nullptr : &ca);
}

// ---------------------------------------------------------------------------

bool FindingsReport::has_inconsistency() const {
    return std::ranges::any_of(findings, [](const Finding& f) { return f.severity == Severity::Inconsistency; });
}

std::string FindingsReport::render_json() const {
    nlohmann::ordered_json j;
    j["inconsistencies"] = has_inconsistency();
    j["findings"] = nlohmann::ordered_json::array();
    for (const auto& f : findings)
        j["findings"].push_back({{"check", f.check},
                                 {"severity", severity_name(f.severity)},
                                 {"count", f.count},
                                 {"description", f.description},
                                 {"examples", f.examples}});
    return j.dump(2) + "\n";
}

std::string FindingsReport::render_text() const {
    std::ostringstream os;
    os << "Validation findings\n";
    for (const auto& f : findings) {
        os << "  [" << severity_name(f.severity) << "] " << f.check << ": " << f.count << "  " << f.description;
        if (!f.examples.empty()) {
            os << "  (rows";
            for (auto r : f.examples) os << ' ' << r;
            os << (f.count > f.examples.size() ? " ...)" : ")");
        }
        os << '\n';
    }
    os << (has_inconsistency() ? "Inconsistencies found.\n" : "No inconsistencies.\n");
    return os.str();
}

FindingsReport build_findings(const RecordAudit& records, const CohortAudit& cohort, std::uint64_t date_parse_warnings,
                              std::uint64_t malformed_rows) {
    FindingsReport r;
    r.findings.push_back(male_pregnant_finding(records.male_pregnant()));
    r.findings.push_back(male_puerperal_finding(records.male_puerperal()));
    for (auto& f : out_of_dictionary_findings(records, &cohort)) r.findings.push_back(std::move(f));
    if (cohort.case_normalized().count)
        r.findings.push_back(sampled_finding("free_text_case_normalized", Severity::Info, cohort.case_normalized(),
                                             "free-text test results that matched only after uppercasing"));
    if (date_parse_warnings)
        r.findings.push_back({"onset_date_unparseable", Severity::Warning, date_parse_warnings,
                              "DT_SIN_PRI values that are not valid dates (treated as missing)", {}});
    if (malformed_rows)
        r.findings.push_back({"malformed_rows", Severity::Warning, malformed_rows,
                              "rows quarantined by the reader", {}});
    return r;
}

}  // namespace oobr
