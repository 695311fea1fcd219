// Analysis variables for cohort records: diagnostic basis, region and the
// categorical recodes.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oobr/rules.hpp"
#include "oobr/schema.hpp"

namespace oobr {

inline constexpr std::string_view kSim = "sim";
inline constexpr std::string_view kNao = "não";

/// Substring patterns matched against free text.
class PatternSet {
public:
    enum class Match : std::uint8_t { None, Verbatim, AfterUppercase };

    explicit PatternSet(std::vector<std::string> patterns);

    /// Missing subjects never match. The subject is ASCII-uppercased before
    /// the search; `AfterUppercase` reports matches that needed it.
    Match match(const std::optional<std::string>& subject) const;
    bool matches(const std::optional<std::string>& subject) const { return match(subject) != Match::None; }

    const std::vector<std::string>& patterns() const { return patterns_; }

private:
    std::vector<std::string> patterns_;
};

/// SARS, COVID, COV, CORONA, CIVID.
const PatternSet& pcr_patterns();
/// SARS, COVID, COV, CORONA, CONA.
const PatternSet& antigen_patterns();

std::string_view detect_pcr_positive(std::optional<int> pcr_sars2, const std::optional<std::string>& ds_pcr_out);
std::string_view detect_antigen_positive(std::optional<int> an_sars2, const std::optional<std::string>& ds_an_out);
std::string_view detect_serology_positive(std::optional<int> igg, std::optional<int> igm, std::optional<int> iga);

/// The classi_covid guard sequence.
const RecodeRule& covid_diagnosis_rule();

/// pcr, antigenio, sorologia, não or outro.
std::string_view classify_covid_diagnosis(std::optional<int> classi_fin, std::string_view pcr, std::string_view antigen,
                                          std::string_view serology);

struct RegionResult {
    std::string_view region;
    /// A non-missing token that is not a state code (mapped to "north").
    bool fallback = false;
};

RegionResult map_region_checked(const std::optional<std::string>& sg_uf);
std::string_view map_region(const std::optional<std::string>& sg_uf);

std::optional<std::string_view> derive_municipality_change(std::optional<int> co_mun_res, std::optional<int> co_mu_inte);

/// Single-field recodes (race, education, age range, binary indicators,
/// symptoms, comorbidities, outcomes), in derivation order.
std::span<const RecodeRule> standard_recodes();

/// Looks up the recode producing `target`. Throws ConfigError if none does.
const RecodeRule& recode_for(DerivedVar target);

std::optional<std::string_view> apply_recode(const RecodeRule& rule, const CohortRecord& r);

/// Audit notes from one derivation.
struct DeriveNotes {
    bool pcr_case_normalized = false;
    bool antigen_case_normalized = false;
    bool region_fallback = false;
};

/// Populates every derived variable except classi_gesta_puerp, which cohort
/// selection sets. Pure in the record.
DeriveNotes derive_all(CohortRecord& r);

/// Every rule (classi_gesta_puerp, classi_covid and the recodes) for review.
std::string rules_manifest();

/// Raw coded fields the derivation and cohort rules read.
std::vector<FieldId> coded_fields_used();

/// Declared category order of a derived variable (empty when natural).
std::span<const std::string> derived_levels(DerivedVar v);

}  // namespace oobr
