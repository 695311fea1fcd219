// Case selection: epi-week window, week-53 correction, current-week cut,
// sex and age filters, and gestational/puerperal classification.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oobr/rules.hpp"
#include "oobr/schema.hpp"

namespace oobr {

enum class GestationalStatus : std::uint8_t { FirstTrimester, SecondTrimester, ThirdTrimester, IgnoredAge, Puerperal, NotObstetric };

/// "1tri", "2tri", "3tri", "IG_ig", "puerp" or "não".
std::string_view status_label(GestationalStatus s);

/// The classi_gesta_puerp guard sequence.
const RecodeRule& gestational_status_rule();

GestationalStatus classify_gestational_status(std::optional<int> cs_gestant, std::optional<int> puerpera);

/// (calendar year of onset, SEM_PRI). Missing when the onset date or the
/// week is missing.
std::optional<EpiStamp> assign_epi_stamp(const SurveillanceRecord& r);

/// (ano = 2020 and sem >= 8) or ano = 2021.
bool in_epi_window(const EpiStamp& s);

/// (2021, 53) becomes (2020, 53); everything else is returned unchanged.
EpiStamp correct_week53(EpiStamp s);

/// ano = 2020, or ano = 2021 up to `current_week`. Throws ConfigError if
/// current_week is outside 1..53.
bool within_current_week(const EpiStamp& s, int current_week);

bool is_female(const SurveillanceRecord& r);

/// 10 <= NU_IDADE_N <= 55 (the published predicate is "> 9 and <= 55").
bool age_in_range(const SurveillanceRecord& r);

// ---------------------------------------------------------------------------
// Funnel

enum class Stage : std::uint8_t { ValidStamp, EpiWindow, CurrentWeek, Female, Age, Obstetric };
inline constexpr std::size_t kStageCount = 6;

std::string_view stage_id(Stage s);
std::string_view stage_name(Stage s);

struct FunnelStage {
    std::string id;
    std::string name;
    std::uint64_t in = 0;
    std::uint64_t out = 0;
    std::uint64_t removed = 0;
    bool operator==(const FunnelStage&) const = default;
};

struct FunnelReport {
    std::vector<FunnelStage> stages;

    /// out = in - removed per stage and out(k) = in(k+1).
    bool balanced() const;
    std::string render_text() const;
    std::string render_csv(char delimiter = ';') const;
    std::string render_json() const;
    bool operator==(const FunnelReport&) const = default;
};

/// Additive funnel counters.
class FunnelCounter {
public:
    void enter() { ++entered_; }
    /// Records the stage that removed a record.
    void removed_at(Stage s) { ++removed_[static_cast<std::size_t>(s)]; }
    void merge(const FunnelCounter& o);
    FunnelReport report() const;

private:
    std::uint64_t entered_ = 0;
    std::array<std::uint64_t, kStageCount> removed_{};
};

/// Outcome of running one record through every stage.
struct Selection {
    std::optional<EpiStamp> raw_stamp;
    /// Corrected stamp; present once the window stage is passed.
    std::optional<EpiStamp> stamp;
    /// First stage that removed the record; nullopt when it is in the cohort.
    std::optional<Stage> removed_by;
    GestationalStatus status = GestationalStatus::NotObstetric;

    bool selected() const { return !removed_by.has_value(); }
    /// True when stage `s` kept the record.
    bool passed(Stage s) const { return !removed_by || static_cast<int>(*removed_by) > static_cast<int>(s); }
};

/// Applies the stages in their fixed order. Pure.
Selection select_record(const SurveillanceRecord& r, int current_week);

struct CohortSelection {
    std::vector<CohortRecord> cohort;
    FunnelReport funnel;
};

/// Full selection over an in-memory stream. Derived variables other than
/// classi_gesta_puerp are left empty. Throws ConfigError for a bad week.
CohortSelection select_obstetric_cohort(std::span<const SurveillanceRecord> stream, int current_week);

// Stream-level forms of the individual filters.
struct StampedRecord {
    SurveillanceRecord record;
    std::optional<EpiStamp> stamp;
};
std::vector<StampedRecord> stamp_records(std::span<const SurveillanceRecord> stream);
std::vector<StampedRecord> filter_epi_window(std::vector<StampedRecord> stream);
std::vector<StampedRecord> apply_week53_correction(std::vector<StampedRecord> stream);
std::vector<StampedRecord> filter_current_week(std::vector<StampedRecord> stream, int current_week);
std::vector<StampedRecord> filter_sex_female(std::vector<StampedRecord> stream);
std::vector<StampedRecord> filter_age(std::vector<StampedRecord> stream);

void validate_current_week(int current_week);

}  // namespace oobr
