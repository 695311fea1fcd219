#include "oobr/cohort.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "oobr/ingest.hpp"

namespace oobr {

namespace {

using Op = Condition::Op;

RecodeRule make_status_rule() {
    auto gest = [](int v) { return Condition::on(IntField::CS_GESTANT, Op::Eq, v); };
    auto puerp = Condition::on(IntField::PUERPERA, Op::Eq, 1);
    RecodeRule r;
    r.target = DerivedVar::classi_gesta_puerp;
    r.guards = {
        {{gest(1)}, "1tri"},
        {{gest(2)}, "2tri"},
        {{gest(3)}, "3tri"},
        {{gest(4)}, "IG_ig"},
        {{gest(5), puerp}, "puerp"},
        {{gest(9), puerp}, "puerp"},
    };
    r.default_label = "não";
    r.levels = {"1tri", "2tri", "3tri", "IG_ig", "puerp"};
    return r;
}

struct StageInfo {
    std::string_view id;
    std::string_view name;
};

constexpr std::array<StageInfo, kStageCount> kStages = {{
    {"valid_onset", "Notifications with symptom-onset date and epidemiological week"},
    {"epi_window", "Onset from epidemiological week 8 of 2020 onwards (2020 or 2021)"},
    {"current_week", "Week 53 moved to 2020, 2021 up to the current epidemiological week"},
    {"female", "Female cases"},
    {"age_10_55", "Aged 10 to 55 years"},
    {"obstetric", "Pregnant or postpartum cases"},
}};

template <typename Pred>
std::vector<StampedRecord> keep_if(std::vector<StampedRecord> stream, Pred pred) {
    std::erase_if(stream, [&](const StampedRecord& s) { return !pred(s); });
    return stream;
}

}  // namespace

std::string_view status_label(GestationalStatus s) {
    switch (s) {
        case GestationalStatus::FirstTrimester: return "1tri";
        case GestationalStatus::SecondTrimester: return "2tri";
        case GestationalStatus::ThirdTrimester: return "3tri";
        case GestationalStatus::IgnoredAge: return "IG_ig";
        case GestationalStatus::Puerperal: return "puerp";
        case GestationalStatus::NotObstetric: return "não";
    }
    return "não";
}

const RecodeRule& gestational_status_rule() {
    static const RecodeRule rule = make_status_rule();
    return rule;
}

GestationalStatus classify_gestational_status(std::optional<int> cs_gestant, std::optional<int> puerpera) {
    std::array<std::optional<int>, kIntFieldCount> ints{};
    ints[static_cast<std::size_t>(IntField::CS_GESTANT)] = cs_gestant;
    ints[static_cast<std::size_t>(IntField::PUERPERA)] = puerpera;
    auto label = gestational_status_rule().evaluate({ints, nullptr});
    if (label == "1tri") return GestationalStatus::FirstTrimester;
    if (label == "2tri") return GestationalStatus::SecondTrimester;
    if (label == "3tri") return GestationalStatus::ThirdTrimester;
    if (label == "IG_ig") return GestationalStatus::IgnoredAge;
    if (label == "puerp") return GestationalStatus::Puerperal;
    return GestationalStatus::NotObstetric;
}

std::optional<EpiStamp> assign_epi_stamp(const SurveillanceRecord& r) {
    const auto& week = r[IntField::SEM_PRI];
    if (!r.onset || !week) return std::nullopt;
    return EpiStamp{static_cast<int>(r.onset->year()), *week};
}

bool in_epi_window(const EpiStamp& s) { return (s.ano == 2020 && s.sem >= 8) || s.ano == 2021; }

EpiStamp correct_week53(EpiStamp s) {
    if (s.ano == 2021 && s.sem == 53) s.ano = 2020;
    return s;
}

void validate_current_week(int current_week) {
    if (current_week < 1 || current_week > 53)
        throw ConfigError("current epidemiological week must be in 1..53, got " + std::to_string(current_week));
}

bool within_current_week(const EpiStamp& s, int current_week) {
    validate_current_week(current_week);
    return s.ano == 2020 || (s.ano == 2021 && s.sem <= current_week);
}

bool is_female(const SurveillanceRecord& r) {
    const auto& sex = r[TextField::CS_SEXO];
    return sex && *sex == "F";
}

bool age_in_range(const SurveillanceRecord& r) {
    const auto& age = r[IntField::NU_IDADE_N];
    return age && *age > 9 && *age <= 55;
}

// ---------------------------------------------------------------------------

std::string_view stage_id(Stage s) { return kStages[static_cast<std::size_t>(s)].id; }
std::string_view stage_name(Stage s) { return kStages[static_cast<std::size_t>(s)].name; }

bool FunnelReport::balanced() const {
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const auto& st = stages[i];
        if (st.removed > st.in || st.out != st.in - st.removed) return false;
        if (i + 1 < stages.size() && st.out != stages[i + 1].in) return false;
    }
    return true;
}

std::string FunnelReport::render_text() const {
    std::size_t wn = 5;
    for (const auto& s : stages) wn = std::max(wn, s.name.size());
    std::ostringstream os;
    auto num = [](std::uint64_t v) {
        std::string s = std::to_string(v);
        return std::string(s.size() < 10 ? 10 - s.size() : 0, ' ') + s;
    };
    os << "Case selection funnel\n";
    os << "stage" << std::string(wn - 5, ' ') << "          in         out     removed\n";
    for (const auto& s : stages)
        os << s.name << std::string(wn - s.name.size(), ' ') << "  " << num(s.in) << "  " << num(s.out) << "  "
           << num(s.removed) << '\n';
    return os.str();
}

std::string FunnelReport::render_csv(char d) const {
    std::ostringstream os;
    os << "stage" << d << "description" << d << "in" << d << "out" << d << "removed\n";
    for (const auto& s : stages) {
        std::string name;
        append_csv_field(name, s.name, d);
        os << s.id << d << name << d << s.in << d << s.out << d << s.removed << '\n';
    }
    return os.str();
}

std::string FunnelReport::render_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : stages)
        j.push_back({{"stage", s.id}, {"description", s.name}, {"in", s.in}, {"out", s.out}, {"removed", s.removed}});
    return j.dump(2) + "\n";
}

void FunnelCounter::merge(const FunnelCounter& o) {
    entered_ += o.entered_;
    for (std::size_t i = 0; i < kStageCount; ++i) removed_[i] += o.removed_[i];
}

FunnelReport FunnelCounter::report() const {
    FunnelReport r;
    std::uint64_t in = entered_;
    for (std::size_t i = 0; i < kStageCount; ++i) {
        FunnelStage st;
        st.id = kStages[i].id;
        st.name = kStages[i].name;
        st.in = in;
        st.removed = removed_[i];
        st.out = in - removed_[i];
        in = st.out;
        r.stages.push_back(std::move(st));
    }
    return r;
}

// ---------------------------------------------------------------------------

Selection select_record(const SurveillanceRecord& r, int current_week) {
    Selection sel;
    sel.raw_stamp = assign_epi_stamp(r);
    if (!sel.raw_stamp) {
        sel.removed_by = Stage::ValidStamp;
        return sel;
    }
    if (!in_epi_window(*sel.raw_stamp)) {
        sel.removed_by = Stage::EpiWindow;
        return sel;
    }
    sel.stamp = correct_week53(*sel.raw_stamp);
    if (!within_current_week(*sel.stamp, current_week)) {
        sel.removed_by = Stage::CurrentWeek;
        return sel;
    }
    if (!is_female(r)) {
        sel.removed_by = Stage::Female;
        return sel;
    }
    if (!age_in_range(r)) {
        sel.removed_by = Stage::Age;
        return sel;
    }
    sel.status = classify_gestational_status(r[IntField::CS_GESTANT], r[IntField::PUERPERA]);
    if (sel.status == GestationalStatus::NotObstetric) sel.removed_by = Stage::Obstetric;
    return sel;
}

CohortSelection select_obstetric_cohort(std::span<const SurveillanceRecord> stream, int current_week) {
    validate_current_week(current_week);
    CohortSelection out;
    FunnelCounter funnel;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        funnel.enter();
        auto sel = select_record(stream[i], current_week);
        if (!sel.selected()) {
            funnel.removed_at(*sel.removed_by);
            continue;
        }
        CohortRecord c;
        c.raw = stream[i];
        c.stamp = *sel.stamp;
        c.row = i;
        c[DerivedVar::classi_gesta_puerp] = status_label(sel.status);
        out.cohort.push_back(std::move(c));
    }
    out.funnel = funnel.report();
    return out;
}

std::vector<StampedRecord> stamp_records(std::span<const SurveillanceRecord> stream) {
    std::vector<StampedRecord> out;
    out.reserve(stream.size());
    for (const auto& r : stream) out.push_back({r, assign_epi_stamp(r)});
    return out;
}

std::vector<StampedRecord> filter_epi_window(std::vector<StampedRecord> stream) {
    return keep_if(std::move(stream), [](const StampedRecord& s) { return s.stamp && in_epi_window(*s.stamp); });
}

std::vector<StampedRecord> apply_week53_correction(std::vector<StampedRecord> stream) {
    for (auto& s : stream)
        if (s.stamp) s.stamp = correct_week53(*s.stamp);
    return stream;
}

std::vector<StampedRecord> filter_current_week(std::vector<StampedRecord> stream, int current_week) {
    validate_current_week(current_week);
    return keep_if(std::move(stream),
                   [&](const StampedRecord& s) { return s.stamp && within_current_week(*s.stamp, current_week); });
}

std::vector<StampedRecord> filter_sex_female(std::vector<StampedRecord> stream) {
    return keep_if(std::move(stream), [](const StampedRecord& s) { return is_female(s.record); });
}

std::vector<StampedRecord> filter_age(std::vector<StampedRecord> stream) {
    return keep_if(std::move(stream), [](const StampedRecord& s) { return age_in_range(s.record); });
}

}  // namespace oobr
