#include "oobr/derive.hpp"

#include <algorithm>

#include "oobr/cohort.hpp"

namespace oobr {

namespace {

using Op = Condition::Op;

Condition eq(IntField f, int v) { return Condition::on(f, Op::Eq, v); }

RecodeRule coded(DerivedVar target, IntField source, std::vector<std::pair<int, std::string>> mapping,
                 std::vector<std::string> levels = {}) {
    RecodeRule r;
    r.target = target;
    for (auto& [code, label] : mapping) r.guards.push_back({{eq(source, code)}, std::move(label)});
    r.levels = std::move(levels);
    return r;
}

RecodeRule yes_no(DerivedVar target, IntField source) {
    return coded(target, source, {{1, std::string(kSim)}, {2, std::string(kNao)}});
}

std::vector<RecodeRule> make_recodes() {
    using D = DerivedVar;
    using F = IntField;
    std::vector<RecodeRule> rules;
    rules.push_back(coded(D::raca, F::CS_RACA,
                          {{1, "branca"}, {2, "preta"}, {3, "amarela"}, {4, "parda"}, {5, "indigena"}}));
    rules.push_back(coded(D::escol, F::CS_ESCOL_N,
                          {{0, "sem escol"}, {1, "fund1"}, {2, "fund2"}, {3, "medio"}, {4, "superior"}}));
    {
        RecodeRule r;
        r.target = D::faixa_et;
        r.guards = {
            {{Condition::on(F::NU_IDADE_N, Op::Le, 19)}, "<20"},
            {{Condition::on(F::NU_IDADE_N, Op::Ge, 20), Condition::on(F::NU_IDADE_N, Op::Le, 34)}, "20-34"},
            {{Condition::on(F::NU_IDADE_N, Op::Ge, 35)}, ">=35"},
        };
        r.levels = {"<20", "20-34", ">=35"};
        rules.push_back(std::move(r));
    }
    rules.push_back(yes_no(D::hospital, F::HOSPITAL));
    rules.push_back(yes_no(D::hist_viagem, F::HISTO_VGM));
    rules.push_back(yes_no(D::sg_para_srag, F::SURTO_SG));
    rules.push_back(yes_no(D::inf_inter, F::NOSOCOMIAL));
    rules.push_back(yes_no(D::cont_ave_suino, F::AVE_SUINO));
    rules.push_back(yes_no(D::vacina, F::VACINA));
    rules.push_back(coded(D::antiviral, F::ANTIVIRAL, {{1, "Oseltamivir"}, {2, "Zanamivir"}}));
    rules.push_back(coded(D::zona, F::CS_ZONA, {{1, "urbana"}, {2, "rural"}, {3, "periurbana"}}));

    // Symptoms, then comorbidities, then UTI: target and source enums run in parallel.
    for (int i = 0; i <= static_cast<int>(F::UTI) - static_cast<int>(F::FEBRE); ++i) {
        auto target = static_cast<D>(static_cast<int>(D::febre) + i);
        auto source = static_cast<F>(static_cast<int>(F::FEBRE) + i);
        rules.push_back(yes_no(target, source));
    }
    rules.push_back(coded(D::suport_ven, F::SUPORT_VEN, {{1, "invasivo"}, {2, "não invasivo"}, {3, "não"}},
                          {"invasivo", "não invasivo", "não"}));
    rules.push_back(coded(D::evolucao, F::EVOLUCAO, {{1, "Cura"}, {2, "Obito"}, {3, "Obito"}}));
    return rules;
}

RecodeRule make_covid_rule() {
    using D = DerivedVar;
    auto is = [](D v, std::string_view label) { return Condition::on(v, Op::Eq, std::string(label)); };
    auto fin5 = eq(IntField::CLASSI_FIN, 5);
    RecodeRule r;
    r.target = D::classi_covid;
    r.guards = {
        {{fin5, is(D::pcr_SN, kSim)}, "pcr"},
        {{fin5, is(D::pcr_SN, kNao), is(D::antigeno_SN, kSim)}, "antigenio"},
        {{fin5, is(D::sorologia_SN, kSim), is(D::antigeno_SN, kNao), is(D::pcr_SN, kNao)}, "sorologia"},
        {{Condition::on(IntField::CLASSI_FIN, Op::Ne, 5)}, std::string(kNao)},
    };
    r.default_label = "outro";
    return r;
}

const std::vector<RecodeRule>& recodes() {
    static const std::vector<RecodeRule> rules = make_recodes();
    return rules;
}

constexpr std::array<std::string_view, 27> kRegionOfState = {
    // Parallel to state_codes(): AC AL AM AP BA CE DF ES GO MA MG MS MT PA PB PE PI PR RJ RN RO RR RS SC SE SP TO
    "north",     "northeast", "north",     "north",     "northeast", "northeast", "central",
    "southeast", "central",   "northeast", "southeast", "central",   "central",   "north",
    "northeast", "northeast", "northeast", "south",     "southeast", "northeast", "north",
    "north",     "south",     "south",     "northeast", "southeast", "north",
};

bool flag_yes(std::optional<int> v) { return v && *v == 1; }

}  // namespace

PatternSet::PatternSet(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {}

PatternSet::Match PatternSet::match(const std::optional<std::string>& subject) const {
    if (!subject) return Match::None;
    auto found = [&](std::string_view s) {
        return std::ranges::any_of(patterns_, [&](const std::string& p) { return s.find(p) != std::string_view::npos; });
    };
    if (found(*subject)) return Match::Verbatim;
    std::string upper = *subject;
    for (auto& c : upper)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return found(upper) ? Match::AfterUppercase : Match::None;
}

const PatternSet& pcr_patterns() {
    static const PatternSet set({"SARS", "COVID", "COV", "CORONA", "CIVID"});
    return set;
}

const PatternSet& antigen_patterns() {
    static const PatternSet set({"SARS", "COVID", "COV", "CORONA", "CONA"});
    return set;
}

std::string_view detect_pcr_positive(std::optional<int> pcr_sars2, const std::optional<std::string>& ds_pcr_out) {
    return flag_yes(pcr_sars2) || pcr_patterns().matches(ds_pcr_out) ? kSim : kNao;
}

std::string_view detect_antigen_positive(std::optional<int> an_sars2, const std::optional<std::string>& ds_an_out) {
    return flag_yes(an_sars2) || antigen_patterns().matches(ds_an_out) ? kSim : kNao;
}

std::string_view detect_serology_positive(std::optional<int> igg, std::optional<int> igm, std::optional<int> iga) {
    // Missing results count as 0.
    int g = igg.value_or(0), m = igm.value_or(0), a = iga.value_or(0);
    return g == 1 || m == 1 || a == 1 ? kSim : kNao;
}

const RecodeRule& covid_diagnosis_rule() {
    static const RecodeRule rule = make_covid_rule();
    return rule;
}

std::string_view classify_covid_diagnosis(std::optional<int> classi_fin, std::string_view pcr, std::string_view antigen,
                                          std::string_view serology) {
    std::array<std::optional<int>, kIntFieldCount> ints{};
    ints[static_cast<std::size_t>(IntField::CLASSI_FIN)] = classi_fin;
    DerivedValues derived{};
    derived[static_cast<std::size_t>(DerivedVar::pcr_SN)] = pcr;
    derived[static_cast<std::size_t>(DerivedVar::antigeno_SN)] = antigen;
    derived[static_cast<std::size_t>(DerivedVar::sorologia_SN)] = serology;
    return *covid_diagnosis_rule().evaluate({ints, &derived});
}

RegionResult map_region_checked(const std::optional<std::string>& sg_uf) {
    if (!sg_uf) return {"unknown", false};
    auto states = state_codes();
    auto it = std::ranges::find(states, std::string_view(*sg_uf));
    if (it == states.end()) return {"north", true};
    return {kRegionOfState[static_cast<std::size_t>(it - states.begin())], false};
}

std::string_view map_region(const std::optional<std::string>& sg_uf) { return map_region_checked(sg_uf).region; }

std::optional<std::string_view> derive_municipality_change(std::optional<int> co_mun_res, std::optional<int> co_mu_inte) {
    if (!co_mun_res || !co_mu_inte) return std::nullopt;
    return *co_mun_res == *co_mu_inte ? kNao : kSim;
}

std::span<const RecodeRule> standard_recodes() { return recodes(); }

const RecodeRule& recode_for(DerivedVar target) {
    for (const auto& r : recodes())
        if (r.target == target) return r;
    throw ConfigError("no recode rule produces " + std::string(derived_name(target)));
}

std::optional<std::string_view> apply_recode(const RecodeRule& rule, const CohortRecord& r) {
    return rule.evaluate({r.raw.ints, &r.derived});
}

DeriveNotes derive_all(CohortRecord& r) {
    using D = DerivedVar;
    const auto& raw = r.raw;
    DeriveNotes notes;

    r[D::pcr_SN] = detect_pcr_positive(raw[IntField::PCR_SARS2], raw[TextField::DS_PCR_OUT]);
    r[D::antigeno_SN] = detect_antigen_positive(raw[IntField::AN_SARS2], raw[TextField::DS_AN_OUT]);
    r[D::sorologia_SN] = detect_serology_positive(raw[IntField::RES_IGG], raw[IntField::RES_IGM], raw[IntField::RES_IGA]);
    // A free-text match that only succeeded after uppercasing, and decided the outcome.
    notes.pcr_case_normalized = !flag_yes(raw[IntField::PCR_SARS2]) &&
                                pcr_patterns().match(raw[TextField::DS_PCR_OUT]) == PatternSet::Match::AfterUppercase;
    notes.antigen_case_normalized =
        !flag_yes(raw[IntField::AN_SARS2]) &&
        antigen_patterns().match(raw[TextField::DS_AN_OUT]) == PatternSet::Match::AfterUppercase;

    r[D::classi_covid] = apply_recode(covid_diagnosis_rule(), r);

    auto region = map_region_checked(raw[TextField::SG_UF]);
    r[D::region] = region.region;
    notes.region_fallback = region.fallback;

    r[D::mudou_muni] = derive_municipality_change(raw[IntField::CO_MUN_RES], raw[IntField::CO_MU_INTE]);

    for (const auto& rule : recodes()) r[rule.target] = apply_recode(rule, r);
    return notes;
}

std::string rules_manifest() {
    std::vector<RecodeRule> all;
    all.push_back(gestational_status_rule());
    all.push_back(covid_diagnosis_rule());
    for (const auto& r : recodes()) all.push_back(r);
    std::string out =
        "pcr_SN  <-  PCR_SARS2, DS_PCR_OUT\n"
        "  1. PCR_SARS2 == 1 | DS_PCR_OUT contains any of SARS, COVID, COV, CORONA, CIVID  ->  \"sim\"\n"
        "  otherwise  ->  \"não\"\n\n"
        "antigeno_SN  <-  AN_SARS2, DS_AN_OUT\n"
        "  1. AN_SARS2 == 1 | DS_AN_OUT contains any of SARS, COVID, COV, CORONA, CONA  ->  \"sim\"\n"
        "  otherwise  ->  \"não\"\n\n"
        "sorologia_SN  <-  RES_IGG, RES_IGM, RES_IGA (missing read as 0)\n"
        "  1. RES_IGG == 1 | RES_IGM == 1 | RES_IGA == 1  ->  \"sim\"\n"
        "  otherwise  ->  \"não\"\n\n"
        "region  <-  SG_UF\n"
        "  SP RJ ES MG -> \"southeast\"; PR SC RS -> \"south\"; GO MT MS DF -> \"central\";\n"
        "  AL BA CE MA PB PE PI RN SE -> \"northeast\"; AC AP AM PA RO RR TO -> \"north\";\n"
        "  missing -> \"unknown\"; any other token -> \"north\" (logged)\n\n"
        "mudou_muni  <-  CO_MUN_RES, CO_MU_INTE\n"
        "  1. both present & equal  ->  \"não\"\n"
        "  2. both present & different  ->  \"sim\"\n"
        "  otherwise  ->  <missing>\n\n";
    return out + render_rules(all);
}

std::vector<FieldId> coded_fields_used() {
    std::vector<FieldId> out = {
        FieldId::of(TextField::CS_SEXO),   FieldId::of(IntField::CS_GESTANT), FieldId::of(IntField::PUERPERA),
        FieldId::of(IntField::CLASSI_FIN), FieldId::of(IntField::PCR_SARS2),  FieldId::of(IntField::AN_SARS2),
        FieldId::of(IntField::RES_IGG),    FieldId::of(IntField::RES_IGM),    FieldId::of(IntField::RES_IGA),
        FieldId::of(TextField::SG_UF),
    };
    for (const auto& r : recodes())
        for (auto f : r.source_fields())
            if (f != IntField::NU_IDADE_N && std::ranges::find(out, FieldId::of(f)) == out.end())
                out.push_back(FieldId::of(f));
    return out;
}

std::span<const std::string> derived_levels(DerivedVar v) {
    if (v == DerivedVar::classi_gesta_puerp) return gestational_status_rule().levels;
    for (const auto& r : recodes())
        if (r.target == v) return r.levels;
    return {};
}

}  // namespace oobr
