#include "oobr/schema.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace oobr {

namespace {

constexpr std::array<std::string_view, kIntFieldCount> kIntNames = {
    "SEM_PRI",    "NU_IDADE_N", "CS_GESTANT", "PUERPERA",   "CLASSI_FIN", "PCR_SARS2",
    "AN_SARS2",   "RES_IGG",    "RES_IGM",    "RES_IGA",    "CO_MUN_RES", "CO_MU_INTE",
    "CS_RACA",    "CS_ESCOL_N", "HOSPITAL",   "HISTO_VGM",  "SURTO_SG",   "NOSOCOMIAL",
    "AVE_SUINO",  "VACINA",     "ANTIVIRAL",  "CS_ZONA",    "FEBRE",      "TOSSE",
    "GARGANTA",   "DISPNEIA",   "DESC_RESP",  "SATURACAO",  "DIARREIA",   "VOMITO",
    "DOR_ABD",    "FADIGA",     "PERD_OLFT",  "PERD_PALA",  "CARDIOPATI", "HEMATOLOGI",
    "HEPATICA",   "ASMA",       "DIABETES",   "NEUROLOGIC", "PNEUMOPATI", "IMUNODEPRE",
    "RENAL",      "OBESIDADE",  "UTI",        "SUPORT_VEN", "EVOLUCAO",
};

constexpr std::array<std::string_view, kTextFieldCount> kTextNames = {
    "DT_SIN_PRI", "CS_SEXO", "SG_UF", "DS_PCR_OUT", "DS_AN_OUT",
};

constexpr std::array<std::string_view, kDerivedCount> kDerivedNames = {
    "classi_gesta_puerp", "pcr_SN",     "antigeno_SN", "sorologia_SN", "classi_covid", "region",
    "raca",               "escol",      "faixa_et",    "hospital",     "hist_viagem",  "sg_para_srag",
    "inf_inter",          "cont_ave_suino", "vacina",  "antiviral",    "zona",         "mudou_muni",
    "febre",              "tosse",      "garganta",    "dispneia",     "desc_resp",    "saturacao",
    "diarreia",           "vomito",     "dor_abd",     "fadiga",       "perd_olft",    "perd_pala",
    "cardiopati",         "hematologi", "hepatica",    "asma",         "diabetes",     "neuro",
    "pneumopati",         "imunodepre", "renal",       "obesidade",    "uti",          "suport_ven",
    "evolucao",
};

constexpr std::array<std::string_view, 27> kStates = {
    "AC", "AL", "AM", "AP", "BA", "CE", "DF", "ES", "GO", "MA", "MG", "MS", "MT", "PA",
    "PB", "PE", "PI", "PR", "RJ", "RN", "RO", "RR", "RS", "SC", "SE", "SP", "TO",
};

constexpr std::array<std::string_view, 6> kRequired = {
    "DT_SIN_PRI", "SEM_PRI", "CS_SEXO", "NU_IDADE_N", "CS_GESTANT", "PUERPERA",
};

// Export order: the raw date first, then demographics, then the rest in
// declaration order.
std::vector<FieldId> build_modeled_order() {
    std::vector<FieldId> out;
    out.push_back(FieldId::of(TextField::DT_SIN_PRI));
    out.push_back(FieldId::of(IntField::SEM_PRI));
    out.push_back(FieldId::of(TextField::CS_SEXO));
    out.push_back(FieldId::of(IntField::NU_IDADE_N));
    out.push_back(FieldId::of(IntField::CS_GESTANT));
    out.push_back(FieldId::of(IntField::PUERPERA));
    out.push_back(FieldId::of(TextField::SG_UF));
    for (std::size_t i = static_cast<std::size_t>(IntField::CLASSI_FIN); i < kIntFieldCount; ++i) {
        out.push_back(FieldId::of(static_cast<IntField>(i)));
        if (static_cast<IntField>(i) == IntField::PCR_SARS2)
            out.push_back(FieldId::of(TextField::DS_PCR_OUT));
        if (static_cast<IntField>(i) == IntField::AN_SARS2)
            out.push_back(FieldId::of(TextField::DS_AN_OUT));
    }
    return out;
}

std::vector<CodeEntry> binary_entries() {
    return {{"1", "yes", "sim"}, {"2", "no", "não"}, {"9", "ignored", "ignorado"}};
}

CodeBook make_standard() {
    std::vector<CodeBookField> f;
    auto add = [&](auto field, std::vector<CodeEntry> entries, std::vector<std::string> undocumented = {}) {
        f.push_back({FieldId::of(field), std::move(entries), std::move(undocumented)});
    };

    add(TextField::CS_SEXO, {{"F", "female", "feminino"}, {"M", "male", "masculino"}, {"I", "ignored", "ignorado"}});
    add(IntField::CS_GESTANT,
        {{"1", "1st trimester", "1º trimestre"},
         {"2", "2nd trimester", "2º trimestre"},
         {"3", "3rd trimester", "3º trimestre"},
         {"4", "Ignored Gestational Age", "idade gestacional ignorada"},
         {"5", "No", "não"},
         {"6", "Does not apply", "não se aplica"},
         {"9", "Ignored", "ignorado"}},
        {"0"});
    add(IntField::PUERPERA, binary_entries());
    add(IntField::CLASSI_FIN,
        {{"1", "SARI by influenza", "SRAG por influenza"},
         {"2", "SARI by another respiratory virus", "SRAG por outro vírus respiratório"},
         {"3", "SARI by another etiologic agent", "SRAG por outro agente etiológico"},
         {"4", "SARI not specified", "SRAG não especificado"},
         {"5", "SARI by COVID-19", "SRAG por COVID-19"}});
    add(IntField::PCR_SARS2, {{"1", "positive", "positivo"}});
    add(IntField::AN_SARS2, {{"1", "positive", "positivo"}});
    for (auto sero : {IntField::RES_IGG, IntField::RES_IGM, IntField::RES_IGA}) {
        add(sero, {{"1", "reactive", "reagente"},
                   {"2", "non-reactive", "não reagente"},
                   {"3", "inconclusive", "inconclusivo"},
                   {"4", "not performed", "não realizado"},
                   {"5", "awaiting result", "aguardando resultado"},
                   {"9", "ignored", "ignorado"}});
    }
    {
        std::vector<CodeEntry> states;
        for (auto s : kStates) states.push_back({std::string(s), std::string(s), std::string(s)});
        add(TextField::SG_UF, std::move(states));
    }
    add(IntField::CS_RACA,
        {{"1", "white", "branca"},
         {"2", "black", "preta"},
         {"3", "yellow", "amarela"},
         {"4", "brown", "parda"},
         {"5", "indigenous", "indígena"},
         {"9", "ignored", "ignorado"}});
    add(IntField::CS_ESCOL_N,
        {{"0", "no schooling", "sem escolaridade"},
         {"1", "elementary school, 1st cycle", "fundamental 1º ciclo"},
         {"2", "elementary school, 2nd cycle", "fundamental 2º ciclo"},
         {"3", "high school", "médio"},
         {"4", "higher education", "superior"},
         {"9", "ignored", "ignorado"}});
    for (auto b : {IntField::HOSPITAL, IntField::HISTO_VGM, IntField::SURTO_SG, IntField::NOSOCOMIAL,
                   IntField::AVE_SUINO, IntField::VACINA})
        add(b, binary_entries());
    add(IntField::ANTIVIRAL,
        {{"1", "Oseltamivir", "Oseltamivir"},
         {"2", "Zanamivir", "Zanamivir"},
         {"3", "other", "outro"},
         {"9", "ignored", "ignorado"}});
    add(IntField::CS_ZONA,
        {{"1", "urban", "urbana"}, {"2", "rural", "rural"}, {"3", "periurban", "periurbana"}, {"9", "ignored", "ignorado"}});
    for (std::size_t i = static_cast<std::size_t>(IntField::FEBRE); i <= static_cast<std::size_t>(IntField::UTI); ++i)
        add(static_cast<IntField>(i), binary_entries());
    add(IntField::SUPORT_VEN,
        {{"1", "invasive", "invasivo"},
         {"2", "non-invasive", "não invasivo"},
         {"3", "no", "não"},
         {"9", "ignored", "ignorado"}});
    add(IntField::EVOLUCAO,
        {{"1", "cure", "cura"},
         {"2", "death", "óbito"},
         {"3", "death from other causes", "óbito por outras causas"},
         {"9", "ignored", "ignorado"}});
    return CodeBook(std::move(f));
}

}  // namespace

std::string_view field_name(IntField f) { return kIntNames[static_cast<std::size_t>(f)]; }
std::string_view field_name(TextField f) { return kTextNames[static_cast<std::size_t>(f)]; }
std::string_view field_name(FieldId f) {
    return f.kind == FieldId::Kind::Int ? kIntNames[f.index] : kTextNames[f.index];
}

std::string_view derived_name(DerivedVar v) { return kDerivedNames[static_cast<std::size_t>(v)]; }

std::optional<DerivedVar> find_derived(std::string_view name) {
    for (std::size_t i = 0; i < kDerivedCount; ++i)
        if (kDerivedNames[i] == name) return static_cast<DerivedVar>(i);
    return std::nullopt;
}

std::optional<FieldId> find_field(std::string_view name) {
    for (std::size_t i = 0; i < kIntFieldCount; ++i)
        if (kIntNames[i] == name) return FieldId::of(static_cast<IntField>(i));
    for (std::size_t i = 0; i < kTextFieldCount; ++i)
        if (kTextNames[i] == name) return FieldId::of(static_cast<TextField>(i));
    return std::nullopt;
}

std::span<const FieldId> modeled_fields() {
    static const std::vector<FieldId> order = build_modeled_order();
    return order;
}

std::span<const std::string_view> downstream_required_fields() { return kRequired; }

std::span<const std::string_view> state_codes() { return kStates; }

std::optional<std::string> SurveillanceRecord::text_of(FieldId f) const {
    if (f.kind == FieldId::Kind::Int) {
        const auto& v = ints[f.index];
        if (!v) return std::nullopt;
        return std::to_string(*v);
    }
    return texts[f.index];
}

// ---------------------------------------------------------------------------

CodeBook::CodeBook(std::vector<CodeBookField> fields) : fields_(std::move(fields)) {
    for (std::size_t i = 0; i < fields_.size(); ++i)
        for (std::size_t j = i + 1; j < fields_.size(); ++j)
            if (fields_[i].field == fields_[j].field)
                throw ConfigError("duplicate code book entry for " + std::string(field_name(fields_[i].field)));
}

const CodeBook& CodeBook::standard() {
    static const CodeBook book = make_standard();
    return book;
}

const CodeBookField* CodeBook::find(FieldId field) const {
    for (const auto& f : fields_)
        if (f.field == field) return &f;
    return nullptr;
}

const CodeBookField& CodeBook::entry(FieldId field) const {
    const auto* f = find(field);
    if (!f) throw ConfigError("no code book entry for field " + std::string(field_name(field)));
    return *f;
}

LookupResult CodeBook::lookup(FieldId field, std::optional<std::string_view> code) const {
    const auto& f = entry(field);
    if (!code) return {};
    for (const auto& e : f.entries)
        if (e.code == *code) return {LookupResult::Kind::Label, e.label, false};
    bool known = std::ranges::find(f.known_undocumented, *code) != f.known_undocumented.end();
    return {LookupResult::Kind::OutOfDictionary, {}, known};
}

LookupResult CodeBook::lookup(IntField field, std::optional<int> code) const {
    if (!code) return lookup(FieldId::of(field), std::nullopt);
    return lookup(FieldId::of(field), std::to_string(*code));
}

LookupResult CodeBook::lookup(TextField field, const std::optional<std::string>& code) const {
    if (!code) return lookup(FieldId::of(field), std::nullopt);
    return lookup(FieldId::of(field), std::string_view(*code));
}

std::string_view CodeBook::reverse_lookup(FieldId field, std::string_view label) const {
    for (const auto& e : entry(field).entries)
        if (e.label == label) return e.code;
    throw ConfigError("label '" + std::string(label) + "' not in dictionary of " + std::string(field_name(field)));
}

bool CodeBook::is_dictionary_code(FieldId field, std::string_view code) const {
    const auto& f = entry(field);
    return std::ranges::any_of(f.entries, [&](const CodeEntry& e) { return e.code == code; });
}

std::string CodeBook::render_text() const {
    std::ostringstream os;
    for (const auto& f : fields_) {
        std::size_t wc = 4, wl = 5;
        for (const auto& e : f.entries) {
            wc = std::max(wc, e.code.size());
            wl = std::max(wl, e.label.size());
        }
        os << field_name(f.field) << '\n';
        os << std::string(field_name(f.field).size(), '-') << '\n';
        auto pad = [](std::string_view s, std::size_t w) { return std::string(s) + std::string(w - s.size(), ' '); };
        os << "  " << pad("code", wc) << "  " << pad("label", wl) << "  translation\n";
        for (const auto& e : f.entries)
            os << "  " << pad(e.code, wc) << "  " << pad(e.label, wl) << "  " << e.translation << '\n';
        for (const auto& u : f.known_undocumented)
            os << "  " << pad(u, wc) << "  " << pad("(no dictionary entry)", wl) << '\n';
        os << '\n';
    }
    return os.str();
}

std::string CodeBook::render_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& f : fields_) {
        nlohmann::ordered_json field;
        field["field"] = field_name(f.field);
        field["entries"] = nlohmann::ordered_json::array();
        for (const auto& e : f.entries)
            field["entries"].push_back({{"code", e.code}, {"label", e.label}, {"translation", e.translation}});
        field["out_of_dictionary"] = f.known_undocumented;
        j.push_back(std::move(field));
    }
    return j.dump(2) + "\n";
}

void check_codebook_coverage(const CodeBook& book, std::span<const FieldId> used) {
    for (auto f : used)
        if (!book.has(f)) throw ConfigError("coded field without dictionary: " + std::string(field_name(f)));
}

}  // namespace oobr
