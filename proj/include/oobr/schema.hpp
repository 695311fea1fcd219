// Typed view of the SIVEP-Gripe notification fields read by the pipeline,
// and the code dictionaries for every coded field.
#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oobr {

/// Raised for programming/configuration mistakes (unknown field names,
/// invalid parameters). Data problems are never reported this way.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integer-coded and integer-valued columns.
enum class IntField : std::uint8_t {
    SEM_PRI,
    NU_IDADE_N,
    CS_GESTANT,
    PUERPERA,
    CLASSI_FIN,
    PCR_SARS2,
    AN_SARS2,
    RES_IGG,
    RES_IGM,
    RES_IGA,
    CO_MUN_RES,
    CO_MU_INTE,
    CS_RACA,
    CS_ESCOL_N,
    HOSPITAL,
    HISTO_VGM,
    SURTO_SG,
    NOSOCOMIAL,
    AVE_SUINO,
    VACINA,
    ANTIVIRAL,
    CS_ZONA,
    FEBRE,
    TOSSE,
    GARGANTA,
    DISPNEIA,
    DESC_RESP,
    SATURACAO,
    DIARREIA,
    VOMITO,
    DOR_ABD,
    FADIGA,
    PERD_OLFT,
    PERD_PALA,
    CARDIOPATI,
    HEMATOLOGI,
    HEPATICA,
    ASMA,
    DIABETES,
    NEUROLOGIC,
    PNEUMOPATI,
    IMUNODEPRE,
    RENAL,
    OBESIDADE,
    UTI,
    SUPORT_VEN,
    EVOLUCAO,
};
inline constexpr std::size_t kIntFieldCount = 47;

/// Text columns. DT_SIN_PRI keeps its raw text; the parsed date lives in
/// SurveillanceRecord::onset.
enum class TextField : std::uint8_t {
    DT_SIN_PRI,
    CS_SEXO,
    SG_UF,
    DS_PCR_OUT,
    DS_AN_OUT,
};
inline constexpr std::size_t kTextFieldCount = 5;

/// A modeled column: either integer or text.
struct FieldId {
    enum class Kind : std::uint8_t { Int, Text } kind;
    std::uint8_t index;

    static constexpr FieldId of(IntField f) { return {Kind::Int, static_cast<std::uint8_t>(f)}; }
    static constexpr FieldId of(TextField f) { return {Kind::Text, static_cast<std::uint8_t>(f)}; }
    constexpr bool operator==(const FieldId&) const = default;
};

std::string_view field_name(IntField f);
std::string_view field_name(TextField f);
std::string_view field_name(FieldId f);

/// Resolves a column name to a modeled field. Returns nullopt for
/// unmodeled columns.
std::optional<FieldId> find_field(std::string_view name);

/// All modeled fields in canonical export order.
std::span<const FieldId> modeled_fields();

/// Columns a snapshot must carry for cohort selection to be possible.
std::span<const std::string_view> downstream_required_fields();

/// One raw notification row.
struct SurveillanceRecord {
    std::array<std::optional<int>, kIntFieldCount> ints{};
    std::array<std::optional<std::string>, kTextFieldCount> texts{};
    /// Parsed DT_SIN_PRI; missing when absent or unparseable.
    std::optional<std::chrono::year_month_day> onset;
    /// Unmodeled columns, aligned with the source header's extra-column list.
    std::vector<std::string> extra;
    /// Declared year of the snapshot the row came from.
    int source_year = 0;

    const std::optional<int>& operator[](IntField f) const { return ints[static_cast<std::size_t>(f)]; }
    std::optional<int>& operator[](IntField f) { return ints[static_cast<std::size_t>(f)]; }
    const std::optional<std::string>& operator[](TextField f) const { return texts[static_cast<std::size_t>(f)]; }
    std::optional<std::string>& operator[](TextField f) { return texts[static_cast<std::size_t>(f)]; }

    bool has(FieldId f) const {
        return f.kind == FieldId::Kind::Int ? ints[f.index].has_value() : texts[f.index].has_value();
    }

    /// Field value rendered as text (decimal for integers); nullopt when missing.
    std::optional<std::string> text_of(FieldId f) const;
};

/// Calendar year of symptom onset paired with the notified epi week.
struct EpiStamp {
    int ano = 0;
    int sem = 0;
    constexpr bool operator==(const EpiStamp&) const = default;
};

/// Analysis variables computed for every cohort record.
enum class DerivedVar : std::uint8_t {
    classi_gesta_puerp,
    pcr_SN,
    antigeno_SN,
    sorologia_SN,
    classi_covid,
    region,
    raca,
    escol,
    faixa_et,
    hospital,
    hist_viagem,
    sg_para_srag,
    inf_inter,
    cont_ave_suino,
    vacina,
    antiviral,
    zona,
    mudou_muni,
    febre,
    tosse,
    garganta,
    dispneia,
    desc_resp,
    saturacao,
    diarreia,
    vomito,
    dor_abd,
    fadiga,
    perd_olft,
    perd_pala,
    cardiopati,
    hematologi,
    hepatica,
    asma,
    diabetes,
    neuro,
    pneumopati,
    imunodepre,
    renal,
    obesidade,
    uti,
    suport_ven,
    evolucao,
};
inline constexpr std::size_t kDerivedCount = 43;

std::string_view derived_name(DerivedVar v);
std::optional<DerivedVar> find_derived(std::string_view name);

/// Labels point to static storage owned by the rule set.
using DerivedValues = std::array<std::optional<std::string_view>, kDerivedCount>;

/// A selected obstetric case with its derived variables.
struct CohortRecord {
    SurveillanceRecord raw;
    /// Week-53 corrected stamp.
    EpiStamp stamp;
    /// 0-based index in the merged record stream.
    std::uint64_t row = 0;
    DerivedValues derived{};

    const std::optional<std::string_view>& operator[](DerivedVar v) const { return derived[static_cast<std::size_t>(v)]; }
    std::optional<std::string_view>& operator[](DerivedVar v) { return derived[static_cast<std::size_t>(v)]; }
};

// ---------------------------------------------------------------------------
// Code dictionaries

struct CodeEntry {
    std::string code;
    std::string label;
    std::string translation;
};

struct CodeBookField {
    FieldId field;
    std::vector<CodeEntry> entries;
    /// Codes seen in real snapshots that have no dictionary entry.
    std::vector<std::string> known_undocumented;
};

struct LookupResult {
    enum class Kind : std::uint8_t { Label, OutOfDictionary, Missing } kind = Kind::Missing;
    std::string_view label;
    /// True when an out-of-dictionary code is one of the known undocumented ones.
    bool known_undocumented = false;

    bool is_label() const { return kind == Kind::Label; }
    bool is_out_of_dictionary() const { return kind == Kind::OutOfDictionary; }
    bool is_missing() const { return kind == Kind::Missing; }
};

/// Per-field dictionaries. Immutable after construction.
class CodeBook {
public:
    explicit CodeBook(std::vector<CodeBookField> fields);

    /// The dictionary shipped with the pipeline.
    static const CodeBook& standard();

    bool has(FieldId field) const { return find(field) != nullptr; }
    const CodeBookField& entry(FieldId field) const;
    std::span<const CodeBookField> fields() const { return fields_; }

    LookupResult lookup(FieldId field, std::optional<std::string_view> code) const;
    LookupResult lookup(IntField field, std::optional<int> code) const;
    LookupResult lookup(TextField field, const std::optional<std::string>& code) const;

    /// Label -> code. Throws ConfigError when the label is not in the dictionary.
    std::string_view reverse_lookup(FieldId field, std::string_view label) const;

    /// True if `code` is a dictionary code of `field`.
    bool is_dictionary_code(FieldId field, std::string_view code) const;

    /// Aligned text: one table per field.
    std::string render_text() const;
    std::string render_json() const;

private:
    const CodeBookField* find(FieldId field) const;
    std::vector<CodeBookField> fields_;
};

/// Throws ConfigError naming the first field in `used` that has no
/// dictionary in `book`.
void check_codebook_coverage(const CodeBook& book, std::span<const FieldId> used);

/// The 27 federative unit codes.
std::span<const std::string_view> state_codes();

}  // namespace oobr
