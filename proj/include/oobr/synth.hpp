// Seeded generator of SIVEP-Gripe-shaped snapshots with a ground-truth
// manifest of what was written.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oobr/encoding.hpp"

namespace oobr {

struct WeightedCode {
    /// nullopt writes an empty (missing) field.
    std::optional<std::string> code;
    double p = 0;
};

struct SynthConfig {
    std::uint64_t rows = 1000;
    std::uint64_t seed = 1;
    /// Fraction of rows written to the 2020 file; the rest go to 2021.
    double share_2020 = 0.64;
    /// Latest week drawn for ordinary 2021 rows.
    int max_week_2021 = 20;

    /// Overrides of the per-field category distributions (field name ->
    /// codes with probabilities, missing mass included). CS_GESTANT and
    /// PUERPERA distributions apply to non-male rows; male rows are never
    /// pregnant or puerperal unless planted.
    std::map<std::string, std::vector<WeightedCode>> field_probs;

    int age_min = 0;
    int age_max = 90;
    double age_missing = 0.002;
    double onset_missing = 0.002;

    // Planted anomalies: per-row probabilities, mutually exclusive.
    double male_pregnant_rate = 0;
    double male_puerperal_rate = 0;
    double out_of_dictionary_rate = 0;  // CS_GESTANT = 0
    double malformed_rate = 0;
    /// Applies to 2021 rows: onset 2021-01-01/02 with SEM_PRI = 53.
    double week53_rate = 0;

    Encoding encoding = Encoding::Iso8859_2;
    char delimiter = ';';

    std::uint64_t rows_2020() const;
    std::uint64_t rows_2021() const { return rows - rows_2020(); }

    /// Throws ConfigError: distributions must sum to 1, rates lie in [0,1]
    /// and sum to at most 1, ages are ordered.
    void validate() const;

    /// Effective distribution for a field (override or default).
    std::vector<WeightedCode> distribution(const std::string& field) const;

    /// Reads a JSON object with any of the member names above; missing
    /// keys keep their defaults. field_probs: {"CS_SEXO": [["F", 0.5], [null, 0.5]]}.
    static SynthConfig from_json(const std::string& text);
};

struct PlantedRow {
    int year = 0;
    /// 0-based data row index within that year's file.
    std::uint64_t data_row = 0;
    bool operator==(const PlantedRow&) const = default;
};

struct SynthFile {
    int year = 0;
    std::filesystem::path path;
    std::uint64_t data_rows = 0;
    std::uint64_t malformed = 0;
};

struct SynthManifest {
    std::uint64_t seed = 0;
    std::uint64_t rows = 0;
    std::vector<SynthFile> files;
    /// field -> code text ("NA" for missing) -> count, over well-formed rows.
    std::map<std::string, std::map<std::string, std::uint64_t>> field_counts;
    /// anomaly kind -> planted locations, in file then row order.
    std::map<std::string, std::vector<PlantedRow>> anomalies;

    std::string to_json() const;
    static SynthManifest from_json(const std::string& text);
};

inline constexpr std::uint64_t kSynthBlockRows = 65536;

/// Writes synth_2020.csv, synth_2021.csv and manifest.json into `dir`
/// (created if needed). Output is byte-identical for a given config,
/// whatever `jobs` is. Throws std::runtime_error if `dir` is unwritable.
SynthManifest generate(const SynthConfig& config, const std::filesystem::path& dir, std::size_t jobs = 1);

}  // namespace oobr
