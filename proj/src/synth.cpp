#include "oobr/synth.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "oobr/ingest.hpp"
#include "oobr/parallel.hpp"
#include "oobr/schema.hpp"

namespace oobr {

namespace {

using Dist = std::vector<WeightedCode>;
namespace chr = std::chrono;

Dist codes(std::initializer_list<std::pair<const char*, double>> list) {
    Dist d;
    for (const auto& [c, p] : list) {
        if (c)
            d.push_back({std::string(c), p});
        else
            d.push_back({std::nullopt, p});
    }
    return d;
}

const Dist kBinary = codes({{"1", 0.3}, {"2", 0.5}, {"9", 0.1}, {nullptr, 0.1}});
const Dist kSerology = codes({{"1", 0.05}, {"2", 0.1}, {"3", 0.01}, {"4", 0.01}, {"5", 0.01}, {"9", 0.02}, {nullptr, 0.8}});

// Male rows: never pregnant or puerperal unless planted.
const Dist kMaleGestant = codes({{"5", 0.1}, {"6", 0.7}, {"9", 0.15}, {nullptr, 0.05}});
const Dist kMalePuerpera = codes({{"2", 0.5}, {"9", 0.2}, {nullptr, 0.3}});

struct Municipality {
    int code;
    const char* name;
};

constexpr Municipality kMunicipalities[] = {
    {320530, "VITÓRIA"},  {520870, "GOIÂNIA"},  {530010, "BRASÍLIA"},  {270430, "MACEIÓ"},        {410690, "CURITIBA"},
    {150140, "BELÉM"},    {292740, "SALVADOR"}, {230440, "FORTALEZA"}, {410830, "FOZ DO IGUAÇU"},
};

constexpr const char* kObservations[] = {
    "PACIENTE GESTANTE; 32 SEMANAS",
    "RELATA \"FEBRE ALTA\" HÁ 3 DIAS",
    "INTERNADA\nEM UTI",
    "EXAMES EM ANÁLISE",
};

const std::map<std::string, Dist>& defaults() {
    static const std::map<std::string, Dist> d = [] {
        std::map<std::string, Dist> m;
        m["CS_SEXO"] = codes({{"F", 0.55}, {"M", 0.44}, {"I", 0.005}, {nullptr, 0.005}});
        m["CS_GESTANT"] = codes({{"1", 0.03},
                                 {"2", 0.05},
                                 {"3", 0.08},
                                 {"4", 0.02},
                                 {"5", 0.42},
                                 {"6", 0.27},
                                 {"9", 0.12},
                                 {nullptr, 0.01}});
        m["PUERPERA"] = codes({{"1", 0.06}, {"2", 0.6}, {"9", 0.14}, {nullptr, 0.2}});
        m["CLASSI_FIN"] = codes({{"1", 0.02}, {"2", 0.01}, {"3", 0.01}, {"4", 0.3}, {"5", 0.56}, {nullptr, 0.1}});
        m["PCR_SARS2"] = codes({{"1", 0.4}, {nullptr, 0.6}});
        m["AN_SARS2"] = codes({{"1", 0.1}, {nullptr, 0.9}});
        m["DS_PCR_OUT"] = codes({{"SARS-COV-2", 0.02},
                                 {"COVID-19 detectável", 0.01},
                                 {"novo coronavirus", 0.01},
                                 {"CIVID 19", 0.005},
                                 {"VIRUS SINCICIAL", 0.03},
                                 {"INFLUENZA A", 0.025},
                                 {nullptr, 0.9}});
        m["DS_AN_OUT"] = codes({{"SARS COV 2", 0.02}, {"CONA VIRUS", 0.005}, {"covid", 0.005}, {"ADENOVIRUS", 0.02},
                                {nullptr, 0.95}});
        for (const char* f : {"RES_IGG", "RES_IGM", "RES_IGA"}) m[f] = kSerology;
        Dist uf;
        for (auto s : state_codes()) uf.push_back({std::string(s), 0.99 / static_cast<double>(state_codes().size())});
        uf.push_back({std::nullopt, 0.01});
        m["SG_UF"] = uf;
        m["CS_RACA"] = codes({{"1", 0.35}, {"2", 0.07}, {"3", 0.01}, {"4", 0.4}, {"5", 0.01}, {"9", 0.1}, {nullptr, 0.06}});
        m["CS_ESCOL_N"] =
            codes({{"0", 0.03}, {"1", 0.1}, {"2", 0.12}, {"3", 0.2}, {"4", 0.08}, {"9", 0.3}, {nullptr, 0.17}});
        for (const char* f : {"HOSPITAL",  "HISTO_VGM",  "SURTO_SG",   "NOSOCOMIAL", "AVE_SUINO", "VACINA",
                              "FEBRE",     "TOSSE",      "GARGANTA",   "DISPNEIA",   "DESC_RESP", "SATURACAO",
                              "DIARREIA",  "VOMITO",     "DOR_ABD",    "FADIGA",     "PERD_OLFT", "PERD_PALA",
                              "CARDIOPATI", "HEMATOLOGI", "HEPATICA",  "ASMA",       "DIABETES",  "NEUROLOGIC",
                              "PNEUMOPATI", "IMUNODEPRE", "RENAL",     "OBESIDADE",  "UTI"})
            m[f] = kBinary;
        m["ANTIVIRAL"] = codes({{"1", 0.2}, {"2", 0.02}, {"3", 0.05}, {"9", 0.1}, {nullptr, 0.63}});
        m["CS_ZONA"] = codes({{"1", 0.7}, {"2", 0.1}, {"3", 0.02}, {"9", 0.08}, {nullptr, 0.1}});
        m["SUPORT_VEN"] = codes({{"1", 0.1}, {"2", 0.25}, {"3", 0.45}, {"9", 0.05}, {nullptr, 0.15}});
        m["EVOLUCAO"] = codes({{"1", 0.6}, {"2", 0.25}, {"3", 0.02}, {"9", 0.05}, {nullptr, 0.08}});
        return m;
    }();
    return d;
}

// Columns drawn from distributions, in file order.
const std::vector<std::string>& categorical_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> out;
        for (auto f : modeled_fields()) {
            std::string name(field_name(f));
            if (defaults().contains(name)) out.push_back(name);
        }
        return out;
    }();
    return cols;
}

// File layout: NU_NOTIFIC, DT_SIN_PRI, SEM_PRI, NU_IDADE_N, CO_MUN_RES,
// CO_MU_INTE, the categorical columns, ID_MUNICIP, OBSERVA.
constexpr std::size_t kLeading = 6;

std::vector<std::string> file_columns() {
    std::vector<std::string> cols{"NU_NOTIFIC", "DT_SIN_PRI", "SEM_PRI", "NU_IDADE_N", "CO_MUN_RES", "CO_MU_INTE"};
    for (const auto& c : categorical_columns()) cols.push_back(c);
    cols.push_back("ID_MUNICIP");
    cols.push_back("OBSERVA");
    return cols;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    /// Integer in [lo, hi].
    long between(long lo, long hi) { return lo + static_cast<long>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    const WeightedCode& pick(const Dist& d) {
        const double u = uniform();
        double acc = 0;
        for (const auto& w : d) {
            acc += w.p;
            if (u < acc) return w;
        }
        // Rounding slack: last entry with positive mass.
        for (auto it = d.rbegin(); it != d.rend(); ++it)
            if (it->p > 0) return *it;
        return d.back();
    }

private:
    std::mt19937_64 eng_;
};

std::string two(unsigned v) {
    return {static_cast<char>('0' + v / 10 % 10), static_cast<char>('0' + v % 10)};
}

std::string format_date(chr::sys_days d) {
    chr::year_month_day ymd{d};
    return two(static_cast<unsigned>(ymd.day())) + "/" + two(static_cast<unsigned>(ymd.month())) + "/" +
           std::to_string(static_cast<int>(ymd.year()));
}

// Epi week 1 of 2020 starts on Sunday 2019-12-29; of 2021 on 2021-01-03.
constexpr chr::sys_days kWeek1_2020 = chr::sys_days{chr::year{2019} / 12 / 29};
constexpr chr::sys_days kWeek1_2021 = chr::sys_days{chr::year{2021} / 1 / 3};

struct BlockTask {
    int year;
    std::size_t file_index;
    std::uint64_t first_row;
    std::uint64_t rows;
    std::uint64_t seed;
};

struct BlockResult {
    std::string bytes;
    std::uint64_t malformed = 0;
    std::map<std::string, std::map<std::string, std::uint64_t>> counts;
    std::map<std::string, std::vector<PlantedRow>> anomalies;
};

enum class Plant { None, MalePregnant, MalePuerperal, OutOfDictionary, Malformed, Week53 };

class BlockWriter {
public:
    BlockWriter(const SynthConfig& cfg, const std::map<std::string, Dist>& dists) : cfg_(cfg), dists_(dists) {}

    BlockResult run(const BlockTask& t) const {
        BlockResult out;
        Rng rng(t.seed);
        const auto& cats = categorical_columns();
        std::vector<std::optional<std::string>> values(kLeading + cats.size() + 2);
        std::string line;
        for (std::uint64_t i = 0; i < t.rows; ++i) {
            const std::uint64_t row = t.first_row + i;
            const Plant plant = draw_plant(rng, t.year);

            // Categorical columns first so sex-dependent ones can be redrawn.
            std::size_t sexo_at = 0, gest_at = 0, puer_at = 0;
            for (std::size_t c = 0; c < cats.size(); ++c) {
                values[kLeading + c] = rng.pick(dists_.at(cats[c])).code;
                if (cats[c] == "CS_SEXO") sexo_at = kLeading + c;
                if (cats[c] == "CS_GESTANT") gest_at = kLeading + c;
                if (cats[c] == "PUERPERA") puer_at = kLeading + c;
            }
            if (plant == Plant::MalePregnant || plant == Plant::MalePuerperal) values[sexo_at] = "M";
            if (values[sexo_at] == std::optional<std::string>("M")) {
                values[gest_at] = rng.pick(kMaleGestant).code;
                values[puer_at] = rng.pick(kMalePuerpera).code;
            }
            if (plant == Plant::MalePregnant) values[gest_at] = std::to_string(rng.between(1, 4));
            if (plant == Plant::MalePuerperal) values[puer_at] = "1";
            if (plant == Plant::OutOfDictionary) values[gest_at] = "0";

            // Onset date and week.
            chr::sys_days onset;
            int week;
            if (plant == Plant::Week53) {
                onset = chr::sys_days{chr::year{2021} / 1 / 1} + chr::days{rng.between(0, 1)};
                week = 53;
            } else if (t.year == 2020) {
                onset = chr::sys_days{chr::year{2020} / 1 / 1} + chr::days{rng.between(0, 365)};
                week = static_cast<int>((onset - kWeek1_2020).count() / 7) + 1;
            } else {
                week = static_cast<int>(rng.between(1, cfg_.max_week_2021));
                onset = kWeek1_2021 + chr::days{7 * (week - 1) + rng.between(0, 6)};
            }
            values[0] = std::to_string(t.year) + two(static_cast<unsigned>(t.file_index)) + std::to_string(100000000 + row);
            // Planted week-53 rows always keep their date; the draw is still made.
            const bool drop_onset = rng.uniform() < cfg_.onset_missing && plant != Plant::Week53;
            values[1] = drop_onset ? std::nullopt : std::optional(format_date(onset));
            values[2] = std::to_string(week);
            values[3] = rng.uniform() < cfg_.age_missing ? std::nullopt
                                                         : std::optional(std::to_string(rng.between(cfg_.age_min, cfg_.age_max)));
            const auto& res = kMunicipalities[rng.between(0, std::size(kMunicipalities) - 1)];
            const bool res_missing = rng.uniform() < 0.02;
            const auto& hosp = rng.uniform() < 0.8 ? res : kMunicipalities[rng.between(0, std::size(kMunicipalities) - 1)];
            const bool hosp_missing = rng.uniform() < 0.05;
            values[4] = res_missing ? std::nullopt : std::optional(std::to_string(res.code));
            values[5] = hosp_missing ? std::nullopt : std::optional(std::to_string(hosp.code));
            values[kLeading + cats.size()] = hosp.name;
            const double obs = rng.uniform();
            values[kLeading + cats.size() + 1] =
                obs < 0.05 ? std::optional<std::string>(kObservations[rng.between(0, std::size(kObservations) - 1)])
                           : std::nullopt;

            bool drop_last = false;
            if (plant == Plant::Malformed) {
                switch (rng.between(0, 2)) {
                    case 0: values[3] = "abc"; break;
                    case 1: values[2] = "60"; break;
                    default: drop_last = true; break;
                }
                ++out.malformed;
                out.anomalies["malformed"].push_back({t.year, row});
            } else {
                count(out, values, cats);
                if (plant == Plant::MalePregnant) out.anomalies["male_pregnant"].push_back({t.year, row});
                if (plant == Plant::MalePuerperal) out.anomalies["male_puerperal"].push_back({t.year, row});
                if (plant == Plant::OutOfDictionary) out.anomalies["out_of_dictionary"].push_back({t.year, row});
                if (plant == Plant::Week53) out.anomalies["week53"].push_back({t.year, row});
            }

            line.clear();
            const std::size_t n = drop_last ? values.size() - 1 : values.size();
            for (std::size_t c = 0; c < n; ++c) {
                if (c) line += cfg_.delimiter;
                if (values[c]) append_csv_field(line, *values[c], cfg_.delimiter);
            }
            line += '\n';
            out.bytes += cfg_.encoding == Encoding::Utf8 ? line : encode_from_utf8(line, cfg_.encoding);
        }
        return out;
    }

private:
    Plant draw_plant(Rng& rng, int year) const {
        double u = rng.uniform();
        const std::pair<double, Plant> slices[] = {
            {cfg_.male_pregnant_rate, Plant::MalePregnant},
            {cfg_.male_puerperal_rate, Plant::MalePuerperal},
            {cfg_.out_of_dictionary_rate, Plant::OutOfDictionary},
            {cfg_.malformed_rate, Plant::Malformed},
            {cfg_.week53_rate, Plant::Week53},
        };
        for (const auto& [p, kind] : slices) {
            if (u < p) return kind == Plant::Week53 && year != 2021 ? Plant::None : kind;
            u -= p;
        }
        return Plant::None;
    }

    static void count(BlockResult& out, const std::vector<std::optional<std::string>>& values,
                      const std::vector<std::string>& cats) {
        static const char* leading[] = {nullptr, nullptr, "SEM_PRI", "NU_IDADE_N", "CO_MUN_RES", "CO_MU_INTE"};
        for (std::size_t c = 2; c < kLeading; ++c) ++out.counts[leading[c]][values[c].value_or("NA")];
        for (std::size_t c = 0; c < cats.size(); ++c) ++out.counts[cats[c]][values[kLeading + c].value_or("NA")];
    }

    const SynthConfig& cfg_;
    const std::map<std::string, Dist>& dists_;
};

void check_rate(const char* name, double r) {
    if (!(r >= 0 && r <= 1)) throw ConfigError(std::string("synth: ") + name + " must lie in [0,1]");
}

}  // namespace

std::uint64_t SynthConfig::rows_2020() const {
    return static_cast<std::uint64_t>(std::llround(static_cast<double>(rows) * share_2020));
}

std::vector<WeightedCode> SynthConfig::distribution(const std::string& field) const {
    if (auto it = field_probs.find(field); it != field_probs.end()) return it->second;
    if (auto it = defaults().find(field); it != defaults().end()) return it->second;
    throw ConfigError("synth: no distribution for field " + field);
}

void SynthConfig::validate() const {
    check_rate("share_2020", share_2020);
    check_rate("age_missing", age_missing);
    check_rate("onset_missing", onset_missing);
    const double rates[] = {male_pregnant_rate, male_puerperal_rate, out_of_dictionary_rate, malformed_rate,
                            week53_rate};
    double sum = 0;
    for (double r : rates) {
        check_rate("anomaly rate", r);
        sum += r;
    }
    if (sum > 1 + 1e-12) throw ConfigError("synth: anomaly rates sum to more than 1");
    if (age_min > age_max || age_min < 0) throw ConfigError("synth: age range is empty or negative");
    if (max_week_2021 < 1 || max_week_2021 > 52) throw ConfigError("synth: max_week_2021 must lie in 1..52");
    for (const auto& [field, dist] : field_probs) {
        if (!defaults().contains(field)) throw ConfigError("synth: field " + field + " has no configurable distribution");
        double s = 0;
        for (const auto& w : dist) {
            if (!(w.p >= 0)) throw ConfigError("synth: negative probability in " + field);
            s += w.p;
        }
        if (std::abs(s - 1) > 1e-9) throw ConfigError("synth: probabilities of " + field + " sum to " + std::to_string(s));
    }
}

SynthConfig SynthConfig::from_json(const std::string& text) {
    SynthConfig c;
    auto j = nlohmann::json::parse(text);
    static const std::set<std::string> known = {
        "rows",        "seed",        "share_2020",         "max_week_2021",        "age_min",
        "age_max",     "age_missing", "onset_missing",      "male_pregnant_rate",   "male_puerperal_rate",
        "out_of_dictionary_rate",     "malformed_rate",     "week53_rate",          "encoding",
        "delimiter",   "field_probs"};
    for (const auto& [k, v] : j.items())
        if (!known.contains(k)) throw ConfigError("synth: unknown config key " + k);
    auto get = [&](const char* k, auto& dst) {
        if (j.contains(k)) dst = j.at(k).get<std::remove_reference_t<decltype(dst)>>();
    };
    get("rows", c.rows);
    get("seed", c.seed);
    get("share_2020", c.share_2020);
    get("max_week_2021", c.max_week_2021);
    get("age_min", c.age_min);
    get("age_max", c.age_max);
    get("age_missing", c.age_missing);
    get("onset_missing", c.onset_missing);
    get("male_pregnant_rate", c.male_pregnant_rate);
    get("male_puerperal_rate", c.male_puerperal_rate);
    get("out_of_dictionary_rate", c.out_of_dictionary_rate);
    get("malformed_rate", c.malformed_rate);
    get("week53_rate", c.week53_rate);
    if (j.contains("encoding")) c.encoding = parse_encoding(j.at("encoding").get<std::string>());
    if (j.contains("delimiter")) {
        auto d = j.at("delimiter").get<std::string>();
        if (d.size() != 1) throw ConfigError("synth: delimiter must be one byte");
        c.delimiter = d[0];
    }
    if (j.contains("field_probs")) {
        for (const auto& [field, list] : j.at("field_probs").items()) {
            Dist d;
            for (const auto& e : list) {
                WeightedCode w;
                if (!e.at(0).is_null()) w.code = e.at(0).get<std::string>();
                w.p = e.at(1).get<double>();
                d.push_back(std::move(w));
            }
            c.field_probs[field] = std::move(d);
        }
    }
    return c;
}

std::string SynthManifest::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["rows"] = rows;
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files)
        j["files"].push_back(
            {{"year", f.year}, {"path", f.path.filename().string()}, {"data_rows", f.data_rows}, {"malformed", f.malformed}});
    j["field_counts"] = nlohmann::ordered_json::object();
    for (const auto& [field, m] : field_counts) {
        auto& o = j["field_counts"][field] = nlohmann::ordered_json::object();
        for (const auto& [code, n] : m) o[code] = n;
    }
    j["anomalies"] = nlohmann::ordered_json::object();
    for (const auto& [kind, rows_] : anomalies) {
        auto& a = j["anomalies"][kind] = nlohmann::ordered_json::array();
        for (const auto& r : rows_) a.push_back({r.year, r.data_row});
    }
    return j.dump(2) + "\n";
}

SynthManifest SynthManifest::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    SynthManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.rows = j.at("rows").get<std::uint64_t>();
    for (const auto& f : j.at("files"))
        m.files.push_back({f.at("year").get<int>(), f.at("path").get<std::string>(), f.at("data_rows").get<std::uint64_t>(),
                           f.at("malformed").get<std::uint64_t>()});
    for (const auto& [field, o] : j.at("field_counts").items())
        for (const auto& [code, n] : o.items()) m.field_counts[field][code] = n.get<std::uint64_t>();
    for (const auto& [kind, a] : j.at("anomalies").items())
        for (const auto& r : a) m.anomalies[kind].push_back({r.at(0).get<int>(), r.at(1).get<std::uint64_t>()});
    return m;
}

SynthManifest generate(const SynthConfig& config, const std::filesystem::path& dir, std::size_t jobs) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    std::map<std::string, Dist> dists;
    for (const auto& c : categorical_columns()) dists[c] = config.distribution(c);

    SynthManifest manifest;
    manifest.seed = config.seed;
    manifest.rows = config.rows;
    const BlockWriter writer(config, dists);

    std::string header;
    for (const auto& c : file_columns()) {
        if (!header.empty()) header += config.delimiter;
        header += c;
    }
    header += '\n';

    const std::pair<int, std::uint64_t> years[] = {{2020, config.rows_2020()}, {2021, config.rows_2021()}};
    for (std::size_t fi = 0; fi < 2; ++fi) {
        const auto [year, rows] = years[fi];
        SynthFile file{year, dir / ("synth_" + std::to_string(year) + ".csv"), rows, 0};
        std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + file.path.string());
        out << header;

        std::uint64_t next_block = 0;
        const std::uint64_t blocks = (rows + kSynthBlockRows - 1) / kSynthBlockRows;
        ordered_pipeline(
            jobs,
            [&]() -> std::optional<BlockTask> {
                if (next_block >= blocks) return std::nullopt;
                const std::uint64_t b = next_block++;
                const std::uint64_t first = b * kSynthBlockRows;
                return BlockTask{year, fi, first, std::min(kSynthBlockRows, rows - first),
                                 splitmix64(config.seed ^ splitmix64((fi << 40) | b))};
            },
            [&](const BlockTask& t) { return writer.run(t); },
            [&](BlockResult r) {
                out.write(r.bytes.data(), static_cast<std::streamsize>(r.bytes.size()));
                file.malformed += r.malformed;
                for (const auto& [f, m] : r.counts)
                    for (const auto& [c, n] : m) manifest.field_counts[f][c] += n;
                for (auto& [k, v] : r.anomalies) {
                    auto& dst = manifest.anomalies[k];
                    dst.insert(dst.end(), v.begin(), v.end());
                }
            });
        out.close();
        if (!out) throw std::runtime_error("write failed: " + file.path.string());
        manifest.files.push_back(file);
    }

    std::ofstream mf(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!mf) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    mf << manifest.to_json();
    return manifest;
}

}  // namespace oobr
