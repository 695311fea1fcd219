#include "oracle.hpp"

#include <iconv.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oracle {

namespace {

const std::set<std::string> kIntColumns = {
    "SEM_PRI",    "NU_IDADE_N", "CS_GESTANT", "PUERPERA",   "CLASSI_FIN", "PCR_SARS2",  "AN_SARS2",   "RES_IGG",
    "RES_IGM",    "RES_IGA",    "CO_MUN_RES", "CO_MU_INTE", "CS_RACA",    "CS_ESCOL_N", "HOSPITAL",   "HISTO_VGM",
    "SURTO_SG",   "NOSOCOMIAL", "AVE_SUINO",  "VACINA",     "ANTIVIRAL",  "CS_ZONA",    "FEBRE",      "TOSSE",
    "GARGANTA",   "DISPNEIA",   "DESC_RESP",  "SATURACAO",  "DIARREIA",   "VOMITO",     "DOR_ABD",    "FADIGA",
    "PERD_OLFT",  "PERD_PALA",  "CARDIOPATI", "HEMATOLOGI", "HEPATICA",   "ASMA",       "DIABETES",   "NEUROLOGIC",
    "PNEUMOPATI", "IMUNODEPRE", "RENAL",      "OBESIDADE",  "UTI",        "SUPORT_VEN", "EVOLUCAO"};
const std::set<std::string> kTextColumns = {"DT_SIN_PRI", "CS_SEXO", "SG_UF", "DS_PCR_OUT", "DS_AN_OUT"};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("oracle: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string to_utf8(const std::string& bytes, const std::string& encoding) {
    if (encoding == "UTF-8") return bytes;
    iconv_t cd = iconv_open("UTF-8", encoding.c_str());
    if (cd == reinterpret_cast<iconv_t>(-1)) throw std::runtime_error("oracle: iconv_open failed");
    std::string out(bytes.size() * 4 + 4, '\0');
    char* in = const_cast<char*>(bytes.data());
    size_t inleft = bytes.size();
    char* o = out.data();
    size_t oleft = out.size();
    if (iconv(cd, &in, &inleft, &o, &oleft) == static_cast<size_t>(-1)) {
        iconv_close(cd);
        throw std::runtime_error("oracle: iconv failed");
    }
    iconv_close(cd);
    out.resize(out.size() - oleft);
    return out;
}

std::string strip(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
    return s.substr(a, b - a);
}

// One physical record -> fields, or an error.
bool split(const std::string& rec, char delim, std::vector<std::string>& out) {
    out.clear();
    size_t i = 0;
    const size_t n = rec.size();
    while (true) {
        size_t j = i;
        while (j < n && (rec[j] == ' ' || rec[j] == '\t')) ++j;
        if (j < n && rec[j] == '"') {
            std::string v;
            j++;
            bool closed = false;
            while (j < n) {
                if (rec[j] == '"' && j + 1 < n && rec[j + 1] == '"') {
                    v += '"';
                    j += 2;
                } else if (rec[j] == '"') {
                    closed = true;
                    j++;
                    break;
                } else {
                    v += rec[j++];
                }
            }
            if (!closed) return false;
            while (j < n && (rec[j] == ' ' || rec[j] == '\t')) ++j;
            out.push_back(v);
            if (j == n) return true;
            if (rec[j] != delim) return false;
            i = j + 1;
        } else {
            while (j < n && rec[j] != delim) ++j;
            // Blanks skipped above belong to the field too; trimming happens later.
            std::string v = rec.substr(i, j - i);
            if (v.find('"') != std::string::npos) return false;
            out.push_back(v);
            if (j == n) return true;
            i = j + 1;
        }
    }
}

std::vector<std::string> records_of(const std::string& bytes) {
    std::vector<std::string> recs;
    std::string cur;
    bool q = false;
    for (char c : bytes) {
        if (c == '"') q = !q;
        if (c == '\n' && !q) {
            recs.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) recs.push_back(cur);
    for (auto& r : recs)
        if (!r.empty() && r.back() == '\r') r.pop_back();
    return recs;
}

bool is_na(const std::string& s) { return s.empty() || s == "NA"; }

bool parse_int(const std::string& s, long& v) {
    if (s.empty()) return false;
    size_t k = s[0] == '-' ? 1 : 0;
    if (k == s.size()) return false;
    for (size_t i = k; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    if (s.size() - k > 9) return false;
    v = std::stol(s);
    return true;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

// dd/mm/yyyy -> year, or nothing.
std::optional<int> onset_year(const std::string& s) {
    auto a = s.find('/');
    if (a == std::string::npos) return std::nullopt;
    auto b = s.find('/', a + 1);
    if (b == std::string::npos) return std::nullopt;
    std::string ds = s.substr(0, a), ms = s.substr(a + 1, b - a - 1), ys = s.substr(b + 1);
    auto digits = [](const std::string& x) {
        return !x.empty() && std::all_of(x.begin(), x.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!digits(ds) || !digits(ms) || !digits(ys) || ds.size() > 2 || ms.size() > 2 || ys.size() != 4)
        return std::nullopt;
    int d = std::stoi(ds), m = std::stoi(ms), y = std::stoi(ys);
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return std::nullopt;
    int lim = mdays[m - 1] + (m == 2 && leap(y) ? 1 : 0);
    if (d > lim) return std::nullopt;
    return y;
}

std::string upper(std::string s) {
    for (auto& c : s)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return s;
}

struct Row {
    std::map<std::string, long> n;         // integer columns present
    std::map<std::string, std::string> t;  // text columns present
    std::map<std::string, std::string> extra;
    int year = 0;

    bool has(const std::string& k) const { return n.count(k) > 0; }
    bool eq(const std::string& k, long v) const { return has(k) && n.at(k) == v; }
};

std::optional<std::string> yes_no(const Row& r, const std::string& col) {
    if (r.eq(col, 1)) return "sim";
    if (r.eq(col, 2)) return "não";
    return std::nullopt;
}

std::string region_of(const Row& r) {
    return region(r.t.count("SG_UF") ? std::optional<std::string>(r.t.at("SG_UF")) : std::nullopt);
}

bool contains_any(const std::string& text, std::initializer_list<const char*> pats) {
    const std::string u = upper(text);
    for (const char* p : pats)
        if (u.find(p) != std::string::npos) return true;
    return false;
}

std::map<std::string, std::string> derive(const Row& r, const std::string& gesta) {
    std::map<std::string, std::string> d;
    d["classi_gesta_puerp"] = gesta;

    bool pcr = r.eq("PCR_SARS2", 1) ||
               (r.t.count("DS_PCR_OUT") && contains_any(r.t.at("DS_PCR_OUT"), {"SARS", "COVID", "COV", "CORONA", "CIVID"}));
    bool ant = r.eq("AN_SARS2", 1) ||
               (r.t.count("DS_AN_OUT") && contains_any(r.t.at("DS_AN_OUT"), {"SARS", "COVID", "COV", "CORONA", "CONA"}));
    bool sero = r.eq("RES_IGG", 1) || r.eq("RES_IGM", 1) || r.eq("RES_IGA", 1);
    d["pcr_SN"] = pcr ? "sim" : "não";
    d["antigeno_SN"] = ant ? "sim" : "não";
    d["sorologia_SN"] = sero ? "sim" : "não";

    d["classi_covid"] = covid_diagnosis(r.has("CLASSI_FIN") ? std::optional<long>(r.n.at("CLASSI_FIN")) : std::nullopt,
                                        pcr, ant, sero);
    d["region"] = region_of(r);

    auto put = [&](const char* k, std::optional<std::string> v) {
        if (v) d[k] = *v;
    };
    auto pick = [&](const char* col, std::initializer_list<std::pair<long, const char*>> m) -> std::optional<std::string> {
        for (const auto& [code, label] : m)
            if (r.eq(col, code)) return std::string(label);
        return std::nullopt;
    };
    put("raca", pick("CS_RACA", {{1, "branca"}, {2, "preta"}, {3, "amarela"}, {4, "parda"}, {5, "indigena"}}));
    put("escol", pick("CS_ESCOL_N", {{0, "sem escol"}, {1, "fund1"}, {2, "fund2"}, {3, "medio"}, {4, "superior"}}));
    if (r.has("NU_IDADE_N")) {
        long a = r.n.at("NU_IDADE_N");
        d["faixa_et"] = a <= 19 ? "<20" : a <= 34 ? "20-34" : ">=35";
    }
    put("hospital", yes_no(r, "HOSPITAL"));
    put("hist_viagem", yes_no(r, "HISTO_VGM"));
    put("sg_para_srag", yes_no(r, "SURTO_SG"));
    put("inf_inter", yes_no(r, "NOSOCOMIAL"));
    put("cont_ave_suino", yes_no(r, "AVE_SUINO"));
    put("vacina", yes_no(r, "VACINA"));
    put("antiviral", pick("ANTIVIRAL", {{1, "Oseltamivir"}, {2, "Zanamivir"}}));
    put("zona", pick("CS_ZONA", {{1, "urbana"}, {2, "rural"}, {3, "periurbana"}}));
    if (r.has("CO_MUN_RES") && r.has("CO_MU_INTE"))
        d["mudou_muni"] = r.n.at("CO_MUN_RES") == r.n.at("CO_MU_INTE") ? "não" : "sim";
    const std::pair<const char*, const char*> yn[] = {
        {"febre", "FEBRE"},           {"tosse", "TOSSE"},           {"garganta", "GARGANTA"},
        {"dispneia", "DISPNEIA"},     {"desc_resp", "DESC_RESP"},   {"saturacao", "SATURACAO"},
        {"diarreia", "DIARREIA"},     {"vomito", "VOMITO"},         {"dor_abd", "DOR_ABD"},
        {"fadiga", "FADIGA"},         {"perd_olft", "PERD_OLFT"},   {"perd_pala", "PERD_PALA"},
        {"cardiopati", "CARDIOPATI"}, {"hematologi", "HEMATOLOGI"}, {"hepatica", "HEPATICA"},
        {"asma", "ASMA"},             {"diabetes", "DIABETES"},     {"neuro", "NEUROLOGIC"},
        {"pneumopati", "PNEUMOPATI"}, {"imunodepre", "IMUNODEPRE"}, {"renal", "RENAL"},
        {"obesidade", "OBESIDADE"},   {"uti", "UTI"},
    };
    for (const auto& [name, col] : yn) put(name, yes_no(r, col));
    put("suport_ven", pick("SUPORT_VEN", {{1, "invasivo"}, {2, "não invasivo"}, {3, "não"}}));
    put("evolucao", pick("EVOLUCAO", {{1, "Cura"}, {2, "Obito"}, {3, "Obito"}}));
    return d;
}

std::string num_or(const Row& r, const std::string& col, const char* missing) {
    return r.has(col) ? std::to_string(r.n.at(col)) : missing;
}
std::string text_or(const Row& r, const std::string& col, const char* missing) {
    return r.t.count(col) ? r.t.at(col) : missing;
}

void csv_field(std::string& out, const std::string& v) {
    if (v.find_first_of(";\"\n\r") == std::string::npos) {
        out += v;
        return;
    }
    out += '"';
    for (char c : v) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
}

bool all_int(const std::string& s) {
    long v;
    return parse_int(s, v);
}

// Label ordering of the library's tables: declared levels, then integers
// numerically, then text bytewise, missing last.
std::vector<std::string> ordered(std::vector<std::string> labels, const std::vector<std::string>& levels,
                                 const std::string& missing) {
    std::vector<std::string> out;
    for (const auto& l : levels)
        if (std::find(labels.begin(), labels.end(), l) != labels.end()) out.push_back(l);
    std::vector<std::string> rest;
    bool has_missing = false;
    for (const auto& l : labels) {
        if (l == missing) {
            has_missing = true;
            continue;
        }
        if (std::find(levels.begin(), levels.end(), l) == levels.end()) rest.push_back(l);
    }
    std::sort(rest.begin(), rest.end(), [](const std::string& a, const std::string& b) {
        bool ia = all_int(a), ib = all_int(b);
        if (ia && ib) return std::stol(a) < std::stol(b);
        if (ia != ib) return ia;
        return a < b;
    });
    out.insert(out.end(), rest.begin(), rest.end());
    if (has_missing) out.push_back(missing);
    return out;
}

}  // namespace

std::string region(const std::optional<std::string>& sg_uf) {
    if (!sg_uf) return "unknown";
    const std::string& uf = *sg_uf;
    for (const char* s : {"SP", "RJ", "ES", "MG"})
        if (uf == s) return "southeast";
    for (const char* s : {"PR", "SC", "RS"})
        if (uf == s) return "south";
    for (const char* s : {"GO", "MT", "MS", "DF"})
        if (uf == s) return "central";
    for (const char* s : {"AL", "BA", "CE", "MA", "PB", "PE", "PI", "RN", "SE"})
        if (uf == s) return "northeast";
    return "north";
}

std::string covid_diagnosis(std::optional<long> classi_fin, bool pcr, bool ant, bool sero) {
    const bool five = classi_fin && *classi_fin == 5;
    if (five && pcr) return "pcr";
    if (five && !pcr && ant) return "antigenio";
    if (five && sero && !ant && !pcr) return "sorologia";
    if (classi_fin && *classi_fin != 5) return "não";
    return "outro";
}

std::string gestational_status(std::optional<long> g, std::optional<long> p) {
    auto is = [](std::optional<long> v, long x) { return v && *v == x; };
    if (is(g, 1)) return "1tri";
    if (is(g, 2)) return "2tri";
    if (is(g, 3)) return "3tri";
    if (is(g, 4)) return "IG_ig";
    if (is(g, 5) && is(p, 1)) return "puerp";
    if (is(g, 9) && is(p, 1)) return "puerp";
    return "não";
}

const std::vector<std::string>& derived_columns() {
    static const std::vector<std::string> v = {
        "classi_gesta_puerp", "pcr_SN",     "antigeno_SN", "sorologia_SN", "classi_covid", "region",
        "raca",               "escol",      "faixa_et",    "hospital",     "hist_viagem",  "sg_para_srag",
        "inf_inter",          "cont_ave_suino", "vacina",  "antiviral",    "zona",         "mudou_muni",
        "febre",              "tosse",      "garganta",    "dispneia",     "desc_resp",    "saturacao",
        "diarreia",           "vomito",     "dor_abd",     "fadiga",       "perd_olft",    "perd_pala",
        "cardiopati",         "hematologi", "hepatica",    "asma",         "diabetes",     "neuro",
        "pneumopati",         "imunodepre", "renal",       "obesidade",    "uti",          "suport_ven",
        "evolucao"};
    return v;
}

const std::vector<std::string>& raw_columns() {
    static const std::vector<std::string> v = {
        "DT_SIN_PRI", "SEM_PRI",    "CS_SEXO",    "NU_IDADE_N", "CS_GESTANT", "PUERPERA",   "SG_UF",
        "CLASSI_FIN", "PCR_SARS2",  "DS_PCR_OUT", "AN_SARS2",   "DS_AN_OUT",  "RES_IGG",    "RES_IGM",
        "RES_IGA",    "CO_MUN_RES", "CO_MU_INTE", "CS_RACA",    "CS_ESCOL_N", "HOSPITAL",   "HISTO_VGM",
        "SURTO_SG",   "NOSOCOMIAL", "AVE_SUINO",  "VACINA",     "ANTIVIRAL",  "CS_ZONA",    "FEBRE",
        "TOSSE",      "GARGANTA",   "DISPNEIA",   "DESC_RESP",  "SATURACAO",  "DIARREIA",   "VOMITO",
        "DOR_ABD",    "FADIGA",     "PERD_OLFT",  "PERD_PALA",  "CARDIOPATI", "HEMATOLOGI", "HEPATICA",
        "ASMA",       "DIABETES",   "NEUROLOGIC", "PNEUMOPATI", "IMUNODEPRE", "RENAL",      "OBESIDADE",
        "UTI",        "SUPORT_VEN", "EVOLUCAO"};
    return v;
}

Result run(const std::vector<Input>& inputs, int W) {
    Result res;
    std::vector<Row> stream;
    for (const auto& in : inputs) {
        auto recs = records_of(slurp(in.path));
        if (recs.empty()) continue;
        std::vector<std::string> header;
        if (!split(recs[0], in.delimiter, header)) throw std::runtime_error("oracle: bad header");
        for (auto& h : header) h = to_utf8(strip(h), in.encoding);
        for (const auto& h : header)
            if (!kIntColumns.count(h) && !kTextColumns.count(h) &&
                std::find(res.extra_names.begin(), res.extra_names.end(), h) == res.extra_names.end())
                res.extra_names.push_back(h);
        std::vector<std::string> f;
        for (size_t k = 1; k < recs.size(); ++k) {
            if (recs[k].empty()) continue;
            ++res.data_rows;
            if (!split(recs[k], in.delimiter, f) || f.size() != header.size()) {
                ++res.malformed;
                continue;
            }
            Row r;
            r.year = in.year;
            bool bad = false;
            for (size_t c = 0; c < header.size(); ++c) {
                std::string v = strip(f[c]);
                const auto& h = header[c];
                if (kIntColumns.count(h)) {
                    if (is_na(v)) continue;
                    long x;
                    if (!parse_int(v, x) || (h == "SEM_PRI" && (x < 1 || x > 53))) {
                        bad = true;
                        break;
                    }
                    r.n[h] = x;
                } else if (kTextColumns.count(h)) {
                    if (!is_na(v)) r.t[h] = to_utf8(v, in.encoding);
                } else {
                    r.extra[h] = to_utf8(v, in.encoding);
                }
            }
            if (bad) {
                ++res.malformed;
                continue;
            }
            stream.push_back(std::move(r));
        }
    }
    res.records = stream.size();

    const char* stages[] = {"valid_onset", "epi_window", "current_week", "female", "age_10_55", "obstetric"};
    std::uint64_t removed[6] = {};
    for (size_t i = 0; i < stream.size(); ++i) {
        const Row& r = stream[i];
        std::optional<int> ano;
        if (r.t.count("DT_SIN_PRI")) ano = onset_year(r.t.at("DT_SIN_PRI"));
        if (!ano || !r.has("SEM_PRI")) {
            removed[0]++;
            continue;
        }
        long sem = r.n.at("SEM_PRI");
        if (!((*ano == 2020 && sem >= 8) || *ano == 2021)) {
            removed[1]++;
            continue;
        }
        res.cross["sem_pri_by_ano_window"][{std::to_string(sem), std::to_string(*ano)}]++;
        int ano2 = (*ano == 2021 && sem == 53) ? 2020 : *ano;
        if (!(ano2 == 2020 || (ano2 == 2021 && sem <= W))) {
            removed[2]++;
            continue;
        }
        res.cross["sem_pri_by_ano"][{std::to_string(sem), std::to_string(ano2)}]++;
        res.freq["cs_gestant"][num_or(r, "CS_GESTANT", "NA")]++;
        res.freq["puerpera"][num_or(r, "PUERPERA", "NA")]++;
        res.cross["cs_gestant_by_sexo"][{num_or(r, "CS_GESTANT", "<NA>"), text_or(r, "CS_SEXO", "<NA>")}]++;
        res.cross["puerpera_by_sexo"][{num_or(r, "PUERPERA", "<NA>"), text_or(r, "CS_SEXO", "<NA>")}]++;
        const bool male = r.t.count("CS_SEXO") && r.t.at("CS_SEXO") == "M";
        if (male && r.has("CS_GESTANT") && r.n.at("CS_GESTANT") >= 1 && r.n.at("CS_GESTANT") <= 4) res.male_pregnant++;
        if (male && r.eq("PUERPERA", 1)) res.male_puerperal++;
        if (r.eq("CS_GESTANT", 0)) res.gestant_zero++;

        if (!(r.t.count("CS_SEXO") && r.t.at("CS_SEXO") == "F")) {
            removed[3]++;
            continue;
        }
        if (!(r.has("NU_IDADE_N") && r.n.at("NU_IDADE_N") > 9 && r.n.at("NU_IDADE_N") <= 55)) {
            removed[4]++;
            continue;
        }
        auto opt = [&](const char* k) { return r.has(k) ? std::optional<long>(r.n.at(k)) : std::nullopt; };
        const std::string g = gestational_status(opt("CS_GESTANT"), opt("PUERPERA"));
        if (g == "não") {
            removed[5]++;
            continue;
        }

        auto d = derive(r, g);
        if (!r.t.count("SG_UF")) res.missing_region++;
        res.freq["classi_fin"][num_or(r, "CLASSI_FIN", "NA")]++;
        for (const auto& name : derived_columns()) res.freq[name][d.count(name) ? d.at(name) : "NA"]++;

        CohortRow c;
        c.row = i;
        c.source_year = r.year;
        for (const auto& [k, v] : r.n) c.values[k] = std::to_string(v);
        for (const auto& [k, v] : r.t) c.values[k] = v;
        for (const auto& [k, v] : r.extra) c.values[k] = v;
        c.values["ano"] = std::to_string(ano2);
        c.values["sem"] = std::to_string(sem);
        for (const auto& [k, v] : d) c.values[k] = v;
        res.cohort.push_back(std::move(c));
    }

    std::uint64_t in = stream.size();
    for (int s = 0; s < 6; ++s) {
        res.funnel.push_back({stages[s], in, in - removed[s], removed[s]});
        in -= removed[s];
    }
    return res;
}

std::string percent(std::uint64_t n, std::uint64_t total) {
    if (total == 0) return "0.0";
    // tenths of a percent, rounded half up: floor((1000 n + total/2) / total)
    // done with a remainder check so odd totals round correctly.
    std::uint64_t q = (1000 * n) / total;
    std::uint64_t r = (1000 * n) % total;
    if (2 * r >= total) ++q;
    return std::to_string(q / 10) + "." + std::to_string(q % 10);
}

std::string render_funnel_csv(const Result& r) {
    static const std::map<std::string, std::string> desc = {
        {"valid_onset", "Notifications with symptom-onset date and epidemiological week"},
        {"epi_window", "Onset from epidemiological week 8 of 2020 onwards (2020 or 2021)"},
        {"current_week", "Week 53 moved to 2020, 2021 up to the current epidemiological week"},
        {"female", "Female cases"},
        {"age_10_55", "Aged 10 to 55 years"},
        {"obstetric", "Pregnant or postpartum cases"},
    };
    std::string out = "stage;description;in;out;removed\n";
    for (const auto& f : r.funnel)
        out += f.stage + ";" + desc.at(f.stage) + ";" + std::to_string(f.in) + ";" + std::to_string(f.out) + ";" +
               std::to_string(f.removed) + "\n";
    return out;
}

std::string render_cohort_csv(const Result& r) {
    std::vector<std::string> cols = {"row", "source_year"};
    for (const auto& c : raw_columns()) cols.push_back(c);
    for (const auto& c : r.extra_names) cols.push_back(c);
    cols.push_back("ano");
    cols.push_back("sem");
    for (const auto& c : derived_columns()) cols.push_back(c);
    std::string out;
    for (size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ';';
        csv_field(out, cols[i]);
    }
    out += '\n';
    for (const auto& row : r.cohort) {
        out += std::to_string(row.row) + ";" + std::to_string(row.source_year);
        for (size_t i = 2; i < cols.size(); ++i) {
            out += ';';
            auto it = row.values.find(cols[i]);
            if (it != row.values.end()) csv_field(out, it->second);
        }
        out += '\n';
    }
    return out;
}

std::string render_freq_csv(const std::string& variable, const Freq& f, const std::vector<std::string>& levels) {
    std::uint64_t total = 0;
    std::vector<std::string> labels;
    for (const auto& [k, v] : f) {
        labels.push_back(k);
        total += v;
    }
    std::string out;
    csv_field(out, variable);
    out += ";n;percent\n";
    for (const auto& l : ordered(labels, levels, "NA")) {
        csv_field(out, l);
        out += ";" + std::to_string(f.at(l)) + ";" + percent(f.at(l), total) + "\n";
    }
    out += "Total;" + std::to_string(total) + ";100.0\n";
    return out;
}

std::string render_cross_csv(const std::string& row_var, const Cross& c) {
    std::vector<std::string> rows, cols;
    for (const auto& [k, v] : c) {
        if (std::find(rows.begin(), rows.end(), k.first) == rows.end()) rows.push_back(k.first);
        if (std::find(cols.begin(), cols.end(), k.second) == cols.end()) cols.push_back(k.second);
    }
    rows = ordered(rows, {}, "<NA>");
    cols = ordered(cols, {}, "<NA>");
    std::string out;
    csv_field(out, row_var);
    for (const auto& col : cols) {
        out += ';';
        csv_field(out, col);
    }
    out += ";Total\n";
    std::map<std::string, std::uint64_t> coltot;
    std::uint64_t grand = 0;
    for (const auto& row : rows) {
        csv_field(out, row);
        std::uint64_t rt = 0;
        for (const auto& col : cols) {
            auto it = c.find({row, col});
            std::uint64_t v = it == c.end() ? 0 : it->second;
            out += ";" + std::to_string(v);
            rt += v;
            coltot[col] += v;
        }
        grand += rt;
        out += ";" + std::to_string(rt) + "\n";
    }
    out += "Total";
    for (const auto& col : cols) out += ";" + std::to_string(coltot[col]);
    out += ";" + std::to_string(grand) + "\n";
    return out;
}

const std::vector<TableSpec>& table_specs() {
    static const std::vector<TableSpec> v = [] {
        std::vector<TableSpec> t = {
            {"sem_pri_by_ano_window", "SEM_PRI", true, {}},
            {"sem_pri_by_ano", "SEM_PRI", true, {}},
            {"cs_gestant", "CS_GESTANT", false, {}},
            {"cs_gestant_by_sexo", "CS_GESTANT", true, {}},
            {"puerpera", "PUERPERA", false, {}},
            {"puerpera_by_sexo", "PUERPERA", true, {}},
            {"classi_fin", "CLASSI_FIN", false, {}},
        };
        for (const auto& d : derived_columns()) {
            std::vector<std::string> levels;
            if (d == "classi_gesta_puerp") levels = {"1tri", "2tri", "3tri", "IG_ig", "puerp"};
            if (d == "faixa_et") levels = {"<20", "20-34", ">=35"};
            if (d == "suport_ven") levels = {"invasivo", "não invasivo", "não"};
            t.push_back({d, d, false, levels});
        }
        return t;
    }();
    return v;
}

std::map<std::string, std::string> expected_artifacts(const Result& r) {
    std::map<std::string, std::string> out;
    out["funnel.csv"] = render_funnel_csv(r);
    out["cohort.csv"] = render_cohort_csv(r);
    for (const auto& t : table_specs()) {
        std::string body;
        if (t.cross) {
            auto it = r.cross.find(t.name);
            body = render_cross_csv(t.row_var, it == r.cross.end() ? Cross{} : it->second);
        } else {
            auto it = r.freq.find(t.name);
            body = render_freq_csv(t.row_var, it == r.freq.end() ? Freq{} : it->second, t.levels);
        }
        out["tables/" + t.name + ".csv"] = body;
    }
    return out;
}

}  // namespace oracle
