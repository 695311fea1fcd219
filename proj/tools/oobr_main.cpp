// oobr: build, validate, synth, dictionary.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>

#include "oobr/derive.hpp"
#include "oobr/pipeline.hpp"
#include "oobr/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct BuildArgs {
    std::vector<std::string> inputs;
    int week = 0;
    std::string out;
    std::vector<std::string> formats{"text", "csv", "json"};
    std::string tables = "all";
    bool strict = false;
    std::string encoding = "ISO-8859-2";
    std::string delimiter = ";";
    std::string date_format = "dmy";
    std::size_t jobs = 1;
};

void add_build_options(CLI::App* cmd, BuildArgs& a, bool out_required) {
    cmd->add_option("--in", a.inputs, "Snapshot as <year>=<path>; repeatable")->required();
    cmd->add_option("--current-week", a.week, "Current epidemiological week (1..53)")->required();
    auto* out = cmd->add_option("--out", a.out, "Output directory");
    if (out_required) out->required();
    cmd->add_option("--format", a.formats, "text, csv and/or json")->delimiter(',');
    cmd->add_option("--tables", a.tables, "all, or a comma-separated list of table names");
    cmd->add_flag("--strict", a.strict, "Exit with status 2 when an inconsistency is found");
    cmd->add_option("--encoding", a.encoding, "Input text encoding");
    cmd->add_option("--delimiter", a.delimiter, "Input field delimiter");
    cmd->add_option("--date-format", a.date_format, "dmy (dd/mm/yyyy) or ymd (yyyy-mm-dd)");
    cmd->add_option("--jobs", a.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

char one_byte(const std::string& s) {
    if (s == "\\t" || s == "tab") return '\t';
    if (s.size() != 1) throw oobr::ConfigError("delimiter must be a single byte: " + s);
    return s[0];
}

oobr::RunConfig to_config(const BuildArgs& a) {
    oobr::RunConfig cfg;
    for (const auto& in : a.inputs) cfg.inputs.push_back(oobr::parse_input_spec(in));
    cfg.current_week = a.week;
    cfg.out_dir = a.out;
    cfg.formats = a.formats;
    cfg.tables = oobr::parse_table_selection(a.tables);
    cfg.strict = a.strict;
    cfg.encoding = oobr::parse_encoding(a.encoding);
    cfg.delimiter = one_byte(a.delimiter);
    cfg.date_format = oobr::parse_date_format(a.date_format);
    cfg.jobs = a.jobs;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) cfg.generated_at = std::string("@") + epoch;
    return cfg;
}

int run_build_cmd(const BuildArgs& a) {
    auto cfg = to_config(a);
    auto res = oobr::run_build(cfg);
    std::cout << res.funnel.render_text();
    std::cout << "cohort: " << res.cohort_size << " records; artifacts in " << cfg.out_dir.string() << "\n";
    if (res.findings.has_inconsistency()) std::cerr << "warning: inconsistencies found (see findings.txt)\n";
    return res.exit_code;
}

int run_validate_cmd(const BuildArgs& a) {
    auto cfg = to_config(a);
    cfg.validate_only = true;
    fs::path scratch;
    if (a.out.empty()) {
        scratch = fs::temp_directory_path() / ("oobr-validate-" + std::to_string(::getpid()));
        cfg.out_dir = scratch;
    }
    int code = 0;
    try {
        auto res = oobr::run_build(cfg);
        std::cout << res.findings.render_text();
        code = res.exit_code;
    } catch (...) {
        if (!scratch.empty()) fs::remove_all(scratch);
        throw;
    }
    if (!scratch.empty()) fs::remove_all(scratch);
    return code;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OOBr COVID-19 SIVEP-Gripe pipeline"};
    app.set_version_flag("--version", OOBR_VERSION);
    app.require_subcommand(1);

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "Select the obstetric cohort and write all artifacts");
    add_build_options(build, build_args, true);

    BuildArgs val_args;
    auto* validate = app.add_subcommand("validate", "Run consistency checks only");
    add_build_options(validate, val_args, false);

    oobr::SynthConfig synth_cfg;
    std::string synth_out, synth_config_file, synth_encoding = "ISO-8859-2";
    std::size_t synth_jobs = 1;
    auto* synth = app.add_subcommand("synth", "Generate synthetic snapshots with a ground-truth manifest");
    synth->add_option("--out", synth_out, "Destination directory")->required();
    synth->add_option("--config", synth_config_file, "JSON generator config (flags override it)");
    auto* o_rows = synth->add_option("--rows", synth_cfg.rows, "Total rows over both files");
    auto* o_seed = synth->add_option("--seed", synth_cfg.seed, "RNG seed");
    auto* o_share = synth->add_option("--share-2020", synth_cfg.share_2020, "Fraction of rows in the 2020 file");
    auto* o_mw = synth->add_option("--max-week-2021", synth_cfg.max_week_2021, "Latest 2021 week drawn");
    auto* o_mp = synth->add_option("--male-pregnant-rate", synth_cfg.male_pregnant_rate);
    auto* o_mpu = synth->add_option("--male-puerperal-rate", synth_cfg.male_puerperal_rate);
    auto* o_ood = synth->add_option("--out-of-dictionary-rate", synth_cfg.out_of_dictionary_rate);
    auto* o_mal = synth->add_option("--malformed-rate", synth_cfg.malformed_rate);
    auto* o_w53 = synth->add_option("--week53-rate", synth_cfg.week53_rate);
    auto* o_enc = synth->add_option("--encoding", synth_encoding, "Output encoding");
    synth->add_option("--jobs", synth_jobs, "Worker threads")->check(CLI::PositiveNumber);

    std::string dict_format = "text", dict_out;
    bool dict_rules = false;
    auto* dictionary = app.add_subcommand("dictionary", "Print the code book (or the derivation rules)");
    dictionary->add_option("--format", dict_format, "text or json")->check(CLI::IsMember({"text", "json"}));
    dictionary->add_flag("--rules", dict_rules, "Print the derivation rules manifest instead");
    dictionary->add_option("--out", dict_out, "Write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : oobr::kExitFatal;
    }

    try {
        if (*build) return run_build_cmd(build_args);
        if (*validate) return run_validate_cmd(val_args);
        if (*synth) {
            oobr::SynthConfig cfg;
            if (!synth_config_file.empty()) cfg = oobr::SynthConfig::from_json(slurp(synth_config_file));
            if (*o_rows) cfg.rows = synth_cfg.rows;
            if (*o_seed) cfg.seed = synth_cfg.seed;
            if (*o_share) cfg.share_2020 = synth_cfg.share_2020;
            if (*o_mw) cfg.max_week_2021 = synth_cfg.max_week_2021;
            if (*o_mp) cfg.male_pregnant_rate = synth_cfg.male_pregnant_rate;
            if (*o_mpu) cfg.male_puerperal_rate = synth_cfg.male_puerperal_rate;
            if (*o_ood) cfg.out_of_dictionary_rate = synth_cfg.out_of_dictionary_rate;
            if (*o_mal) cfg.malformed_rate = synth_cfg.malformed_rate;
            if (*o_w53) cfg.week53_rate = synth_cfg.week53_rate;
            if (*o_enc) cfg.encoding = oobr::parse_encoding(synth_encoding);
            auto m = oobr::generate(cfg, synth_out, synth_jobs);
            for (const auto& f : m.files)
                std::cout << f.path.string() << ": " << f.data_rows << " rows (" << f.malformed << " malformed)\n";
            return oobr::kExitOk;
        }
        if (*dictionary) {
            std::string text = dict_rules                 ? oobr::rules_manifest()
                               : dict_format == "json" ? oobr::CodeBook::standard().render_json()
                                                       : oobr::CodeBook::standard().render_text();
            if (dict_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(dict_out, std::ios::binary);
                if (!(out << text)) throw std::runtime_error("cannot write " + dict_out);
            }
            return oobr::kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "oobr: error: " << e.what() << "\n";
        return oobr::kExitFatal;
    }
    return oobr::kExitFatal;
}
