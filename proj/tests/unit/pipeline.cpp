#include <doctest.h>

#include <cstdlib>

#include <json.hpp>

#include "support.hpp"

using namespace testsupport;

namespace {

int cli(const std::string& args) {
    const std::string cmd = std::string(OOBR_BINARY) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string fixture_args() {
    return "--in 2020=" + fixture("fixture_2020.csv").string() + " --in 2021=" + fixture("fixture_2021.csv").string();
}

}  // namespace

TEST_CASE("input spec parsing") {
    auto s = oobr::parse_input_spec("2020=a=b.csv");
    CHECK(s.year == 2020);
    CHECK(s.path == "a=b.csv");
    CHECK_THROWS_AS(oobr::parse_input_spec("x.csv"), oobr::ConfigError);
    CHECK(oobr::parse_table_selection("all").empty());
    CHECK(oobr::parse_table_selection("cs_gestant, region").size() == 2);
    CHECK_THROWS_AS(oobr::parse_table_selection("bogus"), oobr::ConfigError);
}

TEST_CASE("CLI exit codes") {
    TempDir out("cli");
    CHECK(cli("build " + fixture_args() + " --current-week 16 --out " + (out / "a").string()) == 0);
    CHECK(cli("build " + fixture_args() + " --current-week 16 --strict --out " + (out / "b").string()) == 2);
    CHECK(cli("validate " + fixture_args() + " --current-week 16") == 0);
    CHECK(cli("validate " + fixture_args() + " --current-week 16 --strict") == 2);
    CHECK(cli("build " + fixture_args() + " --current-week 54 --out " + (out / "c").string()) == 1);
    CHECK(cli("build --in 2020=/nonexistent.csv --current-week 16 --out " + (out / "d").string()) == 1);
    CHECK(cli("build " + fixture_args() + " --in 2020=x.csv --current-week 16 --out " + (out / "e").string()) == 1);
    CHECK(cli("build --current-week 16") == 1);
    CHECK(cli("frobnicate") == 1);
    CHECK(cli("--help") == 0);
    CHECK(cli("dictionary --format json") == 0);
    CHECK(cli("synth --out " + (out / "s").string() + " --rows 100 --seed 3") == 0);
    CHECK(cli("synth --out " + (out / "t").string() + " --share-2020 2") == 1);
}

TEST_CASE("build writes every artifact") {
    TempDir out("art");
    oobr::RunConfig cfg;
    cfg.inputs = {{2020, fixture("fixture_2020.csv").string()}, {2021, fixture("fixture_2021.csv").string()}};
    cfg.current_week = 16;
    cfg.out_dir = out.path();
    cfg.generated_at = "@0";
    auto res = oobr::run_build(cfg);
    CHECK(res.exit_code == oobr::kExitOk);
    CHECK(res.funnel.balanced());
    for (const char* f : {"findings.json", "findings.txt", "funnel.txt", "funnel.csv", "funnel.json", "cohort.csv",
                          "run_manifest.json", "rules_manifest.txt", "tables/region.txt", "tables/region.json",
                          "quarantine_2020.csv", "quarantine_2021.csv"})
        CHECK_MESSAGE(fs::exists(out / f), f);
    auto m = nlohmann::json::parse(slurp(out / "run_manifest.json"));
    CHECK(m["generated_at"] == "@0");
    CHECK(m["cohort_records"] == res.cohort_size);
    CHECK(m["inputs"].size() == 2);
    CHECK(m["inputs"][0]["sha256"].get<std::string>().size() == 64);
    CHECK(slurp(out / "quarantine_2021.csv").find("quarantine_reason") != std::string::npos);

    cfg.strict = true;
    CHECK(oobr::run_build(cfg).exit_code == oobr::kExitInconsistent);
}

TEST_CASE("table selection and validate-only") {
    TempDir out("sel");
    oobr::RunConfig cfg;
    cfg.inputs = {{2020, fixture("fixture_2020.csv").string()}};
    cfg.current_week = 16;
    cfg.out_dir = out.path();
    cfg.tables = {"region"};
    cfg.formats = {"json"};
    oobr::run_build(cfg);
    CHECK(fs::exists(out / "tables/region.json"));
    CHECK_FALSE(fs::exists(out / "tables/region.csv"));
    CHECK_FALSE(fs::exists(out / "tables/raca.json"));

    TempDir v("val");
    cfg.out_dir = v.path();
    cfg.validate_only = true;
    oobr::run_build(cfg);
    CHECK(fs::exists(v / "findings.json"));
    CHECK_FALSE(fs::exists(v / "cohort.csv"));
}
