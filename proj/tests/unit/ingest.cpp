#include <doctest.h>

#include "oobr/ingest.hpp"
#include "support.hpp"

using namespace oobr;
using namespace testsupport;
using namespace std::chrono;

namespace {

const std::string kHeader =
    "DT_SIN_PRI;SEM_PRI;CS_SEXO;NU_IDADE_N;CS_GESTANT;PUERPERA;SG_UF;CLASSI_FIN;EXTRA\n";

}  // namespace

TEST_CASE("onset dates") {
    CHECK(parse_onset_date("29/02/2020").date == year_month_day{year{2020}, month{2}, day{29}});
    auto bad = parse_onset_date("29/02/2021");
    CHECK_FALSE(bad.date);
    CHECK(bad.warning);
    CHECK(parse_onset_date("2021-01-02").warning);
    CHECK(parse_onset_date("2021-01-02", DateFormat::YearMonthDay).date);
    CHECK_FALSE(parse_onset_date("").warning);
    CHECK_FALSE(parse_onset_date("NA").warning);
    CHECK(parse_onset_date("1/2/2020").date == year_month_day{year{2020}, month{2}, day{1}});
    CHECK(parse_onset_date("01/13/2020").warning);
}

TEST_CASE("split_record") {
    std::vector<std::string_view> f;
    std::string scratch;
    CHECK_FALSE(split_record("a;\"b;c\";\"d\"\"e\";", ';', f, scratch));
    REQUIRE(f.size() == 4);
    CHECK(f[0] == "a");
    CHECK(f[1] == "b;c");
    CHECK(f[2] == "d\"e");
    CHECK(f[3] == "");
    CHECK(split_record("a;b\"c", ';', f, scratch));
    CHECK(split_record("\"ab\"x;c", ';', f, scratch));
    CHECK(split_record("\"open", ';', f, scratch));
}

TEST_CASE("csv field quoting") {
    std::string out;
    append_csv_field(out, "plain", ';');
    append_csv_field(out, "a;b", ';');
    append_csv_field(out, "say \"hi\"", ';');
    CHECK(out == "plain\"a;b\"\"say \"\"hi\"\"\"");
}

TEST_CASE("reader: quoting, trimming, missing tokens, quarantine") {
    TempDir dir("ingest");
    const std::string body = kHeader +
                             "14/05/2020;20;F; 30 ;1;NA;SP;5;\"x;\ny\"\r\n"
                             "\n"
                             "14/05/2020;abc;F;30;1;2;SP;5;z\n"
                             "31/02/2020;20;F;30;;2;;5;w\n"
                             "14/05/2020;20;F\n";
    spit(dir / "a.csv", body);
    auto snap = read_snapshot({(dir / "a.csv").string(), 2020});
    CHECK(snap.header.extra_names == std::vector<std::string>{"EXTRA"});
    CHECK(snap.stats.data_rows == 4);
    CHECK(snap.stats.blank_lines == 1);
    CHECK(snap.stats.records == 2);
    CHECK(snap.stats.malformed == 2);
    CHECK(snap.stats.date_parse_warnings == 1);
    REQUIRE(snap.records.size() == 2);
    const auto& r = snap.records[0];
    CHECK(r[IntField::NU_IDADE_N] == 30);
    CHECK_FALSE(r[IntField::PUERPERA]);
    CHECK(r.extra == std::vector<std::string>{"x;\ny"});
    CHECK(r.source_year == 2020);
    CHECK_FALSE(snap.records[1].onset);
    CHECK_FALSE(snap.records[1][TextField::SG_UF]);
    REQUIRE(snap.quarantined.size() == 2);
    CHECK(snap.quarantined[0].data_row == 1);
    CHECK(snap.quarantined[1].data_row == 3);
}

TEST_CASE("reader: missing required column is fatal") {
    TempDir dir("ingest");
    spit(dir / "b.csv", "DT_SIN_PRI;CS_SEXO\n01/01/2021;F\n");
    CHECK_THROWS_AS(read_snapshot({(dir / "b.csv").string(), 2021}), IngestError);
    CHECK_THROWS_AS(read_snapshot({(dir / "nope.csv").string(), 2021}), IngestError);
}

TEST_CASE("reader: chunking does not change the result") {
    SnapshotSource src{fixture("fixture_2021.csv").string(), 2021};
    auto whole = read_snapshot(src);
    for (std::size_t cb : {64u, 300u, 5000u}) {
        SnapshotReader rd(src, cb);
        IngestStats stats;
        std::size_t n = 0, chunks = 0;
        while (auto c = rd.next_chunk()) {
            auto p = rd.parse(*c);
            stats.merge(p.stats);
            n += p.records.size();
            ++chunks;
        }
        CHECK(chunks > 1);
        CHECK(stats == whole.stats);
        CHECK(n == whole.records.size());
        CHECK(rd.digest() == whole.digest);
    }
}

TEST_CASE("merge keeps order") {
    SurveillanceRecord a, b;
    a.source_year = 2020;
    b.source_year = 2021;
    auto m = merge_snapshots({a}, {b, b});
    REQUIRE(m.size() == 3);
    CHECK(m[0].source_year == 2020);
    CHECK(m[2].source_year == 2021);
}
