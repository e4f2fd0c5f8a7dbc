#include <gtest/gtest.h>

#include "cantor/cantor.hpp"
#include "cantor/report.hpp"

using namespace cantor;

TEST(Report, RationalsAreExact) {
    EXPECT_EQ(to_json(Rational(3, 6)).dump(), R"({"num":1,"den":2})");
    EXPECT_EQ(to_json(std::vector<Rational>{Rational(0), Rational(1, 64)}).dump(),
              R"([{"num":0,"den":1},{"num":1,"den":64}])");
}

TEST(Report, EnvelopeKeyOrder) {
    const auto j = make_report("farber", OrderedJson{{"chain", "dihedral"}}, 7, OrderedJson::object());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"tool", "schema_version", "command", "config", "seed", "rng", "result"}));
    EXPECT_EQ(j["tool"]["name"], "cantor");
    EXPECT_EQ(j["seed"], 7);
}

TEST(Report, FixedSetJson) {
    auto f = build_fragmented();
    const auto j = to_json(fixed_set_report(f, parse_word("g", f.alphabet()), 3), f.alphabet());
    EXPECT_EQ(j["word"], "g");
    EXPECT_EQ(j["fixed_counts"], OrderedJson::parse("[2,2,4]"));
    EXPECT_EQ(j["hol_estimate"]["num"], 0);
    EXPECT_EQ(j["maximal_fixed_cylinders"][0]["level"], 1);
}

TEST(Report, FarberJsonCarriesEvidenceNote) {
    auto d = build_dihedral();
    const auto j = to_json(farber_check(d, 1, 4, Rational(1, 64)), d.alphabet());
    EXPECT_EQ(j["criterion"], "classic");
    EXPECT_EQ(j["overall"], "fail-at-depth");
    EXPECT_NE(j["note"].get<std::string>().find("evidence"), std::string::npos);
    EXPECT_EQ(j["words"].size(), 4u);
    EXPECT_EQ(j["words"][0]["trajectory"].size(), 4u);
}

TEST(Report, LqaNone) {
    LqaEstimate e;
    e.depth = 1;
    const auto j = to_json(e, Alphabet({"a"}));
    EXPECT_EQ(j["level"], "none");
    EXPECT_TRUE(j["scale"].is_null());
}

TEST(Report, LcsNote) {
    LcsWitnessReport r;
    const auto j = to_json(std::vector<LcsWitnessReport>{r}, Alphabet({"a"}));
    EXPECT_EQ(j[0]["note"], "no nonvanishing candidate");
    EXPECT_FALSE(j[0]["nonvanishing"]);
}

TEST(Csv, PreambleAndColumns) {
    CsvTable t({"word", "ratio", "ratio_exact"});
    t.meta("depth", "4");
    t.header("tool", "cantor 1.0.0");
    t.row() << "a,b" << Rational(1, 3);
    EXPECT_EQ(t.str(),
              "# cantor csv v1\n"
              "# tool=cantor 1.0.0\n"
              "# depth=4\n"
              "word,ratio,ratio_exact\n"
              "\"a,b\",0.333333333333,1/3\n");
}

TEST(Csv, RowWidthIsChecked) {
    CsvTable t({"a", "b"});
    t.row() << "x";
    EXPECT_THROW(t.str(), std::logic_error);
}
