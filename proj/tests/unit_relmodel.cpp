#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dq/csv.hpp"
#include "dq/value.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace dq;
namespace fs = std::filesystem;

namespace {

std::vector<RelationSignature> tempnoon_schema() {
    RelationSignature sig;
    sig.name = "TempNoon";
    sig.attributes = {{"patient", AttrKind::Str},
                      {"value", AttrKind::Num},
                      {"time", AttrKind::Time},
                      {"date", AttrKind::Date}};
    return {sig};
}

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("dq_relmodel_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Tuple reading(const char* patient, const char* value, int minutes, const char* date) {
    return {Value::str(patient), Value::num(Decimal::parse(value).value()), Value::time(minutes),
            Value::date(date)};
}

}  // namespace

TEST_CASE("decimal values parse, compare and render exactly") {
    CHECK(Decimal::parse("38.5").value().to_string() == "38.5");
    CHECK(Decimal::parse("38.50").value() == Decimal::parse("38.5").value());
    CHECK(Decimal::parse("38.0").value() == Decimal::from_int(38));
    CHECK(Decimal::parse("-2.25").value().to_string() == "-2.25");
    CHECK(Decimal::parse("36").value().compare(Decimal::parse("38.2").value()) < 0);
    CHECK(Decimal::parse("0.1").value().compare(Decimal::parse("0.09").value()) > 0);
    CHECK_FALSE(Decimal::parse("1.2.3").has_value());
    CHECK_FALSE(Decimal::parse("110/70").has_value());
}

TEST_CASE("time parsing respects the day range") {
    CHECK(Value::parse_time("11:45").value() == 705);
    CHECK(Value::parse_time("00:00").value() == 0);
    CHECK(Value::parse_time("23:59").value() == 1439);
    CHECK_FALSE(Value::parse_time("24:00").has_value());       // data values stay below midnight
    CHECK(Value::parse_time("24:00", 1440).value() == 1440);   // rule literals may name it
    CHECK_FALSE(Value::parse_time("25:00", 1440).has_value());
    CHECK_FALSE(Value::parse_time("11:60").has_value());
    CHECK_FALSE(Value::parse_time("11:5").has_value());
}

TEST_CASE("null never unifies, not even with itself") {
    Value null = Value::null();
    CHECK(null == Value::null());  // set semantics
    CHECK_FALSE(null.unifies_with(Value::null()));
    CHECK_FALSE(null.unifies_with(Value::str("x")));
    CHECK(Value::str("a").unifies_with(Value::str("a")));
    CHECK_FALSE(Value::str("38.5").unifies_with(Value::num(Decimal::parse("38.5").value())));
}

TEST_CASE("str columns mix numeric and text readings") {
    CHECK(parse_cell("38.5", AttrKind::Str).kind() == Kind::Num);
    CHECK(parse_cell("110/70", AttrKind::Str).kind() == Kind::Str);
    CHECK(parse_cell("  oral ", AttrKind::Str).text() == "oral");
    CHECK(parse_cell("", AttrKind::Str).is_null());
    CHECK_THROWS_AS(parse_cell("110/70", AttrKind::Num), Error);
}

TEST_CASE("load_facts reads the ward readings") {
    Instance d = load_facts(testing::hospital_data(), tempnoon_schema());
    const Relation& rel = d.relation("TempNoon");
    CHECK(rel.size() == 5);
    CHECK(rel.contains(reading("Tom Waits", "38.5", 705, "Sep/5")));
    CHECK(rel.contains(reading("Tom Waits", "37.9", 735, "Sep/7")));

    SUBCASE("loading is idempotent") {
        Instance again = load_facts(testing::hospital_data(), tempnoon_schema());
        CHECK(d == again);
    }
}

TEST_CASE("load_facts edge cases") {
    auto dir = scratch_dir("edges");

    SUBCASE("header-only file loads empty") {
        std::ofstream(dir / "TempNoon.csv") << "patient,value,time,date\n";
        Instance d = load_facts(dir, tempnoon_schema());
        CHECK(d.relation("TempNoon").empty());
    }
    SUBCASE("duplicate rows collapse to one tuple") {
        std::ofstream(dir / "TempNoon.csv") << "patient,value,time,date\n"
                                            << "Tom Waits,38.5,11:45,Sep/5\n"
                                            << "Tom Waits,38.5,11:45,Sep/5\n";
        Instance d = load_facts(dir, tempnoon_schema());
        CHECK(d.relation("TempNoon").size() == 1);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_WITH_AS(load_facts(dir, tempnoon_schema()),
                             doctest::Contains("TempNoon"), Error);
        try {
            load_facts(dir, tempnoon_schema());
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MissingRelation);
        }
    }
    SUBCASE("header mismatch") {
        std::ofstream(dir / "TempNoon.csv") << "patient,reading,time,date\n";
        try {
            load_facts(dir, tempnoon_schema());
            FAIL("expected SchemaMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SchemaMismatch);
        }
    }
    SUBCASE("bad cell reports row and column") {
        std::ofstream(dir / "TempNoon.csv") << "patient,value,time,date\n"
                                            << "Tom Waits,38.5,25:00,Sep/5\n";
        try {
            load_facts(dir, tempnoon_schema());
            FAIL("expected ValueParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ValueParseError);
            CHECK(std::string(e.what()).find("row 2") != std::string::npos);
            CHECK(std::string(e.what()).find("time") != std::string::npos);
        }
    }
    fs::remove_all(dir);
}

TEST_CASE("symmetric difference between the dirty and clean readings is 2") {
    // Clean version: the tympanal reading and the uncertified nurse's
    // reading drop out, nothing is added.
    Instance d = load_facts(testing::hospital_data(), tempnoon_schema());
    Instance clean;
    clean.add_relation(tempnoon_schema().front());
    clean.insert("TempNoon", reading("Tom Waits", "38.5", 705, "Sep/5"));
    clean.insert("TempNoon", reading("Tom Waits", "38.0", 735, "Sep/6"));
    clean.insert("TempNoon", reading("Tom Waits", "37.9", 735, "Sep/7"));

    CHECK(symmetric_difference(d, clean, "TempNoon") == 2);
    CHECK(symmetric_difference(clean, d, "TempNoon") == 2);  // symmetry
    CHECK(symmetric_difference(d, d, "TempNoon") == 0);

    Instance empty;
    empty.add_relation(tempnoon_schema().front());
    CHECK(symmetric_difference(d, empty, "TempNoon") == 5);

    Instance other_sig;
    RelationSignature s = tempnoon_schema().front();
    s.attributes[1].kind = AttrKind::Str;
    other_sig.add_relation(s);
    CHECK_THROWS_AS(symmetric_difference(d, other_sig, "TempNoon"), Error);
}

TEST_CASE("symmetric difference is symmetric on random instances") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        testing::Rng rng(seed);
        RelationSignature sig;
        sig.name = "T";
        sig.attributes = {{"a", AttrKind::Str}, {"b", AttrKind::Str}};
        Instance a, b;
        a.add_relation(sig);
        b.add_relation(sig);
        std::vector<Value> pool = {Value::str("x"), Value::str("y"), Value::num(1),
                                   Value::null()};
        for (size_t i = 0; i < 6; ++i) {
            if (rng.chance(0.7)) a.insert("T", {rng.pick(pool), rng.pick(pool)});
            if (rng.chance(0.7)) b.insert("T", {rng.pick(pool), rng.pick(pool)});
        }
        CHECK(symmetric_difference(a, b, "T") == symmetric_difference(b, a, "T"));
    }
}

TEST_CASE("csv round-trip preserves instances") {
    Instance d = load_facts(testing::hospital_data(), tempnoon_schema());
    // Add a row with a null to cover the empty-cell encoding.
    d.relation("TempNoon")
        .insert({Value::str("Lou Reed"), Value::null(), Value::time(610), Value::date("Sep/9")});

    auto dir = scratch_dir("roundtrip");
    write_instance_csv(dir, d);
    Instance back = load_facts(dir, tempnoon_schema());
    CHECK(back == d);
    fs::remove_all(dir);
}
