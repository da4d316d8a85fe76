#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "karnet/data.hpp"
#include "karnet/errors.hpp"
#include "karnet/textio.hpp"

using karnet::Dataset;
using karnet::EncodingPlan;
using karnet::Matrix;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string write_temp(const char* name, const std::string& content) {
    const std::string path = temp_path(name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path;
}

EncodingPlan two_numeric_raw() {
    return EncodingPlan::all_numeric(2, EncodingPlan::LabelPosition::last, false,
                                     EncodingPlan::NumericScaling::raw);
}

}  // namespace

// --- generators ------------------------------------------------------------------

TEST_CASE("sinc generator: clean points, replicas, noise law") {
    karnet::SincConfig cfg;
    cfg.seed = 4;
    const Dataset ds = karnet::gen_sinc(cfg);
    REQUIRE(ds.samples() == 88);  // 8 clean + 10 replicas of 8
    REQUIRE(ds.features() == 1);
    REQUIRE(ds.targets() == 1);
    CHECK(ds.meta.source == "sinc");
    CHECK(ds.meta.seed == 4);
    REQUIRE(ds.meta.clean_rows.size() == 8);

    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(ds.meta.clean_rows[i] == i);
        const double x = static_cast<double>(i + 1);
        CHECK(ds.x(i, 0) == x);
        CHECK(ds.y(i, 0) == std::sin(2.0 * x) / (2.0 * x));
    }
    for (std::size_t row = 8; row < 88; ++row) {
        const std::size_t i = row % 8;
        const double clean = ds.y(i, 0);
        CHECK(ds.x(row, 0) == static_cast<double>(i + 1));
        CHECK(std::abs(ds.y(row, 0) - clean) <= 0.2 * std::abs(clean) + 1e-15);
    }
}

TEST_CASE("sinc generator is seed-deterministic") {
    karnet::SincConfig cfg;
    cfg.seed = 9;
    const Dataset a = karnet::gen_sinc(cfg);
    const Dataset b = karnet::gen_sinc(cfg);
    CHECK(a.y == b.y);
    cfg.seed = 10;
    CHECK_FALSE(a.y == karnet::gen_sinc(cfg).y);

    cfg.noisy_replicas = 0;
    const Dataset clean = karnet::gen_sinc(cfg);
    CHECK(clean.samples() == 8);

    cfg.noise_fraction = 1.5;
    CHECK_THROWS_AS(karnet::gen_sinc(cfg), karnet::InvalidArgument);
}

TEST_CASE("xor generator emits the canonical four points") {
    const Dataset ds = karnet::gen_xor();
    REQUIRE(ds.samples() == 4);
    REQUIRE(ds.features() == 2);
    CHECK(ds.x == Matrix{{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.001, 1.001}});
    CHECK(ds.y == Matrix{{0.0}, {0.0}, {1.0}, {1.0}});
    CHECK(ds.labels == std::vector<int>{0, 0, 1, 1});
    CHECK(ds.class_names == std::vector<std::string>{"0", "1"});
}

TEST_CASE("spiral generator: balance, bounds, determinism") {
    karnet::SpiralConfig cfg;
    cfg.seed = 7;
    const Dataset ds = karnet::gen_spiral(cfg);
    REQUIRE(ds.samples() == 1500);
    REQUIRE(ds.features() == 2);
    REQUIRE(ds.targets() == 3);
    REQUIRE(ds.class_names == std::vector<std::string>{"0", "1", "2"});

    std::vector<std::size_t> per_class(3, 0);
    for (int l : ds.labels) per_class[static_cast<std::size_t>(l)]++;
    CHECK(per_class == std::vector<std::size_t>{500, 500, 500});

    for (std::size_t r = 0; r < ds.samples(); ++r) {
        const double radius = std::hypot(ds.x(r, 0), ds.x(r, 1));
        CHECK(radius <= cfg.r_max + 0.15);  // r_max plus generous noise room
        CHECK(ds.y(r, static_cast<std::size_t>(ds.labels[r])) == 1.0);
    }

    const Dataset again = karnet::gen_spiral(cfg);
    CHECK(ds.x == again.x);
    cfg.seed = 8;
    CHECK_FALSE(ds.x == karnet::gen_spiral(cfg).x);

    karnet::SpiralConfig bad;
    bad.arms = 1;
    CHECK_THROWS_AS(karnet::gen_spiral(bad), karnet::InvalidArgument);
    bad = {};
    bad.turns = 0.0;
    CHECK_THROWS_AS(karnet::gen_spiral(bad), karnet::InvalidArgument);
}

// --- encoding plans ---------------------------------------------------------------

TEST_CASE("plan parsing covers every directive") {
    const EncodingPlan plan = EncodingPlan::parse(
        "# comment line\n"
        "header true\n"
        "label first\n"
        "classes yes, no\n"
        "feature color ordinal red,green,blue\n"
        "feature size numeric\n"
        "feature weight numeric range 0 100\n"
        "feature score numeric raw\n");
    CHECK(plan.has_header);
    CHECK(plan.label_position == EncodingPlan::LabelPosition::first);
    REQUIRE(plan.label_classes == std::vector<std::string>{"yes", "no"});
    REQUIRE(plan.columns.size() == 4);
    CHECK(plan.columns[0].kind == EncodingPlan::ColumnKind::ordinal_categorical);
    CHECK(plan.columns[0].categories == std::vector<std::string>{"red", "green", "blue"});
    CHECK(plan.columns[1].scaling == EncodingPlan::NumericScaling::minmax);
    CHECK(plan.columns[2].scaling == EncodingPlan::NumericScaling::fixed_range);
    CHECK(plan.columns[2].range_lo == 0.0);
    CHECK(plan.columns[2].range_hi == 100.0);
    CHECK(plan.columns[3].scaling == EncodingPlan::NumericScaling::raw);
}

TEST_CASE("plan parse errors name the offending line") {
    auto message_of = [](const std::string& text) -> std::string {
        try {
            EncodingPlan::parse(text);
        } catch (const karnet::InvalidArgument& e) {
            return e.what();
        }
        return "";
    };
    CHECK(message_of("feature a numeric\nwat is this\n").find("plan line 2") !=
          std::string::npos);
    CHECK(message_of("label sideways\n").find("plan line 1") != std::string::npos);
    CHECK(message_of("feature a ordinal\n").find("no categories") != std::string::npos);
    CHECK(message_of("feature a numeric range 5 2\n").find("lo < hi") != std::string::npos);
    CHECK_THROWS_AS(EncodingPlan::parse("label last\n"), karnet::InvalidArgument);  // no features
    CHECK_THROWS_AS(EncodingPlan::parse("feature a numeric\nlabel_numeric true\n"),
                    karnet::InvalidArgument);  // label_numeric without label
}

TEST_CASE("built-in plans parse and the shipped plan files carry the same bytes") {
    const EncodingPlan nursery = EncodingPlan::parse(karnet::builtin_plan_text("nursery"));
    REQUIRE(nursery.columns.size() == 8);
    CHECK(nursery.label_classes.size() == 5);
    for (const auto& col : nursery.columns)
        CHECK(col.kind == EncodingPlan::ColumnKind::ordinal_categorical);

    const EncodingPlan letter = EncodingPlan::parse(karnet::builtin_plan_text("letter"));
    REQUIRE(letter.columns.size() == 16);
    CHECK(letter.label_position == EncodingPlan::LabelPosition::first);
    CHECK(letter.label_classes.size() == 26);
    for (const auto& col : letter.columns) {
        CHECK(col.scaling == EncodingPlan::NumericScaling::fixed_range);
        CHECK(col.range_hi == 15.0);
    }

    const EncodingPlan optdigit = EncodingPlan::parse(karnet::builtin_plan_text("optdigit"));
    REQUIRE(optdigit.columns.size() == 64);
    CHECK(optdigit.label_classes.size() == 10);

    CHECK_THROWS_AS(karnet::builtin_plan_text("mnist"), karnet::InvalidArgument);

    // data/plans/*.plan are generated from the built-ins and must not drift.
    for (const char* name : {"nursery", "letter", "optdigit"}) {
        const std::string path = std::string("data/plans/") + name + ".plan";
        CHECK(karnet::read_text_file(path) == karnet::builtin_plan_text(name));
    }
}

// --- CSV loading -------------------------------------------------------------------

TEST_CASE("labeled CSV with discovered classes") {
    const std::string path = write_temp("karnet_basic.csv", "1,2,b\n3,4,a\n5,6,b\n");
    const Dataset ds = karnet::load_csv(path, two_numeric_raw());
    REQUIRE(ds.samples() == 3);
    CHECK(ds.x == Matrix{{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
    // Discovered classes come out sorted, so 'a' is class 0.
    CHECK(ds.class_names == std::vector<std::string>{"a", "b"});
    CHECK(ds.labels == std::vector<int>{1, 0, 1});
    CHECK(ds.y == Matrix{{0.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}});
    std::remove(path.c_str());
}

TEST_CASE("label first, declared class order, header and blank lines") {
    const std::string path = write_temp("karnet_first.csv",
                                        "label,c1,c2\r\n"
                                        "pos,1,2\r\n"
                                        "\r\n"
                                        "neg,3,4\r\n");
    EncodingPlan plan = two_numeric_raw();
    plan.label_position = EncodingPlan::LabelPosition::first;
    plan.label_classes = {"pos", "neg"};
    plan.has_header = true;
    const Dataset ds = karnet::load_csv(path, plan);
    REQUIRE(ds.samples() == 2);
    CHECK(ds.labels == std::vector<int>{0, 1});
    CHECK(ds.class_names == std::vector<std::string>{"pos", "neg"});
    std::remove(path.c_str());
}

TEST_CASE("unlabeled and numeric-label files") {
    const std::string path = write_temp("karnet_nolabel.csv", "1,2\n3,4\n");
    EncodingPlan plan = two_numeric_raw();
    plan.label_position = EncodingPlan::LabelPosition::none;
    const Dataset ds = karnet::load_csv(path, plan);
    CHECK(ds.samples() == 2);
    CHECK(ds.targets() == 0);
    CHECK_FALSE(ds.has_labels());

    const std::string rpath = write_temp("karnet_reg.csv", "1,2,0.5\n3,4,-1.25\n");
    EncodingPlan rplan = two_numeric_raw();
    rplan.label_numeric = true;
    const Dataset reg = karnet::load_csv(rpath, rplan);
    CHECK(reg.targets() == 1);
    CHECK_FALSE(reg.has_labels());
    CHECK(reg.y == Matrix{{0.5}, {-1.25}});
    std::remove(path.c_str());
    std::remove(rpath.c_str());
}

TEST_CASE("ordinal encoding maps category i of N to (i+1)/N") {
    const std::string path = write_temp("karnet_ordinal.csv", "a,x\nd,y\nb,x\n");
    EncodingPlan plan;
    plan.columns.push_back({"grade", EncodingPlan::ColumnKind::ordinal_categorical,
                            {"a", "b", "c", "d"}, EncodingPlan::NumericScaling::minmax, 0.0,
                            1.0});
    const Dataset ds = karnet::load_csv(path, plan);
    CHECK(ds.x(0, 0) == 0.25);
    CHECK(ds.x(1, 0) == 1.0);
    CHECK(ds.x(2, 0) == 0.5);
    std::remove(path.c_str());
}

TEST_CASE("numeric scaling modes") {
    const std::string path = write_temp("karnet_scale.csv",
                                        "2,7.5,30,5,l\n4,0,-10,5,l\n6,15,0,5,l\n");
    EncodingPlan plan;
    using NS = EncodingPlan::NumericScaling;
    plan.columns.push_back({"mn", EncodingPlan::ColumnKind::numeric, {}, NS::minmax, 0, 1});
    plan.columns.push_back({"fx", EncodingPlan::ColumnKind::numeric, {}, NS::fixed_range, 0, 15});
    plan.columns.push_back({"rw", EncodingPlan::ColumnKind::numeric, {}, NS::raw, 0, 1});
    plan.columns.push_back({"cn", EncodingPlan::ColumnKind::numeric, {}, NS::minmax, 0, 1});
    const Dataset ds = karnet::load_csv(path, plan);
    CHECK(ds.x(0, 0) == 0.0);  // min-max from the data: 2..6
    CHECK(ds.x(1, 0) == 0.5);
    CHECK(ds.x(2, 0) == 1.0);
    CHECK(ds.x(0, 1) == 0.5);  // fixed range 0..15
    CHECK(ds.x(2, 1) == 1.0);
    CHECK(ds.x(0, 2) == 30.0);  // raw passes through, out-of-range and all
    CHECK(ds.x(1, 2) == -10.0);
    CHECK(ds.x(0, 3) == 0.0);  // constant column collapses to 0
    CHECK(ds.x(2, 3) == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("CSV errors carry 1-based file coordinates") {
    const std::string bad_number = write_temp("karnet_badnum.csv", "1,2,a\nx7,4,b\n");
    try {
        karnet::load_csv(bad_number, two_numeric_raw());
        FAIL("expected ParseError");
    } catch (const karnet::ParseError& e) {
        CHECK(e.row == 2);
        CHECK(e.col == 1);
    }

    const std::string short_row = write_temp("karnet_short.csv", "1,2,a\n3,b\n");
    try {
        karnet::load_csv(short_row, two_numeric_raw());
        FAIL("expected ParseError");
    } catch (const karnet::ParseError& e) {
        CHECK(e.row == 2);
        CHECK(std::string(e.what()).find("expected 3 fields, found 2") != std::string::npos);
    }

    const std::string bad_class = write_temp("karnet_badclass.csv", "1,2,a\n3,4,z\n");
    EncodingPlan declared = two_numeric_raw();
    declared.label_classes = {"a", "b"};
    try {
        karnet::load_csv(bad_class, declared);
        FAIL("expected UnknownCategory");
    } catch (const karnet::UnknownCategory& e) {
        CHECK(e.row == 2);
        CHECK(e.col == 3);
    }

    const std::string bad_cat = write_temp("karnet_badcat.csv", "red,ok\nmauve,ok\n");
    EncodingPlan ordinal;
    ordinal.columns.push_back({"color", EncodingPlan::ColumnKind::ordinal_categorical,
                               {"red", "green"}, EncodingPlan::NumericScaling::minmax, 0.0,
                               1.0});
    try {
        karnet::load_csv(bad_cat, ordinal);
        FAIL("expected UnknownCategory");
    } catch (const karnet::UnknownCategory& e) {
        CHECK(e.row == 2);
        CHECK(e.col == 1);
    }

    CHECK_THROWS_AS(karnet::load_csv(temp_path("karnet_missing.csv"), two_numeric_raw()),
                    karnet::IoError);
    const std::string empty = write_temp("karnet_empty.csv", "\n \n");
    CHECK_THROWS_AS(karnet::load_csv(empty, two_numeric_raw()), karnet::IoError);

    std::remove(bad_number.c_str());
    std::remove(short_row.c_str());
    std::remove(bad_class.c_str());
    std::remove(bad_cat.c_str());
    std::remove(empty.c_str());
}

// --- dataset surgery ---------------------------------------------------------------

TEST_CASE("concat stacks rows and keeps the class list") {
    karnet::SpiralConfig small;
    small.points_per_arm = 5;
    small.seed = 1;
    const Dataset a = karnet::gen_spiral(small);
    small.seed = 2;
    const Dataset b = karnet::gen_spiral(small);
    const Dataset both = karnet::concat(a, b);
    REQUIRE(both.samples() == 30);
    CHECK(both.labels.size() == 30);
    CHECK(both.x(17, 0) == b.x(2, 0));
    CHECK(both.labels[29] == b.labels[14]);

    Dataset other = b;
    other.class_names = {"0", "1", "9"};
    CHECK_THROWS_AS(karnet::concat(a, other), karnet::InvalidArgument);
    const Dataset sinc = karnet::gen_sinc({});
    CHECK_THROWS_AS(karnet::concat(a, sinc), karnet::ShapeMismatch);
}

TEST_CASE("merge_class folds one class into another") {
    Dataset ds;
    ds.x = Matrix(4, 1, 0.0);
    ds.class_names = {"a", "b", "c"};
    ds.labels = {0, 1, 2, 1};
    ds.y = Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 0}};

    const Dataset merged = karnet::merge_class(ds, "b", "c");
    CHECK(merged.class_names == std::vector<std::string>{"a", "c"});
    CHECK(merged.labels == std::vector<int>{0, 1, 1, 1});
    CHECK(merged.y == Matrix{{1, 0}, {0, 1}, {0, 1}, {0, 1}});

    CHECK_THROWS_AS(karnet::merge_class(ds, "zz", "a"), karnet::UnknownLabel);
    CHECK_THROWS_AS(karnet::merge_class(ds, "a", "a"), karnet::InvalidArgument);
}

TEST_CASE("nursery_merge folds recommend into very_recom") {
    Dataset ds;
    ds.x = Matrix(3, 1, 0.0);
    ds.class_names = {"not_recom", "recommend", "very_recom"};
    ds.labels = {0, 1, 2};
    ds.y = Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const Dataset merged = karnet::nursery_merge(ds);
    CHECK(merged.class_names == std::vector<std::string>{"not_recom", "very_recom"});
    CHECK(merged.labels == std::vector<int>{0, 1, 1});

    Dataset plain = karnet::gen_xor();
    CHECK_THROWS_AS(karnet::nursery_merge(plain), karnet::UnknownLabel);
}

TEST_CASE("subset selects rows with labels and targets") {
    const Dataset xor_set = karnet::gen_xor();
    const Dataset picked = karnet::subset(xor_set, {2, 0});
    REQUIRE(picked.samples() == 2);
    CHECK(picked.x(0, 0) == 1.0);
    CHECK(picked.x(1, 0) == 0.0);
    CHECK(picked.labels == std::vector<int>{1, 0});
    CHECK_THROWS_AS(karnet::subset(xor_set, {9}), karnet::InvalidArgument);
    CHECK_THROWS_AS(karnet::subset(xor_set, {}), karnet::InvalidArgument);
}

TEST_CASE("dataset validation") {
    Dataset ds;
    CHECK_THROWS_AS(ds.validate(), karnet::InvalidArgument);  // no rows
    ds.x = Matrix(2, 1, 0.0);
    ds.labels = {0};
    ds.class_names = {"a"};
    CHECK_THROWS_AS(ds.validate(), karnet::ShapeMismatch);  // 1 label, 2 rows
    ds.labels = {0, 5};
    CHECK_THROWS_AS(ds.validate(), karnet::InvalidArgument);  // label out of range
    ds.labels = {0, 0};
    CHECK_NOTHROW(ds.validate());
    ds.x(1, 0) = std::nan("");
    CHECK_THROWS_AS(ds.validate(), karnet::NonFiniteInput);
}

// --- CSV writing --------------------------------------------------------------------

TEST_CASE("regression CSV write/load round trip is exact and byte-stable") {
    karnet::SincConfig cfg;
    cfg.seed = 3;
    const Dataset ds = karnet::gen_sinc(cfg);
    const std::string path = temp_path("karnet_roundtrip.csv");
    karnet::write_dataset_csv(path, ds);

    EncodingPlan plan = EncodingPlan::all_numeric(1, EncodingPlan::LabelPosition::last, true,
                                                  EncodingPlan::NumericScaling::raw);
    plan.has_header = true;
    const Dataset back = karnet::load_csv(path, plan);
    REQUIRE(back.samples() == ds.samples());
    CHECK(back.x == ds.x);  // shortest-round-trip formatting: bit-exact
    CHECK(back.y == ds.y);

    const std::string path2 = temp_path("karnet_roundtrip2.csv");
    karnet::write_dataset_csv(path2, back);
    CHECK(karnet::read_text_file(path) == karnet::read_text_file(path2));
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("labeled CSV write uses class names") {
    const Dataset ds = karnet::gen_xor();
    const std::string path = temp_path("karnet_labeled.csv");
    karnet::write_dataset_csv(path, ds);
    const std::string text = karnet::read_text_file(path);
    CHECK(text.find("x1,x2,label\n") == 0);
    CHECK(text.find(",1\n") != std::string::npos);

    EncodingPlan plan = two_numeric_raw();
    plan.has_header = true;
    const Dataset back = karnet::load_csv(path, plan);
    CHECK(back.labels == ds.labels);
    CHECK(back.x == ds.x);
    std::remove(path.c_str());
}
