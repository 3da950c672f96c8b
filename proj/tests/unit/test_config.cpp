#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "seamstitch/config.hpp"
#include "seamstitch/error.hpp"

using namespace seamstitch;

namespace {

void expect_config_error(const std::string& text) {
    try {
        parse_config_json(text);
        ADD_FAILURE() << text;
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError) << text;
    }
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    const PipelineConfig d;
    const std::string text = config_to_json(d);
    const PipelineConfig back = parse_config_json(text);
    EXPECT_EQ(config_to_json(back), text);
    EXPECT_EQ(back.zone.range_divisor, 20u);
    EXPECT_EQ(back.field.nx, 64u);
    EXPECT_EQ(back.field.d_max, 48.0);
    EXPECT_EQ(back.compose.seam_band, 8u);
    EXPECT_EQ(back.chain.brightness_tol, 20.0);
    EXPECT_EQ(back.matcher, MatcherKind::Builtin);
}

TEST(Config, EmptyDocumentKeepsDefaults) {
    EXPECT_EQ(config_to_json(parse_config_json("{}")), config_to_json(PipelineConfig{}));
}

TEST(Config, EditedValuesSurvive) {
    PipelineConfig c;
    c.matcher = MatcherKind::File;
    c.ransac.rng_seed = 99;
    c.zone.v = 3.5;
    c.zone.require_source_right = true;
    c.field.blur_guarded = false;
    c.compose.seam_sigma = 1.25;
    c.dump_debug = true;
    const PipelineConfig back = parse_config_json(config_to_json(c));
    EXPECT_EQ(back.matcher, MatcherKind::File);
    EXPECT_EQ(back.ransac.rng_seed, 99u);
    EXPECT_EQ(back.zone.v, 3.5);
    EXPECT_TRUE(back.zone.require_source_right);
    EXPECT_FALSE(back.field.blur_guarded);
    EXPECT_EQ(back.compose.seam_sigma, 1.25);
    EXPECT_TRUE(back.dump_debug);
    EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, PartialSection) {
    const PipelineConfig c = parse_config_json(R"({"zone": {"v": 4}, "matcher": {"kind": "file"}})");
    EXPECT_EQ(c.zone.v, 4.0);
    EXPECT_EQ(c.zone.lambda, 0.5);
    EXPECT_EQ(c.matcher, MatcherKind::File);
}

TEST(Config, RejectsUnknownKeys) {
    expect_config_error(R"({"zones": {}})");
    expect_config_error(R"({"zone": {"vv": 2}})");
    expect_config_error(R"({"field": {"nx": 64, "extra": true}})");
}

TEST(Config, RejectsBadTypesAndValues) {
    expect_config_error(R"({"zone": {"v": "2"}})");
    expect_config_error(R"({"field": {"nx": -4}})");
    expect_config_error(R"({"field": {"nx": 6.5}})");
    expect_config_error(R"({"compose": {"seam_band": 1e20}})");
    expect_config_error(R"({"field": {"blur_guarded": 1}})");
    expect_config_error(R"({"matcher": {"kind": "xfeat"}})");
    expect_config_error(R"({"zone": []})");
    expect_config_error(R"([1, 2])");
    expect_config_error(R"({"zone": {"v": 2)");
}

TEST(Config, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "seamstitch_config_test.json";
    {
        std::ofstream(path) << R"({"ransac": {"iterations": 77}})";
    }
    EXPECT_EQ(load_config(path).ransac.iterations, 77u);
    std::filesystem::remove(path);
    try {
        load_config(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
}
