#include <doctest.h>

#include "../support/fixtures.hpp"

using namespace skinbench;

TEST_SUITE("statistical-models") {

TEST_CASE("histogram round trip") {
    std::mt19937_64 rng(1);
    HistogramModel m(16);
    for (int i = 0; i < 1000; ++i) m.add(testsupport::random_rgb(rng), i % 3 ? Label::NonSkin : Label::Skin, rng() % 5);
    const auto bytes = save_model(m);
    const auto back = std::get<HistogramModel>(load_model(bytes));
    CHECK(back == m);
    CHECK(back.skin_total() == m.skin_total());
    CHECK(model_type(back) == ModelType::Histogram);
}

TEST_CASE("gmm, cheddad and lda round trips are bit exact") {
    GmmModel g;
    g.skin_prior = 0.123456789;
    g.skin.components = {{0.25, {1.0 / 3, 2, 3}, {4, 5, 6.000000001}}, {0.75, {7, 8, 9}, {1, 1, 1}}};
    g.nonskin.components = {{1.0, {0.1, 0.2, 0.3}, {2, 3, 4}}};
    CHECK(std::get<GmmModel>(load_model(save_model(g))) == g);

    CheddadModel c{0.01, 0.1, 0.05, 0.02};
    CHECK(std::get<CheddadModel>(load_model(save_model(c))) == c);

    LdaModel l{{0.6, 0.8}, -0.25, 3.5};
    CHECK(std::get<LdaModel>(load_model(save_model(l))) == l);
}

TEST_CASE("layout is little endian with the documented header") {
    const auto bytes = save_model(CheddadModel{0, 1, 0.5, 0.25});
    REQUIRE(bytes.size() == 4 + 4 + 4 + 4 * 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SKND");
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[8] == 3);
    // e_hi = 1.0 -> 0x3FF0000000000000 little-endian
    CHECK(bytes[12 + 8 + 7] == 0x3F);
    CHECK(bytes[12 + 8 + 6] == 0xF0);
}

TEST_CASE("corrupt files are rejected") {
    auto bytes = save_model(CheddadModel{0, 1, 0.5, 0.25});
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(load_model(bad_magic), FormatError);
    auto bad_version = bytes;
    bad_version[4] = 2;
    CHECK_THROWS_AS(load_model(bad_version), VersionError);
    auto bad_tag = bytes;
    bad_tag[8] = 99;
    CHECK_THROWS_AS(load_model(bad_tag), FormatError);
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(load_model(truncated), FormatError);
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(load_model(trailing), FormatError);
    CHECK_THROWS_AS(load_model(std::vector<std::uint8_t>{}), FormatError);
}

TEST_CASE("files") {
    testsupport::TempDir dir;
    LdaModel l{{1.0}, 0.5, 2};
    save_model_file(l, dir / "m.sknd");
    CHECK(std::get<LdaModel>(load_model_file(dir / "m.sknd")) == l);
    CHECK_THROWS_AS(load_model_file(dir / "nope"), IoError);
    CHECK(model_type_name(ModelType::Gmm) == "gmm");
}

}
