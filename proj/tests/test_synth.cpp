#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "fuzzcut/segmenter.hpp"
#include "fuzzcut/synth.hpp"
#include "support.hpp"

using namespace fuzzcut;
using testsupport::pattern_of;
namespace fs = std::filesystem;

namespace {

glyph bar_glyph(int rows) {
    std::vector<std::uint8_t> cells(rows, 0);
    return {binary_pattern(rows, 1, std::move(cells)), "|", "bar"};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("fuzzcut_synth_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string glyph_fixtures = FUZZCUT_FIXTURE_DIR "/glyphs";

}  // namespace

TEST_CASE("adjacent bars merge into a two-column pattern with cut 2",
          "[synth]") {
    auto g = bar_glyph(4);
    auto merged = merge_glyphs(g, g);
    REQUIRE(merged.has_value());
    CHECK(merged->shift == 0);
    CHECK(merged->pattern.cols == 2);
    CHECK(merged->pattern.rows == 4);
    CHECK(merged->cut == 2);
    for (int r = 0; r < 4; ++r) {
        CHECK(merged->pattern.black(r, 0));
        CHECK(merged->pattern.black(r, 1));
    }
}

TEST_CASE("diagonal glyphs overlap until they touch", "[synth]") {
    glyph diag{pattern_of({"011", "101", "110"}), "d", "diag"};
    auto merged = merge_glyphs(diag, diag);
    REQUIRE(merged.has_value());
    CHECK(merged->shift >= 1);
    CHECK(merged->pattern.cols < 2 * diag.pattern.cols);
    // junction window: right glyph starts at column cols(g1) - shift + 1
    int start = diag.pattern.cols - merged->shift + 1;
    CHECK(merged->cut >= start - 1);
    CHECK(merged->cut <= diag.pattern.cols + 1);
}

TEST_CASE("merge rejects configurations that never touch", "[synth]") {
    // left glyph's ink hugs the top right, right glyph's ink the bottom left,
    // with a shift cap that forbids the overlap that would join them
    glyph top{pattern_of({"00", "01", "01"}), "t", "top"};
    glyph bottom{pattern_of({"10", "10", "00"}), "b", "bottom"};
    merge_policy strict;
    strict.max_shift = 0;
    auto merged = merge_glyphs(top, bottom, strict);
    CHECK(!merged.has_value());
    CHECK(filter_sample(top, bottom, merged) == filter_verdict::no_touch);
}

TEST_CASE("height filter quantifies significant difference", "[synth]") {
    auto tall = bar_glyph(30);
    auto medium = bar_glyph(20);
    auto small = bar_glyph(10);
    auto m1 = merge_glyphs(tall, small);
    CHECK(filter_sample(tall, small, m1) == filter_verdict::height_mismatch);
    auto m2 = merge_glyphs(tall, medium);
    CHECK(filter_sample(tall, medium, m2) == filter_verdict::keep);
}

TEST_CASE("generation is deterministic under the seed", "[synth]") {
    auto dir1 = fresh_dir("det1");
    auto dir2 = fresh_dir("det2");
    synth_params params;
    params.glyph_dir = glyph_fixtures;
    params.count = 12;
    params.seed = 42;
    params.out_dir = dir1.string();
    auto s1 = generate_dataset(params);
    params.out_dir = dir2.string();
    auto s2 = generate_dataset(params);
    CHECK(s1.written == 12);
    CHECK(s2.written == 12);

    std::vector<fs::path> names1;
    for (const auto& e : fs::directory_iterator(dir1))
        names1.push_back(e.path().filename());
    std::sort(names1.begin(), names1.end());
    CHECK(names1.size() > 12);
    for (const auto& name : names1)
        CHECK(read_file(dir1 / name) == read_file(dir2 / name));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("two-char fraction one yields single-cut descriptors", "[synth]") {
    auto dir = fresh_dir("twofrac");
    synth_params params;
    params.glyph_dir = glyph_fixtures;
    params.out_dir = dir.string();
    params.count = 15;
    params.two_char_fraction = 1.0;
    params.seed = 7;
    auto stats = generate_dataset(params);
    CHECK(stats.written == 15);
    for (const auto& d : load_dataset(dir.string())) {
        CHECK(d.cuts.size() == 1);
        CHECK(d.chars.size() == 2);
    }
    fs::remove_all(dir);
}

TEST_CASE("a mixed dataset skews toward two-character samples", "[synth]") {
    auto dir = fresh_dir("mixed");
    synth_params params;
    params.glyph_dir = glyph_fixtures;
    params.out_dir = dir.string();
    params.count = 40;
    params.two_char_fraction = 0.9;
    params.seed = 11;
    auto stats = generate_dataset(params);
    CHECK(stats.written == 40);
    int twos = 0, more = 0;
    for (const auto& d : load_dataset(dir.string()))
        (d.chars.size() == 2 ? twos : more)++;
    CHECK(twos >= 30);
    CHECK(twos + more == 40);
    fs::remove_all(dir);
}

TEST_CASE("descriptors are consistent with their images", "[synth]") {
    auto dir = fresh_dir("consist");
    synth_params params;
    params.glyph_dir = glyph_fixtures;
    params.out_dir = dir.string();
    params.count = 25;
    params.max_chars = 4;
    params.two_char_fraction = 0.7;
    params.seed = 3;
    auto stats = generate_dataset(params);
    REQUIRE(stats.written == 25);

    mamdani_engine engine(builtin_profile(profile::B));
    for (const auto& d : load_dataset(dir.string())) {
        auto image = load_pattern((dir / d.image).string());
        CHECK(d.cuts.size() == d.chars.size() - 1);
        for (std::size_t i = 0; i < d.cuts.size(); ++i) {
            CHECK(d.cuts[i] >= 2);
            CHECK(d.cuts[i] <= image.cols - 1);
            if (i > 0) CHECK(d.cuts[i] > d.cuts[i - 1]);
        }
        // slicing at the truth cuts leaves ink in every part
        auto parts = slice_segments(image, d.cuts);
        CHECK(parts.size() == d.chars.size());
        // re-running the segmenter with the truth char count yields the
        // same number of cuts
        auto result = segment_pattern(image, engine,
                                      static_cast<int>(d.chars.size()));
        CHECK(result.cuts.size() == d.cuts.size());
    }
    fs::remove_all(dir);
}

TEST_CASE("pbm twins decode to the text images", "[synth]") {
    auto dir = fresh_dir("twins");
    synth_params params;
    params.glyph_dir = glyph_fixtures;
    params.out_dir = dir.string();
    params.count = 5;
    params.seed = 19;
    generate_dataset(params);
    for (const auto& d : load_dataset(dir.string())) {
        auto text = load_pattern((dir / d.image).string());
        auto pbm_name = d.image.substr(0, d.image.size() - 4) + ".pbm";
        auto pbm = load_pattern((dir / pbm_name).string());
        CHECK(text == pbm);
    }
    fs::remove_all(dir);
}

TEST_CASE("glyph directories need at least two glyphs", "[synth]") {
    auto dir = fresh_dir("sparse_glyphs");
    std::ofstream(dir / "a.pat") << "1 1\n0\n";
    CHECK_THROWS_WITH(load_glyph_dir(dir.string()),
                      Catch::Matchers::ContainsSubstring("at least 2"));
    fs::remove_all(dir);
}
