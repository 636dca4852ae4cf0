#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzcut/features.hpp"
#include "fuzzcut/raster.hpp"

namespace fuzzcut {

struct glyph {
    binary_pattern pattern;  // trimmed
    std::string label;       // single character
    std::string source;      // font / file identifier
};

/// Ground-truth record for one synthesized pattern.
struct sample_descriptor {
    std::string image;       // path relative to the dataset root
    std::string chars;       // component labels, left to right
    std::vector<int> cuts;   // 1-based cut columns, |chars|-1 of them
    nlohmann::json source;   // generator parameters (seed, shifts, glyphs)
};

struct merge_policy {
    int extra_shift = 0;  // overlap added beyond the minimal touching shift
    int max_shift = -1;   // -1: min(w1,w2)-1
};

struct merge_output {
    binary_pattern pattern;
    int cut = 0;    // 1-based; the column where the right glyph's part begins
    int shift = 0;  // columns the right glyph moved left from adjacency
};

namespace detail {

// Sorted black-row lists per placed column, bottom-aligned onto height H.
inline std::vector<std::vector<int>> placed_rows(const binary_pattern& g, int H) {
    std::vector<std::vector<int>> cols(g.cols);
    int off = H - g.rows;
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
            if (g.black(r, c)) cols[c].push_back(off + r);
    return cols;
}

inline bool rows_adjacent(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        int d = a[i] - b[j];
        if (d >= -1 && d <= 1) return true;
        if (d < 0) ++i;
        else ++j;
    }
    return false;
}

}  // namespace detail

/// Bottom-aligns both glyphs on a shared baseline and shifts the right one
/// left by the minimal offset that makes the union 8-connected across the
/// junction (a pair of black pixels at column distance <= 1 and row distance
/// <= 1). The ground-truth cut is the leftmost column where both glyphs
/// contribute black pixels, or the right glyph's first column when the
/// horizontal overlap is zero-width. Returns nothing when no shift in the
/// allowed range produces a touching union.
inline std::optional<merge_output> merge_glyphs(const glyph& g1, const glyph& g2,
                                                merge_policy policy = {}) {
    const auto& a = g1.pattern;
    const auto& b = g2.pattern;
    int H = std::max(a.rows, b.rows);
    auto acols = detail::placed_rows(a, H);
    auto bcols = detail::placed_rows(b, H);
    int max_shift = policy.max_shift >= 0 ? policy.max_shift
                                          : std::min(a.cols, b.cols) - 1;
    max_shift = std::min(max_shift, std::min(a.cols, b.cols) - 1);

    auto touches = [&](int shift) {
        // right glyph's first column lands at global a.cols - shift (0-based)
        int boff = a.cols - shift;
        for (int ac = 0; ac < a.cols; ++ac) {
            if (acols[ac].empty()) continue;
            for (int bc = ac - 1 - boff; bc <= ac + 1 - boff; ++bc) {
                if (bc < 0 || bc >= b.cols || bcols[bc].empty()) continue;
                if (detail::rows_adjacent(acols[ac], bcols[bc])) return true;
            }
        }
        return false;
    };

    int shift = -1;
    for (int s = 0; s <= max_shift; ++s) {
        if (touches(s)) {
            shift = std::min(s + policy.extra_shift, max_shift);
            break;
        }
    }
    if (shift < 0) return std::nullopt;

    int boff = a.cols - shift;
    int W = a.cols + b.cols - shift;
    binary_pattern merged = binary_pattern::white(H, W);
    for (int c = 0; c < a.cols; ++c)
        for (int r : acols[c]) merged.at(r, c) = 0;
    for (int c = 0; c < b.cols; ++c)
        for (int r : bcols[c]) merged.at(r, boff + c) = 0;

    int cut = boff + 1;  // first column of the right glyph, 1-based
    for (int c = boff; c < a.cols; ++c) {
        if (!acols[c].empty() && !bcols[c - boff].empty()) {
            cut = c + 1;
            break;
        }
    }
    return merge_output{std::move(merged), cut, shift};
}

enum class filter_verdict { keep, height_mismatch, no_touch };

/// Screens a merge attempt: rejected merges count as non-touching, and
/// components whose height ratio falls below the threshold are discarded.
inline filter_verdict filter_sample(const glyph& g1, const glyph& g2,
                                    const std::optional<merge_output>& merged,
                                    double height_ratio_min = 0.5) {
    if (!merged) return filter_verdict::no_touch;
    double h1 = g1.pattern.rows, h2 = g2.pattern.rows;
    if (std::min(h1, h2) / std::max(h1, h2) < height_ratio_min)
        return filter_verdict::height_mismatch;
    return filter_verdict::keep;
}

inline nlohmann::json descriptor_to_json(const sample_descriptor& d) {
    return {{"image", d.image}, {"chars", d.chars}, {"cuts", d.cuts},
            {"source", d.source}};
}

inline sample_descriptor descriptor_from_json(const nlohmann::json& j) {
    sample_descriptor d;
    try {
        d.image = j.at("image").get<std::string>();
        d.chars = j.at("chars").get<std::string>();
        d.cuts = j.at("cuts").get<std::vector<int>>();
        if (j.contains("source")) d.source = j.at("source");
    } catch (const nlohmann::json::exception& e) {
        throw error(std::string("descriptor schema error: ") + e.what());
    }
    return d;
}

/// Loads every *.pat / *.pbm file of a directory as a glyph, labeled by the
/// first character of the file stem, sorted by filename.
inline std::vector<glyph> load_glyph_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto ext = entry.path().extension().string();
        if (ext == ".pat" || ext == ".pbm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<glyph> out;
    for (const auto& f : files) {
        glyph g;
        g.pattern = trim(load_pattern(f.string()));
        g.label = f.stem().string().substr(0, 1);
        g.source = f.filename().string();
        out.push_back(std::move(g));
    }
    if (out.size() < 2) throw error("glyph directory needs at least 2 glyphs");
    return out;
}

struct synth_params {
    std::string glyph_dir;
    std::string out_dir;
    int count = 100;
    int max_chars = 4;
    double two_char_fraction = 0.9;
    std::uint64_t seed = 0;
    double height_ratio_min = 0.5;
};

struct generation_stats {
    int written = 0;
    int attempts = 0;
    int rejected_no_touch = 0;
    int rejected_height = 0;
    int rejected_degenerate = 0;
    bool reached_count = false;
};

namespace detail {

// Pads one white frame column on each side when a cut would otherwise fall
// outside 2..n-1.
inline bool frame_if_degenerate(binary_pattern& p, std::vector<int>& cuts) {
    bool bad = false;
    for (int c : cuts)
        if (c < 2 || c > p.cols - 1) bad = true;
    if (!bad) return true;
    binary_pattern framed = binary_pattern::white(p.rows, p.cols + 2);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c) framed.at(r, c + 1) = p.at(r, c);
    p = std::move(framed);
    for (int& c : cuts) ++c;
    for (int c : cuts)
        if (c < 2 || c > p.cols - 1) return false;
    return true;
}

inline std::string sample_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "sample_%04d", index);
    return buf;
}

}  // namespace detail

/// Builds a labeled touching-character dataset. Deterministic under the
/// seed: samples are constructed and written in index order by a single
/// thread. Emits each sample as plain pattern text plus PBM, one JSON
/// descriptor per sample, and a manifest of all descriptors.
inline generation_stats generate_dataset(const synth_params& params) {
    namespace fs = std::filesystem;
    auto glyphs = load_glyph_dir(params.glyph_dir);
    fs::create_directories(params.out_dir);

    std::mt19937_64 rng(params.seed);
    auto uniform = [&](int n) {
        return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    };
    // bit-reproducible across standard libraries, unlike the std distributions
    auto coin = [&](double prob) {
        return (rng() >> 11) * 0x1.0p-53 < prob;
    };

    generation_stats stats;
    nlohmann::json manifest_samples = nlohmann::json::array();
    const int attempt_budget = params.count * 200;

    while (stats.written < params.count && stats.attempts < attempt_budget) {
        ++stats.attempts;
        int k = 2;
        if (params.max_chars >= 3 && !coin(params.two_char_fraction))
            k = (params.max_chars >= 4 && coin(0.5)) ? 4 : 3;

        std::vector<const glyph*> picks;
        for (int i = 0; i < k; ++i) picks.push_back(&glyphs[uniform(
            static_cast<int>(glyphs.size()))]);

        int min_h = picks[0]->pattern.rows, max_h = min_h;
        for (const auto* g : picks) {
            min_h = std::min(min_h, g->pattern.rows);
            max_h = std::max(max_h, g->pattern.rows);
        }
        if (static_cast<double>(min_h) / max_h < params.height_ratio_min) {
            ++stats.rejected_height;
            continue;
        }

        glyph acc = *picks[0];
        std::vector<int> cuts, shifts;
        std::string chars = picks[0]->label;
        bool ok = true;
        for (int i = 1; i < k; ++i) {
            auto merged = merge_glyphs(acc, *picks[i]);
            if (!merged) {
                ++stats.rejected_no_touch;
                ok = false;
                break;
            }
            if (!cuts.empty() && merged->cut <= cuts.back()) {
                ++stats.rejected_degenerate;
                ok = false;
                break;
            }
            cuts.push_back(merged->cut);
            shifts.push_back(merged->shift);
            chars += picks[i]->label;
            acc.pattern = std::move(merged->pattern);
        }
        if (!ok) continue;

        binary_pattern image = acc.pattern;
        if (!detail::frame_if_degenerate(image, cuts)) {
            ++stats.rejected_degenerate;
            continue;
        }

        std::string name = detail::sample_name(stats.written);
        write_pattern((fs::path(params.out_dir) / (name + ".pat")).string(),
                      image, pattern_format::text);
        write_pattern((fs::path(params.out_dir) / (name + ".pbm")).string(),
                      image, pattern_format::pbm_binary);

        sample_descriptor d;
        d.image = name + ".pat";
        d.chars = chars;
        d.cuts = cuts;
        nlohmann::json glyph_names = nlohmann::json::array();
        for (const auto* g : picks) glyph_names.push_back(g->source);
        d.source = {{"seed", params.seed},
                    {"index", stats.written},
                    {"shift", shifts},
                    {"glyphs", glyph_names}};
        std::ofstream dout((fs::path(params.out_dir) / (name + ".json")).string());
        dout << descriptor_to_json(d).dump(2) << "\n";
        manifest_samples.push_back(descriptor_to_json(d));
        ++stats.written;
    }

    nlohmann::json manifest = {
        {"params",
         {{"count", params.count},
          {"max_chars", params.max_chars},
          {"two_char_fraction", params.two_char_fraction},
          {"seed", params.seed},
          {"height_ratio_min", params.height_ratio_min}}},
        {"samples", manifest_samples}};
    std::ofstream mout((fs::path(params.out_dir) / "manifest.json").string());
    if (!mout) throw error("cannot write manifest in " + params.out_dir);
    mout << manifest.dump(2) << "\n";

    stats.reached_count = stats.written == params.count;
    return stats;
}

/// Reads a dataset directory's manifest.
inline std::vector<sample_descriptor> load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    auto path = fs::path(dir) / "manifest.json";
    std::ifstream in(path);
    if (!in) throw error("cannot open manifest: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw error("manifest parse error: " + std::string(e.what()));
    }
    std::vector<sample_descriptor> out;
    for (const auto& js : j.at("samples")) out.push_back(descriptor_from_json(js));
    return out;
}

}  // namespace fuzzcut
