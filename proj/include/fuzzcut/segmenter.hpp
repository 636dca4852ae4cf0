#pragma once

#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

#include "fuzzcut/features.hpp"
#include "fuzzcut/fis.hpp"
#include "fuzzcut/raster.hpp"

namespace fuzzcut {

/// Fuzzy score of one candidate column (global 1-based coordinates).
struct candidate_score {
    int column = 0;
    double fbar = 0, gbar = 0, hbar = 0, rho = 1.0;
};

/// Cuts are 1-based columns; each cut column starts the segment to its
/// right, so cuts c1<...<ck partition 1..n into [1,c1-1],[c1,c2-1],...,[ck,n].
struct cut_result {
    std::vector<int> cuts;                      // presplit + fuzzy, increasing
    std::vector<int> presplit_cuts;             // cuts found at blank columns
    std::vector<candidate_score> rho_profile;   // every scored candidate
    std::vector<std::pair<int, int>> segments;  // inclusive column ranges
    bool under_segmented = false;
};

struct presplit_result {
    std::vector<std::pair<int, int>> blocks;  // maximal non-blank column runs
    std::vector<int> cuts;                    // middle column of interior blank runs
};

/// Splits at every maximal interior run of blank columns, recording a cut at
/// the run's middle column (rounded down). Leading and trailing blank runs
/// produce no cut. Each block has V >= 1 on every column.
inline presplit_result presplit(const binary_pattern& p) {
    auto v = vertical_projection(p);
    presplit_result out;
    int n = p.cols;
    int col = 0;
    while (col < n) {
        while (col < n && v[col] == 0) ++col;
        if (col >= n) break;
        int start = col;
        while (col < n && v[col] > 0) ++col;
        out.blocks.push_back({start + 1, col});  // 1-based inclusive
    }
    for (std::size_t b = 1; b < out.blocks.size(); ++b) {
        int run_start = out.blocks[b - 1].second + 1;
        int run_end = out.blocks[b].first - 1;
        out.cuts.push_back((run_start + run_end) / 2);
    }
    return out;
}

/// Columns [c1,c2] (1-based inclusive) of p, full height.
inline binary_pattern slice_columns(const binary_pattern& p, int c1, int c2) {
    int n = c2 - c1 + 1;
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(p.rows) * n);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < n; ++c)
            cells[static_cast<std::size_t>(r) * n + c] = p.at(r, c1 - 1 + c);
    return binary_pattern(p.rows, n, std::move(cells));
}

namespace detail {

// Scores all candidate columns (2..w-1 locally) of one blank-free block.
inline std::vector<candidate_score> score_block(const binary_pattern& block,
                                                const mamdani_engine& engine,
                                                int global_offset) {
    std::vector<candidate_score> out;
    if (block.cols < 3) return out;
    auto feats = extract_features(trim(block));
    for (int i = 2; i <= block.cols - 1; ++i) {
        candidate_score s;
        s.column = global_offset + i;
        s.fbar = feats.fbar_col(i);
        s.gbar = feats.gbar_col(i);
        s.hbar = feats.hbar_col(i);
        s.rho = engine.evaluate(s.fbar, s.gbar, s.hbar).value;
        out.push_back(s);
    }
    return out;
}

inline bool score_less(const candidate_score& a, const candidate_score& b) {
    return std::tie(a.rho, a.fbar, a.column) < std::tie(b.rho, b.fbar, b.column);
}

}  // namespace detail

/// Lowest-rho candidate column of a blank-free pattern; ties break toward
/// the center, then toward the lower index.
inline std::pair<int, std::vector<candidate_score>> best_cut(
    const binary_pattern& p, const mamdani_engine& engine) {
    if (p.cols < 3) throw error("no candidate columns");
    auto scores = detail::score_block(p, engine, 0);
    const candidate_score* best = &scores.front();
    for (const auto& s : scores)
        if (detail::score_less(s, *best)) best = &s;
    return {best->column, std::move(scores)};
}

/// Full segmentation: presplit at blank runs, then per block pick the
/// lowest-rho cuts subject to a pairwise separation floor. The character
/// count per block comes from expected_chars when given (distributed to the
/// widest blocks first) and from the width/height aspect ratio otherwise.
inline cut_result segment_pattern(const binary_pattern& p,
                                  const mamdani_engine& engine,
                                  std::optional<int> expected_chars = {}) {
    cut_result out;
    auto pre = presplit(p);
    out.presplit_cuts = pre.cuts;

    std::size_t nblocks = pre.blocks.size();
    std::vector<binary_pattern> blocks;
    std::vector<int> widths, chars(nblocks, 1);
    for (auto [c1, c2] : pre.blocks) {
        blocks.push_back(slice_columns(p, c1, c2));
        widths.push_back(c2 - c1 + 1);
    }

    if (expected_chars) {
        int remaining = *expected_chars - static_cast<int>(nblocks);
        while (remaining > 0) {
            std::size_t pick = 0;
            double best_ratio = -1.0;
            for (std::size_t b = 0; b < nblocks; ++b) {
                double ratio = static_cast<double>(widths[b]) / chars[b];
                if (ratio > best_ratio) {
                    best_ratio = ratio;
                    pick = b;
                }
            }
            ++chars[pick];
            --remaining;
        }
    } else {
        for (std::size_t b = 0; b < nblocks; ++b) {
            int height = trim(blocks[b]).rows;
            int k = static_cast<int>(
                std::lround(static_cast<double>(widths[b]) / std::max(1, height)));
            chars[b] = std::clamp(k, 1, 4);
        }
    }

    std::vector<int> fuzzy_cuts;
    for (std::size_t b = 0; b < nblocks; ++b) {
        auto scores =
            detail::score_block(blocks[b], engine, pre.blocks[b].first - 1);
        out.rho_profile.insert(out.rho_profile.end(), scores.begin(),
                               scores.end());
        int wanted = chars[b] - 1;
        if (wanted <= 0) continue;
        double separation = std::max(3.0, widths[b] / (2.0 * chars[b]));
        std::sort(scores.begin(), scores.end(), detail::score_less);
        std::vector<int> taken;
        for (const auto& s : scores) {
            if (static_cast<int>(taken.size()) == wanted) break;
            bool clear = true;
            for (int t : taken)
                if (std::abs(s.column - t) < separation) clear = false;
            if (clear) taken.push_back(s.column);
        }
        if (static_cast<int>(taken.size()) < wanted) out.under_segmented = true;
        fuzzy_cuts.insert(fuzzy_cuts.end(), taken.begin(), taken.end());
    }

    out.cuts = out.presplit_cuts;
    out.cuts.insert(out.cuts.end(), fuzzy_cuts.begin(), fuzzy_cuts.end());
    std::sort(out.cuts.begin(), out.cuts.end());
    std::sort(out.rho_profile.begin(), out.rho_profile.end(),
              [](const candidate_score& a, const candidate_score& b) {
                  return a.column < b.column;
              });

    int start = 1;
    for (int c : out.cuts) {
        out.segments.push_back({start, c - 1});
        start = c;
    }
    out.segments.push_back({start, p.cols});
    return out;
}

/// Materializes the segments as trimmed sub-patterns.
inline std::vector<binary_pattern> slice_segments(const binary_pattern& p,
                                                  const std::vector<int>& cuts) {
    std::vector<binary_pattern> out;
    int start = 1;
    auto emit = [&](int c1, int c2) { out.push_back(trim(slice_columns(p, c1, c2))); };
    for (int c : cuts) {
        emit(start, c - 1);
        start = c;
    }
    emit(start, p.cols);
    return out;
}

}  // namespace fuzzcut
