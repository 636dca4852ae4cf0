#pragma once

// Test-only helpers and independent oracles. The oracles deliberately use
// different formulas from the library paths they check.

#include <random>
#include <string>
#include <vector>

#include "fuzzcut/features.hpp"
#include "fuzzcut/fis.hpp"
#include "fuzzcut/raster.hpp"

namespace testsupport {

using fuzzcut::binary_pattern;
using fuzzcut::gray_image;

/// Brute-force Otsu oracle: minimizes total within-class variance over all
/// 256 thresholds using exact integer arithmetic on sums of squares (the
/// implementation maximizes between-class variance and never touches the
/// squared-intensity moments). Ties break toward the lowest threshold.
inline int otsu_within_class_oracle(const gray_image& img) {
    long long count[256] = {}, sum[256] = {}, sumsq[256] = {};
    for (auto v : img.pixels) {
        count[v]++;
        sum[v] += v;
        sumsq[v] += static_cast<long long>(v) * v;
    }
    long long n = static_cast<long long>(img.pixels.size());
    long long total_sum = 0, total_sq = 0;
    for (int v = 0; v < 256; ++v) {
        total_sum += sum[v];
        total_sq += sumsq[v];
    }

    // within-class variance at t, as an exact fraction num/(n0*n1):
    //   [(n0*q0 - s0^2)*n1 + (n1*q1 - s1^2)*n0] / (n0*n1)
    int best_t = -1;
    __int128 best_num = 0;
    long long best_den = 1;
    long long n0 = 0, s0 = 0, q0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += count[t];
        s0 += sum[t];
        q0 += sumsq[t];
        long long n1 = n - n0;
        if (n0 == 0 || n1 == 0) continue;
        long long s1 = total_sum - s0, q1 = total_sq - q0;
        __int128 num = (static_cast<__int128>(n0) * q0 - static_cast<__int128>(s0) * s0) * n1 +
                       (static_cast<__int128>(n1) * q1 - static_cast<__int128>(s1) * s1) * n0;
        long long den = n0 * n1;
        if (best_t < 0 || num * best_den < best_num * den) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    if (best_t < 0) {  // constant image: only one occupied bin
        for (int v = 0; v < 256; ++v)
            if (count[v]) return v;
    }
    return best_t;
}

/// Independent best-cut scan: scores every candidate column and applies the
/// tie rule directly. Shares only the fis engine with the segmenter.
inline int best_cut_scan_oracle(const binary_pattern& p,
                                const fuzzcut::mamdani_engine& engine) {
    auto feats = fuzzcut::extract_features(p);
    int best = -1;
    double best_rho = 0, best_fbar = 0;
    for (int i = 2; i <= p.cols - 1; ++i) {
        double rho =
            engine.evaluate(feats.fbar_col(i), feats.gbar_col(i), feats.hbar_col(i))
                .value;
        bool better = best < 0 || rho < best_rho ||
                      (rho == best_rho && (feats.fbar_col(i) < best_fbar ||
                                           (feats.fbar_col(i) == best_fbar && i < best)));
        if (better) {
            best = i;
            best_rho = rho;
            best_fbar = feats.fbar_col(i);
        }
    }
    return best;
}

/// Builds a pattern from rows of '0' (black) and '1' (white).
inline binary_pattern pattern_of(const std::vector<std::string>& rows) {
    int m = static_cast<int>(rows.size());
    int n = static_cast<int>(rows.front().size());
    std::vector<std::uint8_t> cells;
    for (const auto& row : rows)
        for (char ch : row) cells.push_back(static_cast<std::uint8_t>(ch - '0'));
    return binary_pattern(m, n, std::move(cells));
}

/// Random pattern with at least one black pixel per column (no blanks),
/// trimmed. Wide enough for feature extraction.
inline binary_pattern random_dense_pattern(std::mt19937_64& rng, int max_rows = 20,
                                           int max_cols = 40) {
    int m = 3 + static_cast<int>(rng() % (max_rows - 2));
    int n = 3 + static_cast<int>(rng() % (max_cols - 2));
    binary_pattern p = binary_pattern::white(m, n);
    for (int c = 0; c < n; ++c) {
        int forced = static_cast<int>(rng() % m);
        p.at(forced, c) = 0;
        for (int r = 0; r < m; ++r)
            if (rng() % 100 < 30) p.at(r, c) = 0;
    }
    return fuzzcut::trim(p);
}

/// Random pattern that may contain blank columns.
inline binary_pattern random_sparse_pattern(std::mt19937_64& rng,
                                            int max_rows = 16, int max_cols = 40) {
    int m = 3 + static_cast<int>(rng() % (max_rows - 2));
    int n = 4 + static_cast<int>(rng() % (max_cols - 3));
    binary_pattern p = binary_pattern::white(m, n);
    bool any = false;
    for (int c = 0; c < n; ++c) {
        if (rng() % 100 < 25) continue;  // blank column
        int forced = static_cast<int>(rng() % m);
        p.at(forced, c) = 0;
        any = true;
    }
    if (!any) p.at(0, 0) = p.at(m - 1, n - 1) = 0;
    return fuzzcut::trim(p);
}

inline gray_image random_gray(std::mt19937_64& rng, int w, int h) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
    for (auto& v : px) v = static_cast<std::uint8_t>(rng() % 256);
    return gray_image(w, h, std::move(px));
}

/// Published per-column feature table of a 21-column machine-printed
/// touching pair, with the reference fuzzy scores: column, fbar, gbar,
/// hbar, rho.
struct reference_row {
    int column;
    double fbar, gbar, hbar, rho;
};

inline const std::vector<reference_row>& reference_table() {
    static const std::vector<reference_row> rows = {
        {2, 0.8182, 0.4545, 0.7778, 0.7849},  {3, 0.7273, 0.6818, 0.8333, 0.8123},
        {4, 0.6364, 0.8409, 0.9167, 0.7908},  {5, 0.5455, 0.8523, 0.9111, 0.8073},
        {6, 0.4545, 0.8333, 0.9333, 0.8102},  {7, 0.3636, 0.6818, 0.8148, 0.7949},
        {8, 0.2727, 0.6818, 0.8889, 0.8047},  {9, 0.1818, 0.6818, 0.9259, 0.8169},
        {10, 0.0909, 0.5303, 0.8889, 0.8169}, {11, 0.0, 0.2273, 0.7778, 0.1984},
        {12, 0.0909, 0.2273, 0.8889, 0.1924}, {13, 0.1818, 0.2273, 0.1111, 0.2078},
        {14, 0.2727, 0.9343, 0.9722, 0.8047}, {15, 0.3636, 0.9205, 1.0, 0.7949},
        {16, 0.4545, 0.0, 0.0, 0.5000},       {17, 0.5455, 0.0, 0.7778, 0.6305},
        {18, 0.6364, 0.3788, 0.9556, 0.7302}, {19, 0.7273, 0.9091, 0.9753, 0.8123},
        {20, 0.8182, 1.0, 0.9877, 0.8169},
    };
    return rows;
}

}  // namespace testsupport
