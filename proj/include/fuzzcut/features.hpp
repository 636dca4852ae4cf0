#pragma once

#include <cmath>
#include <vector>

#include "fuzzcut/raster.hpp"

namespace fuzzcut {

/// Per-column cut features of one pattern. Vectors are stored 0-based;
/// vector index k corresponds to column k+1 in the 1-based convention used
/// by the public interfaces and file outputs.
struct column_features {
    int cols = 0;                     // n
    double center = 0.0;              // c = (n+1)/2, half-integral for even n
    std::vector<int> projection;      // V, black pixels per column
    std::vector<double> fbar;         // normalized center distance, in [0,1]
    std::vector<double> gbar;         // inverted normalized peak-to-valley
    std::vector<double> hbar;         // inverted normalized second difference
    std::vector<double> raw_g;        // unnormalized g, diagnostics
    std::vector<double> raw_h;        // unnormalized h, diagnostics
    std::vector<int> blank_columns;   // 1-based indices with V = 0
    bool g_uninformative = false;     // raw_g constant over the candidates
    bool h_uninformative = false;

    double fbar_col(int i) const { return fbar[i - 1]; }
    double gbar_col(int i) const { return gbar[i - 1]; }
    double hbar_col(int i) const { return hbar[i - 1]; }
    int projection_col(int i) const { return projection[i - 1]; }
};

/// V(i): number of black pixels in each column.
inline std::vector<int> vertical_projection(const binary_pattern& p) {
    std::vector<int> v(p.cols, 0);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c)
            if (p.black(r, c)) ++v[c];
    return v;
}

/// Center column c = (n+1)/2 and the normalized distance |c-i|/c for each
/// column i (1-based). Strictly increasing away from the center.
inline std::pair<double, std::vector<double>> center_feature(int n) {
    if (n < 2) throw error("pattern too narrow");
    double c = (n + 1) / 2.0;
    std::vector<double> fbar(n);
    for (int i = 1; i <= n; ++i) fbar[i - 1] = std::abs(c - i) / c;
    return {c, std::move(fbar)};
}

/// Peak-to-valley score (V(l)-2V(i)+V(r))/(V(i)+1) for interior columns,
/// where l and r are the projection argmax positions strictly left and
/// right of i (ties resolved toward i). Boundary columns get 0.
inline std::vector<double> compute_g(const std::vector<int>& v) {
    int n = static_cast<int>(v.size());
    if (n < 3) throw error("compute_g: need at least 3 columns");
    std::vector<double> g(n, 0.0);
    for (int j = 1; j + 1 < n; ++j) {
        int l = 0;
        for (int k = 1; k < j; ++k)
            if (v[k] >= v[l]) l = k;
        int r = j + 1;
        for (int k = j + 2; k < n; ++k)
            if (v[k] > v[r]) r = k;
        g[j] = static_cast<double>(v[l] - 2 * v[j] + v[r]) / (v[j] + 1);
    }
    return g;
}

/// Discrete second difference (V(i-1)-2V(i)+V(i+1))/V(i) for interior
/// columns. Undefined on blank columns; the segmenter pre-splits so this
/// never sees V(i) = 0.
inline std::vector<double> compute_h(const std::vector<int>& v) {
    int n = static_cast<int>(v.size());
    if (n < 3) throw error("compute_h: need at least 3 columns");
    std::vector<double> h(n, 0.0);
    for (int j = 1; j + 1 < n; ++j) {
        if (v[j] == 0) throw error("blank column reached h");
        h[j] = static_cast<double>(v[j - 1] - 2 * v[j] + v[j + 1]) / v[j];
    }
    return h;
}

/// Min-max normalizes raw over the candidate index set (0-based) and
/// inverts, so the candidate achieving the maximum raw value maps to 0 and
/// the minimum to 1. Values for non-candidate columns are clamped
/// placeholders. A constant raw over the candidates yields all 0.5 and the
/// uninformative flag.
inline std::pair<std::vector<double>, bool> normalize_feature(
    const std::vector<double>& raw, const std::vector<int>& candidates) {
    if (candidates.empty()) throw error("normalize_feature: no candidates");
    double lo = raw[candidates.front()], hi = lo;
    for (int j : candidates) {
        lo = std::min(lo, raw[j]);
        hi = std::max(hi, raw[j]);
    }
    std::vector<double> bar(raw.size(), 0.5);
    if (hi - lo < 1e-12) return {std::move(bar), true};
    for (std::size_t j = 0; j < raw.size(); ++j) {
        double t = (raw[j] - lo) / (hi - lo);
        bar[j] = std::clamp(1.0 - t, 0.0, 1.0);
    }
    return {std::move(bar), false};
}

/// Assembles all per-column features. The candidate set is columns 2..n-1;
/// requires a pattern with no blank columns (pre-split upstream).
inline column_features extract_features(const binary_pattern& p) {
    column_features out;
    out.cols = p.cols;
    out.projection = vertical_projection(p);
    for (int j = 0; j < p.cols; ++j)
        if (out.projection[j] == 0) out.blank_columns.push_back(j + 1);
    if (p.cols < 3) throw error("no candidate columns");
    if (!out.blank_columns.empty()) throw error("blank column reached h");

    auto [c, fbar] = center_feature(p.cols);
    out.center = c;
    out.fbar = std::move(fbar);
    out.raw_g = compute_g(out.projection);
    out.raw_h = compute_h(out.projection);

    std::vector<int> candidates;
    for (int j = 1; j + 1 < p.cols; ++j) candidates.push_back(j);
    auto [gbar, gflat] = normalize_feature(out.raw_g, candidates);
    auto [hbar, hflat] = normalize_feature(out.raw_h, candidates);
    out.gbar = std::move(gbar);
    out.hbar = std::move(hbar);
    out.g_uninformative = gflat;
    out.h_uninformative = hflat;
    return out;
}

/// Horizontal mirror, used by the symmetry tests and the synthesizer.
inline binary_pattern mirror_horizontal(const binary_pattern& p) {
    binary_pattern out = p;
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c)
            out.at(r, c) = p.at(r, p.cols - 1 - c);
    return out;
}

}  // namespace fuzzcut
