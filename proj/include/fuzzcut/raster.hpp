#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fuzzcut {

/// Base class for all domain errors raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by the file loaders; carries the byte offset of the first bad byte.
struct parse_error : error {
    parse_error(const std::string& what, std::size_t byte_offset)
        : error(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::size_t offset;
};

/// 8-bit grayscale image, row-major.
struct gray_image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    gray_image() = default;
    gray_image(int w, int h, std::vector<std::uint8_t> px)
        : width(w), height(h), pixels(std::move(px)) {
        if (w < 1 || h < 1)
            throw error("gray_image: dimensions must be positive");
        if (pixels.size() != static_cast<std::size_t>(w) * h)
            throw error("gray_image: pixel count does not match dimensions");
    }

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
};

/// Bilevel pattern. Cell value 0 is black (foreground), 1 is white.
struct binary_pattern {
    int rows = 0;  // m
    int cols = 0;  // n
    std::vector<std::uint8_t> cells;

    binary_pattern() = default;
    binary_pattern(int m, int n, std::vector<std::uint8_t> c)
        : rows(m), cols(n), cells(std::move(c)) {
        if (m < 1 || n < 1)
            throw error("binary_pattern: dimensions must be positive");
        if (cells.size() != static_cast<std::size_t>(m) * n)
            throw error("binary_pattern: cell count does not match dimensions");
    }

    static binary_pattern white(int m, int n) {
        return binary_pattern(m, n, std::vector<std::uint8_t>(
                                        static_cast<std::size_t>(m) * n, 1));
    }

    std::uint8_t at(int row, int col) const {
        return cells[static_cast<std::size_t>(row) * cols + col];
    }
    std::uint8_t& at(int row, int col) {
        return cells[static_cast<std::size_t>(row) * cols + col];
    }
    bool black(int row, int col) const { return at(row, col) == 0; }

    bool operator==(const binary_pattern& o) const = default;
};

/// Standard luminance weighting, rounded to nearest integer.
inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    double y = 0.299 * r + 0.587 * g + 0.114 * b;
    int v = static_cast<int>(y + 0.5);
    return static_cast<std::uint8_t>(std::min(v, 255));
}

namespace detail {

// Exact fraction compare a1^2/b1 > a2^2/b2 with non-negative b. Falls back to
// long double when the cross products would overflow 128 bits.
inline bool sq_frac_greater(long long a1, long long b1, long long a2, long long b2) {
    const long long CAP = 3000000000LL;  // a^2 < 9e18, product with b needs care
    if (a1 < CAP && a1 > -CAP && a2 < CAP && a2 > -CAP && b1 < CAP && b2 < CAP) {
        __int128 lhs = static_cast<__int128>(a1) * a1 * b2;
        __int128 rhs = static_cast<__int128>(a2) * a2 * b1;
        return lhs > rhs;
    }
    long double lhs = static_cast<long double>(a1) * a1 / b1;
    long double rhs = static_cast<long double>(a2) * a2 / b2;
    return lhs > rhs;
}

}  // namespace detail

/// Otsu's threshold: maximizes between-class variance over the 256-bin
/// histogram. Ties break toward the lowest threshold. A constant image
/// yields that constant intensity. Integer arithmetic keeps the argmax
/// exact for any realistic image size.
inline int otsu_threshold(const gray_image& img) {
    long long counts[256] = {};
    for (std::uint8_t v : img.pixels) counts[v]++;

    const long long n = static_cast<long long>(img.pixels.size());
    long long total_sum = 0;
    for (int v = 0; v < 256; ++v) total_sum += v * counts[v];

    int lo = 0, hi = 255;
    while (counts[lo] == 0) ++lo;
    while (counts[hi] == 0) --hi;
    if (lo == hi) return lo;  // constant image

    // between-class variance at t is proportional to
    // (sum0*n - total_sum*n0)^2 / (n0*(n-n0))
    int best_t = -1;
    long long best_a = 0, best_b = 1;
    long long n0 = 0, sum0 = 0;
    for (int t = lo; t < hi; ++t) {
        n0 += counts[t];
        sum0 += static_cast<long long>(t) * counts[t];
        long long a = sum0 * n - total_sum * n0;
        long long b = n0 * (n - n0);
        if (best_t < 0 || detail::sq_frac_greater(a, b, best_a, best_b)) {
            best_t = t;
            best_a = a;
            best_b = b;
        }
    }
    return best_t;
}

/// Pixels at or below the threshold become black (0), all others white (1).
inline binary_pattern binarize(const gray_image& img, int threshold) {
    std::vector<std::uint8_t> cells(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        cells[i] = img.pixels[i] <= threshold ? 0 : 1;
    return binary_pattern(img.height, img.width, std::move(cells));
}

/// Removes all-white border rows and columns. The result has a black pixel
/// in its first and last row and column.
inline binary_pattern trim(const binary_pattern& p) {
    int top = -1, bottom = -1, left = p.cols, right = -1;
    for (int r = 0; r < p.rows; ++r) {
        for (int c = 0; c < p.cols; ++c) {
            if (!p.black(r, c)) continue;
            if (top < 0) top = r;
            bottom = r;
            left = std::min(left, c);
            right = std::max(right, c);
        }
    }
    if (top < 0) throw error("empty pattern");
    int m = bottom - top + 1, n = right - left + 1;
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(m) * n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c)
            cells[static_cast<std::size_t>(r) * n + c] = p.at(top + r, left + c);
    return binary_pattern(m, n, std::move(cells));
}

// ---------------------------------------------------------------------------
// File formats: plain pattern text, PBM P1/P4, PGM P2/P5, PPM P3/P6.
// ---------------------------------------------------------------------------

enum class pattern_format { text, pbm_ascii, pbm_binary };

namespace detail {

struct byte_reader {
    explicit byte_reader(std::istream& s) : in(s) {}
    std::istream& in;
    std::size_t pos = 0;

    int get() {
        int ch = in.get();
        if (ch != EOF) ++pos;
        return ch;
    }
    int peek() { return in.peek(); }

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error(what, pos);
    }

    // whitespace and '#'-comments, netpbm style
    void skip_space_comments() {
        for (;;) {
            int ch = peek();
            if (ch == '#') {
                while (ch != EOF && ch != '\n') ch = get();
            } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
                get();
            } else {
                return;
            }
        }
    }

    long read_uint(const char* what) {
        skip_space_comments();
        int ch = peek();
        if (ch < '0' || ch > '9') fail(std::string("expected ") + what);
        long v = 0;
        while (ch >= '0' && ch <= '9') {
            get();
            v = v * 10 + (ch - '0');
            if (v > 1000000000L) fail(std::string(what) + " out of range");
            ch = peek();
        }
        return v;
    }
};

inline gray_image read_pnm_gray(byte_reader& r, char kind) {
    long w = r.read_uint("width");
    long h = r.read_uint("height");
    if (w < 1 || h < 1) r.fail("dimensions must be positive");
    long maxval = 255;
    if (kind != '1' && kind != '4') {
        maxval = r.read_uint("maxval");
        if (maxval < 1 || maxval > 255) r.fail("unsupported maxval");
    }
    std::vector<std::uint8_t> px;
    px.reserve(static_cast<std::size_t>(w) * h);
    auto read_sample_ascii = [&]() -> std::uint8_t {
        long v = r.read_uint("sample");
        if (v > maxval) r.fail("sample exceeds maxval");
        return static_cast<std::uint8_t>(v);
    };
    auto read_sample_raw = [&]() -> std::uint8_t {
        int ch = r.get();
        if (ch == EOF) r.fail("truncated raster");
        if (ch > maxval) r.fail("sample exceeds maxval");
        return static_cast<std::uint8_t>(ch);
    };
    switch (kind) {
        case '2':
            for (long i = 0; i < w * h; ++i) px.push_back(read_sample_ascii());
            break;
        case '5': {
            int ch = r.get();  // single whitespace after maxval
            if (ch == EOF) r.fail("truncated raster");
            for (long i = 0; i < w * h; ++i) px.push_back(read_sample_raw());
            break;
        }
        case '3':
            for (long i = 0; i < w * h; ++i) {
                std::uint8_t rv = read_sample_ascii(), gv = read_sample_ascii(),
                             bv = read_sample_ascii();
                px.push_back(luminance(rv, gv, bv));
            }
            break;
        case '6': {
            int ch = r.get();
            if (ch == EOF) r.fail("truncated raster");
            for (long i = 0; i < w * h; ++i) {
                std::uint8_t rv = read_sample_raw(), gv = read_sample_raw(),
                             bv = read_sample_raw();
                px.push_back(luminance(rv, gv, bv));
            }
            break;
        }
        default:
            r.fail("unsupported PNM kind");
    }
    return gray_image(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

// PBM stores 1 = black; cells store 0 = black.
inline binary_pattern read_pbm(byte_reader& r, char kind) {
    long w = r.read_uint("width");
    long h = r.read_uint("height");
    if (w < 1 || h < 1) r.fail("dimensions must be positive");
    std::vector<std::uint8_t> cells;
    cells.reserve(static_cast<std::size_t>(w) * h);
    if (kind == '1') {
        for (long i = 0; i < w * h; ++i) {
            r.skip_space_comments();
            int ch = r.get();
            if (ch == EOF) r.fail("truncated raster");
            if (ch != '0' && ch != '1') r.fail("illegal bit");
            cells.push_back(ch == '1' ? 0 : 1);
        }
    } else {  // P4: rows padded to whole bytes, MSB first
        int ch = r.get();
        if (ch == EOF) r.fail("truncated raster");
        long row_bytes = (w + 7) / 8;
        for (long row = 0; row < h; ++row) {
            for (long b = 0; b < row_bytes; ++b) {
                int byte = r.get();
                if (byte == EOF) r.fail("truncated raster");
                for (int bit = 0; bit < 8; ++bit) {
                    long col = b * 8 + bit;
                    if (col >= w) break;
                    cells.push_back((byte >> (7 - bit)) & 1 ? 0 : 1);
                }
            }
        }
    }
    return binary_pattern(static_cast<int>(h), static_cast<int>(w),
                          std::move(cells));
}

// Plain pattern text: first line "m n", then m rows of n characters
// from {0,1}, 0 = black.
inline binary_pattern read_pattern_text(byte_reader& r) {
    long m = r.read_uint("row count");
    long n = r.read_uint("column count");
    if (m < 1 || n < 1) r.fail("dimensions must be positive");
    std::vector<std::uint8_t> cells;
    cells.reserve(static_cast<std::size_t>(m) * n);
    for (long row = 0; row < m; ++row) {
        r.skip_space_comments();
        for (long col = 0; col < n; ++col) {
            int ch = r.get();
            if (ch == EOF) r.fail("truncated pattern");
            if (ch != '0' && ch != '1') r.fail("illegal symbol");
            cells.push_back(static_cast<std::uint8_t>(ch - '0'));
        }
    }
    return binary_pattern(static_cast<int>(m), static_cast<int>(n),
                          std::move(cells));
}

inline std::ifstream open_or_throw(const std::string& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw error("cannot open file: " + path);
    return in;
}

}  // namespace detail

/// Loads a grayscale image from PGM (P2/P5) or PPM (P3/P6, via luminance).
inline gray_image load_gray(const std::string& path) {
    auto in = detail::open_or_throw(path, true);
    detail::byte_reader r(in);
    int p = r.get(), kind = r.get();
    if (p != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6'))
        r.fail("not a PGM/PPM file");
    return detail::read_pnm_gray(r, static_cast<char>(kind));
}

/// Loads a bilevel pattern; sniffs PBM (P1/P4) versus plain pattern text.
inline binary_pattern load_pattern(const std::string& path) {
    auto in = detail::open_or_throw(path, true);
    detail::byte_reader r(in);
    int first = r.peek();
    if (first == 'P') {
        r.get();
        int kind = r.get();
        if (kind != '1' && kind != '4') r.fail("not a PBM file");
        return detail::read_pbm(r, static_cast<char>(kind));
    }
    return detail::read_pattern_text(r);
}

inline binary_pattern parse_pattern_text(const std::string& text) {
    std::istringstream in(text);
    detail::byte_reader r(in);
    return detail::read_pattern_text(r);
}

inline std::string pattern_to_text(const binary_pattern& p) {
    std::string out = std::to_string(p.rows) + " " + std::to_string(p.cols) + "\n";
    for (int r = 0; r < p.rows; ++r) {
        for (int c = 0; c < p.cols; ++c) out += static_cast<char>('0' + p.at(r, c));
        out += '\n';
    }
    return out;
}

inline void write_pattern(const std::string& path, const binary_pattern& p,
                          pattern_format fmt = pattern_format::text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write file: " + path);
    switch (fmt) {
        case pattern_format::text:
            out << pattern_to_text(p);
            break;
        case pattern_format::pbm_ascii: {
            out << "P1\n" << p.cols << " " << p.rows << "\n";
            int line = 0;
            for (int r = 0; r < p.rows; ++r)
                for (int c = 0; c < p.cols; ++c) {
                    out << (p.black(r, c) ? '1' : '0');
                    if (++line == 64) { out << '\n'; line = 0; }
                }
            if (line) out << '\n';
            break;
        }
        case pattern_format::pbm_binary: {
            out << "P4\n" << p.cols << " " << p.rows << "\n";
            int row_bytes = (p.cols + 7) / 8;
            for (int r = 0; r < p.rows; ++r) {
                for (int b = 0; b < row_bytes; ++b) {
                    int byte = 0;
                    for (int bit = 0; bit < 8; ++bit) {
                        int c = b * 8 + bit;
                        if (c < p.cols && p.black(r, c)) byte |= 1 << (7 - bit);
                    }
                    out.put(static_cast<char>(byte));
                }
            }
            break;
        }
    }
    if (!out) throw error("write failed: " + path);
}

}  // namespace fuzzcut
