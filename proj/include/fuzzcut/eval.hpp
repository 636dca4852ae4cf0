#pragma once

#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzcut/segmenter.hpp"
#include "fuzzcut/synth.hpp"

namespace fuzzcut {

struct sample_score {
    bool exact = false;
    bool within_k = false;
    bool count_mismatch = false;
};

/// Exact requires elementwise equality; within-k pairs the cut lists in
/// order and requires every distance <= k. A cut-count mismatch scores
/// false on both metrics.
inline sample_score score_sample(const std::vector<int>& chosen,
                                 const std::vector<int>& truth, int k) {
    sample_score s;
    if (chosen.size() != truth.size()) {
        s.count_mismatch = true;
        return s;
    }
    s.exact = chosen == truth;
    s.within_k = true;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (std::abs(chosen[i] - truth[i]) > k) s.within_k = false;
    return s;
}

struct eval_failure {
    std::string sample;
    std::vector<int> chosen;
    std::vector<int> truth;
    std::string reason;  // empty for plain misses
};

struct size_breakdown {
    int total = 0;
    int exact = 0;
    int within_k = 0;
};

struct eval_report {
    int total = 0;
    int exact_hits = 0;
    int within_k_hits = 0;
    int k = 5;
    bool used_truth_char_count = false;
    std::map<int, size_breakdown> per_size;  // keyed by character count
    std::vector<eval_failure> failures;      // every non-exact sample, sorted

    bool operator==(const eval_report&) const = default;
};

inline bool operator==(const eval_failure& a, const eval_failure& b) {
    return a.sample == b.sample && a.chosen == b.chosen && a.truth == b.truth &&
           a.reason == b.reason;
}
inline bool operator==(const size_breakdown& a, const size_breakdown& b) {
    return a.total == b.total && a.exact == b.exact && a.within_k == b.within_k;
}

/// Runs the segmenter over every descriptor of a dataset directory.
/// expected_chars is taken from the descriptor iff use_truth_char_count.
/// Samples whose image is missing or unreadable count as failures with a
/// reason. Deterministic: samples processed in sorted order.
inline eval_report evaluate_dataset(const std::string& dir,
                                    const mamdani_engine& engine, int k,
                                    bool use_truth_char_count) {
    namespace fs = std::filesystem;
    auto samples = load_dataset(dir);
    if (samples.empty()) throw error("dataset has no descriptors");
    std::sort(samples.begin(), samples.end(),
              [](const sample_descriptor& a, const sample_descriptor& b) {
                  return a.image < b.image;
              });

    eval_report rep;
    rep.k = k;
    rep.used_truth_char_count = use_truth_char_count;
    for (const auto& d : samples) {
        ++rep.total;
        int nchars = static_cast<int>(d.chars.size());
        auto& bucket = rep.per_size[nchars];
        ++bucket.total;

        binary_pattern image;
        try {
            image = load_pattern((fs::path(dir) / d.image).string());
        } catch (const error& e) {
            rep.failures.push_back({d.image, {}, d.cuts, e.what()});
            continue;
        }

        std::optional<int> expected;
        if (use_truth_char_count) expected = nchars;
        auto result = segment_pattern(image, engine, expected);
        auto s = score_sample(result.cuts, d.cuts, k);
        if (s.exact) {
            ++rep.exact_hits;
            ++bucket.exact;
        }
        if (s.within_k) {
            ++rep.within_k_hits;
            ++bucket.within_k;
        }
        if (!s.exact) {
            rep.failures.push_back(
                {d.image, result.cuts, d.cuts,
                 s.count_mismatch ? "cut count mismatch" : ""});
        }
    }
    std::sort(rep.failures.begin(), rep.failures.end(),
              [](const eval_failure& a, const eval_failure& b) {
                  return a.sample < b.sample;
              });
    return rep;
}

inline nlohmann::json report_to_json(const eval_report& r) {
    nlohmann::json per_size = nlohmann::json::object();
    for (const auto& [chars, b] : r.per_size)
        per_size[std::to_string(chars)] = {
            {"total", b.total}, {"exact", b.exact}, {"within_k", b.within_k}};
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : r.failures)
        failures.push_back({{"sample", f.sample},
                            {"chosen", f.chosen},
                            {"truth", f.truth},
                            {"reason", f.reason}});
    return {{"total", r.total},
            {"exact_hits", r.exact_hits},
            {"within_k_hits", r.within_k_hits},
            {"k", r.k},
            {"used_truth_char_count", r.used_truth_char_count},
            {"per_size", per_size},
            {"failures", failures}};
}

inline eval_report report_from_json(const nlohmann::json& j) {
    eval_report r;
    try {
        r.total = j.at("total").get<int>();
        r.exact_hits = j.at("exact_hits").get<int>();
        r.within_k_hits = j.at("within_k_hits").get<int>();
        r.k = j.at("k").get<int>();
        r.used_truth_char_count = j.at("used_truth_char_count").get<bool>();
        for (const auto& [key, jb] : j.at("per_size").items())
            r.per_size[std::stoi(key)] = {jb.at("total").get<int>(),
                                          jb.at("exact").get<int>(),
                                          jb.at("within_k").get<int>()};
        for (const auto& jf : j.at("failures"))
            r.failures.push_back({jf.at("sample").get<std::string>(),
                                  jf.at("chosen").get<std::vector<int>>(),
                                  jf.at("truth").get<std::vector<int>>(),
                                  jf.at("reason").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        throw error(std::string("report schema error: ") + e.what());
    }
    return r;
}

inline void print_report(std::ostream& out, const eval_report& r) {
    auto pct = [](int hits, int total) {
        return total ? 100.0 * hits / total : 0.0;
    };
    out << "samples:       " << r.total << "\n";
    out << std::fixed << std::setprecision(1);
    out << "exact:         " << r.exact_hits << " (" << pct(r.exact_hits, r.total)
        << "%)\n";
    out << "within-" << r.k << ":      " << r.within_k_hits << " ("
        << pct(r.within_k_hits, r.total) << "%)\n";
    for (const auto& [chars, b] : r.per_size)
        out << "  " << chars << "-char:      " << b.total << " samples, exact "
            << b.exact << ", within-" << r.k << " " << b.within_k << "\n";
    out << "failures:      " << r.failures.size() << "\n";
}

}  // namespace fuzzcut
