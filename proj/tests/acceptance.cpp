// Acceptance suite: one pass/fail line per criterion. Run with no arguments
// for activating all criteria, or pass an index (1..8) for a single one.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fuzzcut/cli.hpp"
#include "fuzzcut/eval.hpp"
#include "fuzzcut/features.hpp"
#include "fuzzcut/fis.hpp"
#include "fuzzcut/raster.hpp"
#include "fuzzcut/segmenter.hpp"
#include "fuzzcut/synth.hpp"
#include "fuzzcut/tuner.hpp"
#include "support.hpp"

using namespace fuzzcut;
namespace fs = std::filesystem;

namespace {

const std::string glyph_fixtures = FUZZCUT_FIXTURE_DIR "/glyphs";

struct outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("fuzzcut_accept_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// --- criterion 1: reference-table replay -----------------------------------

outcome table_replay() {
    outcome res;
    mamdani_engine engine(builtin_profile(profile::B));
    double min_rho = 2.0;
    int argmin = -1;
    std::vector<std::pair<int, double>> rhos;
    double worst = 0.0;
    for (const auto& row : testsupport::reference_table()) {
        double rho = engine.evaluate(row.fbar, row.gbar, row.hbar).value;
        rhos.push_back({row.column, rho});
        worst = std::max(worst, std::abs(rho - row.rho));
        if (row.column == 16)
            res.require(std::abs(rho - 0.5000) <= 0.01, "column 16 off 0.5000");
        if (row.column == 2)
            res.require(std::abs(rho - 0.7849) <= 0.06, "column 2 off 0.7849");
        if (row.column == 12)
            res.require(std::abs(rho - 0.1924) <= 0.06, "column 12 off 0.1924");
        res.require(std::abs(rho - row.rho) <= 0.06,
                    "column " + std::to_string(row.column) + " off by " +
                        std::to_string(std::abs(rho - row.rho)));
        if (rho < min_rho) {
            min_rho = rho;
            argmin = row.column;
        }
    }
    res.require(argmin == 11 || argmin == 12 || argmin == 13,
                "argmin at column " + std::to_string(argmin));
    for (auto [col, rho] : rhos)
        if (col != 11 && col != 12 && col != 13)
            res.require(rho > min_rho,
                        "column " + std::to_string(col) + " does not exceed min");
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst row error %.4f", worst);
    res.note(buf);
    return res;
}

// --- criterion 2: defuzzification resolution oracle -------------------------

outcome defuzz_resolution() {
    outcome res;
    double worst = 0.0;
    for (auto which : {profile::A, profile::B}) {
        auto coarse_cfg = builtin_profile(which);
        auto fine_cfg = coarse_cfg;
        fine_cfg.resolution = 10001;
        mamdani_engine coarse(coarse_cfg), fine(fine_cfg);
        for (int fi = 0; fi < 20; ++fi)
            for (int gi = 0; gi < 20; ++gi)
                for (int hi = 0; hi < 20; ++hi) {
                    double f = fi / 19.0, g = gi / 19.0, h = hi / 19.0;
                    double delta = std::abs(coarse.evaluate(f, g, h).value -
                                            fine.evaluate(f, g, h).value);
                    worst = std::max(worst, delta);
                }
    }
    res.require(worst < 1e-3, "resolution disagreement " + std::to_string(worst));
    char buf[64];
    std::snprintf(buf, sizeof buf, "max disagreement %.2e", worst);
    res.note(buf);
    return res;
}

// --- criterion 3: Otsu against the within-class oracle ----------------------

outcome otsu_oracle() {
    outcome res;
    std::mt19937_64 rng(9001);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto img = testsupport::random_gray(rng, 32, 32);
        int impl = otsu_threshold(img);
        int oracle = testsupport::otsu_within_class_oracle(img);
        if (impl != oracle) {
            res.require(false, "mismatch on trial " + std::to_string(trial) +
                                   " (" + std::to_string(impl) + " vs " +
                                   std::to_string(oracle) + ")");
            break;
        }
        ++checked;
    }
    gray_image constant(4, 4, std::vector<std::uint8_t>(16, 123));
    res.require(otsu_threshold(constant) == 123, "constant image");
    res.require(testsupport::otsu_within_class_oracle(constant) == 123,
                "constant image oracle");
    res.note(std::to_string(checked) + " random images matched exactly");
    return res;
}

// --- criterion 4: feature invariants ----------------------------------------

outcome feature_invariants() {
    outcome res;
    std::mt19937_64 rng(424242);
    int mirrored = 0;
    for (int trial = 0; trial < 500 && res.pass; ++trial) {
        auto p = testsupport::random_dense_pattern(rng);
        auto feats = extract_features(p);
        double glo = 2, ghi = -1, hlo = 2, hhi = -1;
        for (int i = 1; i <= p.cols; ++i) {
            bool in_range = feats.fbar_col(i) >= 0 && feats.fbar_col(i) <= 1 &&
                            feats.gbar_col(i) >= 0 && feats.gbar_col(i) <= 1 &&
                            feats.hbar_col(i) >= 0 && feats.hbar_col(i) <= 1;
            res.require(in_range, "bar outside [0,1] at trial " +
                                      std::to_string(trial));
            if (i >= 2 && i <= p.cols - 1) {
                glo = std::min(glo, feats.gbar_col(i));
                ghi = std::max(ghi, feats.gbar_col(i));
                hlo = std::min(hlo, feats.hbar_col(i));
                hhi = std::max(hhi, feats.hbar_col(i));
            }
        }
        if (!feats.g_uninformative)
            res.require(glo == 0.0 && ghi == 1.0, "gbar extremes not {0,1}");
        if (!feats.h_uninformative)
            res.require(hlo == 0.0 && hhi == 1.0, "hbar extremes not {0,1}");

        // affine invariance of the normalizer on this pattern's raw g
        std::vector<int> candidates;
        for (int j = 1; j + 1 < p.cols; ++j) candidates.push_back(j);
        std::vector<double> mapped(feats.raw_g.size());
        for (std::size_t j = 0; j < mapped.size(); ++j)
            mapped[j] = 3.25 * feats.raw_g[j] - 1.5;
        auto [bar2, flat2] = normalize_feature(mapped, candidates);
        for (std::size_t j = 0; j < mapped.size(); ++j)
            res.require(std::abs(bar2[j] - feats.gbar[j]) < 1e-9,
                        "affine invariance violated");

        // mirror symmetry of fbar
        auto flipped = extract_features(mirror_horizontal(p));
        for (int i = 1; i <= p.cols; ++i)
            res.require(feats.fbar_col(i) == flipped.fbar[p.cols - i],
                        "fbar mirror violated");
        ++mirrored;
    }

    // h is never evaluated on a blank column: presplit blocks are dense,
    // and extract refuses blanks outright
    for (int trial = 0; trial < 100 && res.pass; ++trial) {
        auto p = testsupport::random_sparse_pattern(rng);
        auto pre = presplit(p);
        for (auto [c1, c2] : pre.blocks) {
            auto block = slice_columns(p, c1, c2);
            auto v = vertical_projection(block);
            for (int j = 0; j < block.cols; ++j)
                res.require(v[j] >= 1, "presplit block has a blank column");
        }
    }
    bool threw = false;
    try {
        extract_features(testsupport::pattern_of({"010", "010"}));
    } catch (const error&) {
        threw = true;
    }
    res.require(threw, "extract accepted a blank column");
    res.note(std::to_string(mirrored) + " patterns checked");
    return res;
}

// --- criterion 5: segmenter equals the exhaustive oracle --------------------

outcome segmenter_oracle() {
    outcome res;
    mamdani_engine engine(builtin_profile(profile::B));
    std::mt19937_64 rng(777777);
    int agreed = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto p = testsupport::random_dense_pattern(rng);
        auto [col, profile_scores] = best_cut(p, engine);
        int oracle = testsupport::best_cut_scan_oracle(p, engine);
        if (col != oracle) {
            res.require(false, "disagreement on trial " + std::to_string(trial));
            break;
        }
        ++agreed;
    }
    res.note(std::to_string(agreed) + " patterns matched the scan");
    return res;
}

// --- criterion 6: end-to-end synthetic accuracy ------------------------------

outcome end_to_end() {
    outcome res;
    auto dir = fresh_dir("e2e");
    synth_params params;
    params.glyph_dir = glyph_fixtures;
    params.out_dir = dir.string();
    params.count = 120;
    params.max_chars = 2;
    params.two_char_fraction = 1.0;
    params.seed = 7;
    auto stats = generate_dataset(params);
    res.require(stats.written >= 100,
                "only " + std::to_string(stats.written) + " samples generated");

    mamdani_engine engine(builtin_profile(profile::B));
    auto report = evaluate_dataset(dir.string(), engine, 2, true);
    double within = static_cast<double>(report.within_k_hits) / report.total;
    res.require(within >= 0.80, "within-2 accuracy below the floor");
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "within-2 accuracy %.1f%% (%d/%d), exact %.1f%%",
                  100.0 * within, report.within_k_hits, report.total,
                  100.0 * report.exact_hits / report.total);
    res.note(buf);
    fs::remove_all(dir);
    return res;
}

// --- criterion 7: PSO behavior ----------------------------------------------

outcome pso_behavior() {
    outcome res;
    breakpoint_codec codec(builtin_profile(profile::B));
    auto center = codec.encode(codec.base());

    // sphere surrogate over the breakpoint vector, stated budget
    auto sphere = [&](const std::vector<double>& x) {
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += (x[i] - center[i]) * (x[i] - center[i]);
        return -s;
    };
    pso_options opt;
    opt.swarm = 30;
    opt.iters = 100;
    opt.seed = 42;
    auto run = pso_maximize(
        32, sphere,
        [&](std::vector<double> x) { return codec.repair(std::move(x)); }, opt);
    double linf = 0;
    for (std::size_t i = 0; i < center.size(); ++i)
        linf = std::max(linf, std::abs(run.best_position[i] - center[i]));
    char buf[96];
    std::snprintf(buf, sizeof buf, "sphere distance %.2e after %d iterations",
                  linf, opt.iters);
    res.note(buf);
    res.require(linf <= 1e-3, "sphere optimum not reached at the stated budget");

    for (std::size_t i = 1; i < run.history.size(); ++i)
        res.require(run.history[i] >= run.history[i - 1],
                    "history not monotone");

    std::mt19937_64 rng(31415);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x(32);
        for (auto& v : x) v = -0.5 + 2.0 * ((rng() % 10001) / 10000.0);
        auto r1 = codec.repair(x);
        if (codec.repair(r1) != r1) {
            res.require(false, "repair not idempotent");
            break;
        }
    }

    auto dir = fresh_dir("pso_tune");
    synth_params sp;
    sp.glyph_dir = glyph_fixtures;
    sp.out_dir = dir.string();
    sp.count = 14;
    sp.two_char_fraction = 1.0;
    sp.seed = 13;
    generate_dataset(sp);
    auto samples = load_samples(dir.string());
    tune_params tp;
    tp.swarm = 8;
    tp.iters = 5;
    tp.seed = 3;
    auto report = pso_tune(builtin_profile(profile::B), samples, tp);
    res.require(
        report.best_train.exact_accuracy >= report.base_train.exact_accuracy,
        "tuning regressed below the base profile");
    fs::remove_all(dir);
    return res;
}

// --- criterion 8: determinism ------------------------------------------------

outcome determinism() {
    outcome res;
    auto root = fresh_dir("determinism");

    auto run_synth = [&](const std::string& name) {
        std::ostringstream out, err;
        int code = cli::run({"synth", "--glyphs", glyph_fixtures, "--out",
                             (root / name).string(), "--count", "10", "--seed",
                             "5"},
                            out, err);
        res.require(code == 0, "synth exited " + std::to_string(code));
    };
    run_synth("s1");
    run_synth("s2");
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(root / "s1")) {
        auto twin = root / "s2" / entry.path().filename();
        res.require(fs::exists(twin), "missing twin file");
        if (fs::exists(twin))
            res.require(read_file(entry.path()) == read_file(twin),
                        "synth artifacts differ: " +
                            entry.path().filename().string());
        ++compared;
    }
    res.require(compared > 10, "too few artifacts compared");

    auto run_tune = [&](const std::string& name) {
        std::ostringstream out, err;
        int code = cli::run({"tune", "--dataset", (root / "s1").string(),
                             "--base", "B", "--out", (root / name).string(),
                             "--swarm", "5", "--iters", "3", "--seed", "5"},
                            out, err);
        res.require(code == 0, "tune exited " + std::to_string(code));
    };
    run_tune("t1.json");
    run_tune("t2.json");
    res.require(read_file(root / "t1.json") == read_file(root / "t2.json"),
                "tuned configs differ");
    res.require(read_file(root / "t1.json.report.json") ==
                    read_file(root / "t2.json.report.json"),
                "tune reports differ");

    auto run_eval = [&](const std::string& name) {
        std::ostringstream out, err;
        int code = cli::run({"evaluate", (root / "s1").string(), "--profile",
                             "B", "--tolerance", "2", "--truth-chars", "--out",
                             (root / name).string()},
                            out, err);
        res.require(code == 0, "evaluate exited " + std::to_string(code));
    };
    run_eval("r1.json");
    run_eval("r2.json");
    res.require(read_file(root / "r1.json") == read_file(root / "r2.json"),
                "evaluation reports differ");

    res.note("synth, tune and evaluate artifacts byte-identical across reruns");
    fs::remove_all(root);
    return res;
}

struct criterion {
    const char* name;
    std::function<outcome()> run;
    double time_limit_s;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<criterion> criteria = {
        {"reference-table replay", table_replay, 1.0},
        {"defuzzification resolution oracle", defuzz_resolution, 30.0},
        {"otsu within-class oracle", otsu_oracle, 10.0},
        {"feature invariants", feature_invariants, 30.0},
        {"segmenter scan-oracle equivalence", segmenter_oracle, 60.0},
        {"end-to-end synthetic accuracy", end_to_end, 60.0},
        {"pso convergence and repair", pso_behavior, 60.0},
        {"seeded determinism", determinism, 60.0},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::cerr << "usage: " << argv[0] << " [1.." << criteria.size() << "]\n";
        return 64;
    }

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i + 1) != only) continue;
        auto start = std::chrono::steady_clock::now();
        outcome out;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.note(std::string("exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (elapsed > criteria[i].time_limit_s) {
            out.pass = false;
            out.note("time limit exceeded");
        }
        std::printf("%s criterion %zu [%s] (%.2f s)%s%s\n",
                    out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, elapsed,
                    out.detail.empty() ? "" : " -- ", out.detail.c_str());
        if (!out.pass) ++failures;
    }
    return failures;
}
