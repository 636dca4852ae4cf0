#pragma once

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fuzzcut/eval.hpp"
#include "fuzzcut/features.hpp"
#include "fuzzcut/fis.hpp"
#include "fuzzcut/fis_io.hpp"
#include "fuzzcut/raster.hpp"
#include "fuzzcut/segmenter.hpp"
#include "fuzzcut/synth.hpp"
#include "fuzzcut/tuner.hpp"

namespace fuzzcut::cli {

namespace detail {

inline std::string fixed(double v, int decimals) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(decimals) << v;
    return s.str();
}

inline std::string default_profile() {
    const char* env = std::getenv("FUZZCUT_PROFILE");
    return env && *env ? env : "B";
}

inline binary_pattern load_input_pattern(const std::string& path) {
    auto p = load_pattern(path);
    return trim(p);
}

inline std::string resolve_out(const std::string& outdir, const std::string& path) {
    if (outdir.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(outdir) / path).string();
}

}  // namespace detail

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 domain error, 2 usage error. Diagnostics go to err, data to out or to
/// files.
inline int run(std::vector<std::string> args, std::ostream& out,
               std::ostream& err) {
    CLI::App app{"Touching-character segmentation via fuzzy column scoring"};
    app.require_subcommand(1);

    int verbosity = 0;
    std::optional<std::uint64_t> seed_override;
    std::string outdir;
    app.add_flag("-v,--verbose", verbosity, "increase verbosity");
    app.add_option("--seed-override", seed_override,
                   "override every subcommand seed");
    app.add_option("--outdir", outdir,
                   "directory prefixed to relative output paths");

    // --- binarize ---
    auto* cmd_bin = app.add_subcommand("binarize", "Otsu-binarize a PGM/PPM image");
    std::string bin_in, bin_out = "out.pat";
    std::optional<int> bin_threshold;
    bool bin_trim = false;
    cmd_bin->add_option("image", bin_in, "input image (PGM P2/P5, PPM P3/P6)")
        ->required();
    cmd_bin->add_option("-o,--out", bin_out, "output pattern file");
    cmd_bin->add_option("-t,--threshold", bin_threshold,
                        "fixed threshold instead of Otsu");
    cmd_bin->add_flag("--trim", bin_trim, "trim white borders");

    // --- features ---
    auto* cmd_feat = app.add_subcommand("features", "per-column feature table");
    std::string feat_in, feat_out;
    cmd_feat->add_option("pattern", feat_in, "input pattern")->required();
    cmd_feat->add_option("--out", feat_out, "write CSV here instead of stdout");

    // --- fis eval / fis plot ---
    auto* cmd_fis = app.add_subcommand("fis", "fuzzy inference system tools");
    cmd_fis->require_subcommand(1);
    auto* cmd_eval = cmd_fis->add_subcommand("eval", "evaluate rho for one input");
    std::string fis_config = detail::default_profile();
    double in_f = 0, in_g = 0, in_h = 0;
    cmd_eval->add_option("--config", fis_config, "A, B, or config JSON path");
    cmd_eval->add_option("--f", in_f, "fbar input")->required();
    cmd_eval->add_option("--g", in_g, "gbar input")->required();
    cmd_eval->add_option("--h", in_h, "hbar input")->required();

    auto* cmd_plot = cmd_fis->add_subcommand("plot", "sample membership curves");
    std::string plot_config = detail::default_profile(), plot_out;
    int plot_samples = 201;
    cmd_plot->add_option("--config", plot_config, "A, B, or config JSON path");
    cmd_plot->add_option("--out", plot_out, "write CSV here instead of stdout");
    cmd_plot->add_option("--samples", plot_samples, "samples per curve")
        ->check(CLI::Range(2, 100001));

    // --- segment ---
    auto* cmd_seg = app.add_subcommand("segment", "find cut columns");
    std::string seg_in, seg_profile = detail::default_profile();
    std::optional<int> seg_chars;
    std::string seg_emit_profile, seg_emit_segments;
    cmd_seg->add_option("pattern", seg_in, "input pattern")->required();
    cmd_seg->add_option("--profile", seg_profile, "A, B, or config JSON path");
    cmd_seg->add_option("--chars", seg_chars, "expected character count");
    cmd_seg->add_option("--emit-profile", seg_emit_profile,
                        "write per-column rho CSV");
    cmd_seg->add_option("--emit-segments", seg_emit_segments,
                        "write segment patterns into this directory");

    // --- synth ---
    auto* cmd_synth = app.add_subcommand("synth", "generate a labeled dataset");
    synth_params sp;
    cmd_synth->add_option("--glyphs", sp.glyph_dir, "glyph directory")->required();
    cmd_synth->add_option("--out", sp.out_dir, "output dataset directory")
        ->required();
    cmd_synth->add_option("--count", sp.count, "samples to generate")
        ->check(CLI::PositiveNumber);
    cmd_synth->add_option("--max-chars", sp.max_chars, "2..4 characters")
        ->check(CLI::Range(2, 4));
    cmd_synth->add_option("--two-frac", sp.two_char_fraction,
                          "fraction of two-character samples")
        ->check(CLI::Range(0.0, 1.0));
    cmd_synth->add_option("--seed", sp.seed, "generator seed");
    cmd_synth->add_option("--height-ratio", sp.height_ratio_min,
                          "minimum component height ratio");

    // --- tune ---
    auto* cmd_tune = app.add_subcommand("tune", "PSO-tune membership breakpoints");
    std::string tune_dataset, tune_base = detail::default_profile();
    std::string tune_out = "tuned.json", tune_report_path;
    tune_params tp;
    cmd_tune->add_option("--dataset", tune_dataset, "dataset directory")
        ->required();
    cmd_tune->add_option("--base", tune_base, "A, B, or config JSON path");
    cmd_tune->add_option("--out", tune_out, "tuned config output path");
    cmd_tune->add_option("--report", tune_report_path,
                         "tuning report JSON (default: <out>.report.json)");
    cmd_tune->add_option("--swarm", tp.swarm)->check(CLI::Range(2, 10000));
    cmd_tune->add_option("--iters", tp.iters)->check(CLI::PositiveNumber);
    cmd_tune->add_option("--seed", tp.seed);
    cmd_tune->add_option("--tolerance", tp.tolerance_k)->check(CLI::NonNegativeNumber);

    // --- evaluate ---
    auto* cmd_ev = app.add_subcommand("evaluate", "score a dataset");
    std::string ev_dataset, ev_profile = detail::default_profile(), ev_out;
    int ev_k = 5;
    bool ev_truth_chars = false;
    cmd_ev->add_option("dataset", ev_dataset, "dataset directory")->required();
    cmd_ev->add_option("--profile", ev_profile, "A, B, or config JSON path");
    cmd_ev->add_option("--tolerance", ev_k)->check(CLI::NonNegativeNumber);
    cmd_ev->add_flag("--truth-chars", ev_truth_chars,
                     "take expected character counts from the descriptors");
    cmd_ev->add_option("--out", ev_out, "report JSON path");

    std::vector<const char*> argv;
    argv.push_back("fuzzcut");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        err << app.help();
        return 2;
    }

    try {
        if (*cmd_bin) {
            auto img = load_gray(bin_in);
            int t = bin_threshold ? *bin_threshold : otsu_threshold(img);
            auto p = binarize(img, t);
            if (bin_trim) p = trim(p);
            write_pattern(detail::resolve_out(outdir, bin_out), p);
            if (verbosity > 0) err << "threshold " << t << "\n";
        } else if (*cmd_feat) {
            auto p = detail::load_input_pattern(feat_in);
            auto feats = extract_features(p);
            std::ostringstream csv;
            csv << "column,V,fbar,gbar,hbar\n";
            for (int i = 1; i <= feats.cols; ++i)
                csv << i << "," << feats.projection_col(i) << ","
                    << detail::fixed(feats.fbar_col(i), 6) << ","
                    << detail::fixed(feats.gbar_col(i), 6) << ","
                    << detail::fixed(feats.hbar_col(i), 6) << "\n";
            if (feat_out.empty()) {
                out << csv.str();
            } else {
                std::ofstream f(detail::resolve_out(outdir, feat_out));
                if (!f) throw error("cannot write file: " + feat_out);
                f << csv.str();
            }
        } else if (*cmd_eval) {
            mamdani_engine engine(resolve_profile(fis_config));
            auto rho = engine.evaluate(in_f, in_g, in_h);
            out << detail::fixed(rho.value, 4) << "\n";
            for (std::size_t r = 0; r < rho.fired.size(); ++r)
                out << "rule " << (r + 1) << " fired "
                    << detail::fixed(rho.fired[r], 4) << "\n";
            if (rho.no_fire) err << "no rule fired\n";
        } else if (*cmd_plot) {
            auto cfg = resolve_profile(plot_config);
            std::ostringstream csv;
            csv << "variable,set,x,mu\n";
            for (const auto& var : cfg.variables)
                for (const auto& set : var.sets)
                    for (int k = 0; k < plot_samples; ++k) {
                        double x = static_cast<double>(k) / (plot_samples - 1);
                        csv << var.name << "," << set.label << ","
                            << detail::fixed(x, 4) << ","
                            << detail::fixed(set.membership(x), 4) << "\n";
                    }
            if (plot_out.empty()) {
                out << csv.str();
            } else {
                std::ofstream f(detail::resolve_out(outdir, plot_out));
                if (!f) throw error("cannot write file: " + plot_out);
                f << csv.str();
            }
        } else if (*cmd_seg) {
            mamdani_engine engine(resolve_profile(seg_profile));
            auto p = detail::load_input_pattern(seg_in);
            auto result = segment_pattern(p, engine, seg_chars);
            out << "cuts:";
            for (int c : result.cuts) out << " " << c;
            out << "\n";
            if (verbosity > 0) {
                err << "presplit cuts: " << result.presplit_cuts.size() << "\n";
                if (result.under_segmented) err << "under-segmented\n";
            }
            if (!seg_emit_profile.empty()) {
                std::ofstream f(detail::resolve_out(outdir, seg_emit_profile));
                if (!f) throw error("cannot write file: " + seg_emit_profile);
                f << "column,fbar,gbar,hbar,rho\n";
                for (const auto& s : result.rho_profile)
                    f << s.column << "," << detail::fixed(s.fbar, 6) << ","
                      << detail::fixed(s.gbar, 6) << ","
                      << detail::fixed(s.hbar, 6) << ","
                      << detail::fixed(s.rho, 6) << "\n";
            }
            if (!seg_emit_segments.empty()) {
                namespace fs = std::filesystem;
                auto dir = detail::resolve_out(outdir, seg_emit_segments);
                fs::create_directories(dir);
                auto parts = slice_segments(p, result.cuts);
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    char name[32];
                    std::snprintf(name, sizeof name, "segment_%02zu.pat", i);
                    write_pattern((fs::path(dir) / name).string(), parts[i]);
                }
            }
        } else if (*cmd_synth) {
            if (seed_override) sp.seed = *seed_override;
            sp.out_dir = detail::resolve_out(outdir, sp.out_dir);
            auto stats = generate_dataset(sp);
            out << "written " << stats.written << " samples\n";
            if (!stats.reached_count)
                err << "warning: only " << stats.written << " of " << sp.count
                    << " samples were reachable\n";
            if (verbosity > 0)
                err << "attempts " << stats.attempts << ", rejected no-touch "
                    << stats.rejected_no_touch << ", height "
                    << stats.rejected_height << ", degenerate "
                    << stats.rejected_degenerate << "\n";
        } else if (*cmd_tune) {
            if (seed_override) tp.seed = *seed_override;
            auto base = resolve_profile(tune_base);
            auto samples = load_samples(tune_dataset);
            auto report = pso_tune(base, samples, tp);
            auto out_path = detail::resolve_out(outdir, tune_out);
            save_config(report.best_config, out_path);
            std::string rep_path = tune_report_path.empty()
                                       ? out_path + ".report.json"
                                       : detail::resolve_out(outdir, tune_report_path);
            std::ofstream f(rep_path);
            if (!f) throw error("cannot write file: " + rep_path);
            f << tune_report_to_json(report).dump(2) << "\n";
            out << "train exact accuracy: base "
                << detail::fixed(report.base_train.exact_accuracy, 4) << " -> tuned "
                << detail::fixed(report.best_train.exact_accuracy, 4) << "\n";
            if (report.best_holdout.samples > 0)
                out << "holdout exact accuracy: base "
                    << detail::fixed(report.base_holdout.exact_accuracy, 4)
                    << " -> tuned "
                    << detail::fixed(report.best_holdout.exact_accuracy, 4) << "\n";
        } else if (*cmd_ev) {
            mamdani_engine engine(resolve_profile(ev_profile));
            auto report = evaluate_dataset(ev_dataset, engine, ev_k, ev_truth_chars);
            print_report(out, report);
            if (!ev_out.empty()) {
                std::ofstream f(detail::resolve_out(outdir, ev_out));
                if (!f) throw error("cannot write file: " + ev_out);
                f << report_to_json(report).dump(2) << "\n";
            }
        }
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace fuzzcut::cli
