#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <json.hpp>

#include "fuzzcut/eval.hpp"
#include "fuzzcut/fis.hpp"
#include "fuzzcut/segmenter.hpp"
#include "fuzzcut/synth.hpp"

namespace fuzzcut {

// ---------------------------------------------------------------------------
// Generic constriction PSO
// ---------------------------------------------------------------------------

struct pso_options {
    int swarm = 30;
    int iters = 100;
    std::uint64_t seed = 0;
    double chi = 0.7298;       // constriction factor on the previous velocity
    double c1 = 1.49618;       // personal-best attraction
    double c2 = 1.49618;       // global-best attraction
};

struct pso_result {
    std::vector<double> best_position;
    double best_value = 0.0;
    std::vector<double> history;  // best-so-far value, length iters + 1
    long evaluations = 0;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    // bit-reproducible across standard libraries
    return (rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Maximizes objective(x) over positions repaired into the feasible set.
/// Velocity update: v <- chi*v + c1*r1*(pbest-x) + c2*r2*(gbest-x), with
/// fresh per-dimension draws pre-generated per particle per iteration.
/// After each move the position is repaired and the velocity replaced by
/// the realized displacement, which keeps the dynamics consistent with the
/// constrained positions. Deterministic under the seed; the swarm can be
/// seeded with incumbent positions so the best value never regresses below
/// them.
template <class Objective, class Repair>
pso_result pso_maximize(int dim, Objective&& objective, Repair&& repair,
                        const pso_options& opt,
                        const std::vector<std::vector<double>>& incumbents = {}) {
    if (opt.swarm < 2) throw error("pso: swarm must be at least 2");
    if (opt.iters < 1) throw error("pso: iters must be at least 1");
    std::mt19937_64 rng(opt.seed);

    pso_result res;
    std::vector<std::vector<double>> x(opt.swarm), v(opt.swarm), pbest(opt.swarm);
    std::vector<double> pbest_val(opt.swarm);

    for (int i = 0; i < opt.swarm; ++i) {
        if (i < static_cast<int>(incumbents.size())) {
            x[i] = incumbents[i];
            if (static_cast<int>(x[i].size()) != dim)
                throw error("pso: incumbent dimension mismatch");
        } else {
            x[i].resize(dim);
            for (double& c : x[i]) c = detail::uniform01(rng);
        }
        x[i] = repair(std::move(x[i]));
        v[i].assign(dim, 0.0);
        pbest[i] = x[i];
        pbest_val[i] = objective(x[i]);
        if (!std::isfinite(pbest_val[i])) throw error("pso: non-finite fitness");
        ++res.evaluations;
    }
    int g = 0;
    for (int i = 1; i < opt.swarm; ++i)
        if (pbest_val[i] > pbest_val[g]) g = i;
    res.best_position = pbest[g];
    res.best_value = pbest_val[g];
    res.history.push_back(res.best_value);

    for (int it = 0; it < opt.iters; ++it) {
        for (int i = 0; i < opt.swarm; ++i) {
            for (int d = 0; d < dim; ++d) {
                double r1 = detail::uniform01(rng), r2 = detail::uniform01(rng);
                v[i][d] = opt.chi * v[i][d] +
                          opt.c1 * r1 * (pbest[i][d] - x[i][d]) +
                          opt.c2 * r2 * (res.best_position[d] - x[i][d]);
            }
            std::vector<double> moved(dim);
            for (int d = 0; d < dim; ++d) moved[d] = x[i][d] + v[i][d];
            moved = repair(std::move(moved));
            for (int d = 0; d < dim; ++d) v[i][d] = moved[d] - x[i][d];
            x[i] = std::move(moved);

            double val = objective(x[i]);
            if (!std::isfinite(val)) throw error("pso: non-finite fitness");
            ++res.evaluations;
            if (val > pbest_val[i]) {
                pbest_val[i] = val;
                pbest[i] = x[i];
            }
        }
        // synchronous global update once per iteration
        for (int i = 0; i < opt.swarm; ++i) {
            if (pbest_val[i] > res.best_value) {
                res.best_value = pbest_val[i];
                res.best_position = pbest[i];
            }
        }
        res.history.push_back(res.best_value);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Breakpoint vector codec
// ---------------------------------------------------------------------------

/// Maps a config onto the 32 tunable breakpoints (per variable: Low.c,
/// Low.d, Medium.a..d, High.a, High.b). Low.a/Low.b and High.c/High.d stay
/// pinned at their base-profile values. The rule base is never touched.
class breakpoint_codec {
public:
    explicit breakpoint_codec(fuzzy_system_config base) : base_(std::move(base)) {
        validate_or_throw(base_);
    }

    static constexpr int dimension() { return 32; }

    std::vector<double> encode(const fuzzy_system_config& cfg) const {
        std::vector<double> out;
        for (const auto& name : variable_names) {
            const auto* var = cfg.find_variable(name);
            const auto *lo = var->find("Low"), *me = var->find("Medium"),
                       *hi = var->find("High");
            out.insert(out.end(), {lo->c, lo->d, me->a, me->b, me->c, me->d,
                                   hi->a, hi->b});
        }
        return out;
    }

    fuzzy_system_config decode(const std::vector<double>& x) const {
        fuzzy_system_config cfg = base_;
        int off = 0;
        for (const auto& name : variable_names) {
            auto* var = const_cast<linguistic_variable*>(cfg.find_variable(name));
            for (auto& s : var->sets) {
                if (s.label == "Low") {
                    s.c = x[off + 0];
                    s.d = x[off + 1];
                } else if (s.label == "Medium") {
                    s.a = x[off + 2];
                    s.b = x[off + 3];
                    s.c = x[off + 4];
                    s.d = x[off + 5];
                } else {
                    s.a = x[off + 6];
                    s.b = x[off + 7];
                }
            }
            off += 8;
        }
        return cfg;
    }

    /// Clamps to [0,1], restores per-set ordering, then projects minimally
    /// so adjacent supports overlap and the supports stay ordered.
    /// Idempotent: repairing a repaired vector is the identity.
    std::vector<double> repair(std::vector<double> x) const {
        constexpr double eps = 1e-6;
        int off = 0;
        for (const auto& name : variable_names) {
            const auto* var = base_.find_variable(name);
            double low_b = std::clamp(var->find("Low")->b, 0.0, 1.0);

            for (int d = 0; d < 8; ++d) x[off + d] = std::clamp(x[off + d], 0.0, 1.0);
            double lc = std::min(x[off], x[off + 1]);
            double ld = std::max(x[off], x[off + 1]);
            lc = std::max(lc, low_b);
            ld = std::max(ld, lc);
            std::sort(x.begin() + off + 2, x.begin() + off + 6);
            double ma = x[off + 2], mb = x[off + 3], mc = x[off + 4], md = x[off + 5];
            double ha = std::min(x[off + 6], x[off + 7]);
            double hb = std::max(x[off + 6], x[off + 7]);

            if (ma > ha) {  // supports ordered: Medium.a <= High.a
                double mid = 0.5 * (ma + ha);
                ma = mid;
                ha = mid;
                hb = std::max(hb, ha);
            }
            if (ld <= ma) {  // Low and Medium supports must overlap
                ld = std::min(1.0, ma + eps);
                if (ma >= ld) {
                    ma = 1.0 - eps;
                    ld = 1.0;
                }
                lc = std::min(lc, ld);
            }
            if (md <= ha) {  // Medium and High supports must overlap
                md = std::min(1.0, ha + eps);
                if (ha >= md) {
                    ha = 1.0 - eps;
                    hb = std::max(hb, ha);
                    md = 1.0;
                }
                mc = std::min(mc, md);
            }
            x[off + 0] = lc;
            x[off + 1] = ld;
            x[off + 2] = ma;
            x[off + 3] = mb;
            x[off + 4] = mc;
            x[off + 5] = md;
            x[off + 6] = ha;
            x[off + 7] = hb;
            off += 8;
        }
        return x;
    }

    const fuzzy_system_config& base() const { return base_; }

private:
    fuzzy_system_config base_;
};

// ---------------------------------------------------------------------------
// Fitness and tuning
// ---------------------------------------------------------------------------

/// A dataset sample loaded into memory for repeated fitness evaluation.
struct loaded_sample {
    std::string name;
    binary_pattern image;
    std::vector<int> cuts;
    int chars = 0;
};

inline std::vector<loaded_sample> load_samples(const std::string& dir) {
    namespace fs = std::filesystem;
    auto descriptors = load_dataset(dir);
    std::sort(descriptors.begin(), descriptors.end(),
              [](const sample_descriptor& a, const sample_descriptor& b) {
                  return a.image < b.image;
              });
    std::vector<loaded_sample> out;
    for (const auto& d : descriptors) {
        loaded_sample s;
        s.name = d.image;
        s.image = load_pattern((fs::path(dir) / d.image).string());
        s.cuts = d.cuts;
        s.chars = static_cast<int>(d.chars.size());
        out.push_back(std::move(s));
    }
    return out;
}

struct fitness_score {
    double exact_accuracy = 0.0;   // primary
    double mean_cut_error = 0.0;   // tie-break, lower is better
    double within_k_accuracy = 0.0;
    int samples = 0;

    // Lexicographic embedding: accuracy quantum is 1/samples, far above
    // the scaled tie-break term.
    double scalar() const { return exact_accuracy - 1e-9 * mean_cut_error; }
};

/// Exact-cut accuracy with mean absolute cut error as tie-break. Samples
/// with a cut-count mismatch contribute their image width as the error.
inline fitness_score fitness(const mamdani_engine& engine,
                             const std::vector<loaded_sample>& samples,
                             int tolerance_k) {
    if (samples.empty()) throw error("fitness: empty dataset");
    fitness_score f;
    f.samples = static_cast<int>(samples.size());
    double err_sum = 0.0;
    for (const auto& s : samples) {
        auto result = segment_pattern(s.image, engine, s.chars);
        auto sc = score_sample(result.cuts, s.cuts, tolerance_k);
        if (sc.exact) f.exact_accuracy += 1.0;
        if (sc.within_k) f.within_k_accuracy += 1.0;
        if (sc.count_mismatch) {
            err_sum += s.image.cols;
        } else {
            double e = 0.0;
            for (std::size_t i = 0; i < s.cuts.size(); ++i)
                e += std::abs(result.cuts[i] - s.cuts[i]);
            err_sum += s.cuts.empty() ? 0.0 : e / s.cuts.size();
        }
    }
    f.exact_accuracy /= f.samples;
    f.within_k_accuracy /= f.samples;
    f.mean_cut_error = err_sum / f.samples;
    return f;
}

struct tune_params {
    int swarm = 30;
    int iters = 100;
    std::uint64_t seed = 0;
    int tolerance_k = 5;
    double holdout_fraction = 0.2;
};

struct tune_report {
    fuzzy_system_config best_config;
    std::vector<double> history;  // best-so-far scalar fitness per iteration
    long evaluations = 0;
    std::uint64_t seed = 0;
    fitness_score base_train, best_train;
    fitness_score base_holdout, best_holdout;  // samples == 0 when no holdout
};

/// PSO over the 32 membership breakpoints against labeled segmentation
/// accuracy. The swarm is seeded with the base profile, so the tuned
/// training fitness never falls below it. Rule bases are left untouched.
inline tune_report pso_tune(const fuzzy_system_config& base_cfg,
                            const std::vector<loaded_sample>& all_samples,
                            const tune_params& params) {
    if (all_samples.empty()) throw error("pso_tune: empty dataset");
    breakpoint_codec codec(base_cfg);

    // seeded shuffle, then split
    std::vector<const loaded_sample*> order;
    for (const auto& s : all_samples) order.push_back(&s);
    std::mt19937_64 rng(params.seed ^ 0x5eed0117ULL);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng() % i]);
    std::size_t holdout_n = static_cast<std::size_t>(
        params.holdout_fraction * static_cast<double>(order.size()));
    if (holdout_n >= order.size()) holdout_n = order.size() - 1;
    std::vector<loaded_sample> train, holdout;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < holdout_n ? holdout : train).push_back(*order[i]);

    auto objective = [&](const std::vector<double>& x) {
        mamdani_engine engine(codec.decode(x));
        return fitness(engine, train, params.tolerance_k).scalar();
    };

    pso_options opt;
    opt.swarm = params.swarm;
    opt.iters = params.iters;
    opt.seed = params.seed;
    auto res = pso_maximize(codec.dimension(), objective,
                            [&](std::vector<double> x) {
                                return codec.repair(std::move(x));
                            },
                            opt, {codec.encode(base_cfg)});

    tune_report rep;
    rep.best_config = codec.decode(res.best_position);
    rep.history = std::move(res.history);
    rep.evaluations = res.evaluations;
    rep.seed = params.seed;
    mamdani_engine base_engine(base_cfg);
    mamdani_engine best_engine(rep.best_config);
    rep.base_train = fitness(base_engine, train, params.tolerance_k);
    rep.best_train = fitness(best_engine, train, params.tolerance_k);
    if (!holdout.empty()) {
        rep.base_holdout = fitness(base_engine, holdout, params.tolerance_k);
        rep.best_holdout = fitness(best_engine, holdout, params.tolerance_k);
    }
    return rep;
}

inline nlohmann::json fitness_to_json(const fitness_score& f) {
    return {{"exact_accuracy", f.exact_accuracy},
            {"mean_cut_error", f.mean_cut_error},
            {"within_k_accuracy", f.within_k_accuracy},
            {"samples", f.samples}};
}

inline nlohmann::json tune_report_to_json(const tune_report& r) {
    return {{"history", r.history},
            {"evaluations", r.evaluations},
            {"seed", r.seed},
            {"base_train", fitness_to_json(r.base_train)},
            {"best_train", fitness_to_json(r.best_train)},
            {"base_holdout", fitness_to_json(r.base_holdout)},
            {"best_holdout", fitness_to_json(r.best_holdout)}};
}

}  // namespace fuzzcut
