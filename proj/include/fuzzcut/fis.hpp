#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "fuzzcut/raster.hpp"

namespace fuzzcut {

/// Piecewise-linear fuzzy set: zero outside [a,d], one on [b,c], linear on
/// the ramps. Feet a and d may lie outside the [0,1] universe, which lets a
/// set keep a partial grade at the universe edge; membership is only ever
/// queried for x in [0,1].
struct trapezoid_set {
    std::string label;
    double a = 0, b = 0, c = 0, d = 0;

    double membership(double x) const {
        if (x < a || x > d) return 0.0;
        if (x >= b && x <= c) return 1.0;
        if (x < b) return (x - a) / (b - a);
        return (d - x) / (d - c);
    }
};

/// One fuzzified quantity with its Low / Medium / High sets.
struct linguistic_variable {
    std::string name;
    std::vector<trapezoid_set> sets;

    const trapezoid_set* find(const std::string& label) const {
        for (const auto& s : sets)
            if (s.label == label) return &s;
        return nullptr;
    }
};

/// Antecedent clause: "<variable> is <label>" or "<variable> is not <label>".
struct rule_clause {
    std::string variable;
    std::string label;
    bool negated = false;
};

struct fuzzy_rule {
    std::vector<rule_clause> antecedents;  // omitted variable = unconstrained
    std::string consequent;                // output set label
};

/// Declarative description of the whole inference system. Immutable once
/// validated; evaluation is pure and thread-safe.
struct fuzzy_system_config {
    std::vector<linguistic_variable> variables;  // fbar, gbar, hbar, rho
    std::vector<fuzzy_rule> rules;
    int resolution = 1001;      // output universe sample count
    double no_fire_value = 1.0; // rho when no rule fires

    const linguistic_variable* find_variable(const std::string& name) const {
        for (const auto& v : variables)
            if (v.name == name) return &v;
        return nullptr;
    }
};

inline const std::array<std::string, 3> set_labels = {"Low", "Medium", "High"};
inline const std::array<std::string, 4> variable_names = {"fbar", "gbar",
                                                          "hbar", "rho"};

/// Collects every violation; an empty result means the config is valid.
inline std::vector<std::string> validate(const fuzzy_system_config& cfg) {
    std::vector<std::string> bad;
    auto complain = [&](const std::string& msg) { bad.push_back(msg); };

    for (const auto& name : variable_names)
        if (!cfg.find_variable(name))
            complain("missing variable: " + name);
    if (cfg.variables.size() != 4) complain("expected exactly 4 variables");

    for (const auto& var : cfg.variables) {
        bool known = false;
        for (const auto& name : variable_names) known |= (name == var.name);
        if (!known) complain("unknown variable: " + var.name);
        for (const auto& label : set_labels)
            if (!var.find(label))
                complain(var.name + ": missing set " + label);
        if (var.sets.size() != 3)
            complain(var.name + ": expected exactly 3 sets");
        for (const auto& s : var.sets) {
            if (!(s.a <= s.b && s.b <= s.c && s.c <= s.d))
                complain(var.name + "." + s.label + ": unordered breakpoints");
            if (s.a < -1.0 || s.d > 2.0)
                complain(var.name + "." + s.label + ": breakpoints out of range");
            if (s.d < 0.0 || s.a > 1.0)
                complain(var.name + "." + s.label + ": support misses [0,1]");
        }
        const auto *lo = var.find("Low"), *me = var.find("Medium"),
                   *hi = var.find("High");
        if (lo && me && hi) {
            if (!(lo->a <= me->a && me->a <= hi->a))
                complain(var.name + ": supports out of order");
            if (!(me->a < lo->d))
                complain(var.name + ": Low and Medium supports do not overlap");
            if (!(hi->a < me->d))
                complain(var.name + ": Medium and High supports do not overlap");
            if (std::max(lo->a, 0.0) > 0.0 || std::min(hi->d, 1.0) < 1.0)
                complain(var.name + ": supports do not cover [0,1]");
        }
    }

    const auto* rho = cfg.find_variable("rho");
    int rule_no = 0;
    for (const auto& rule : cfg.rules) {
        ++rule_no;
        std::string where = "rule " + std::to_string(rule_no);
        if (rule.antecedents.empty())
            complain(where + ": no antecedents");
        for (const auto& cl : rule.antecedents) {
            if (cl.variable == "rho") {
                complain(where + ": rho cannot appear in an antecedent");
                continue;
            }
            const auto* var = cfg.find_variable(cl.variable);
            if (!var) {
                complain(where + ": unknown variable " + cl.variable);
            } else if (!var->find(cl.label)) {
                complain(where + ": unknown label " + cl.label);
            }
        }
        if (!rho || !rho->find(rule.consequent))
            complain(where + ": unknown label " + rule.consequent);
    }
    if (cfg.rules.empty()) complain("no rules");

    if (cfg.resolution < 101) complain("resolution must be at least 101");
    if (!(cfg.no_fire_value >= 0.0 && cfg.no_fire_value <= 1.0))
        complain("no_fire_value must be in [0,1]");
    return bad;
}

inline void validate_or_throw(const fuzzy_system_config& cfg) {
    auto bad = validate(cfg);
    if (bad.empty()) return;
    std::string msg = "invalid fuzzy system config:";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw error(msg);
}

/// Crisp output plus the per-rule firing strengths that produced it.
struct rho_degree {
    double value = 1.0;
    std::vector<double> fired;
    bool no_fire = false;
};

/// Mamdani inference: per rule, firing strength is the min over antecedent
/// clauses (negation is the pointwise complement); the output set is
/// clipped at that strength; clipped sets are summed pointwise over the
/// discretized [0,1] universe; the crisp value is the centroid of the sum.
class mamdani_engine {
public:
    explicit mamdani_engine(fuzzy_system_config cfg) : cfg_(std::move(cfg)) {
        validate_or_throw(cfg_);
        for (int v = 0; v < 3; ++v) {
            const auto* var = cfg_.find_variable(std::string(variable_names[v]));
            for (int s = 0; s < 3; ++s)
                input_sets_[v][s] = *var->find(std::string(set_labels[s]));
        }
        const auto* rho = cfg_.find_variable("rho");
        int res = cfg_.resolution;
        for (int s = 0; s < 3; ++s) {
            const auto* set = rho->find(std::string(set_labels[s]));
            output_curves_[s].resize(res);
            for (int k = 0; k < res; ++k)
                output_curves_[s][k] = set->membership(universe_x(k));
        }
        for (const auto& rule : cfg_.rules) {
            compiled_rule cr;
            cr.consequent = label_index(rule.consequent);
            for (const auto& cl : rule.antecedents)
                cr.clauses.push_back({var_index(cl.variable),
                                      label_index(cl.label), cl.negated});
            rules_.push_back(std::move(cr));
        }
    }

    rho_degree evaluate(double f, double g, double h) const {
        const double in[3] = {check_input(f), check_input(g), check_input(h)};
        rho_degree out;
        out.fired.resize(rules_.size());
        int res = cfg_.resolution;
        std::vector<double> agg(res, 0.0);
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            double s = 1.0;
            for (const auto& cl : rules_[r].clauses) {
                double mu = input_sets_[cl.var][cl.set].membership(in[cl.var]);
                if (cl.negated) mu = 1.0 - mu;
                s = std::min(s, mu);
            }
            out.fired[r] = s;
            if (s <= 0.0) continue;
            const auto& curve = output_curves_[rules_[r].consequent];
            for (int k = 0; k < res; ++k) agg[k] += std::min(curve[k], s);
        }
        double mass = 0.0, moment = 0.0;
        for (int k = 0; k < res; ++k) {
            mass += agg[k];
            moment += agg[k] * universe_x(k);
        }
        if (mass < 1e-9) {
            out.value = cfg_.no_fire_value;
            out.no_fire = true;
        } else {
            out.value = moment / mass;
        }
        return out;
    }

    const fuzzy_system_config& config() const { return cfg_; }

private:
    struct clause_ref {
        int var;
        int set;
        bool negated;
    };
    struct compiled_rule {
        std::vector<clause_ref> clauses;
        int consequent;
    };

    double universe_x(int k) const {
        return static_cast<double>(k) / (cfg_.resolution - 1);
    }
    static double check_input(double x) {
        if (x < -1e-9 || x > 1.0 + 1e-9) throw error("fis input outside [0,1]");
        return std::clamp(x, 0.0, 1.0);
    }
    static int var_index(const std::string& name) {
        for (int i = 0; i < 3; ++i)
            if (variable_names[i] == name) return i;
        throw error("unknown variable: " + name);
    }
    static int label_index(const std::string& label) {
        for (int i = 0; i < 3; ++i)
            if (set_labels[i] == label) return i;
        throw error("unknown label: " + label);
    }

    fuzzy_system_config cfg_;
    std::array<std::array<trapezoid_set, 3>, 3> input_sets_;
    std::array<std::vector<double>, 3> output_curves_;
    std::vector<compiled_rule> rules_;
};

inline rho_degree evaluate_once(const fuzzy_system_config& cfg, double f,
                                double g, double h) {
    return mamdani_engine(cfg).evaluate(f, g, h);
}

// ---------------------------------------------------------------------------
// Built-in profiles
// ---------------------------------------------------------------------------

enum class profile { A, B };

namespace detail {

inline linguistic_variable make_variable(const std::string& name,
                                         std::array<double, 4> lo,
                                         std::array<double, 4> me,
                                         std::array<double, 4> hi) {
    return {name,
            {{"Low", lo[0], lo[1], lo[2], lo[3]},
             {"Medium", me[0], me[1], me[2], me[3]},
             {"High", hi[0], hi[1], hi[2], hi[3]}}};
}

inline fuzzy_rule mk_rule(
    std::vector<std::tuple<const char*, const char*, bool>> clauses,
    const char* cons) {
    fuzzy_rule r;
    for (auto& [var, label, neg] : clauses)
        r.antecedents.push_back({var, label, neg});
    r.consequent = cons;
    return r;
}

}  // namespace detail

/// Reference configurations tuned for handwritten cursive (A) and sided
/// machine-printed (B) Latin characters.
inline fuzzy_system_config builtin_profile(profile which) {
    using detail::make_variable;
    using detail::mk_rule;
    fuzzy_system_config cfg;
    cfg.resolution = 1001;
    cfg.no_fire_value = 1.0;
    if (which == profile::A) {
        cfg.variables = {
            make_variable("fbar", {0, 0, 0.25, 0.45}, {0.25, 0.45, 0.5, 0.55},
                          {0.5, 0.55, 1, 1}),
            make_variable("gbar", {0, 0, 0.15, 0.2}, {0.15, 0.2, 0.25, 0.55},
                          {0.25, 0.55, 1, 1}),
            make_variable("hbar", {0, 0, 0.15, 0.3}, {0.15, 0.3, 0.5, 0.65},
                          {0.5, 0.65, 1, 1}),
            make_variable("rho", {0, 0, 0.2, 0.4}, {0.2, 0.4, 0.4, 0.65},
                          {0.4, 0.65, 1, 1}),
        };
        cfg.rules = {
            mk_rule({{"fbar", "High", true}, {"gbar", "High", true}, {"hbar", "Low", false}}, "Low"),
            mk_rule({{"fbar", "Low", false}, {"gbar", "Low", false}, {"hbar", "Medium", false}}, "Low"),
            mk_rule({{"fbar", "Low", false}, {"gbar", "High", false}}, "Medium"),
            mk_rule({{"gbar", "Medium", false}, {"hbar", "Medium", false}}, "Medium"),
            mk_rule({{"fbar", "High", false}, {"gbar", "Low", false}}, "Medium"),
            mk_rule({{"fbar", "Medium", false}, {"gbar", "Low", false}, {"hbar", "Medium", false}}, "Medium"),
            mk_rule({{"fbar", "High", false}, {"gbar", "Medium", false}, {"hbar", "Low", false}}, "Medium"),
            mk_rule({{"fbar", "Medium", false}, {"gbar", "High", false}}, "High"),
            mk_rule({{"fbar", "High", false}, {"gbar", "High", false}}, "High"),
            mk_rule({{"fbar", "High", false}, {"gbar", "Medium", false}, {"hbar", "High", false}}, "High"),
        };
    } else {
        // The gbar Low set keeps a partial grade at 0 via a foot below the
        // universe; the "not Low" hedge is then informative even when the
        // raw peak-to-valley maximum sits at the evaluated column.
        cfg.variables = {
            make_variable("fbar", {0, 0, 0.25, 0.35}, {0.15, 0.35, 0.45, 0.75},
                          {0.5, 0.75, 1, 1}),
            make_variable("gbar", {-0.5, 0.15, 0.35, 0.4}, {0.2, 0.25, 0.35, 0.5},
                          {0.45, 0.5, 1, 1}),
            make_variable("hbar", {0, 0, 0.2, 0.4}, {0.1, 0.4, 0.45, 0.75},
                          {0.5, 0.65, 1, 1}),
            make_variable("rho", {0, 0, 0.2, 0.5}, {0.4, 0.45, 0.55, 0.6},
                          {0.5, 0.75, 1, 1}),
        };
        cfg.rules = {
            mk_rule({{"fbar", "Low", false}, {"hbar", "Low", false}}, "Low"),
            mk_rule({{"fbar", "Low", false}, {"gbar", "High", true}, {"hbar", "Low", true}}, "Low"),
            mk_rule({{"fbar", "Low", false}, {"gbar", "High", false}, {"hbar", "Medium", false}}, "Medium"),
            mk_rule({{"fbar", "Medium", false}, {"hbar", "High", true}}, "Medium"),
            mk_rule({{"fbar", "Medium", false}, {"gbar", "Low", false}, {"hbar", "High", false}}, "Medium"),
            mk_rule({{"fbar", "High", false}, {"gbar", "High", true}, {"hbar", "Low", false}}, "Medium"),
            mk_rule({{"fbar", "High", false}, {"gbar", "Low", false}, {"hbar", "Medium", false}}, "Medium"),
            mk_rule({{"fbar", "Low", false}, {"gbar", "High", false}, {"hbar", "High", false}}, "High"),
            mk_rule({{"fbar", "Low", true}, {"gbar", "Low", true}, {"hbar", "Low", true}}, "High"),
            mk_rule({{"fbar", "High", false}, {"gbar", "High", false}}, "High"),
        };
    }
    return cfg;
}

}  // namespace fuzzcut
