#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "fuzzcut/fis.hpp"

namespace fuzzcut {

/// Schema: {"variables":[{"name","sets":[{"label","trapezoid":[a,b,c,d]}]}],
///          "rules":[{"if":{var:"Low"|"not Low"|...},"then":label}],
///          "resolution", "no_fire_value"}.
inline nlohmann::json config_to_json(const fuzzy_system_config& cfg) {
    nlohmann::json j;
    j["variables"] = nlohmann::json::array();
    for (const auto& var : cfg.variables) {
        nlohmann::json sets = nlohmann::json::array();
        for (const auto& s : var.sets)
            sets.push_back({{"label", s.label},
                            {"trapezoid", {s.a, s.b, s.c, s.d}}});
        j["variables"].push_back({{"name", var.name}, {"sets", sets}});
    }
    j["rules"] = nlohmann::json::array();
    for (const auto& rule : cfg.rules) {
        nlohmann::json clauses = nlohmann::json::object();
        for (const auto& cl : rule.antecedents)
            clauses[cl.variable] = cl.negated ? "not " + cl.label : cl.label;
        j["rules"].push_back({{"if", clauses}, {"then", rule.consequent}});
    }
    j["resolution"] = cfg.resolution;
    j["no_fire_value"] = cfg.no_fire_value;
    return j;
}

inline fuzzy_system_config config_from_json(const nlohmann::json& j) {
    fuzzy_system_config cfg;
    try {
        for (const auto& jv : j.at("variables")) {
            linguistic_variable var;
            var.name = jv.at("name").get<std::string>();
            for (const auto& js : jv.at("sets")) {
                trapezoid_set s;
                s.label = js.at("label").get<std::string>();
                const auto& t = js.at("trapezoid");
                if (!t.is_array() || t.size() != 4)
                    throw error("trapezoid must have 4 breakpoints");
                s.a = t[0].get<double>();
                s.b = t[1].get<double>();
                s.c = t[2].get<double>();
                s.d = t[3].get<double>();
                var.sets.push_back(std::move(s));
            }
            cfg.variables.push_back(std::move(var));
        }
        for (const auto& jr : j.at("rules")) {
            fuzzy_rule rule;
            for (const auto& [var, label] : jr.at("if").items()) {
                rule_clause cl;
                cl.variable = var;
                std::string text = label.get<std::string>();
                if (text.rfind("not ", 0) == 0) {
                    cl.negated = true;
                    cl.label = text.substr(4);
                } else {
                    cl.label = text;
                }
                rule.antecedents.push_back(std::move(cl));
            }
            rule.consequent = jr.at("then").get<std::string>();
            cfg.rules.push_back(std::move(rule));
        }
        if (j.contains("resolution")) cfg.resolution = j.at("resolution").get<int>();
        if (j.contains("no_fire_value"))
            cfg.no_fire_value = j.at("no_fire_value").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw error(std::string("config schema error: ") + e.what());
    }
    validate_or_throw(cfg);
    return cfg;
}

inline void save_config(const fuzzy_system_config& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw error("cannot write file: " + path);
    out << config_to_json(cfg).dump(2) << "\n";
    if (!out) throw error("write failed: " + path);
}

inline fuzzy_system_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw error("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

/// Accepts "A", "B" or a path to a JSON config file.
inline fuzzy_system_config resolve_profile(const std::string& spec_or_path) {
    if (spec_or_path == "A" || spec_or_path == "a")
        return builtin_profile(profile::A);
    if (spec_or_path == "B" || spec_or_path == "b")
        return builtin_profile(profile::B);
    return load_config(spec_or_path);
}

}  // namespace fuzzcut
