#pragma once

// ModelParams documents, schema "ei-params/1", in TOML or JSON. Both formats
// go through the same JSON tree; rotation maps are stored by their builder
// arguments and rebuilt on load.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "eirnet/anosov.hpp"
#include "eirnet/errors.hpp"
#include "eirnet/fiber_flow.hpp"
#include "eirnet/model.hpp"
#include "eirnet/rotation_map.hpp"

namespace eirnet::io {

using json = nlohmann::json;

inline constexpr const char* params_schema = "ei-params/1";

namespace detail {

inline json toml_to_json(const toml::node& node)
{
    if (const auto* t = node.as_table()) {
        json obj = json::object();
        for (const auto& [k, v] : *t)
            obj[std::string(k.str())] = toml_to_json(v);
        return obj;
    }
    if (const auto* a = node.as_array()) {
        json arr = json::array();
        for (const auto& v : *a)
            arr.push_back(toml_to_json(v));
        return arr;
    }
    if (const auto* v = node.as_integer())
        return json(v->get());
    if (const auto* v = node.as_floating_point())
        return json(v->get());
    if (const auto* v = node.as_boolean())
        return json(v->get());
    if (const auto* v = node.as_string())
        return json(v->get());
    throw ParseError("unsupported TOML value (dates and times are not used by this schema)");
}

template <typename T>
T required(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        throw ParseError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
    }
}

template <typename T>
T optional(const json& j, const char* key, T fallback, const std::string& where)
{
    if (!j.contains(key))
        return fallback;
    return required<T>(j, key, where);
}

} // namespace detail

inline json parse_document(const std::string& text, bool toml_format)
{
    if (toml_format) {
        try {
            const toml::table tbl = toml::parse(text);
            return detail::toml_to_json(tbl);
        } catch (const toml::parse_error& e) {
            std::ostringstream os;
            os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
            throw ParseError(os.str());
        }
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("JSON parse error: ") + e.what());
    }
}

inline bool looks_like_toml(const std::string& path, const std::string& text)
{
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml")
        return true;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return false;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
            continue;
        return c != '{';
    }
    return false;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Build ModelParams from a document tree. Shape and type problems raise
/// ParseError; a non-hyperbolic matrix or impossible rotation geometry raise
/// their own domain errors.
inline ModelParams params_from_json(const json& doc)
{
    using detail::optional;
    using detail::required;
    const std::string schema = required<std::string>(doc, "schema", "document");
    if (schema != params_schema)
        throw ParseError("unsupported schema '" + schema + "', expected '" + params_schema + "'");

    ModelParams p;
    p.n_units = required<std::size_t>(doc, "n_units", "document");
    p.b = required<double>(doc, "b", "document");

    const json& an = doc.contains("anosov") ? doc.at("anosov") : json();
    const auto m = required<std::vector<std::vector<std::int64_t>>>(an, "matrix", "anosov");
    if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
        throw ParseError("anosov.matrix must be 2x2");
    p.anosov = anosov_data({{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}});

    const json& inh = doc.contains("inhibition") ? doc.at("inhibition") : json();
    p.phi.table = required<std::vector<double>>(inh, "table", "inhibition");

    if (doc.contains("assumptions")) {
        const json& as = doc.at("assumptions");
        p.assumptions.epsilon = optional<double>(as, "epsilon", p.assumptions.epsilon, "assumptions");
        p.assumptions.c_prime = optional<double>(as, "c_prime", p.assumptions.c_prime, "assumptions");
    }

    if (!doc.contains("fibers") || !doc.at("fibers").is_array())
        throw ParseError("document: 'fibers' must be an array");
    std::size_t idx = 0;
    for (const json& f : doc.at("fibers")) {
        const std::string where = "fibers[" + std::to_string(idx++) + "]";
        const auto kind = required<std::string>(f, "kind", where);
        const double dp = required<double>(f, "delta_plus", where);
        const double dm = required<double>(f, "delta_minus", where);
        const double c = optional<double>(f, "contraction_c", 0.5, where);
        if (kind == "sine_family")
            p.fibers.push_back(NSFlowSpec::sine_family(required<double>(f, "amplitude", where), dp, dm, c));
        else if (kind == "projective")
            p.fibers.push_back(NSFlowSpec::projective(required<double>(f, "alpha", where), dp, dm, c));
        else if (kind == "tabulated_field") {
            try {
                p.fibers.push_back(
                    NSFlowSpec::tabulated(required<std::vector<double>>(f, "samples", where), dp, dm, c));
            } catch (const InvalidArgument& e) {
                throw ParseError(where + ": " + e.what());
            }
        } else
            throw ParseError(where + ": unknown kind '" + kind + "'");
    }

    if (!doc.contains("rotations") || !doc.at("rotations").is_array())
        throw ParseError("document: 'rotations' must be an array");
    idx = 0;
    for (const json& r : doc.at("rotations")) {
        const std::string where = "rotations[" + std::to_string(idx++) + "]";
        p.rotations.push_back(build_rotation_map(
            required<int>(r, "kappa", where), required<double>(r, "epsilon", where),
            required<double>(r, "d", where), required<double>(r, "slope_floor", where),
            optional<double>(r, "phase", 0.0, where)));
    }

    try {
        p.check_shape();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    return p;
}

inline json params_to_json(const ModelParams& p)
{
    json doc;
    doc["schema"] = params_schema;
    doc["n_units"] = p.n_units;
    doc["b"] = p.b;
    const auto& e = p.anosov.entries;
    doc["anosov"]["matrix"] = {{e[0][0], e[0][1]}, {e[1][0], e[1][1]}};
    doc["inhibition"]["table"] = p.phi.table;
    doc["assumptions"]["epsilon"] = p.assumptions.epsilon;
    doc["assumptions"]["c_prime"] = p.assumptions.c_prime;
    doc["fibers"] = json::array();
    for (const auto& f : p.fibers) {
        json j;
        j["kind"] = to_string(f.kind);
        switch (f.kind) {
        case FlowKind::sine_family: j["amplitude"] = f.amplitude; break;
        case FlowKind::projective: j["alpha"] = f.alpha; break;
        case FlowKind::tabulated_field: j["samples"] = f.table.samples(); break;
        }
        j["delta_plus"] = f.delta_plus;
        j["delta_minus"] = f.delta_minus;
        j["contraction_c"] = f.contraction_c;
        doc["fibers"].push_back(j);
    }
    doc["rotations"] = json::array();
    for (const auto& r : p.rotations)
        doc["rotations"].push_back({{"kappa", r.kappa},
                                    {"epsilon", r.epsilon},
                                    {"d", r.d},
                                    {"slope_floor", r.slope_floor},
                                    {"phase", r.phase}});
    return doc;
}

/// Load a params document; TOML or JSON by extension, else by first character.
inline ModelParams load_params(const std::string& path)
{
    const std::string text = read_file(path);
    return params_from_json(parse_document(text, looks_like_toml(path, text)));
}

} // namespace eirnet::io
