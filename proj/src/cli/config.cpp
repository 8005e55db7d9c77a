#include "qdeform/catalog.hpp"
#include "qdeform/cli.hpp"
#include "qdeform/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace qdeform::cli
{

using nlohmann::json;

namespace
{

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

std::string require_string(const json& obj, const char* key)
{
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(std::string("missing key '") + key + "'");
    if (!it->is_string()) throw ConfigError(std::string("key '") + key + "' must be a string");
    return it->get<std::string>();
}

int require_int(const json& v, const std::string& key)
{
    if (!v.is_number_integer()) throw ConfigError("override '" + key + "' must be an integer");
    return v.get<int>();
}

double require_number(const json& v, const std::string& key)
{
    if (!v.is_number()) throw ConfigError("override '" + key + "' must be a number");
    return v.get<double>();
}

complex param_value(const json& v, const std::string& key)
{
    if (v.is_number()) return complex(v.get<double>(), 0.0);
    if (v.is_string()) {
        try {
            return parse_complex(v.get<std::string>());
        } catch (const Error& e) {
            throw ConfigError("parameter '" + key + "': " + e.what());
        }
    }
    throw ConfigError("parameter '" + key + "' must be a number or a complex string");
}

} // namespace

Config parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc, {"name", "F", "G", "params", "overrides"}, "config");

    Config cfg;
    cfg.name = doc.contains("name") ? require_string(doc, "name") : "custom";
    cfg.F = require_string(doc, "F");
    cfg.G = require_string(doc, "G");

    if (auto it = doc.find("params"); it != doc.end()) {
        if (!it->is_object()) throw ConfigError("'params' must be an object");
        for (auto p = it->begin(); p != it->end(); ++p) {
            cfg.params[p.key()] = param_value(p.value(), p.key());
        }
    }

    if (auto it = doc.find("overrides"); it != doc.end()) {
        if (!it->is_object()) throw ConfigError("'overrides' must be an object");
        const json& o = *it;
        reject_unknown(o, {"probeDepth", "tailTol", "certDim", "certTol", "momentTol", "injectFault"}, "overrides");
        auto& ov = cfg.overrides;
        if (o.contains("probeDepth")) ov.probeDepth = require_int(o["probeDepth"], "probeDepth");
        if (o.contains("tailTol")) ov.tailTol = require_number(o["tailTol"], "tailTol");
        if (o.contains("certDim")) ov.certDim = require_int(o["certDim"], "certDim");
        if (o.contains("certTol")) ov.certTol = require_number(o["certTol"], "certTol");
        if (o.contains("momentTol")) ov.momentTol = require_number(o["momentTol"], "momentTol");
        if (o.contains("injectFault")) {
            const json& f = o["injectFault"];
            if (!f.is_object()) throw ConfigError("'injectFault' must be an object");
            reject_unknown(f, {"n", "delta"}, "injectFault");
            if (!f.contains("n") || !f.contains("delta")) throw ConfigError("'injectFault' needs 'n' and 'delta'");
            ov.injectFault = FaultInjection{require_int(f["n"], "injectFault.n"), require_number(f["delta"], "injectFault.delta")};
            if (ov.injectFault->n < 1) throw ConfigError("'injectFault.n' must be >= 1");
        }
    }
    return cfg;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Config& config)
{
    json doc = json::object();
    doc["name"] = config.name;
    doc["F"] = config.F;
    doc["G"] = config.G;
    json params = json::object();
    for (const auto& [k, v] : config.params) params[k] = format_complex(v);
    doc["params"] = params;

    const auto& ov = config.overrides;
    json o = json::object();
    if (ov.probeDepth) o["probeDepth"] = *ov.probeDepth;
    if (ov.tailTol) o["tailTol"] = *ov.tailTol;
    if (ov.certDim) o["certDim"] = *ov.certDim;
    if (ov.certTol) o["certTol"] = *ov.certTol;
    if (ov.momentTol) o["momentTol"] = *ov.momentTol;
    if (ov.injectFault) o["injectFault"] = json{{"n", ov.injectFault->n}, {"delta", ov.injectFault->delta}};
    if (!o.empty()) doc["overrides"] = o;
    return canonical_json(doc);
}

Config builtin_config(std::string_view name, const Bindings& params)
{
    for (const auto& e : catalog::entries()) {
        if (e.name != name) continue;
        Config cfg;
        cfg.name = e.name;
        cfg.F = e.F;
        cfg.G = e.G;
        cfg.params = e.defaults;
        for (const auto& [k, v] : params) {
            auto it = cfg.params.find(k);
            if (it == cfg.params.end()) {
                throw ConfigError("builtin '" + e.name + "' has no parameter '" + k + "'");
            }
            it->second = v;
        }
        return cfg;
    }
    throw ConfigError("unknown builtin algebra '" + std::string(name) + "'");
}

DeformationSpec to_spec(const Config& config)
{
    return make_spec(config.name, config.F, config.G, config.params);
}

} // namespace qdeform::cli
