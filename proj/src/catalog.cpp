#include "qdeform/catalog.hpp"

#include "qdeform/error.hpp"

namespace qdeform::catalog
{

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> table = {
        {"harmonic", "1", "1", {}},
        {"arik-coon", "q", "1", {{"q", complex(0.5, 0.0)}}},
        {"biedenharn", "q", "q^(-n)", {{"q", complex(2.0, 0.0)}}},
        {"pq", "q", "p^(-n)", {{"p", complex(2.0, 0.0)}, {"q", complex(1.5, 0.0)}}},
    };
    return table;
}

std::vector<std::string> names()
{
    std::vector<std::string> out;
    for (const auto& e : entries()) out.push_back(e.name);
    return out;
}

DeformationSpec builtin(std::string_view name, const Bindings& overrides)
{
    for (const auto& e : entries()) {
        if (e.name != name) continue;
        Bindings params = e.defaults;
        for (const auto& [key, value] : overrides) {
            auto it = params.find(key);
            if (it == params.end()) {
                throw ConfigError("builtin '" + e.name + "' has no parameter '" + key + "'");
            }
            it->second = value;
        }
        return make_spec(e.name, e.F, e.G, std::move(params));
    }
    throw ConfigError("unknown builtin algebra '" + std::string(name) + "'");
}

} // namespace qdeform::catalog
