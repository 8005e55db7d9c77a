#include "qdeform/cli.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace qdeform::cli
{

std::string format_number(double value, int significant)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, value);
    return buf;
}

namespace
{

void write_string(const std::string& s, std::string& out)
{
    // nlohmann's escaping, without its float formatting
    out += nlohmann::json(s).dump();
}

void write(const nlohmann::json& v, int indent, std::string& out)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string padIn(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (v.type()) {
    case nlohmann::json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += padIn;
            write_string(it.key(), out);
            out += ": ";
            write(it.value(), indent + 1, out);
        }
        out += "\n" + pad + "}";
        return;
    }
    case nlohmann::json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ",\n";
            out += padIn;
            write(v[i], indent + 1, out);
        }
        out += "\n" + pad + "]";
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double d = v.get<double>();
        out += std::isfinite(d) ? format_number(d, 17) : "null";
        return;
    }
    default:
        out += v.dump();
        return;
    }
}

} // namespace

std::string canonical_json(const nlohmann::json& value)
{
    std::string out;
    write(value, 0, out);
    out += '\n';
    return out;
}

} // namespace qdeform::cli
