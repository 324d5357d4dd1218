#include "cutkit/canonical_json.hpp"

#include <cstdio>
#include <string_view>

namespace cutkit {

std::string format_fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    // -0 and negative values that round to zero at six decimals print unsigned
    if (std::string_view(buf) == "-0.000000") return "0.000000";
    return buf;
}

namespace {

void dump_value(const json& v, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) { out += "{}"; return; }
            out += "{\n";
            size_t i = 0;
            for (auto it = v.begin(); it != v.end(); ++it, ++i) {
                out += pad_in;
                out += json(it.key()).dump();
                out += ": ";
                dump_value(it.value(), out, indent, depth + 1);
                if (i + 1 < v.size()) out += ",";
                out += "\n";
            }
            out += pad + "}";
            return;
        }
        case json::value_t::array: {
            if (v.empty()) { out += "[]"; return; }
            out += "[\n";
            for (size_t i = 0; i < v.size(); ++i) {
                out += pad_in;
                dump_value(v[i], out, indent, depth + 1);
                if (i + 1 < v.size()) out += ",";
                out += "\n";
            }
            out += pad + "]";
            return;
        }
        case json::value_t::number_float:
            out += format_fixed6(v.get<double>());
            return;
        default:
            out += v.dump();
            return;
    }
}

} // namespace

std::string canonical_dump(const json& value, int indent) {
    std::string out;
    dump_value(value, out, indent, 0);
    return out;
}

} // namespace cutkit
