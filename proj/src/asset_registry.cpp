#include "cutkit/asset_registry.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "cutkit/error.hpp"

namespace cutkit {

namespace fs = std::filesystem;

namespace {

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '\t') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

json convert_cell(const std::string& raw, const std::string& data_type,
                  const std::string& sheet, size_t row, const std::string& field) {
    const auto fail = [&]() {
        throw Error("type-conversion-failure",
                    "sheet " + sheet + " row " + std::to_string(row) + " column " + field +
                        ": cannot convert '" + raw + "' to " + data_type);
    };
    if (data_type == "str") return raw;
    if (data_type == "float") {
        try {
            size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size()) fail();
            return v;
        } catch (const Error&) {
            throw;
        } catch (...) {
            fail();
        }
    }
    if (data_type == "int") {
        try {
            size_t pos = 0;
            const long long v = std::stoll(raw, &pos);
            if (pos != raw.size()) fail();
            return v;
        } catch (const Error&) {
            throw;
        } catch (...) {
            fail();
        }
    }
    if (data_type == "bool") {
        const std::string l = to_lower(raw);
        if (l == "true" || l == "1") return true;
        if (l == "false" || l == "0") return false;
        fail();
    }
    throw Error("malformed-header", "sheet " + sheet + ": unknown data type " + data_type);
}

} // namespace

std::string cell_to_string(const json& cell) {
    if (cell.is_string()) return cell.get<std::string>();
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    return cell.dump();
}

FilterExpr parse_filter(const std::string& raw) {
    FilterExpr f;
    if (raw.size() >= 2 && raw.front() == '/' && raw.back() == '/') {
        const std::string pattern = raw.substr(1, raw.size() - 2);
        try {
            f.expr = FilterExpr::Regex{pattern,
                                       std::regex(pattern, std::regex::ECMAScript |
                                                               std::regex::icase)};
        } catch (const std::regex_error& e) {
            throw Error("invalid-regex", "cannot compile /" + pattern + "/: " + e.what());
        }
        return f;
    }
    static const std::vector<std::string> ops = {">=", "<=", ">", "<", "="};
    for (const auto& op : ops) {
        if (raw.rfind(op, 0) == 0) {
            const std::string num = raw.substr(op.size());
            try {
                size_t pos = 0;
                const double v = std::stod(num, &pos);
                if (pos != num.size() || !std::isfinite(v))
                    throw Error("invalid-number", "bad number in filter: " + raw);
                f.expr = FilterExpr::Numeric{op, v};
                return f;
            } catch (const Error&) {
                throw;
            } catch (...) {
                throw Error("invalid-number", "bad number in filter: " + raw);
            }
        }
    }
    f.expr = FilterExpr::Exact{raw};
    return f;
}

namespace {

bool filter_matches(const FilterExpr& f, const json& cell, const std::string& field) {
    if (std::holds_alternative<FilterExpr::Exact>(f.expr)) {
        const auto& e = std::get<FilterExpr::Exact>(f.expr);
        return to_lower(cell_to_string(cell)) == to_lower(e.value);
    }
    if (std::holds_alternative<FilterExpr::Regex>(f.expr)) {
        const auto& r = std::get<FilterExpr::Regex>(f.expr);
        return std::regex_search(cell_to_string(cell), r.compiled);
    }
    const auto& n = std::get<FilterExpr::Numeric>(f.expr);
    double v = 0.0;
    if (cell.is_number()) {
        v = cell.get<double>();
    } else if (cell.is_string()) {
        try {
            size_t pos = 0;
            v = std::stod(cell.get<std::string>(), &pos);
            if (pos != cell.get<std::string>().size()) throw std::invalid_argument("trailing");
        } catch (...) {
            throw Error("non-numeric-field",
                        "numeric filter on non-numeric value in field " + field);
        }
    } else {
        throw Error("non-numeric-field", "numeric filter on non-numeric field " + field);
    }
    if (n.op == ">") return v > n.value;
    if (n.op == ">=") return v >= n.value;
    if (n.op == "<") return v < n.value;
    if (n.op == "<=") return v <= n.value;
    return v == n.value;
}

} // namespace

void AssetRegistry::load_static_tables(const std::string& workbook_dir) {
    if (!fs::is_directory(workbook_dir))
        throw Error("empty-workbook", "workbook directory not found: " + workbook_dir);

    std::vector<fs::path> sheet_files;
    for (const auto& entry : fs::directory_iterator(workbook_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".tsv")
            sheet_files.push_back(entry.path());
    std::sort(sheet_files.begin(), sheet_files.end());
    if (sheet_files.empty())
        throw Error("empty-workbook", "no .tsv sheets in " + workbook_dir);

    std::vector<AssetSheet> sheets;
    for (const auto& path : sheet_files) {
        AssetSheet sheet;
        sheet.sheet_name = path.stem().string();

        std::ifstream in(path);
        std::vector<std::vector<std::string>> lines;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) lines.push_back(split_tabs(line));
        if (lines.size() < 4)
            throw Error("malformed-header",
                        "sheet " + sheet.sheet_name + " needs 4 header rows");

        const size_t ncols = lines[0].size();
        for (size_t r = 1; r < 4; ++r)
            if (lines[r].size() != ncols)
                throw Error("malformed-header",
                            "sheet " + sheet.sheet_name + " header row " + std::to_string(r + 1) +
                                " has " + std::to_string(lines[r].size()) + " columns, expected " +
                                std::to_string(ncols));

        int id_col = -1, loader_col = -1;
        for (size_t c = 0; c < ncols; ++c) {
            SheetColumn col{lines[0][c], lines[1][c], lines[2][c], lines[3][c]};
            if (col.category == "identifier") {
                if (id_col >= 0)
                    throw Error("malformed-header",
                                "sheet " + sheet.sheet_name + " has two identifier columns");
                id_col = static_cast<int>(c);
            } else if (col.category == "loader") {
                if (loader_col >= 0)
                    throw Error("malformed-header",
                                "sheet " + sheet.sheet_name + " has two loader columns");
                loader_col = static_cast<int>(c);
            } else if (col.category != "public data" && col.category != "private data") {
                throw Error("malformed-header", "sheet " + sheet.sheet_name +
                                                    ": unknown category '" + col.category + "'");
            }
            if (col.category == "public data" && col.field_name == "identifier")
                throw Error("malformed-header",
                            "sheet " + sheet.sheet_name + ": public field may not shadow the "
                            "identifier column");
            sheet.columns.push_back(std::move(col));
        }
        if (id_col < 0 || loader_col < 0)
            throw Error("malformed-header", "sheet " + sheet.sheet_name +
                                                " must carry one identifier and one loader column");

        for (size_t r = 4; r < lines.size(); ++r) {
            const auto& cells = lines[r];
            if (cells.size() != ncols)
                throw Error("type-conversion-failure",
                            "sheet " + sheet.sheet_name + " row " + std::to_string(r + 1) +
                                " has " + std::to_string(cells.size()) + " cells, expected " +
                                std::to_string(ncols));
            AssetRecord rec;
            rec.source = "static";
            rec.asset_kind = sheet.sheet_name;
            for (size_t c = 0; c < ncols; ++c) {
                const auto& col = sheet.columns[c];
                if (col.category == "identifier") {
                    rec.identifier = cells[c];
                } else if (col.category == "loader") {
                    rec.loader_type = cells[c];
                } else {
                    const json v = convert_cell(cells[c], col.data_type, sheet.sheet_name, r + 1,
                                                col.field_name);
                    if (col.category == "public data")
                        rec.public_data[col.field_name] = v;
                    else
                        rec.private_data[col.field_name] = v;
                }
            }
            if (rec.identifier.empty())
                throw Error("type-conversion-failure", "sheet " + sheet.sheet_name + " row " +
                                                           std::to_string(r + 1) +
                                                           ": empty identifier");
            sheet.rows.push_back(std::move(rec));
        }
        sheets.push_back(std::move(sheet));
    }

    // uniqueness across every sheet and the dynamic registry
    std::map<std::string, std::string> seen;
    for (const auto& s : sheets)
        for (const auto& r : s.rows) {
            auto [it, inserted] = seen.emplace(r.identifier, s.sheet_name);
            if (!inserted)
                throw Error("duplicate-identifier", "identifier " + r.identifier +
                                                        " appears in both " + it->second +
                                                        " and " + s.sheet_name);
        }
    for (const auto& r : dynamic_)
        if (seen.count(r.identifier))
            throw Error("duplicate-identifier",
                        "identifier " + r.identifier + " already registered dynamically");

    sheets_ = std::move(sheets);
}

void AssetRegistry::register_loader(const std::string& loader_type, LoaderFn fn) {
    if (!loaders_.emplace(loader_type, std::move(fn)).second)
        throw Error("duplicate-registration", "loader already registered: " + loader_type);
}

void AssetRegistry::register_receiver(const std::string& importable_type,
                                      const std::string& loader_type,
                                      const std::string& asset_kind, ReceiverFn fn,
                                      const std::string& description,
                                      std::vector<std::string> extensions) {
    ReceiverEntry entry{importable_type, loader_type, asset_kind, description,
                        std::move(extensions), std::move(fn)};
    if (!receivers_.emplace(importable_type, std::move(entry)).second)
        throw Error("duplicate-registration", "receiver already registered: " + importable_type);
}

bool AssetRegistry::has_loader(const std::string& loader_type) const {
    return loaders_.count(loader_type) > 0;
}

void AssetRegistry::invoke_loader(const AssetRecord& record, const json& tool_args) const {
    auto it = loaders_.find(record.loader_type);
    if (it == loaders_.end())
        throw Error("unknown-loader", "no loader registered for type: " + record.loader_type);
    it->second(record.identifier, record, tool_args);
}

const AssetSheet* AssetRegistry::find_sheet(const std::string& name) const {
    for (const auto& s : sheets_)
        if (s.sheet_name == name) return &s;
    return nullptr;
}

std::vector<std::string> AssetRegistry::queryable_asset_types() const {
    std::vector<std::string> types;
    for (const auto& s : sheets_) types.push_back(s.sheet_name);
    for (const auto& r : dynamic_)
        if (std::find(types.begin(), types.end(), r.asset_kind) == types.end())
            types.push_back(r.asset_kind);
    return types;
}

std::vector<const AssetRecord*> AssetRegistry::records_for_type(
    const std::string& asset_type, const std::string& include_generated) const {
    const AssetSheet* sheet = find_sheet(asset_type);
    std::vector<const AssetRecord*> out;
    if (include_generated != "only" && sheet)
        for (const auto& r : sheet->rows) out.push_back(&r);
    if (include_generated != "never")
        for (const auto& r : dynamic_)
            if (r.asset_kind == asset_type) out.push_back(&r);
    return out;
}

std::vector<json> AssetRegistry::query_assets(const std::string& asset_type,
                                              const std::map<std::string, std::string>& raw_filters,
                                              const std::string& include_generated) const {
    if (include_generated != "auto" && include_generated != "only" && include_generated != "never")
        throw Error("invalid-argument", "include_generated must be auto|only|never");

    const auto types = queryable_asset_types();
    if (std::find(types.begin(), types.end(), asset_type) == types.end())
        throw Error("unknown-asset-type", "unknown asset type: " + asset_type);

    std::map<std::string, FilterExpr> filters;
    for (const auto& [field, raw] : raw_filters) filters.emplace(field, parse_filter(raw));

    const AssetSheet* sheet = find_sheet(asset_type);
    if (sheet && !filters.empty()) {
        for (const auto& [field, _] : filters) {
            const bool known =
                std::any_of(sheet->columns.begin(), sheet->columns.end(),
                            [&](const SheetColumn& c) {
                                return c.category == "public data" && c.field_name == field;
                            });
            // dynamic records of the same kind may carry extra metadata fields
            const bool dynamic_known = std::any_of(
                dynamic_.begin(), dynamic_.end(), [&](const AssetRecord& r) {
                    return r.asset_kind == asset_type && r.public_data.contains(field);
                });
            if (!known && !dynamic_known)
                throw Error("unknown-filter-field",
                            "asset type " + asset_type + " has no public field " + field);
        }
    }

    std::vector<json> out;
    for (const AssetRecord* rec : records_for_type(asset_type, include_generated)) {
        bool ok = true;
        for (const auto& [field, f] : filters) {
            if (!rec->public_data.contains(field)) {
                ok = false;
                break;
            }
            if (!filter_matches(f, rec->public_data.at(field), field)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        json item;
        item["identifier"] = rec->identifier;
        for (auto it = rec->public_data.begin(); it != rec->public_data.end(); ++it)
            item[it.key()] = it.value();
        out.push_back(std::move(item));
    }
    return out;
}

std::string AssetRegistry::query_instruction(const std::string& asset_type) const {
    const auto types = queryable_asset_types();
    if (std::find(types.begin(), types.end(), asset_type) == types.end())
        throw Error("unknown-asset-type", "unknown asset type: " + asset_type);

    std::ostringstream out;
    out << "Asset type: " << asset_type << "\n";
    out << "Queryable public fields:\n";
    const AssetSheet* sheet = find_sheet(asset_type);
    if (sheet) {
        for (const auto& c : sheet->columns)
            if (c.category == "public data") {
                out << "  - " << c.field_name << " (" << c.data_type << ")";
                if (!c.description.empty()) out << ": " << c.description;
                out << "\n";
            }
    } else {
        std::vector<std::string> listed;
        for (const auto& r : dynamic_) {
            if (r.asset_kind != asset_type) continue;
            for (auto it = r.public_data.begin(); it != r.public_data.end(); ++it) {
                if (std::find(listed.begin(), listed.end(), it.key()) != listed.end()) continue;
                listed.push_back(it.key());
                out << "  - " << it.key() << " ("
                    << (it.value().is_string() ? "str"
                        : it.value().is_boolean() ? "bool"
                        : it.value().is_number_integer() ? "int" : "float")
                    << ")\n";
            }
        }
    }
    out << "Filter syntax: exact match (\"male\", case-insensitive), regex (\"/pattern/\", "
           "case-insensitive search), numeric comparison (\">5.0\", \"<=10\", \"=3\").\n";
    out << "Filters combine with AND.\n";
    return out.str();
}

const AssetRecord* AssetRegistry::find(const std::string& identifier) const {
    for (const auto& s : sheets_)
        for (const auto& r : s.rows)
            if (r.identifier == identifier) return &r;
    for (const auto& r : dynamic_)
        if (r.identifier == identifier) return &r;
    return nullptr;
}

std::vector<std::string> AssetRegistry::importable_asset_types() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : receivers_) out.push_back(k);
    return out;
}

std::string AssetRegistry::import_guide(const std::string& data_type) const {
    auto it = receivers_.find(data_type);
    if (it == receivers_.end())
        throw Error("unknown-data-type", "no receiver for importable type: " + data_type);
    std::ostringstream out;
    out << "Importable type: " << data_type << "\n";
    out << "Loads as: " << it->second.loader_type << " (asset kind " << it->second.asset_kind
        << ")\n";
    if (!it->second.description.empty()) out << it->second.description << "\n";
    if (!it->second.extensions.empty()) {
        out << "Supported extensions:";
        for (const auto& e : it->second.extensions) out << " " << e;
        out << "\n";
    }
    out << "Source modes: base64, file_path, url.\n";
    return out.str();
}

std::string AssetRegistry::resolve_payload_hash(const ImportRequest& req,
                                                std::vector<unsigned char>& bytes) const {
    if (req.source_type == "base64") {
        bytes = base64_decode(req.data_source);
    } else if (req.source_type == "file_path") {
        std::ifstream in(req.data_source, std::ios::binary);
        if (!in) throw Error("decode-failure", "cannot read file: " + req.data_source);
        bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    } else if (req.source_type == "url") {
        const auto scheme_end = req.data_source.find("://");
        if (scheme_end == std::string::npos)
            throw Error("url-fetch-failure", "bad url: " + req.data_source);
        const auto path_start = req.data_source.find('/', scheme_end + 3);
        const std::string host = req.data_source.substr(
            0, path_start == std::string::npos ? req.data_source.size() : path_start);
        const std::string path =
            path_start == std::string::npos ? "/" : req.data_source.substr(path_start);
        httplib::Client client(host);
        auto res = client.Get(path);
        if (!res || res->status != 200)
            throw Error("url-fetch-failure", "fetch failed: " + req.data_source);
        bytes.assign(res->body.begin(), res->body.end());
    } else {
        throw Error("invalid-argument", "source_type must be base64|file_path|url");
    }
    return content_hash_hex6(bytes, sanitize_hint(req.identifier_hint));
}

std::string AssetRegistry::import_dynamic_asset(const ImportRequest& req) {
    auto rit = receivers_.find(req.data_type);
    if (rit == receivers_.end()) {
        std::string known;
        for (const auto& [k, _] : receivers_) known += (known.empty() ? "" : ", ") + k;
        throw Error("unknown-data-type",
                    "no receiver for importable type '" + req.data_type +
                        "'; registered types: " + known);
    }
    std::vector<unsigned char> bytes;
    const std::string hash = resolve_payload_hash(req, bytes);
    const std::string hint = sanitize_hint(req.identifier_hint);
    const std::string identifier = req.data_type + "_" + hint + "_" + hash;
    return do_register(identifier, req, std::move(bytes), hash);
}

std::string AssetRegistry::register_dynamic_with_identifier(const std::string& identifier,
                                                            const ImportRequest& req) {
    if (receivers_.find(req.data_type) == receivers_.end())
        throw Error("unknown-data-type", "no receiver for importable type: " + req.data_type);
    std::vector<unsigned char> bytes;
    const std::string hash = resolve_payload_hash(req, bytes);
    return do_register(identifier, req, std::move(bytes), hash);
}

std::string AssetRegistry::do_register(const std::string& identifier, const ImportRequest& req,
                                       std::vector<unsigned char> bytes,
                                       const std::string& content_hash) {
    auto hit = dynamic_hashes_.find(identifier);
    if (hit != dynamic_hashes_.end()) {
        if (hit->second == content_hash) return identifier; // idempotent re-import
        throw Error("duplicate-identifier",
                    "identifier " + identifier + " already registered with different content");
    }
    for (const auto& s : sheets_)
        for (const auto& r : s.rows)
            if (r.identifier == identifier)
                throw Error("duplicate-identifier",
                            "identifier " + identifier + " collides with a static asset");

    const auto& entry = receivers_.at(req.data_type);
    ImportContext ctx{identifier, req.data_type,      entry.loader_type, entry.asset_kind,
                      std::move(bytes), req.source_type, req.file_extension, req.metadata};
    ReceiverResult result = entry.fn(ctx);
    if (!result.success)
        throw Error("receiver-failure", result.message.empty()
                                            ? "receiver rejected " + identifier
                                            : result.message);

    AssetRecord rec;
    rec.identifier = identifier;
    rec.loader_type = entry.loader_type;
    rec.asset_kind = entry.asset_kind;
    rec.source = "dynamic";
    rec.public_data = req.metadata.is_object() ? req.metadata : json::object();
    for (auto it = result.extra_public.begin(); it != result.extra_public.end(); ++it)
        rec.public_data[it.key()] = it.value();
    rec.private_data["importable_type"] = req.data_type;
    rec.private_data["asset_path"] = result.asset_path;
    rec.private_data["raw_path"] = "Raw/dynamic/" + identifier + req.file_extension;
    rec.private_data["content_hash"] = content_hash;
    dynamic_.push_back(std::move(rec));
    dynamic_hashes_[identifier] = content_hash;
    return identifier;
}

std::string AssetRegistry::dynamic_registry_text() const {
    json doc = json::array();
    for (const auto& r : dynamic_) {
        doc.push_back({{"identifier", r.identifier},
                       {"loader_type", r.loader_type},
                       {"asset_kind", r.asset_kind},
                       {"source", r.source},
                       {"public_data", r.public_data},
                       {"private_data", r.private_data}});
    }
    return canonical_dump(doc) + "\n";
}

void AssetRegistry::save_dynamic_registry(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io-failure", "cannot write " + path);
    out << dynamic_registry_text();
}

void AssetRegistry::load_dynamic_registry(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io-failure", "cannot read " + path);
    json doc = json::parse(in);
    dynamic_.clear();
    dynamic_hashes_.clear();
    for (const auto& jr : doc) {
        AssetRecord r;
        r.identifier = jr.at("identifier").get<std::string>();
        r.loader_type = jr.at("loader_type").get<std::string>();
        r.asset_kind = jr.at("asset_kind").get<std::string>();
        r.source = jr.at("source").get<std::string>();
        r.public_data = jr.at("public_data");
        r.private_data = jr.at("private_data");
        dynamic_hashes_[r.identifier] = r.private_data.value("content_hash", "");
        dynamic_.push_back(std::move(r));
    }
}

std::string sanitize_hint(const std::string& hint) {
    std::string out;
    for (unsigned char c : hint) {
        if (std::isalnum(c))
            out += static_cast<char>(std::tolower(c));
        else if (!out.empty() && out.back() != '_')
            out += '_';
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    if (out.empty()) out = "asset";
    return out;
}

std::string content_hash_hex6(const std::vector<unsigned char>& bytes, const std::string& hint) {
    uint64_t h = 14695981039346656037ull;
    const auto mix = [&](unsigned char c) {
        h ^= c;
        h *= 1099511628211ull;
    };
    for (unsigned char b : bytes) mix(b);
    for (char c : hint) mix(static_cast<unsigned char>(c));
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 6; ++i) {
        out += hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string base64_encode(const std::vector<unsigned char>& bytes) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    size_t i = 0;
    while (i + 2 < bytes.size()) {
        const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += alphabet[v & 63];
        i += 3;
    }
    if (i + 1 == bytes.size()) {
        const uint32_t v = bytes[i] << 16;
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& input) {
    const auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<unsigned char> out;
    uint32_t buf = 0;
    int bits = 0;
    for (char c : input) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = value_of(c);
        if (v < 0) throw Error("decode-failure", "invalid base64 payload");
        buf = (buf << 6) | static_cast<uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((buf >> bits) & 0xff));
        }
    }
    return out;
}

} // namespace cutkit
