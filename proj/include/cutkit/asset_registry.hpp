#pragma once

#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <variant>
#include <vector>

#include "cutkit/canonical_json.hpp"

namespace cutkit {

// Unified runtime record for static (workbook) and dynamic (runtime-imported)
// assets. private_data never reaches agent-facing output.
struct AssetRecord {
    std::string identifier;
    std::string loader_type;
    std::string asset_kind;
    std::string source; // "static" | "dynamic"
    json public_data = json::object();
    json private_data = json::object();
};

struct SheetColumn {
    std::string category; // identifier | loader | public data | private data
    std::string field_name;
    std::string data_type; // str | float | int | bool
    std::string description;
};

struct AssetSheet {
    std::string sheet_name; // doubles as the asset type
    std::vector<SheetColumn> columns;
    std::vector<AssetRecord> rows;
};

struct FilterExpr {
    struct Exact { std::string value; };
    struct Regex { std::string pattern; std::regex compiled; };
    struct Numeric { std::string op; double value; };
    std::variant<Exact, Regex, Numeric> expr;
};

// "/p/" -> regex, leading > >= < <= = -> numeric comparison, anything else ->
// case-insensitive exact match. Throws "invalid-regex" / "invalid-number".
FilterExpr parse_filter(const std::string& raw);

// Rendering used when matching string filters against typed cells: strings
// as-is, ints in decimal, floats via shortest JSON form, bools true/false.
std::string cell_to_string(const json& cell);

struct ImportRequest {
    std::string data_type;
    std::string data_source;
    std::string source_type; // base64 | file_path | url
    std::string file_extension;
    std::string identifier_hint;
    json metadata = json::object();
};

struct ImportContext {
    std::string identifier;
    std::string importable_type;
    std::string loader_type;
    std::string asset_kind;
    std::vector<unsigned char> raw_bytes;
    std::string source_type;
    std::string file_extension;
    json metadata;
};

struct ReceiverResult {
    bool success = false;
    std::string asset_path;
    std::string message;
    json extra_public = json::object(); // receiver-extracted fields (e.g. duration)
};

using LoaderFn = std::function<void(const std::string& asset_id, const AssetRecord& record,
                                    const json& tool_args)>;
using ReceiverFn = std::function<ReceiverResult(const ImportContext& ctx)>;

struct ReceiverEntry {
    std::string importable_type;
    std::string loader_type;
    std::string asset_kind;
    std::string description;
    std::vector<std::string> extensions;
    ReceiverFn fn;
};

class AssetRegistry {
public:
    AssetRegistry() = default;

    // -- static workbook ----------------------------------------------------
    // Parses every `<Type>.tsv` sheet (4 header rows + data rows) in the
    // directory. Throws "malformed-header" / "type-conversion-failure" /
    // "duplicate-identifier" / "empty-workbook".
    void load_static_tables(const std::string& workbook_dir);

    // -- extension points ---------------------------------------------------
    void register_loader(const std::string& loader_type, LoaderFn fn);
    void register_receiver(const std::string& importable_type, const std::string& loader_type,
                           const std::string& asset_kind, ReceiverFn fn,
                           const std::string& description = "",
                           std::vector<std::string> extensions = {});

    bool has_loader(const std::string& loader_type) const;
    // Throws "unknown-loader" when the record's loader type is unregistered.
    void invoke_loader(const AssetRecord& record, const json& tool_args) const;

    // -- queries ------------------------------------------------------------
    std::vector<std::string> queryable_asset_types() const;
    std::string query_instruction(const std::string& asset_type) const;

    // Sanitized records: {identifier, <public fields>} only, filters ANDed.
    // include_generated: auto | only | never.
    std::vector<json> query_assets(const std::string& asset_type,
                                   const std::map<std::string, std::string>& raw_filters = {},
                                   const std::string& include_generated = "auto") const;

    const AssetRecord* find(const std::string& identifier) const;

    // -- dynamic assets -----------------------------------------------------
    std::vector<std::string> importable_asset_types() const;
    std::string import_guide(const std::string& data_type) const;

    // Resolves the payload, runs the receiver, persists the record under a
    // content-addressed `{prefix}_{hint}_{hex6}` identifier. Re-importing
    // identical content with the same hint is idempotent.
    std::string import_dynamic_asset(const ImportRequest& req);

    // Registration path for system services (TTS and friends) that must own
    // the identifier their callers chain on. Same receiver pipeline, explicit
    // id. Re-registering identical content is idempotent; same id with
    // different content throws "duplicate-identifier".
    std::string register_dynamic_with_identifier(const std::string& identifier,
                                                 const ImportRequest& req);

    // -- persistence ---------------------------------------------------------
    std::string dynamic_registry_text() const; // canonical JSON + newline
    void save_dynamic_registry(const std::string& path) const;
    void load_dynamic_registry(const std::string& path);

    const std::vector<AssetSheet>& sheets() const { return sheets_; }
    const std::vector<AssetRecord>& dynamic_records() const { return dynamic_; }

private:
    std::string resolve_payload_hash(const ImportRequest& req,
                                     std::vector<unsigned char>& bytes) const;
    std::string do_register(const std::string& identifier, const ImportRequest& req,
                            std::vector<unsigned char> bytes, const std::string& content_hash);

    const AssetSheet* find_sheet(const std::string& name) const;
    std::vector<const AssetRecord*> records_for_type(const std::string& asset_type,
                                                     const std::string& include_generated) const;

    std::vector<AssetSheet> sheets_;
    std::vector<AssetRecord> dynamic_;
    std::map<std::string, std::string> dynamic_hashes_; // identifier -> content hash
    std::map<std::string, LoaderFn> loaders_;
    std::map<std::string, ReceiverEntry> receivers_;
};

// Lowercase, non-alphanumerics collapsed to '_': the hint part of dynamic ids.
std::string sanitize_hint(const std::string& hint);

// FNV-1a 64-bit over payload bytes then hint; first 6 hex chars.
std::string content_hash_hex6(const std::vector<unsigned char>& bytes, const std::string& hint);

std::vector<unsigned char> base64_decode(const std::string& input); // throws "decode-failure"
std::string base64_encode(const std::vector<unsigned char>& bytes);

} // namespace cutkit
