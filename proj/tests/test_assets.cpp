#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <regex>

#include "cutkit/asset_registry.hpp"
#include "cutkit/error.hpp"
#include "test_support.hpp"

using namespace cutkit;

namespace {

const std::string kSampleWorkbook = oracle::repo_root() + "/tests/fixtures/sample_workbook";

AssetRegistry sample_registry() {
    AssetRegistry reg;
    reg.load_static_tables(kSampleWorkbook);
    return reg;
}

void register_blob_receiver(AssetRegistry& reg) {
    reg.register_receiver("blob", "blob_loader", "Blobs", [](const ImportContext& ctx) {
        ReceiverResult r;
        r.success = true;
        r.asset_path = "/Game/Blobs/" + ctx.identifier;
        return r;
    });
}

std::string tsv_line(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) out += (i ? "\t" : "") + cells[i];
    return out + "\n";
}

// -- independent linear-scan filter oracle --------------------------------

struct OracleFilter {
    enum Kind { Exact, Rgx, Num } kind;
    std::string text;
    std::string op;
    double value = 0.0;
};

OracleFilter oracle_parse(const std::string& raw) {
    if (raw.size() >= 2 && raw.front() == '/' && raw.back() == '/')
        return {OracleFilter::Rgx, raw.substr(1, raw.size() - 2), "", 0.0};
    for (const std::string op : {">=", "<=", ">", "<", "="})
        if (raw.rfind(op, 0) == 0)
            return {OracleFilter::Num, "", op, std::stod(raw.substr(op.size()))};
    return {OracleFilter::Exact, raw, "", 0.0};
}

std::string oracle_render(const json& cell) {
    if (cell.is_string()) return cell.get<std::string>();
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    return cell.dump();
}

std::string oracle_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool oracle_match(const OracleFilter& f, const json& cell) {
    switch (f.kind) {
        case OracleFilter::Exact:
            return oracle_lower(oracle_render(cell)) == oracle_lower(f.text);
        case OracleFilter::Rgx: {
            const std::regex re(f.text, std::regex::ECMAScript | std::regex::icase);
            return std::regex_search(oracle_render(cell), re);
        }
        case OracleFilter::Num: {
            const double v = cell.is_number() ? cell.get<double>()
                                              : std::stod(cell.get<std::string>());
            if (f.op == ">") return v > f.value;
            if (f.op == ">=") return v >= f.value;
            if (f.op == "<") return v < f.value;
            if (f.op == "<=") return v <= f.value;
            return v == f.value;
        }
    }
    return false;
}

} // namespace

TEST_CASE("sample workbook loads the documented records") {
    AssetRegistry reg = sample_registry();
    REQUIRE(reg.sheets().size() == 1);
    const AssetSheet& sheet = reg.sheets()[0];
    CHECK(sheet.sheet_name == "Characters");
    REQUIRE(sheet.rows.size() == 2);
    const AssetRecord& alice = sheet.rows[0];
    CHECK(alice.identifier == "char_01");
    CHECK(alice.loader_type == "metahuman_character");
    CHECK(alice.asset_kind == "Characters");
    CHECK(alice.source == "static");
    CHECK(alice.public_data == json({{"name", "Alice"}, {"gender", "female"}}));
    CHECK(alice.private_data ==
          json({{"class_name", "BP_Alice"}, {"blueprint_path", "/Game/BP/Alice"}}));
}

TEST_CASE("workbook loader rejects empty and malformed inputs") {
    AssetRegistry reg;
    const std::string empty = oracle::scratch_dir("empty_workbook");
    CHECK_THROWS_AS(reg.load_static_tables(empty), Error);
    CHECK_THROWS_AS(reg.load_static_tables(empty + "/missing"), Error);

    const std::string bad = oracle::scratch_dir("bad_workbook");
    oracle::write_file(bad + "/Broken.tsv", tsv_line({"identifier", "loader"}) +
                                                tsv_line({"id", "loader_type"}));
    CHECK_THROWS_AS(reg.load_static_tables(bad), Error); // fewer than 4 header rows

    const std::string dup = oracle::scratch_dir("dup_workbook");
    oracle::write_file(dup + "/Things.tsv",
                       tsv_line({"identifier", "loader", "public data"}) +
                           tsv_line({"id", "loader_type", "size"}) +
                           tsv_line({"str", "str", "float"}) + tsv_line({"", "", ""}) +
                           tsv_line({"t1", "thing", "1.5"}) + tsv_line({"t1", "thing", "2.0"}));
    CHECK_THROWS_AS(reg.load_static_tables(dup), Error); // duplicate identifier

    const std::string conv = oracle::scratch_dir("conv_workbook");
    oracle::write_file(conv + "/Things.tsv",
                       tsv_line({"identifier", "loader", "public data"}) +
                           tsv_line({"id", "loader_type", "size"}) +
                           tsv_line({"str", "str", "float"}) + tsv_line({"", "", ""}) +
                           tsv_line({"t1", "thing", "abc"}));
    try {
        reg.load_static_tables(conv);
        FAIL("expected type-conversion-failure");
    } catch (const Error& e) {
        CHECK(e.code() == "type-conversion-failure");
        CHECK(std::string(e.what()).find("size") != std::string::npos); // names the column
        CHECK(std::string(e.what()).find("row 5") != std::string::npos);
    }

    const std::string noloader = oracle::scratch_dir("noloader_workbook");
    oracle::write_file(noloader + "/Things.tsv",
                       tsv_line({"identifier", "public data"}) + tsv_line({"id", "size"}) +
                           tsv_line({"str", "float"}) + tsv_line({"", ""}) +
                           tsv_line({"t1", "1.0"}));
    CHECK_THROWS_AS(reg.load_static_tables(noloader), Error);
}

TEST_CASE("typed cells convert per the header row") {
    const std::string dir = oracle::scratch_dir("typed_workbook");
    oracle::write_file(
        dir + "/Mixed.tsv",
        tsv_line({"identifier", "loader", "public data", "public data", "public data"}) +
            tsv_line({"id", "loader_type", "count", "ratio", "flagged"}) +
            tsv_line({"str", "str", "int", "float", "bool"}) + tsv_line({"", "", "", "", ""}) +
            tsv_line({"m1", "none", "42", "2.5", "true"}) +
            tsv_line({"m2", "none", "-7", "0.125", "false"}));
    AssetRegistry reg;
    reg.load_static_tables(dir);
    const auto& rec = reg.sheets()[0].rows[0];
    CHECK(rec.public_data.at("count") == 42);
    CHECK(rec.public_data.at("ratio") == 2.5);
    CHECK(rec.public_data.at("flagged") == true);
}

TEST_CASE("parse_filter recognizes the three expression kinds") {
    CHECK(std::holds_alternative<FilterExpr::Exact>(parse_filter("male").expr));
    CHECK(std::holds_alternative<FilterExpr::Regex>(parse_filter("/.*warrior.*/").expr));
    const FilterExpr ge = parse_filter(">=5.0");
    REQUIRE(std::holds_alternative<FilterExpr::Numeric>(ge.expr));
    CHECK(std::get<FilterExpr::Numeric>(ge.expr).op == ">=");
    CHECK(std::get<FilterExpr::Numeric>(ge.expr).value == 5.0);
    CHECK(std::get<FilterExpr::Numeric>(parse_filter("<=10").expr).value == 10.0);
    CHECK(std::get<FilterExpr::Numeric>(parse_filter("=3").expr).op == "=");

    CHECK_THROWS_AS(parse_filter("/[/"), Error);
    CHECK_THROWS_AS(parse_filter(">abc"), Error);
    CHECK_THROWS_AS(parse_filter(">="), Error);
}

TEST_CASE("query_assets returns sanitized records and honors filters") {
    AssetRegistry reg = sample_registry();

    const auto females = reg.query_assets("Characters", {{"gender", "female"}});
    REQUIRE(females.size() == 1);
    CHECK(females[0].at("identifier") == "char_01");

    const auto all = reg.query_assets("Characters");
    CHECK(all.size() == 2);
    for (const auto& item : all) {
        for (auto it = item.begin(); it != item.end(); ++it) {
            const bool allowed =
                it.key() == "identifier" || it.key() == "name" || it.key() == "gender";
            CHECK(allowed);
        }
        CHECK_FALSE(item.contains("class_name"));
        CHECK_FALSE(item.contains("blueprint_path"));
    }

    // case-insensitive exact and regex
    CHECK(reg.query_assets("Characters", {{"gender", "FEMALE"}}).size() == 1);
    CHECK(reg.query_assets("Characters", {{"name", "/ali/"}}).size() == 1);

    CHECK_THROWS_AS(reg.query_assets("Unknown"), Error);
    CHECK_THROWS_AS(reg.query_assets("Characters", {{"height", ">3"}}), Error);
}

TEST_CASE("query instruction lists exactly the public fields") {
    AssetRegistry reg = sample_registry();
    CHECK(std::find(reg.queryable_asset_types().begin(), reg.queryable_asset_types().end(),
                    "Characters") != reg.queryable_asset_types().end());
    const std::string guide = reg.query_instruction("Characters");
    CHECK(guide.find("name") != std::string::npos);
    CHECK(guide.find("gender") != std::string::npos);
    CHECK(guide.find("male/female") != std::string::npos); // row-4 description
    CHECK(guide.find("class_name") == std::string::npos);
    CHECK(guide.find("blueprint_path") == std::string::npos);
    CHECK(guide.find("regex") != std::string::npos);
    CHECK_THROWS_AS(reg.query_instruction("Nope"), Error);
}

TEST_CASE("query_assets equals the linear-scan oracle on randomized sheets") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> rows(0, 500);
    std::uniform_int_distribution<int> word(0, 9);
    std::uniform_real_distribution<double> num(-50.0, 50.0);
    std::uniform_int_distribution<int> filter_kind(0, 2);
    std::uniform_int_distribution<int> nfilters(0, 3);
    const std::vector<std::string> words = {"warrior", "mage",  "rogue",  "guard", "noble",
                                            "smith",   "ranger", "priest", "bard",  "monk"};

    for (int iter = 0; iter < 1000; ++iter) {
        const std::string dir = oracle::scratch_dir("gen_workbook");
        const int n = rows(rng);
        std::string sheet =
            tsv_line({"identifier", "loader", "public data", "public data", "public data",
                      "private data"}) +
            tsv_line({"id", "loader_type", "label", "power", "level", "secret_path"}) +
            tsv_line({"str", "str", "str", "float", "int", "str"}) +
            tsv_line({"", "", "", "", "", ""});
        std::vector<json> raw_rows;
        for (int r = 0; r < n; ++r) {
            const std::string label =
                words[static_cast<size_t>(word(rng))] + "_" + std::to_string(word(rng));
            const double power = std::round(num(rng) * 100.0) / 100.0;
            const int level = word(rng);
            sheet += tsv_line({"rec_" + std::to_string(r), "none", label,
                               json(power).dump(), std::to_string(level), "/Hidden/" + label});
            raw_rows.push_back({{"identifier", "rec_" + std::to_string(r)},
                                {"label", label},
                                {"power", power},
                                {"level", level}});
        }
        oracle::write_file(dir + "/Gen.tsv", sheet);
        AssetRegistry reg;
        reg.load_static_tables(dir);

        std::map<std::string, std::string> filters;
        std::vector<std::pair<std::string, OracleFilter>> oracle_filters;
        const int fcount = nfilters(rng);
        for (int f = 0; f < fcount; ++f) {
            const int kind = filter_kind(rng);
            std::string field, raw;
            if (kind == 0) {
                field = "label";
                raw = words[static_cast<size_t>(word(rng))] + "_" + std::to_string(word(rng));
            } else if (kind == 1) {
                field = "label";
                raw = "/" + words[static_cast<size_t>(word(rng))] + "/";
            } else {
                field = word(rng) % 2 ? "power" : "level";
                const std::vector<std::string> ops = {">", ">=", "<", "<=", "="};
                raw = ops[static_cast<size_t>(word(rng)) % 5] +
                      json(std::round(num(rng))).dump();
            }
            filters[field] = raw;                            // last filter per field wins
            std::erase_if(oracle_filters, [&](const auto& p) { return p.first == field; });
            oracle_filters.emplace_back(field, oracle_parse(raw));
        }

        const auto got = reg.query_assets("Gen", filters);

        std::vector<std::string> want;
        for (const auto& row : raw_rows) {
            bool ok = true;
            for (const auto& [field, f] : oracle_filters)
                if (!oracle_match(f, row.at(field))) {
                    ok = false;
                    break;
                }
            if (ok) want.push_back(row.at("identifier").get<std::string>());
        }
        REQUIRE(got.size() == want.size());
        for (size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].at("identifier") == want[i]);
            CHECK_FALSE(got[i].contains("secret_path")); // sanitization property
        }
    }
}

TEST_CASE("loader and receiver registration") {
    AssetRegistry reg;
    reg.register_loader("thing", [](const std::string&, const AssetRecord&, const json&) {});
    CHECK(reg.has_loader("thing"));
    CHECK_THROWS_AS(
        reg.register_loader("thing", [](const std::string&, const AssetRecord&, const json&) {}),
        Error);

    register_blob_receiver(reg);
    CHECK_THROWS_AS(register_blob_receiver(reg), Error);

    AssetRecord orphan;
    orphan.identifier = "x";
    orphan.loader_type = "missing";
    try {
        reg.invoke_loader(orphan, json::object());
        FAIL("expected unknown-loader");
    } catch (const Error& e) {
        CHECK(e.code() == "unknown-loader");
        CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
}

TEST_CASE("dynamic import: identifier scheme, idempotence, atomicity") {
    AssetRegistry reg;
    register_blob_receiver(reg);

    ImportRequest req;
    req.data_type = "blob";
    req.data_source = base64_encode({1, 2, 3, 4});
    req.source_type = "base64";
    req.file_extension = ".bin";
    req.identifier_hint = "Rex Line1";
    req.metadata = {{"duration", 1.0}};

    const std::string id = reg.import_dynamic_asset(req);
    CHECK(std::regex_match(id, std::regex("blob_rex_line1_[0-9a-f]{6}")));
    REQUIRE(reg.dynamic_records().size() == 1);
    CHECK(reg.find(id) != nullptr);
    CHECK(reg.find(id)->public_data.at("duration") == 1.0);

    // identical content + hint is idempotent
    CHECK(reg.import_dynamic_asset(req) == id);
    CHECK(reg.dynamic_records().size() == 1);

    // different content yields a different identifier
    ImportRequest other = req;
    other.data_source = base64_encode({9, 9, 9});
    CHECK(reg.import_dynamic_asset(other) != id);

    // unknown type errors and lists registered types
    ImportRequest unknown = req;
    unknown.data_type = "mystery";
    try {
        reg.import_dynamic_asset(unknown);
        FAIL("expected unknown-data-type");
    } catch (const Error& e) {
        CHECK(e.code() == "unknown-data-type");
        CHECK(std::string(e.what()).find("blob") != std::string::npos);
    }

    // receiver failure registers nothing
    reg.register_receiver("flaky", "blob_loader", "Blobs", [](const ImportContext&) {
        return ReceiverResult{false, "", "deliberate failure", {}};
    });
    ImportRequest flaky = req;
    flaky.data_type = "flaky";
    const size_t before = reg.dynamic_records().size();
    CHECK_THROWS_AS(reg.import_dynamic_asset(flaky), Error);
    CHECK(reg.dynamic_records().size() == before);

    CHECK_THROWS_AS(reg.import_dynamic_asset([&] {
        ImportRequest bad = req;
        bad.data_source = "!!!not base64!!!";
        return bad;
    }()), Error);
}

TEST_CASE("explicit-identifier registration guards against divergent content") {
    AssetRegistry reg;
    register_blob_receiver(reg);
    ImportRequest req;
    req.data_type = "blob";
    req.data_source = base64_encode({5, 5});
    req.source_type = "base64";
    req.file_extension = ".bin";
    req.metadata = json::object();

    CHECK(reg.register_dynamic_with_identifier("rex_line1_audio", req) == "rex_line1_audio");
    CHECK(reg.register_dynamic_with_identifier("rex_line1_audio", req) == "rex_line1_audio");
    ImportRequest changed = req;
    changed.data_source = base64_encode({6, 6});
    CHECK_THROWS_AS(reg.register_dynamic_with_identifier("rex_line1_audio", changed), Error);
}

TEST_CASE("dynamic assets join the query surface") {
    AssetRegistry reg = sample_registry();
    register_blob_receiver(reg);
    ImportRequest req;
    req.data_type = "blob";
    req.data_source = base64_encode({7});
    req.source_type = "base64";
    req.file_extension = ".bin";
    req.identifier_hint = "sample";
    req.metadata = {{"duration", 2.5}, {"label", "generated"}};
    const std::string id = reg.import_dynamic_asset(req);

    const auto types = reg.queryable_asset_types();
    CHECK(std::find(types.begin(), types.end(), "Blobs") != types.end());

    const auto hits = reg.query_assets("Blobs", {{"duration", ">=2"}});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].at("identifier") == id);
    CHECK(reg.query_assets("Blobs", {}, "never").empty());
    CHECK(reg.query_assets("Blobs", {}, "only").size() == 1);
    CHECK(reg.query_instruction("Blobs").find("duration") != std::string::npos);
}

TEST_CASE("dynamic registry persistence round-trips byte-identically") {
    AssetRegistry reg;
    register_blob_receiver(reg);
    for (int i = 0; i < 5; ++i) {
        ImportRequest req;
        req.data_type = "blob";
        req.data_source = base64_encode({static_cast<unsigned char>(i), 42});
        req.source_type = "base64";
        req.file_extension = ".bin";
        req.identifier_hint = "item" + std::to_string(i);
        req.metadata = {{"duration", i * 0.5}};
        reg.import_dynamic_asset(req);
    }
    const std::string dir = oracle::scratch_dir("dyn_registry");
    const std::string path = dir + "/dynamic_registry.json";
    reg.save_dynamic_registry(path);
    const std::string first = oracle::read_file(path);

    AssetRegistry reloaded;
    register_blob_receiver(reloaded);
    reloaded.load_dynamic_registry(path);
    CHECK(reloaded.dynamic_records().size() == 5);
    reloaded.save_dynamic_registry(path);
    CHECK(oracle::read_file(path) == first);
}

TEST_CASE("file_path import source") {
    AssetRegistry reg;
    register_blob_receiver(reg);
    const std::string dir = oracle::scratch_dir("file_import");
    oracle::write_file(dir + "/payload.bin", "payload-bytes");
    ImportRequest req;
    req.data_type = "blob";
    req.data_source = dir + "/payload.bin";
    req.source_type = "file_path";
    req.file_extension = ".bin";
    req.identifier_hint = "from_file";
    const std::string id = reg.import_dynamic_asset(req);
    CHECK(reg.find(id) != nullptr);

    req.data_source = dir + "/missing.bin";
    CHECK_THROWS_AS(reg.import_dynamic_asset(req), Error);
}

TEST_CASE("hint sanitization and hashing") {
    CHECK(sanitize_hint("Rex Line1") == "rex_line1");
    CHECK(sanitize_hint("  weird--name!! ") == "weird_name");
    CHECK(sanitize_hint("") == "asset");
    const std::vector<unsigned char> payload{1, 2, 3};
    CHECK(content_hash_hex6(payload, "a") == content_hash_hex6(payload, "a"));
    CHECK(content_hash_hex6(payload, "a") != content_hash_hex6(payload, "b"));
    CHECK(content_hash_hex6(payload, "a").size() == 6);
}

TEST_CASE("base64 round trip") {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> len(0, 200);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 200; ++i) {
        std::vector<unsigned char> data(static_cast<size_t>(len(rng)));
        for (auto& b : data) b = static_cast<unsigned char>(byte(rng));
        CHECK(base64_decode(base64_encode(data)) == data);
    }
}
