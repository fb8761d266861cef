#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <set>

#include "converter/cli.hpp"
#include "converter/matcher.hpp"
#include "converter/store.hpp"
#include "test_helpers.hpp"

using namespace converter;
using nlohmann::json;
namespace fs = std::filesystem;
using testing::load_corpus;

namespace {

int run_cli(std::initializer_list<std::string> args) {
    std::vector<std::string> owned{"converter"};
    owned.insert(owned.end(), args);
    std::vector<const char*> argv;
    for (const auto& a : owned) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string write_pipeline_toml(const testing::TempDir& dir, const std::string& id,
                                const std::string& base_url) {
    std::string overrides;
    if (id == "mock-fu")
        overrides = "overrides = \"" + testing::kSourceDir + "/fixtures/overrides/mock-fu.json\"\n";
    std::string text = "base_uri = \"https://bop.example\"\n"
                       "state_dir = \"state\"\n"
                       "output_dir = \"store\"\n"
                       "[serve]\n"
                       "bind = \"127.0.0.1\"\n"
                       "port = 0\n"
                       "page_size = 10\n"
                       "[[endpoint]]\n"
                       "id = \"" + id + "\"\n"
                       "base_url = \"" + base_url + "\"\n"
                       "backoff_initial_ms = 5\n" +
                       overrides +
                       "[endpoint.catalog]\n"
                       "title = \"" + id + " repository\"\n"
                       "description = \"Research data\"\n"
                       "publisher = \"" + id + "\"\n";
    std::string path = (dir.path() / "converter.toml").string();
    util::atomic_write_file(path, text);
    return path;
}

}  // namespace

TEST_CASE("unknown subcommand exits 2") {
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({}) == 2);
}

TEST_CASE("harvest with a missing config file exits 1") {
    CHECK(run_cli({"harvest", "--config", "/nonexistent/converter.toml"}) == 1);
}

TEST_CASE("match over the bundled descriptors partitions all 15 terms") {
    testing::TempDir dir("cli_match");
    std::string out = (dir.path() / "mapping.json").string();
    std::string report = (dir.path() / "report.json").string();
    int code = run_cli({"match", "--source", testing::kSourceDir + "/schemas/oai_dc.json",
                        "--target", testing::kSourceDir + "/schemas/dcat_ap.json", "--out", out,
                        "--report", report});
    CHECK(code == 0);

    auto table = matcher::mapping_from_json(util::read_file(out));
    CHECK(table.source_schema_id == "oai_dc");
    CHECK(table.entries.size() + table.unmapped.size() == 15);
    std::set<std::string> seen;
    for (const auto& e : table.entries) CHECK(seen.insert(e.source_term).second);
    for (const auto& u : table.unmapped) CHECK(seen.insert(u).second);
    CHECK(seen.size() == 15);

    auto report_doc = json::parse(util::read_file(report));
    CHECK(report_doc["terms"].size() == 15);
    CHECK(report_doc["terms"][0]["candidates"].size() == 5);

    // Determinism across invocations, byte for byte.
    std::string out2 = (dir.path() / "mapping2.json").string();
    run_cli({"match", "--source", testing::kSourceDir + "/schemas/oai_dc.json", "--target",
             testing::kSourceDir + "/schemas/dcat_ap.json", "--out", out2, "--report",
             (dir.path() / "report2.json").string()});
    CHECK(util::read_file(out) == util::read_file(out2));

    // --report is part of the subcommand contract.
    CHECK(run_cli({"match", "--source", testing::kSourceDir + "/schemas/oai_dc.json",
                   "--target", testing::kSourceDir + "/schemas/dcat_ap.json", "--out",
                   (dir.path() / "o3.json").string()}) == 2);
}

TEST_CASE("--help exits 0 on every subcommand") {
    CHECK(run_cli({"--help"}) == 0);
    for (const char* sub : {"harvest", "match", "convert", "validate", "serve", "mock-repo"})
        CHECK(run_cli({sub, "--help"}) == 0);
}

TEST_CASE("match with a malformed descriptor exits 1") {
    testing::TempDir dir("cli_badmatch");
    std::string bad = (dir.path() / "bad.json").string();
    util::atomic_write_file(bad, "{not json");
    CHECK(run_cli({"match", "--source", bad, "--target",
                   testing::kSourceDir + "/schemas/dcat_ap.json", "--out",
                   (dir.path() / "o.json").string(), "--report",
                   (dir.path() / "r.json").string()}) == 1);
}

TEST_CASE("harvest, validate and offline convert through the CLI") {
    testing::TempDir dir("cli_harvest");
    mockrepo::MockRepository repo(load_corpus("mock-fu"));
    repo.start();
    std::string config = write_pipeline_toml(dir, "mock-fu", repo.base_url());

    CHECK(run_cli({"harvest", "--config", config}) == 0);

    store::DatasetStore store((dir.path() / "store").string());
    auto snap = store.current("mock-fu");
    REQUIRE(snap);
    CHECK(snap->datasets.size() == 23);

    // validate accepts the emitted catalog and every dataset file.
    std::string catalog_path = snap->dir + "/catalog.ttl";
    CHECK(run_cli({"validate", "--in", catalog_path}) == 0);
    CHECK(run_cli({"validate", "--in", snap->dir + "/" +
                                           snap->datasets.begin()->second.file}) == 0);

    // A dataset stripped of its title fails validation.
    std::string broken = (dir.path() / "broken.ttl").string();
    std::string ttl = util::read_file(snap->dir + "/" + snap->datasets.begin()->second.file);
    std::string needle = "dct:title";
    ttl.replace(ttl.find(needle), needle.size(), "dct:alternative");
    util::atomic_write_file(broken, ttl);
    CHECK(run_cli({"validate", "--in", broken}) == 1);

    // Offline re-conversion from the raw cache.
    testing::TempDir out("cli_convert_out");
    CHECK(run_cli({"convert", "--config", config, "--in", store.raw_dir("mock-fu"), "--out",
                   out.str()}) == 0);
    int ttl_files = 0;
    for (const auto& e : fs::directory_iterator(out.path() / "datasets")) {
        (void)e;
        ++ttl_files;
    }
    CHECK(ttl_files == 23);

    // Second harvest run through the CLI: empty delta, still exit 0.
    CHECK(run_cli({"harvest", "--config", config, "--endpoint", "mock-fu"}) == 0);
}

TEST_CASE("harvest against an unreachable endpoint exits 1") {
    testing::TempDir dir("cli_down");
    std::string config = write_pipeline_toml(dir, "mock-tu", "http://127.0.0.1:1/oai");
    CHECK(run_cli({"harvest", "--config", config}) == 1);
}
