#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <set>

#include "converter/pipeline.hpp"
#include "converter/rdf.hpp"
#include "converter/service.hpp"
#include "test_helpers.hpp"

using namespace converter;
using nlohmann::json;
using testing::load_corpus;
using testing::pipeline_config;

namespace {

struct Response {
    int status = 0;
    std::string body;
    std::string content_type;
};

Response get(int port, const std::string& target, const std::string& accept = "") {
    httplib::Client client("127.0.0.1", port);
    httplib::Headers headers;
    if (!accept.empty()) headers.emplace("Accept", accept);
    auto res = client.Get(target, headers);
    REQUIRE(res);
    return {res->status, res->body, res->get_header_value("Content-Type")};
}

}  // namespace

TEST_CASE("service serves catalogs, datasets, paging and health") {
    testing::TempDir dir("svc");
    mockrepo::MockRepository fu(load_corpus("mock-fu"));
    fu.start();
    auto cfg = pipeline_config(dir, {{"mock-fu", fu.base_url()}});
    cfg.serve.page_size = 10;

    service::PipelineServer server(cfg);
    int port = server.start(0);

    SUBCASE("health before any run reports zero completed runs") {
        auto res = get(port, "/health");
        CHECK(res.status == 200);
        auto doc = json::parse(res.body);
        CHECK(doc["status"] == "ok");
        CHECK(doc["completed_endpoints"] == 0);
        CHECK(doc["endpoints"][0]["last_run"].is_null());
    }

    SUBCASE("catalogue list is empty before any run") {
        auto res = get(port, "/catalogues");
        CHECK(json::parse(res.body).empty());
    }

    pipeline::run_harvest(cfg, "mock-fu");

    SUBCASE("catalogue list and catalog graph") {
        auto list = get(port, "/catalogues");
        auto doc = json::parse(list.body);
        REQUIRE(doc.size() == 1);
        CHECK(doc[0] == "https://bop.example/catalogues/mock-fu");

        auto cat = get(port, "/catalogues/mock-fu", "text/turtle");
        CHECK(cat.status == 200);
        CHECK(cat.content_type.find("text/turtle") == 0);
        auto graph = rdf::parse_turtle(cat.body);
        CHECK(graph
                  .objects(rdf::Term::iri("https://bop.example/catalogues/mock-fu"),
                           std::string(rdf::ns::dcat) + "dataset")
                  .size() == 23);
    }

    SUBCASE("dataset pages are parseable and partition the store") {
        std::set<std::string> subjects;
        int page = 0;
        while (true) {
            auto res = get(port, "/catalogues/mock-fu/datasets?page=" + std::to_string(page),
                           "text/turtle");
            REQUIRE(res.status == 200);
            auto graph = rdf::parse_turtle(res.body);
            auto datasets = graph.subjects_of_type(std::string(rdf::ns::dcat) + "Dataset");
            if (datasets.empty()) break;
            size_t before = subjects.size();
            for (const auto& d : datasets) subjects.insert(d.value);
            CHECK(subjects.size() == before + datasets.size());  // pages never overlap
            CHECK(datasets.size() <= 10);
            ++page;
        }
        CHECK(subjects.size() == 23);
        CHECK(page == 3);  // 10 + 10 + 3
    }

    SUBCASE("single dataset lookup by uri") {
        std::string uri = "https://bop.example/datasets/" +
                          util::percent_encode("oai:mock-fu:item-0001");
        auto res = get(port, "/datasets?uri=" + util::percent_encode(uri), "text/turtle");
        CHECK(res.status == 200);
        auto graph = rdf::parse_turtle(res.body);
        CHECK(graph.subjects_of_type(std::string(rdf::ns::dcat) + "Dataset").size() == 1);

        auto missing = get(port, "/datasets?uri=https://bop.example/datasets/unknown");
        CHECK(missing.status == 404);
    }

    SUBCASE("content negotiation: rdfxml, turtle default, 406 otherwise") {
        auto xml_res = get(port, "/catalogues/mock-fu", "application/rdf+xml");
        CHECK(xml_res.status == 200);
        CHECK(xml_res.content_type.find("application/rdf+xml") == 0);
        CHECK(xml_res.body.find("<rdf:RDF") != std::string::npos);

        auto fallback = get(port, "/catalogues/mock-fu");
        CHECK(fallback.status == 200);
        CHECK(fallback.content_type.find("text/turtle") == 0);

        auto wildcard = get(port, "/catalogues/mock-fu", "*/*");
        CHECK(wildcard.status == 200);

        auto nope = get(port, "/catalogues/mock-fu", "application/json");
        CHECK(nope.status == 406);
    }

    SUBCASE("unknown catalogue is 404") {
        CHECK(get(port, "/catalogues/nope").status == 404);
        CHECK(get(port, "/catalogues/nope/datasets").status == 404);
    }

    SUBCASE("health after the run carries the summary") {
        auto res = get(port, "/health");
        auto doc = json::parse(res.body);
        CHECK(doc["completed_endpoints"] == 1);
        CHECK(doc["endpoints"][0]["last_run"]["converted"] == 23);
    }

    server.stop();
}

TEST_CASE("readers see the previous snapshot while a harvest is staged") {
    testing::TempDir dir("svc2");
    mockrepo::MockRepository tu(load_corpus("mock-tu"));
    tu.start();
    auto cfg = pipeline_config(dir, {{"mock-tu", tu.base_url()}});
    service::PipelineServer server(cfg);
    int port = server.start(0);

    pipeline::run_harvest(cfg, "mock-tu");
    auto before = get(port, "/catalogues/mock-tu", "text/turtle");

    // Hold the pipeline mid-run (after staging, before publish) and read.
    auto corpus = load_corpus("mock-tu");
    corpus.records.back().datestamp = "2024-06-01T00:00:00Z";
    tu.replace_corpus(corpus);

    std::string during_body;
    pipeline::RunHooks hooks;
    hooks.before_publish = [&] { during_body = get(port, "/catalogues/mock-tu").body; };
    pipeline::run_harvest(cfg, "mock-tu", hooks);

    CHECK(during_body == before.body);  // mid-run readers get the old snapshot
}
