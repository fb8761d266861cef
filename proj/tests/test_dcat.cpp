#include <doctest.h>

#include <set>

#include "converter/dcat.hpp"
#include "converter/dcat_rdf.hpp"
#include "converter/errors.hpp"
#include "converter/util.hpp"

using namespace converter;
using dcat::DcatDataset;

namespace {

records::SourceRecord make_record(
    const std::string& schema_id,
    std::initializer_list<std::pair<const char*, const char*>> fields) {
    records::SourceRecord r;
    r.identifier = "oai:fu:123";
    r.datestamp = 1700000000;
    r.schema_id = schema_id;
    for (const auto& [term, value] : fields) r.fields.push_back({term, value, ""});
    return r;
}

}  // namespace

TEST_CASE("mint_uri percent-encodes the identifier") {
    // Pinned with the reference percent-encoder.
    CHECK(dcat::mint_uri("https://bop.example", "oai:fu:123") ==
          "https://bop.example/datasets/oai%3Afu%3A123");
    CHECK(dcat::mint_uri("https://bop.example/", "oai:fu:123") ==
          "https://bop.example/datasets/oai%3Afu%3A123");
    CHECK(dcat::mint_uri("https://bop.example", "oai:fu:123") ==
          dcat::mint_uri("https://bop.example", "oai:fu:123"));
    CHECK(dcat::mint_uri("https://bop.example", "a/b") !=
          dcat::mint_uri("https://bop.example", "a%2Fb"));
    CHECK_THROWS_AS(dcat::mint_uri("not-a-uri", "x"), InvalidBase);
}

TEST_CASE("subject maps to keyword through the shipped table") {
    auto rec = make_record("oai_dc", {{"subject", "catalysis"},
                                      {"title", "X"},
                                      {"description", "Y"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    REQUIRE(out.report.converted);
    REQUIRE(out.dataset);
    CHECK(out.dataset->keywords == std::vector<std::string>{"catalysis"});
    CHECK(out.dataset->titles.size() == 1);
    CHECK(out.report.dropped_fields.empty());
}

TEST_CASE("FU abstract override routes to description") {
    auto table = matcher::apply_overrides(dcat::builtin_dcterms_mapping(),
                                          {{"abstract", "description", false}});
    auto rec = make_record("dcterms", {{"title", "X"}, {"abstract", "Z"}});
    auto out = dcat::convert(rec, table, {}, "https://bop.example");
    REQUIRE(out.report.converted);
    REQUIRE(out.dataset->descriptions.size() == 1);
    CHECK(out.dataset->descriptions[0].text == "Z");
}

TEST_CASE("abstract without override is dropped as unmapped") {
    auto rec = make_record("dcterms", {{"title", "X"}, {"description", "Y"}, {"abstract", "Z"}});
    auto out = dcat::convert(rec, dcat::builtin_dcterms_mapping(), {}, "https://bop.example");
    REQUIRE(out.report.converted);
    REQUIRE(out.report.dropped_fields.size() == 1);
    CHECK(out.report.dropped_fields[0].term == "abstract");
    CHECK(out.report.dropped_fields[0].reason == "unmapped");
}

TEST_CASE("missing title rejects the record") {
    auto rec = make_record("oai_dc", {{"description", "Y"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    CHECK_FALSE(out.report.converted);
    CHECK_FALSE(out.dataset.has_value());
    bool found = false;
    for (const auto& d : out.report.diagnostics)
        if (d == "mandatory property title absent") found = true;
    CHECK(found);
}

TEST_CASE("earliest parseable date wins, invalid dates drop") {
    auto rec = make_record("oai_dc", {{"title", "T"},
                                      {"description", "D"},
                                      {"date", "2021-05-03"},
                                      {"date", "invalid"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    REQUIRE(out.report.converted);
    CHECK(out.dataset->issued == std::string("2021-05-03"));
    REQUIRE(out.report.dropped_fields.size() == 1);
    CHECK(out.report.dropped_fields[0].term == "date");
    CHECK(out.report.dropped_fields[0].value == "invalid");

    auto rec2 = make_record("oai_dc", {{"title", "T"},
                                       {"description", "D"},
                                       {"date", "2022-11-01T10:00:00Z"},
                                       {"date", "2021-05-03"}});
    auto out2 = dcat::convert(rec2, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    CHECK(out2.dataset->issued == std::string("2021-05-03"));
    REQUIRE(out2.report.dropped_fields.size() == 1);
    CHECK(out2.report.dropped_fields[0].value == "2022-11-01T10:00:00Z");
}

TEST_CASE("bare years expand with a diagnostic") {
    auto rec = make_record("oai_dc",
                           {{"title", "T"}, {"description", "D"}, {"date", "2020"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    REQUIRE(out.report.converted);
    CHECK(out.dataset->issued == std::string("2020-01-01"));
    REQUIRE(out.report.diagnostics.size() == 1);
    CHECK(out.report.diagnostics[0] == "issued year '2020' expanded to 2020-01-01");
}

TEST_CASE("http identifiers become landing_page and stay identifiers") {
    auto rec = make_record("oai_dc", {{"title", "T"},
                                      {"description", "D"},
                                      {"identifier", "hdl:123/456"},
                                      {"identifier", "https://repo.fu.example/handle/123"},
                                      {"identifier", "https://second.example/x"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    REQUIRE(out.report.converted);
    CHECK(out.dataset->landing_page == "https://repo.fu.example/handle/123");
    CHECK(out.dataset->identifiers ==
          std::vector<std::string>{"hdl:123/456", "https://repo.fu.example/handle/123",
                                   "https://second.example/x"});
    CHECK(out.dataset->distributions.empty());
}

TEST_CASE("distribution_from_url rule emits a distribution") {
    dcat::TransformRules rules;
    rules.distribution_from_url = true;
    auto rec = make_record("oai_dc", {{"title", "T"},
                                      {"description", "D"},
                                      {"identifier", "https://repo.fu.example/handle/123"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), rules, "https://bop.example");
    REQUIRE(out.report.converted);
    REQUIRE(out.dataset->distributions.size() == 1);
    CHECK(out.dataset->distributions[0].access_url == "https://repo.fu.example/handle/123");
    CHECK(dcat::validate(*out.dataset).ok());
}

TEST_CASE("agents wrap names and pass URIs through") {
    auto rec = make_record("oai_dc", {{"title", "T"},
                                      {"description", "D"},
                                      {"creator", "Meier, J."},
                                      {"creator", "https://orcid.org/0000-0001-2345-6789"},
                                      {"publisher", "FU Berlin"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    REQUIRE(out.dataset->creators.size() == 2);
    CHECK(out.dataset->creators[0].name == "Meier, J.");
    CHECK(out.dataset->creators[0].uri.empty());
    CHECK(out.dataset->creators[1].uri == "https://orcid.org/0000-0001-2345-6789");
    CHECK(out.dataset->creators[1].name.empty());
    CHECK(out.dataset->publishers.size() == 1);
}

TEST_CASE("language codes are validated") {
    auto rec = make_record("oai_dc", {{"title", "T"},
                                      {"description", "D"},
                                      {"language", "en"},
                                      {"language", "English prose"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    CHECK(out.dataset->languages == std::vector<std::string>{"en"});
    REQUIRE(out.report.dropped_fields.size() == 1);
    CHECK(out.report.dropped_fields[0].reason == "value is not a language code");
}

TEST_CASE("no silent loss: every field reaches the dataset or dropped_fields") {
    auto rec = make_record("oai_dc", {{"title", "T"},
                                      {"description", "D"},
                                      {"subject", "a"},
                                      {"type", "Text"},
                                      {"format", "application/pdf"},
                                      {"relation", "ref"},
                                      {"date", "bad-date"},
                                      {"language", "x"},
                                      {"rights", "open"},
                                      {"rights", "second"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    REQUIRE(out.report.converted);
    const auto& ds = *out.dataset;
    size_t reached = ds.titles.size() + ds.descriptions.size() + ds.keywords.size() +
                     ds.themes.size() + ds.creators.size() + ds.contributors.size() +
                     ds.publishers.size() + (ds.issued ? 1 : 0) + (ds.modified ? 1 : 0) +
                     ds.identifiers.size() + ds.languages.size() +
                     (ds.access_rights.empty() ? 0 : 1);
    CHECK(reached + out.report.dropped_fields.size() == rec.fields.size());
}

TEST_CASE("conversion is idempotent") {
    auto rec = make_record("oai_dc", {{"title", "T"},
                                      {"description", "D"},
                                      {"subject", "catalysis"},
                                      {"date", "2021-05-03"},
                                      {"identifier", "https://x.example/1"}});
    auto a = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    auto b = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    REQUIRE(a.dataset);
    REQUIRE(b.dataset);
    CHECK(*a.dataset == *b.dataset);
    CHECK(a.dataset->uri == b.dataset->uri);
}

TEST_CASE("language tags carry through to titles and descriptions") {
    records::SourceRecord rec;
    rec.identifier = "oai:fu:tag";
    rec.schema_id = "oai_dc";
    rec.fields.push_back({"title", "Säurestudie", "de"});
    rec.fields.push_back({"description", "Beschreibung", "de"});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    REQUIRE(out.report.converted);
    CHECK(out.dataset->titles[0].lang == "de");
    CHECK(out.dataset->descriptions[0].lang == "de");
}

TEST_CASE("validate flags missing mandatory properties and bad tags") {
    DcatDataset ds;
    ds.uri = "https://bop.example/datasets/x";
    ds.titles = {{"T", ""}};
    ds.descriptions = {{"D", ""}};
    CHECK(dcat::validate(ds).ok());

    DcatDataset bad = ds;
    bad.distributions.push_back({});
    auto r = dcat::validate(bad);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0] == "distribution.access_url absent");

    DcatDataset tags = ds;
    tags.titles = {{"T", "en-US"}};
    CHECK(dcat::validate(tags).ok());
    tags.titles = {{"T", "e!"}};
    CHECK_FALSE(dcat::validate(tags).ok());

    DcatDataset no_uri = ds;
    no_uri.uri = "relative";
    CHECK_FALSE(dcat::validate(no_uri).ok());
}

TEST_CASE("build_catalog sorts, dedups and validates metadata") {
    dcat::CatalogMeta meta{"FU Repository", "Research data", "FU Berlin", ""};
    auto built = dcat::build_catalog(
        "mock-fu", meta,
        {"https://bop.example/datasets/b", "https://bop.example/datasets/a",
         "https://bop.example/datasets/b"},
        "https://bop.example");
    CHECK(built.catalog.uri == "https://bop.example/catalogues/mock-fu");
    CHECK(built.catalog.dataset_uris ==
          std::vector<std::string>{"https://bop.example/datasets/a",
                                   "https://bop.example/datasets/b"});
    REQUIRE(built.diagnostics.size() == 1);

    auto empty = dcat::build_catalog("mock-fu", meta, {}, "https://bop.example");
    CHECK(empty.catalog.dataset_uris.empty());

    dcat::CatalogMeta incomplete{"", "d", "p", ""};
    CHECK_THROWS_AS(dcat::build_catalog("x", incomplete, {}, "https://bop.example"),
                    ConfigError);
}

TEST_CASE("dataset graph carries the vocabulary bindings") {
    auto rec = make_record("oai_dc", {{"title", "T"},
                                      {"description", "D"},
                                      {"subject", "catalysis"},
                                      {"subject", "zeolites"},
                                      {"creator", "Meier, J."},
                                      {"date", "2021-05-03"}});
    auto out = dcat::convert(rec, dcat::builtin_oai_dc_mapping(), {}, "https://bop.example");
    auto g = rdf::dataset_to_graph(*out.dataset);

    rdf::Term ds = rdf::Term::iri(out.dataset->uri);
    CHECK(g.objects(ds, std::string(rdf::ns::dcat) + "keyword").size() == 2);
    CHECK(g.objects(ds, std::string(rdf::ns::dct) + "title").size() == 1);
    auto issued = g.objects(ds, std::string(rdf::ns::dct) + "issued");
    REQUIRE(issued.size() == 1);
    CHECK(issued[0].datatype == std::string(rdf::ns::xsd) + "date");
    auto creators = g.objects(ds, std::string(rdf::ns::dct) + "creator");
    REQUIRE(creators.size() == 1);
    CHECK(creators[0].kind == rdf::Term::Kind::blank);
    auto names = g.objects(creators[0], std::string(rdf::ns::foaf) + "name");
    REQUIRE(names.size() == 1);
    CHECK(names[0].value == "Meier, J.");
}

TEST_CASE("empty catalog graph has exactly the constructed triples") {
    dcat::DcatCatalog cat;
    cat.uri = "https://bop.example/catalogues/mock-fu";
    cat.title = "FU Repository";
    cat.description = "Research data";
    cat.publisher = dcat::Agent{"FU Berlin", ""};
    auto g = rdf::catalog_to_graph(cat);
    // type + title + description + publisher link + agent type + agent name.
    CHECK(g.size() == 6);

    cat.homepage = "https://fu.example";
    CHECK(rdf::catalog_to_graph(cat).size() == 7);
}

TEST_CASE("language subtags are lowercased in emitted literals") {
    DcatDataset ds;
    ds.uri = "https://bop.example/datasets/x";
    ds.titles = {{"T", "EN-us"}};
    ds.descriptions = {{"D", ""}};
    auto g = rdf::dataset_to_graph(ds);
    auto titles = g.objects(rdf::Term::iri(ds.uri), std::string(rdf::ns::dct) + "title");
    REQUIRE(titles.size() == 1);
    CHECK(titles[0].lang == "en-us");
}
