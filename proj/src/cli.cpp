#include "converter/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "converter/dcat.hpp"
#include "converter/errors.hpp"
#include "converter/matcher.hpp"
#include "converter/mock_repo.hpp"
#include "converter/pipeline.hpp"
#include "converter/rdf.hpp"
#include "converter/schema_model.hpp"
#include "converter/service.hpp"
#include "converter/util.hpp"

namespace converter::cli {

namespace {

std::string default_config() {
    const char* env = std::getenv("CONVERTER_CONFIG");
    return env ? env : "";
}

matcher::MatcherConfig matcher_config_from_file(const std::string& path) {
    matcher::MatcherConfig cfg;
    if (path.empty()) return cfg;
    nlohmann::json doc = nlohmann::json::parse(util::read_file(path));
    cfg.w_label = doc.value("w_label", cfg.w_label);
    cfg.w_comment = doc.value("w_comment", cfg.w_comment);
    cfg.w_definition = doc.value("w_definition", cfg.w_definition);
    cfg.threshold = doc.value("threshold", cfg.threshold);
    cfg.report_top_k = doc.value("report_top_k", cfg.report_top_k);
    return cfg;
}

int cmd_harvest(const std::string& config_path, const std::string& endpoint_id) {
    auto config = pipeline::load_config(config_path);
    std::vector<pipeline::RunSummary> summaries;
    if (endpoint_id.empty()) {
        summaries = pipeline::harvest_all(config);
    } else {
        summaries.push_back(pipeline::run_harvest(config, endpoint_id));
    }
    bool all_ok = true;
    for (const auto& s : summaries) {
        std::cout << pipeline::summary_to_json(s);
        if (!s.ok) {
            all_ok = false;
            std::cerr << "harvest " << s.endpoint_id << " failed: " << s.error << "\n";
        }
    }
    return all_ok ? 0 : 1;
}

int cmd_match(const std::string& source_path, const std::string& target_path,
              const std::string& config_path, const std::string& out_path,
              const std::string& report_path) {
    auto source = schema::load_schema(util::read_file(source_path));
    auto target = schema::load_schema(util::read_file(target_path));
    auto cfg = matcher_config_from_file(config_path);
    auto result = matcher::match_schemas(source, target, cfg);
    util::atomic_write_file(out_path, matcher::mapping_to_json(result.table));
    util::atomic_write_file(report_path, matcher::report_to_json(result.report));
    std::cerr << "matched " << source.id << " -> " << target.id << ": "
              << result.table.entries.size() << " entries, " << result.table.unmapped.size()
              << " unmapped\n";
    return 0;
}

int cmd_convert(const std::string& config_path, const std::string& endpoint_id,
                const std::string& in_dir, const std::string& out_dir) {
    auto config = pipeline::load_config(config_path);
    const pipeline::EndpointPipelineConfig* ep = nullptr;
    if (!endpoint_id.empty()) {
        ep = config.find_endpoint(endpoint_id);
        if (!ep) throw ConfigError("endpoint '" + endpoint_id + "' is not configured");
    } else if (config.endpoints.size() == 1) {
        ep = &config.endpoints.front();
    } else {
        throw ConfigError("--endpoint is required when multiple endpoints are configured");
    }
    auto result = pipeline::convert_offline(config, *ep, in_dir, out_dir);
    std::cerr << "converted " << result.converted << ", rejected " << result.rejected << "\n";
    return 0;
}

int cmd_validate(const std::string& in_path) {
    rdf::Graph graph = rdf::parse_turtle(util::read_file(in_path));
    std::vector<std::string> violations;

    auto literal_langs_ok = [&](const rdf::Term& subject) {
        for (const auto& t : graph.triples()) {
            if (!(t.subject == subject)) continue;
            if (t.object.kind == rdf::Term::Kind::literal && !t.object.lang.empty() &&
                !util::lang_tag_valid(t.object.lang))
                violations.push_back("malformed language tag '" + t.object.lang + "' on " +
                                     subject.value);
        }
    };

    auto datasets = graph.subjects_of_type(std::string(rdf::ns::dcat) + "Dataset");
    for (const auto& ds : datasets) {
        std::string label = ds.value;
        if (ds.kind != rdf::Term::Kind::iri || !util::is_absolute_uri(ds.value))
            violations.push_back("dataset node is not an absolute URI: " + label);
        if (graph.objects(ds, std::string(rdf::ns::dct) + "title").empty())
            violations.push_back("dataset " + label + ": title absent");
        if (graph.objects(ds, std::string(rdf::ns::dct) + "description").empty())
            violations.push_back("dataset " + label + ": description absent");
        for (const auto& dist : graph.objects(ds, std::string(rdf::ns::dcat) + "distribution")) {
            if (graph.objects(dist, std::string(rdf::ns::dcat) + "accessURL").empty())
                violations.push_back("dataset " + label + ": distribution lacks accessURL");
        }
        literal_langs_ok(ds);
    }
    auto catalogs = graph.subjects_of_type(std::string(rdf::ns::dcat) + "Catalog");
    for (const auto& cat : catalogs) {
        std::string label = cat.value;
        if (graph.objects(cat, std::string(rdf::ns::dct) + "title").empty())
            violations.push_back("catalog " + label + ": title absent");
        if (graph.objects(cat, std::string(rdf::ns::dct) + "description").empty())
            violations.push_back("catalog " + label + ": description absent");
        if (graph.objects(cat, std::string(rdf::ns::dct) + "publisher").empty())
            violations.push_back("catalog " + label + ": publisher absent");
    }

    if (datasets.empty() && catalogs.empty())
        std::cerr << "warning: no dcat:Dataset or dcat:Catalog subjects found\n";
    for (const auto& v : violations) std::cout << "violation: " << v << "\n";
    if (violations.empty()) {
        std::cout << "ok: " << datasets.size() << " dataset(s), " << catalogs.size()
                  << " catalog(s) valid\n";
        return 0;
    }
    return 1;
}

int cmd_serve(const std::string& config_path) {
    auto config = pipeline::load_config(config_path);
    service::PipelineServer server(config);
    std::cerr << "serving on " << config.serve.bind << ":" << config.serve.port << "\n";
    server.run_blocking();
    return 0;
}

int cmd_mock_repo(const std::string& corpus_path, int port) {
    auto corpus = mockrepo::corpus_from_json(util::read_file(corpus_path));
    mockrepo::MockRepository repo(std::move(corpus));
    int bound = repo.start(port);
    std::cerr << "mock repository listening on " << repo.base_url() << " (port " << bound
              << ")\n";
    // Blocks until killed.
    while (true) std::this_thread::sleep_for(std::chrono::seconds(3600));
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Harvests repository metadata over OAI-PMH and republishes it as DCAT-AP"};
    app.require_subcommand(1);

    std::string config_path = default_config();
    std::string endpoint_id, source_path, target_path, matcher_config_path, out_path,
        report_path, in_path, out_dir, corpus_path;
    int port = 8181;

    auto* harvest = app.add_subcommand("harvest", "Run the pipeline for configured endpoints");
    harvest->add_option("--config", config_path, "Pipeline config (TOML)")
        ->default_val(config_path);
    harvest->add_option("--endpoint", endpoint_id, "Harvest only this endpoint");

    auto* match = app.add_subcommand("match", "Align two schema descriptors");
    match->add_option("--source", source_path, "Source descriptor JSON")->required();
    match->add_option("--target", target_path, "Target descriptor JSON")->required();
    match->add_option("--config", matcher_config_path, "Matcher config JSON");
    match->add_option("--out", out_path, "Mapping table output path")->required();
    match->add_option("--report", report_path, "Ranked-candidates report output path")
        ->required();

    auto* convert = app.add_subcommand("convert", "Re-convert cached raw records offline");
    convert->add_option("--config", config_path, "Pipeline config (TOML)")
        ->default_val(config_path);
    convert->add_option("--endpoint", endpoint_id, "Endpoint whose mapping applies");
    convert->add_option("--in", in_path, "Directory of cached raw records")->required();
    convert->add_option("--out", out_dir, "Output directory")->required();

    auto* validate = app.add_subcommand("validate", "Check DCAT mandatory properties in Turtle");
    validate->add_option("--in", in_path, "Turtle file")->required();

    auto* serve = app.add_subcommand("serve", "Serve the converted catalogs over HTTP");
    serve->add_option("--config", config_path, "Pipeline config (TOML)")
        ->default_val(config_path);

    auto* mock = app.add_subcommand("mock-repo", "Run a fixture OAI-PMH repository");
    mock->add_option("--corpus", corpus_path, "Fixture corpus JSON")->required();
    mock->add_option("--port", port, "Listen port")->default_val(port);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (harvest->parsed()) {
            if (config_path.empty()) throw ConfigError("--config (or CONVERTER_CONFIG) required");
            return cmd_harvest(config_path, endpoint_id);
        }
        if (match->parsed())
            return cmd_match(source_path, target_path, matcher_config_path, out_path,
                             report_path);
        if (convert->parsed()) {
            if (config_path.empty()) throw ConfigError("--config (or CONVERTER_CONFIG) required");
            return cmd_convert(config_path, endpoint_id, in_path, out_dir);
        }
        if (validate->parsed()) return cmd_validate(in_path);
        if (serve->parsed()) {
            if (config_path.empty()) throw ConfigError("--config (or CONVERTER_CONFIG) required");
            return cmd_serve(config_path);
        }
        if (mock->parsed()) return cmd_mock_repo(corpus_path, port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace converter::cli
