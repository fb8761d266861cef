#include "converter/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "converter/dcat_rdf.hpp"
#include "converter/errors.hpp"
#include "converter/oai_client.hpp"
#include "converter/record_parser.hpp"
#include "converter/toml_lite.hpp"
#include "converter/util.hpp"

namespace fs = std::filesystem;

namespace converter::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

const EndpointPipelineConfig* PipelineConfig::find_endpoint(const std::string& id) const {
    for (const auto& e : endpoints)
        if (e.endpoint.id == id) return &e;
    return nullptr;
}

void PipelineConfig::check() const {
    if (!util::is_absolute_uri(base_uri))
        throw ConfigError("base_uri is missing or not absolute");
    if (state_dir.empty()) throw ConfigError("state_dir missing");
    if (output_dir.empty()) throw ConfigError("output_dir missing");
    if (serve.page_size < 1) throw ConfigError("serve.page_size must be >= 1");
    matcher.check();
    std::set<std::string> ids;
    for (const auto& e : endpoints) {
        e.endpoint.check();
        e.catalog.check();
        if (!ids.insert(e.endpoint.id).second)
            throw ConfigError("duplicate endpoint id '" + e.endpoint.id + "'");
    }
}

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    return (fs::path(base_dir) / path).lexically_normal().string();
}

}  // namespace

PipelineConfig config_from_toml(const std::string& text, const std::string& base_dir) {
    toml::Table root = toml::parse(text);
    PipelineConfig cfg;
    cfg.base_uri = root.get_string("base_uri").value_or("");
    cfg.state_dir = resolve_path(base_dir, root.get_string("state_dir").value_or("state"));
    cfg.output_dir = resolve_path(base_dir, root.get_string("output_dir").value_or("store"));

    if (auto it = root.tables.find("matcher"); it != root.tables.end()) {
        const auto& m = it->second;
        cfg.matcher.w_label = m.get_double("w_label").value_or(cfg.matcher.w_label);
        cfg.matcher.w_comment = m.get_double("w_comment").value_or(cfg.matcher.w_comment);
        cfg.matcher.w_definition =
            m.get_double("w_definition").value_or(cfg.matcher.w_definition);
        cfg.matcher.threshold = m.get_double("threshold").value_or(cfg.matcher.threshold);
        cfg.matcher.report_top_k =
            static_cast<int>(m.get_int("report_top_k").value_or(cfg.matcher.report_top_k));
    }
    if (auto it = root.tables.find("rules"); it != root.tables.end()) {
        cfg.rules.distribution_from_url =
            it->second.get_bool("distribution_from_url").value_or(false);
    }
    if (auto it = root.tables.find("serve"); it != root.tables.end()) {
        const auto& s = it->second;
        cfg.serve.bind = s.get_string("bind").value_or(cfg.serve.bind);
        cfg.serve.port = static_cast<int>(s.get_int("port").value_or(cfg.serve.port));
        cfg.serve.page_size =
            static_cast<int>(s.get_int("page_size").value_or(cfg.serve.page_size));
    }
    if (auto it = root.table_arrays.find("endpoint"); it != root.table_arrays.end()) {
        for (const auto& t : it->second) {
            EndpointPipelineConfig e;
            e.endpoint.id = t.get_string("id").value_or("");
            e.endpoint.base_url = t.get_string("base_url").value_or("");
            e.endpoint.metadata_prefix =
                t.get_string("metadata_prefix").value_or(e.endpoint.metadata_prefix);
            e.endpoint.set_spec = t.get_string("set_spec").value_or("");
            e.endpoint.page_timeout_s =
                static_cast<int>(t.get_int("page_timeout").value_or(e.endpoint.page_timeout_s));
            e.endpoint.max_retries =
                static_cast<int>(t.get_int("max_retries").value_or(e.endpoint.max_retries));
            e.endpoint.backoff_initial_ms = static_cast<int>(
                t.get_int("backoff_initial_ms").value_or(e.endpoint.backoff_initial_ms));
            e.mapping_ref = t.get_string("mapping").value_or("builtin");
            if (e.mapping_ref != "builtin") e.mapping_ref = resolve_path(base_dir, e.mapping_ref);
            e.overrides_path = resolve_path(base_dir, t.get_string("overrides").value_or(""));
            if (auto ct = t.tables.find("catalog"); ct != t.tables.end()) {
                e.catalog.title = ct->second.get_string("title").value_or("");
                e.catalog.description = ct->second.get_string("description").value_or("");
                e.catalog.publisher_name = ct->second.get_string("publisher").value_or("");
                e.catalog.homepage = ct->second.get_string("homepage").value_or("");
            }
            cfg.endpoints.push_back(std::move(e));
        }
    }
    cfg.check();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::string text = util::read_file(path);
    std::string dir = fs::path(path).parent_path().string();
    if (dir.empty()) dir = ".";
    return config_from_toml(text, dir);
}

std::string summary_to_json(const RunSummary& s) {
    ordered_json doc;
    doc["endpoint_id"] = s.endpoint_id;
    doc["seen"] = s.seen;
    doc["converted"] = s.converted;
    doc["rejected"] = s.rejected;
    doc["tombstoned"] = s.tombstoned;
    doc["duration_s"] = s.duration_s;
    doc["ok"] = s.ok;
    if (!s.error.empty()) doc["error"] = s.error;
    return doc.dump(2) + "\n";
}

EndpointLock::EndpointLock(const std::string& state_dir, const std::string& endpoint_id) {
    fs::create_directories(state_dir);
    std::string path =
        (fs::path(state_dir) / (util::percent_encode(endpoint_id) + ".lock")).string();
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw IoError("cannot open lock file " + path);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw ConfigError("harvest already running for endpoint '" + endpoint_id + "'");
    }
}

EndpointLock::~EndpointLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

std::map<std::string, matcher::MappingTable> resolve_mappings(
    const EndpointPipelineConfig& endpoint_config) {
    std::map<std::string, matcher::MappingTable> tables;
    if (endpoint_config.mapping_ref == "builtin") {
        tables["oai_dc"] = dcat::builtin_oai_dc_mapping();
        tables["dcterms"] = dcat::builtin_dcterms_mapping();
    } else {
        auto table = matcher::mapping_from_json(util::read_file(endpoint_config.mapping_ref));
        tables[table.source_schema_id] = std::move(table);
    }

    if (!endpoint_config.overrides_path.empty()) {
        auto overrides =
            matcher::overrides_from_json(util::read_file(endpoint_config.overrides_path));
        for (const auto& ov : overrides) {
            bool applied = false;
            for (auto& [schema_id, table] : tables) {
                bool covered = table.find(ov.source_term) != nullptr ||
                               std::find(table.unmapped.begin(), table.unmapped.end(),
                                         ov.source_term) != table.unmapped.end();
                if (!covered) continue;
                table = matcher::apply_overrides(table, {ov});
                applied = true;
            }
            if (!applied)
                throw ConfigError("override term '" + ov.source_term +
                                  "' matches no mapping for endpoint '" +
                                  endpoint_config.endpoint.id + "'");
        }
    }
    return tables;
}

namespace {

struct ConvertedRecord {
    dcat::DcatDataset dataset;
    rdf::Graph graph;
    std::string turtle;
};

std::string report_to_jsonl(const dcat::ConversionReport& report) {
    ordered_json doc;
    doc["identifier"] = report.identifier;
    doc["outcome"] = report.converted ? "converted" : "rejected";
    doc["dropped_fields"] = ordered_json::array();
    for (const auto& d : report.dropped_fields) {
        ordered_json jd;
        jd["term"] = d.term;
        jd["value"] = d.value;
        jd["reason"] = d.reason;
        doc["dropped_fields"].push_back(std::move(jd));
    }
    doc["diagnostics"] = report.diagnostics;
    return doc.dump() + "\n";
}

// One machine-parseable stderr line per record-level diagnostic.
void log_diagnostics(const std::string& endpoint_id, const dcat::ConversionReport& report) {
    for (const auto& note : report.diagnostics) {
        ordered_json line;
        line["endpoint"] = endpoint_id;
        line["identifier"] = report.identifier;
        line["outcome"] = report.converted ? "converted" : "rejected";
        line["note"] = note;
        std::cerr << (line.dump() + "\n");
    }
}

}  // namespace

RunSummary run_harvest(const PipelineConfig& config, const std::string& endpoint_id,
                       const RunHooks& hooks) {
    const auto* ep = config.find_endpoint(endpoint_id);
    if (!ep) throw ConfigError("endpoint '" + endpoint_id + "' is not configured");

    auto t0 = std::chrono::steady_clock::now();
    RunSummary summary;
    summary.endpoint_id = endpoint_id;

    EndpointLock lock(config.state_dir, endpoint_id);
    auto mappings = resolve_mappings(*ep);
    auto registry = schema::builtin_registry();
    store::DatasetStore store(config.output_dir);

    oai::HarvestState state = oai::load_state(config.state_dir, endpoint_id);
    state.resumption_token.reset();  // runs always restart from the datestamp cursor

    oai::OaiClient client(ep->endpoint);
    oai::RepositoryInfo info = client.identify();

    // Later datestamp wins per identifier across retry passes.
    std::map<std::string, oai::RawOaiRecord> batch;
    auto sink = [&](const oai::RawOaiRecord& raw) {
        auto it = batch.find(raw.identifier);
        if (it == batch.end() || raw.datestamp >= it->second.datestamp)
            batch[raw.identifier] = raw;
    };

    oai::ListOutcome outcome;
    try {
        outcome = client.list_records(state, info, sink, hooks.on_page);
    } catch (const ProtocolError& e) {
        if (e.code() != "badResumptionToken") throw;
        // Token chain died mid-run; re-harvest once from the datestamp
        // cursor and deduplicate by identifier.
        outcome = client.list_records(state, info, sink, hooks.on_page);
    }

    summary.seen = static_cast<std::int64_t>(batch.size());

    // Convert and stage.
    auto staging = store.begin_staging(endpoint_id);
    std::string reports;
    std::vector<std::pair<std::string, std::string>> new_turtle;  // file -> content

    // staging.datasets starts as the previous snapshot's entries; updates
    // below overlay this run's outcomes.
    auto erase_staged = [&staging](const std::string& identifier) {
        for (auto it = staging.datasets.begin(); it != staging.datasets.end(); ++it) {
            if (it->second.identifier == identifier) {
                staging.datasets.erase(it);
                return;
            }
        }
    };

    try {
        for (const auto& [identifier, raw] : batch) {
            if (raw.deleted) {
                ++summary.tombstoned;
                staging.tombstones.insert(identifier);
                erase_staged(identifier);
                store.remove_raw(endpoint_id, identifier);
                dcat::ConversionReport report;
                report.identifier = identifier;
                report.converted = false;
                report.diagnostics.push_back("record deleted at source; dataset tombstoned");
                log_diagnostics(endpoint_id, report);
                reports += report_to_jsonl(report);
                continue;
            }

            dcat::ConversionReport report;
            std::optional<dcat::DcatDataset> dataset;
            try {
                std::string schema_id = records::detect_schema(raw, registry);
                auto mapping_it = mappings.find(schema_id);
                if (mapping_it == mappings.end()) {
                    report.identifier = identifier;
                    report.converted = false;
                    report.diagnostics.push_back("no mapping configured for schema '" +
                                                 schema_id + "'");
                } else {
                    records::SourceRecord record =
                        records::parse_record(raw, registry.at(schema_id));
                    record.origin_endpoint = endpoint_id;
                    auto converted =
                        dcat::convert(record, mapping_it->second, config.rules, config.base_uri);
                    report = std::move(converted.report);
                    dataset = std::move(converted.dataset);
                }
            } catch (const Error& e) {
                report.identifier = identifier;
                report.converted = false;
                report.diagnostics.push_back(e.what());
            }

            staging.tombstones.erase(identifier);
            if (report.converted && dataset) {
                ++summary.converted;
                // Last-write-wins by datestamp: never clobber a newer stored
                // conversion with a stale record.
                bool stale = false;
                for (const auto& [uri, staged] : staging.datasets) {
                    if (staged.identifier == identifier && staged.datestamp > raw.datestamp)
                        stale = true;
                }
                if (stale) {
                    report.diagnostics.push_back(
                        "stored conversion has a newer datestamp; record skipped");
                    log_diagnostics(endpoint_id, report);
                    reports += report_to_jsonl(report);
                    continue;
                }
                store::DatasetEntry entry;
                entry.uri = dataset->uri;
                entry.identifier = identifier;
                entry.datestamp = raw.datestamp;
                entry.file = "datasets/" + store::dataset_file_name(identifier);
                rdf::Graph graph = rdf::dataset_to_graph(*dataset);
                new_turtle.emplace_back(entry.file, rdf::serialize_turtle(graph));
                staging.datasets[entry.uri] = entry;
                store.write_raw(endpoint_id, raw);
            } else {
                ++summary.rejected;
                // A record that previously converted and now fails drops out
                // of the catalog; the store reflects the last conversion.
                erase_staged(identifier);
            }
            log_diagnostics(endpoint_id, report);
            reports += report_to_jsonl(report);
        }

        // Carry forward unchanged dataset files byte-identically, then the
        // new ones.
        auto previous = store.current(endpoint_id);
        for (const auto& [uri, entry] : staging.datasets) {
            bool rewritten = false;
            for (const auto& [file, _] : new_turtle)
                if (file == entry.file) rewritten = true;
            if (rewritten) continue;
            if (!previous) throw IoError("carried dataset without a previous snapshot: " + uri);
            fs::copy_file(fs::path(previous->dir) / entry.file,
                          fs::path(staging.dir) / entry.file,
                          fs::copy_options::overwrite_existing);
        }
        for (const auto& [file, content] : new_turtle)
            util::atomic_write_file((fs::path(staging.dir) / file).string(), content);

        // Catalog over the snapshot's live datasets.
        std::vector<std::string> dataset_uris;
        for (const auto& [uri, _] : staging.datasets) dataset_uris.push_back(uri);
        auto catalog = dcat::build_catalog(endpoint_id, ep->catalog, dataset_uris,
                                           config.base_uri);
        rdf::Graph catalog_graph = rdf::catalog_to_graph(catalog.catalog);
        util::atomic_write_file((fs::path(staging.dir) / "catalog.ttl").string(),
                                rdf::serialize_turtle(catalog_graph));
        util::atomic_write_file((fs::path(staging.dir) / "reports.jsonl").string(), reports);

        if (hooks.before_publish) hooks.before_publish();
        store.publish(endpoint_id, staging);
    } catch (...) {
        store::DatasetStore::discard(staging);
        throw;
    }

    oai::HarvestState final_state = outcome.state;
    final_state.endpoint_id = endpoint_id;
    oai::save_state(config.state_dir, final_state);

    summary.ok = true;
    summary.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    store.write_last_run(endpoint_id, summary_to_json(summary));
    return summary;
}

std::vector<RunSummary> harvest_all(const PipelineConfig& config) {
    std::vector<RunSummary> summaries(config.endpoints.size());
    std::vector<std::thread> threads;
    for (size_t i = 0; i < config.endpoints.size(); ++i) {
        threads.emplace_back([&, i] {
            const std::string id = config.endpoints[i].endpoint.id;
            try {
                summaries[i] = run_harvest(config, id);
            } catch (const std::exception& e) {
                summaries[i].endpoint_id = id;
                summaries[i].ok = false;
                summaries[i].error = e.what();
            }
        });
    }
    for (auto& t : threads) t.join();
    return summaries;
}

OfflineConvertResult convert_offline(const PipelineConfig& config,
                                     const EndpointPipelineConfig& endpoint_config,
                                     const std::string& in_dir, const std::string& out_dir) {
    auto mappings = resolve_mappings(endpoint_config);
    auto registry = schema::builtin_registry();
    store::DatasetStore store(config.output_dir);

    fs::create_directories(fs::path(out_dir) / "datasets");
    OfflineConvertResult result;
    std::string reports;
    for (const auto& raw : store.read_raw_records(in_dir)) {
        dcat::ConversionReport report;
        try {
            std::string schema_id = records::detect_schema(raw, registry);
            auto it = mappings.find(schema_id);
            if (it == mappings.end())
                throw ConfigError("no mapping configured for schema '" + schema_id + "'");
            records::SourceRecord record = records::parse_record(raw, registry.at(schema_id));
            record.origin_endpoint = endpoint_config.endpoint.id;
            auto converted = dcat::convert(record, it->second, config.rules, config.base_uri);
            report = std::move(converted.report);
            if (converted.dataset) {
                ++result.converted;
                std::string file = store::dataset_file_name(raw.identifier);
                util::atomic_write_file(
                    (fs::path(out_dir) / "datasets" / file).string(),
                    rdf::serialize_turtle(rdf::dataset_to_graph(*converted.dataset)));
            } else {
                ++result.rejected;
            }
        } catch (const Error& e) {
            ++result.rejected;
            report.identifier = raw.identifier;
            report.converted = false;
            report.diagnostics.push_back(e.what());
        }
        reports += report_to_jsonl(report);
    }
    util::atomic_write_file((fs::path(out_dir) / "reports.jsonl").string(), reports);
    return result;
}

}  // namespace converter::pipeline
