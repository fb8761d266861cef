#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "converter/dcat.hpp"
#include "converter/matcher.hpp"
#include "converter/oai_types.hpp"
#include "converter/store.hpp"

namespace converter::pipeline {

struct EndpointPipelineConfig {
    oai::EndpointConfig endpoint;
    dcat::CatalogMeta catalog;
    std::string mapping_ref = "builtin";  // "builtin" or a mapping JSON path
    std::string overrides_path;           // optional overrides JSON path
};

struct ServeOptions {
    std::string bind = "127.0.0.1";
    int port = 8080;
    int page_size = 10;
};

struct PipelineConfig {
    std::string base_uri;
    std::string state_dir;
    std::string output_dir;
    matcher::MatcherConfig matcher;
    dcat::TransformRules rules;
    ServeOptions serve;
    std::vector<EndpointPipelineConfig> endpoints;

    const EndpointPipelineConfig* find_endpoint(const std::string& id) const;
    void check() const;  // throws ConfigError
};

/// Loads the TOML config (see config/converter.example.toml). Relative
/// state/output/override paths resolve against the config file's directory.
PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_toml(const std::string& text, const std::string& base_dir);

struct RunSummary {
    std::string endpoint_id;
    std::int64_t seen = 0;
    std::int64_t converted = 0;
    std::int64_t rejected = 0;
    std::int64_t tombstoned = 0;
    double duration_s = 0.0;
    bool ok = false;
    std::string error;  // set when !ok
};

std::string summary_to_json(const RunSummary& s);

struct RunHooks {
    /// Invoked between conversion and snapshot publication (crash-safety
    /// test point).
    std::function<void()> before_publish;
    /// Observes harvest state after each fetched page.
    std::function<void(const oai::HarvestState&)> on_page;
};

/// Refuses concurrent harvests of one endpoint (flock on a lock file under
/// state_dir); released on destruction or process death.
class EndpointLock {
public:
    EndpointLock(const std::string& state_dir, const std::string& endpoint_id);
    ~EndpointLock();
    EndpointLock(const EndpointLock&) = delete;
    EndpointLock& operator=(const EndpointLock&) = delete;

private:
    int fd_ = -1;
};

/// Full incremental pipeline for one endpoint: harvest, parse, convert,
/// emit, snapshot-publish, state save. A failed run leaves store and state
/// untouched. Throws NetworkError / ConfigError / ProtocolError.
RunSummary run_harvest(const PipelineConfig& config, const std::string& endpoint_id,
                       const RunHooks& hooks = {});

/// Harvests all configured endpoints concurrently (one thread each).
std::vector<RunSummary> harvest_all(const PipelineConfig& config);

/// Mapping tables per source schema for an endpoint, overrides applied.
std::map<std::string, matcher::MappingTable> resolve_mappings(
    const EndpointPipelineConfig& endpoint_config);

/// Offline re-conversion of cached raw records (the `convert` subcommand):
/// reads raw JSON records from in_dir, converts them against the endpoint
/// mapping, writes dataset Turtle and a reports JSONL into out_dir.
struct OfflineConvertResult {
    std::int64_t converted = 0;
    std::int64_t rejected = 0;
};
OfflineConvertResult convert_offline(const PipelineConfig& config,
                                     const EndpointPipelineConfig& endpoint_config,
                                     const std::string& in_dir, const std::string& out_dir);

}  // namespace converter::pipeline
