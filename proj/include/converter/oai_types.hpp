#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace converter::oai {

struct EndpointConfig {
    std::string id;
    std::string base_url;
    std::string metadata_prefix = "oai_dc";
    std::string set_spec;        // empty = no set filter
    int page_timeout_s = 30;     // per-request read timeout
    int max_retries = 3;
    int backoff_initial_ms = 1000;  // first retry delay, doubling after

    void check() const;  // throws ConfigError
};

/// Per-endpoint harvest cursor. resumption_token is only ever present while
/// a run is in flight; completed runs clear it.
struct HarvestState {
    std::string endpoint_id;
    std::optional<std::int64_t> last_success_datestamp;
    std::optional<std::string> resumption_token;
    std::int64_t records_seen = 0;

    bool operator==(const HarvestState&) const = default;
};

struct RawOaiRecord {
    std::string identifier;
    std::int64_t datestamp = 0;
    bool deleted = false;
    std::string payload;  // metadata XML fragment, empty when deleted
};

enum class Granularity { seconds, day };

struct RepositoryInfo {
    std::string name;
    std::string protocol_version;
    std::optional<std::int64_t> earliest_datestamp;
    Granularity granularity = Granularity::seconds;
};

}  // namespace converter::oai
