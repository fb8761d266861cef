#include "converter/oai_client.hpp"

#include <chrono>
#include <filesystem>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "converter/errors.hpp"
#include "converter/util.hpp"
#include "converter/xml.hpp"

namespace converter::oai {

using nlohmann::json;

namespace {

constexpr const char* kOaiNs = "http://www.openarchives.org/OAI/2.0/";

std::string encode_query_value(const std::string& v) { return util::percent_encode(v); }

struct OaiResponse {
    xml::Element root;
    std::string error_code;  // empty when none
    std::string error_text;
};

OaiResponse parse_envelope(const std::string& body) {
    OaiResponse out{xml::parse(body), "", ""};
    if (out.root.ns != kOaiNs || out.root.local != "OAI-PMH")
        throw ProtocolError("response root is not an OAI-PMH envelope");
    if (const auto* err = out.root.first(kOaiNs, "error")) {
        out.error_code = err->attr("", "code").value_or("");
        out.error_text = err->text();
    }
    return out;
}

}  // namespace

void EndpointConfig::check() const {
    if (id.empty()) throw ConfigError("endpoint id missing");
    if (!util::parse_http_url(base_url))
        throw ConfigError("endpoint " + id + ": base_url is not an absolute http(s) URL");
    if (metadata_prefix.empty())
        throw ConfigError("endpoint " + id + ": metadata_prefix missing");
    if (max_retries < 0 || page_timeout_s < 1 || backoff_initial_ms < 0)
        throw ConfigError("endpoint " + id + ": invalid retry/timeout settings");
}

OaiClient::OaiClient(EndpointConfig config) : config_(std::move(config)) {
    config_.check();
}

std::string OaiClient::fetch(const std::string& query) {
    auto parts = util::parse_http_url(config_.base_url);
    std::string target = parts->path + "?" + query;

    int attempt = 0;
    int delay_ms = config_.backoff_initial_ms;
    std::string last_failure;
    while (true) {
        httplib::Client client(parts->host, parts->port);
        client.set_read_timeout(config_.page_timeout_s, 0);
        client.set_connection_timeout(config_.page_timeout_s, 0);
        auto res = client.Get(target);

        if (res && res->status == 200) return res->body;

        bool retryable;
        int sleep_ms = delay_ms;
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            retryable = true;
        } else if (res->status == 503) {
            last_failure = "HTTP 503";
            retryable = true;
            if (res->has_header("Retry-After")) {
                try {
                    sleep_ms = std::stoi(res->get_header_value("Retry-After")) * 1000;
                } catch (...) {
                }
            }
        } else if (res->status >= 500) {
            last_failure = "HTTP " + std::to_string(res->status);
            retryable = true;
        } else {
            throw NetworkError(config_.id + ": HTTP " + std::to_string(res->status) + " for " +
                               target);
        }

        if (!retryable || attempt >= config_.max_retries)
            throw NetworkError(config_.id + ": " + last_failure + " after " +
                               std::to_string(attempt) + " retries");
        std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
        delay_ms *= 2;
        ++attempt;
    }
}

RepositoryInfo OaiClient::identify() {
    auto env = parse_envelope(fetch("verb=Identify"));
    if (!env.error_code.empty())
        throw ProtocolError("Identify failed: " + env.error_code, env.error_code);
    const auto* identify = env.root.first(kOaiNs, "Identify");
    if (!identify) throw ProtocolError("Identify response lacks Identify element");

    RepositoryInfo info;
    if (const auto* e = identify->first(kOaiNs, "repositoryName")) info.name = e->text();
    if (const auto* e = identify->first(kOaiNs, "protocolVersion"))
        info.protocol_version = util::trim(e->text());
    if (const auto* e = identify->first(kOaiNs, "earliestDatestamp"))
        info.earliest_datestamp = util::parse_datestamp(util::trim(e->text()));
    if (const auto* e = identify->first(kOaiNs, "granularity"))
        info.granularity = util::trim(e->text()) == "YYYY-MM-DD" ? Granularity::day
                                                                 : Granularity::seconds;
    if (info.protocol_version != "2.0")
        throw ProtocolError("unsupported protocol version '" + info.protocol_version + "'",
                            "unsupportedVersion");
    return info;
}

ListOutcome OaiClient::list_records(const HarvestState& state, const RepositoryInfo& info,
                                    const std::function<void(const RawOaiRecord&)>& sink,
                                    const std::function<void(const HarvestState&)>& on_page) {
    if (!state.endpoint_id.empty() && state.endpoint_id != config_.id)
        throw ConfigError("harvest state belongs to endpoint '" + state.endpoint_id + "'");

    ListOutcome out;
    out.state = state;
    out.state.endpoint_id = config_.id;

    std::string query;
    if (state.resumption_token && !state.resumption_token->empty()) {
        query = "verb=ListRecords&resumptionToken=" + encode_query_value(*state.resumption_token);
    } else {
        query = "verb=ListRecords&metadataPrefix=" + encode_query_value(config_.metadata_prefix);
        if (!config_.set_spec.empty()) query += "&set=" + encode_query_value(config_.set_spec);
        if (state.last_success_datestamp) {
            // `from` is inclusive; with seconds granularity advance one second
            // past the newest datestamp already seen. Day granularity
            // truncates and tolerates the resulting overlap (deduplicated
            // downstream by identifier).
            std::string from = info.granularity == Granularity::day
                                   ? util::format_date_utc(*state.last_success_datestamp)
                                   : util::format_datetime_utc(*state.last_success_datestamp + 1);
            query += "&from=" + encode_query_value(from);
        }
    }

    std::set<std::string> yielded;
    std::int64_t max_datestamp = state.last_success_datestamp.value_or(0);
    bool any_datestamp = state.last_success_datestamp.has_value();
    std::int64_t run_start = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();

    while (true) {
        auto env = parse_envelope(fetch(query));
        if (env.error_code == "noRecordsMatch") break;
        if (!env.error_code.empty()) {
            if (env.error_code == "badResumptionToken") {
                // Reset the dead cursor before surfacing, so persisted state
                // restarts from the datestamp the next time around.
                out.state.resumption_token.reset();
                if (on_page) on_page(out.state);
            }
            throw ProtocolError("ListRecords failed: " + env.error_code + " (" + env.error_text +
                                    ")",
                                env.error_code);
        }
        const auto* list = env.root.first(kOaiNs, "ListRecords");
        if (!list) throw ProtocolError("ListRecords response lacks ListRecords element");

        for (const auto* record : list->elements(kOaiNs, "record")) {
            const auto* header = record->first(kOaiNs, "header");
            if (!header) throw ProtocolError("record lacks header");
            RawOaiRecord raw;
            if (const auto* e = header->first(kOaiNs, "identifier"))
                raw.identifier = util::trim(e->text());
            if (raw.identifier.empty()) throw ProtocolError("record header lacks identifier");
            std::string stamp;
            if (const auto* e = header->first(kOaiNs, "datestamp")) stamp = util::trim(e->text());
            auto ts = util::parse_datestamp(stamp);
            if (!ts) throw ProtocolError("record datestamp malformed: '" + stamp + "'");
            raw.datestamp = *ts;
            raw.deleted = header->attr("", "status").value_or("") == "deleted";
            if (!raw.deleted) {
                const auto* metadata = record->first(kOaiNs, "metadata");
                const xml::Element* payload =
                    metadata && !metadata->elements().empty() ? metadata->elements().front()
                                                              : nullptr;
                if (!payload)
                    throw ProtocolError("record " + raw.identifier + " lacks metadata payload");
                raw.payload = xml::serialize(*payload);
            }

            if (!yielded.insert(raw.identifier).second) continue;  // once per run
            max_datestamp = any_datestamp ? std::max(max_datestamp, raw.datestamp)
                                          : raw.datestamp;
            any_datestamp = true;
            ++out.records_yielded;
            ++out.state.records_seen;
            sink(raw);
        }

        const auto* token_el = list->first(kOaiNs, "resumptionToken");
        std::string token = token_el ? util::trim(token_el->text()) : "";
        if (token.empty()) break;
        out.state.resumption_token = token;
        if (on_page) on_page(out.state);
        query = "verb=ListRecords&resumptionToken=" + encode_query_value(token);
    }

    out.state.resumption_token.reset();
    if (info.granularity == Granularity::day) {
        // Avoid datestamp-boundary loss on day-granularity servers.
        out.state.last_success_datestamp = run_start - 86400;
    } else if (any_datestamp) {
        out.state.last_success_datestamp = max_datestamp;
    }
    if (on_page) on_page(out.state);
    return out;
}

// ---- state persistence -------------------------------------------------

namespace {

std::string state_path(const std::string& state_dir, const std::string& endpoint_id) {
    return (std::filesystem::path(state_dir) / (util::percent_encode(endpoint_id) + ".json"))
        .string();
}

}  // namespace

void save_state(const std::string& state_dir, const HarvestState& state) {
    json doc;
    doc["endpoint_id"] = state.endpoint_id;
    if (state.last_success_datestamp)
        doc["last_success_datestamp"] = util::format_datetime_utc(*state.last_success_datestamp);
    else
        doc["last_success_datestamp"] = nullptr;
    if (state.resumption_token)
        doc["resumption_token"] = *state.resumption_token;
    else
        doc["resumption_token"] = nullptr;
    doc["records_seen"] = state.records_seen;
    util::atomic_write_file(state_path(state_dir, state.endpoint_id), doc.dump(2) + "\n");
}

HarvestState load_state(const std::string& state_dir, const std::string& endpoint_id) {
    std::string path = state_path(state_dir, endpoint_id);
    if (!std::filesystem::exists(path)) {
        HarvestState fresh;
        fresh.endpoint_id = endpoint_id;
        return fresh;
    }
    std::string text = util::read_file(path);
    try {
        json doc = json::parse(text);
        HarvestState s;
        s.endpoint_id = doc.at("endpoint_id").get<std::string>();
        if (!doc.at("last_success_datestamp").is_null()) {
            auto ts = util::parse_datestamp(doc["last_success_datestamp"].get<std::string>());
            if (!ts) throw IoError("state file " + path + " has malformed datestamp");
            s.last_success_datestamp = *ts;
        }
        if (!doc.at("resumption_token").is_null())
            s.resumption_token = doc["resumption_token"].get<std::string>();
        s.records_seen = doc.at("records_seen").get<std::int64_t>();
        if (s.endpoint_id != endpoint_id)
            throw IoError("state file " + path + " belongs to endpoint " + s.endpoint_id);
        return s;
    } catch (const json::exception& e) {
        throw IoError("state file " + path + " is corrupt: " + e.what());
    }
}

}  // namespace converter::oai
