#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace converter::mockrepo {

/// One simulated metadata field; lang is an optional xml:lang tag.
struct FixtureField {
    std::string term;  // dc element local name ("description" renders per variant)
    std::string value;
    std::string lang;
};

struct FixtureRecord {
    std::string identifier;
    std::string datestamp;  // UTC, matching the corpus granularity
    bool deleted = false;
    std::vector<FixtureField> fields;
};

/// How a simulated repository phrases its payloads.
enum class Variant {
    standard,        // dc:description, dc:* only
    abstract_variant,  // description rendered as dcterms:abstract
    dcterms_variant,   // dc:date rendered as dcterms:issued, plus abstract
};

struct FailureInjections {
    bool http_503_once = false;       // first ListRecords request gets a 503
    int retry_after_seconds = 0;      // Retry-After header on that 503
    bool bad_token_once = false;      // first token redemption errors
    int token_expiry_uses = 0;        // >0: tokens die after N redemptions
};

struct FixtureCorpus {
    std::string repository_name;
    std::string protocol_version = "2.0";
    std::string granularity = "YYYY-MM-DDThh:mm:ssZ";
    int page_size = 10;
    Variant variant = Variant::standard;
    std::vector<FixtureRecord> records;  // datestamps non-decreasing
    FailureInjections failures;

    void check() const;  // unique identifiers, monotone datestamps
};

FixtureCorpus corpus_from_json(const std::string& text);   // throws ParseError
std::string corpus_to_json(const FixtureCorpus& corpus);

/// Renders one record's metadata payload per the corpus variant.
std::string render_payload(const FixtureRecord& record, Variant variant);

struct RequestLogEntry {
    std::string verb;
    std::string query;
    bool has_token = false;
};

/// In-process OAI-PMH 2.0 test double: Identify, ListMetadataFormats,
/// ListRecords with resumption-token paging, selective harvesting and the
/// configured failure injections. Serves at /oai.
class MockRepository {
public:
    explicit MockRepository(FixtureCorpus corpus);
    ~MockRepository();

    MockRepository(const MockRepository&) = delete;
    MockRepository& operator=(const MockRepository&) = delete;

    /// Binds 127.0.0.1 on an ephemeral port (or the given one) and serves
    /// on a background thread. Returns the bound port.
    int start(int port = 0);
    void stop();

    std::string base_url() const;

    /// Swaps the corpus (for incremental-harvest tests). Token state and
    /// logs are kept.
    void replace_corpus(FixtureCorpus corpus);

    std::vector<RequestLogEntry> request_log() const;
    int request_count() const;
    /// Highest number of concurrently in-flight requests observed.
    int max_inflight() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace converter::mockrepo
