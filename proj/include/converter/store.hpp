#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "converter/oai_types.hpp"

namespace converter::store {

struct DatasetEntry {
    std::string uri;
    std::string identifier;  // originating OAI identifier
    std::int64_t datestamp = 0;
    std::string file;  // dataset Turtle file name within the snapshot
};

/// One published snapshot: catalog Turtle, per-dataset Turtle files and an
/// index. Immutable once published.
struct Snapshot {
    std::int64_t seq = 0;
    std::string dir;  // absolute directory of this snapshot
    std::map<std::string, DatasetEntry> datasets;  // keyed by dataset URI
    std::set<std::string> tombstones;              // deleted OAI identifiers

    const DatasetEntry* find_by_identifier(const std::string& identifier) const;
};

/// Directory-per-endpoint dataset store with atomically swapped snapshots:
///
///   <root>/<endpoint>/snapshot-NNNNNN/{catalog.ttl, index.json, datasets/*.ttl}
///   <root>/<endpoint>/current            # pointer file, renamed into place
///   <root>/<endpoint>/raw/*.json         # cached raw payloads
///   <root>/<endpoint>/last_run.json      # latest RunSummary
///
/// Readers resolve `current` per access and never see a half-written
/// snapshot; publishing stages a full snapshot directory, renames it into
/// place, then swaps the pointer.
class DatasetStore {
public:
    explicit DatasetStore(std::string root);

    const std::string& root() const { return root_; }
    std::vector<std::string> endpoints() const;

    /// Latest published snapshot, or nullopt before the first publish.
    std::optional<Snapshot> current(const std::string& endpoint_id) const;

    /// Stages a new snapshot. `write` receives the staging directory and
    /// must create datasets/ content; the index and catalog are written by
    /// the caller through the StagingArea helpers.
    struct Staging {
        std::string dir;           // staging directory (datasets/ exists)
        std::int64_t seq = 0;      // sequence the snapshot will publish as
        std::map<std::string, DatasetEntry> datasets;
        std::set<std::string> tombstones;
    };
    Staging begin_staging(const std::string& endpoint_id) const;

    /// Finalizes the staged snapshot: writes index.json, renames the staging
    /// directory to snapshot-<seq> and swaps the `current` pointer. Old
    /// snapshots are pruned afterwards.
    void publish(const std::string& endpoint_id, Staging staging);

    /// Drops a staging directory without publishing.
    static void discard(const Staging& staging);

    std::string read_file(const std::string& endpoint_id, const Snapshot& snap,
                          const std::string& file) const;

    // Raw payload cache (not snapshotted; best effort).
    std::string raw_dir(const std::string& endpoint_id) const;
    void write_raw(const std::string& endpoint_id, const oai::RawOaiRecord& record);
    void remove_raw(const std::string& endpoint_id, const std::string& identifier);
    std::vector<oai::RawOaiRecord> read_raw_records(const std::string& dir) const;

    // Last-run summary JSON (free-form payload owned by the pipeline).
    void write_last_run(const std::string& endpoint_id, const std::string& json_text);
    std::optional<std::string> read_last_run(const std::string& endpoint_id) const;

private:
    std::string endpoint_dir(const std::string& endpoint_id) const;

    std::string root_;
};

/// File name used for a dataset within a snapshot (percent-encoded OAI
/// identifier + ".ttl").
std::string dataset_file_name(const std::string& identifier);

}  // namespace converter::store
