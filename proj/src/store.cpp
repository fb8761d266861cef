#include "converter/store.hpp"

#include <unistd.h>

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "converter/errors.hpp"
#include "converter/util.hpp"

namespace fs = std::filesystem;

namespace converter::store {

using nlohmann::json;
using nlohmann::ordered_json;

const DatasetEntry* Snapshot::find_by_identifier(const std::string& identifier) const {
    for (const auto& [_, e] : datasets)
        if (e.identifier == identifier) return &e;
    return nullptr;
}

std::string dataset_file_name(const std::string& identifier) {
    return util::percent_encode(identifier) + ".ttl";
}

DatasetStore::DatasetStore(std::string root) : root_(std::move(root)) {
    fs::create_directories(root_);
}

std::string DatasetStore::endpoint_dir(const std::string& endpoint_id) const {
    return (fs::path(root_) / util::percent_encode(endpoint_id)).string();
}

std::vector<std::string> DatasetStore::endpoints() const {
    std::vector<std::string> out;
    if (!fs::exists(root_)) return out;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (!entry.is_directory()) continue;
        if (auto decoded = util::percent_decode(entry.path().filename().string()))
            out.push_back(*decoded);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::string index_to_json(const DatasetStore::Staging& staging) {
    ordered_json doc;
    doc["seq"] = staging.seq;
    doc["catalog_file"] = "catalog.ttl";
    doc["datasets"] = ordered_json::array();
    for (const auto& [_, e] : staging.datasets) {
        ordered_json je;
        je["uri"] = e.uri;
        je["identifier"] = e.identifier;
        je["datestamp"] = util::format_datetime_utc(e.datestamp);
        je["file"] = e.file;
        doc["datasets"].push_back(std::move(je));
    }
    doc["tombstones"] = ordered_json::array();
    for (const auto& t : staging.tombstones) doc["tombstones"].push_back(t);
    return doc.dump(2) + "\n";
}

}  // namespace

std::optional<Snapshot> DatasetStore::current(const std::string& endpoint_id) const {
    fs::path dir = endpoint_dir(endpoint_id);
    fs::path pointer = dir / "current";
    if (!fs::exists(pointer)) return std::nullopt;
    std::string name = util::trim(util::read_file(pointer.string()));
    fs::path snap_dir = dir / name;
    std::string index_text = util::read_file((snap_dir / "index.json").string());
    try {
        json doc = json::parse(index_text);
        Snapshot snap;
        snap.seq = doc.at("seq").get<std::int64_t>();
        snap.dir = snap_dir.string();
        for (const auto& je : doc.at("datasets")) {
            DatasetEntry e;
            e.uri = je.at("uri").get<std::string>();
            e.identifier = je.at("identifier").get<std::string>();
            auto ts = util::parse_datestamp(je.at("datestamp").get<std::string>());
            e.datestamp = ts.value_or(0);
            e.file = je.at("file").get<std::string>();
            snap.datasets[e.uri] = std::move(e);
        }
        for (const auto& t : doc.at("tombstones")) snap.tombstones.insert(t.get<std::string>());
        return snap;
    } catch (const json::exception& e) {
        throw IoError("snapshot index corrupt under " + snap_dir.string() + ": " + e.what());
    }
}

DatasetStore::Staging DatasetStore::begin_staging(const std::string& endpoint_id) const {
    Staging staging;
    auto existing = current(endpoint_id);
    staging.seq = existing ? existing->seq + 1 : 1;
    if (existing) {
        staging.datasets = existing->datasets;
        staging.tombstones = existing->tombstones;
    }
    fs::path dir = fs::path(endpoint_dir(endpoint_id)) /
                   ("staging." + std::to_string(::getpid()) + "." +
                    std::to_string(staging.seq));
    fs::remove_all(dir);
    fs::create_directories(dir / "datasets");
    staging.dir = dir.string();
    return staging;
}

void DatasetStore::publish(const std::string& endpoint_id, Staging staging) {
    util::atomic_write_file((fs::path(staging.dir) / "index.json").string(),
                            index_to_json(staging));
    fs::path dir = endpoint_dir(endpoint_id);
    std::string snap_name = "snapshot-" + std::to_string(staging.seq);
    fs::path snap_dir = dir / snap_name;
    std::error_code ec;
    fs::rename(staging.dir, snap_dir, ec);
    if (ec) throw IoError("cannot publish snapshot " + snap_dir.string() + ": " + ec.message());
    util::atomic_write_file((dir / "current").string(), snap_name + "\n");

    // Prune superseded snapshots. The immediately previous one is kept so
    // readers that resolved the pointer just before the swap can finish.
    std::string previous = "snapshot-" + std::to_string(staging.seq - 1);
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("snapshot-", 0) == 0 && name != snap_name && name != previous)
            fs::remove_all(entry.path());
        if (name.rfind("staging.", 0) == 0) fs::remove_all(entry.path());
    }
}

void DatasetStore::discard(const Staging& staging) {
    std::error_code ec;
    fs::remove_all(staging.dir, ec);
}

std::string DatasetStore::read_file(const std::string&, const Snapshot& snap,
                                    const std::string& file) const {
    return util::read_file((fs::path(snap.dir) / file).string());
}

std::string DatasetStore::raw_dir(const std::string& endpoint_id) const {
    return (fs::path(endpoint_dir(endpoint_id)) / "raw").string();
}

void DatasetStore::write_raw(const std::string& endpoint_id, const oai::RawOaiRecord& record) {
    json doc;
    doc["identifier"] = record.identifier;
    doc["datestamp"] = util::format_datetime_utc(record.datestamp);
    doc["payload"] = record.payload;
    fs::path path = fs::path(raw_dir(endpoint_id)) /
                    (util::percent_encode(record.identifier) + ".json");
    util::atomic_write_file(path.string(), doc.dump(2) + "\n");
}

void DatasetStore::remove_raw(const std::string& endpoint_id, const std::string& identifier) {
    std::error_code ec;
    fs::remove(fs::path(raw_dir(endpoint_id)) / (util::percent_encode(identifier) + ".json"), ec);
}

std::vector<oai::RawOaiRecord> DatasetStore::read_raw_records(const std::string& dir) const {
    std::vector<oai::RawOaiRecord> out;
    if (!fs::exists(dir)) return out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        try {
            json doc = json::parse(util::read_file(path.string()));
            oai::RawOaiRecord r;
            r.identifier = doc.at("identifier").get<std::string>();
            r.datestamp = util::parse_datestamp(doc.at("datestamp").get<std::string>()).value_or(0);
            r.payload = doc.at("payload").get<std::string>();
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw IoError("raw record " + path.string() + " is corrupt: " + e.what());
        }
    }
    return out;
}

void DatasetStore::write_last_run(const std::string& endpoint_id, const std::string& json_text) {
    util::atomic_write_file((fs::path(endpoint_dir(endpoint_id)) / "last_run.json").string(),
                            json_text);
}

std::optional<std::string> DatasetStore::read_last_run(const std::string& endpoint_id) const {
    fs::path path = fs::path(endpoint_dir(endpoint_id)) / "last_run.json";
    if (!fs::exists(path)) return std::nullopt;
    return util::read_file(path.string());
}

}  // namespace converter::store
