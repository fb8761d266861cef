#include <doctest.h>

#include <httplib.h>

#include <chrono>
#include <set>
#include <thread>

#include "converter/errors.hpp"
#include "converter/oai_client.hpp"
#include "test_helpers.hpp"

using namespace converter;
using testing::endpoint_for;
using testing::load_corpus;

namespace {

struct Harvested {
    std::vector<oai::RawOaiRecord> records;
    std::set<std::string> ids() const {
        std::set<std::string> out;
        for (const auto& r : records) out.insert(r.identifier);
        return out;
    }
};

Harvested harvest_all_records(oai::OaiClient& client, const oai::HarvestState& state,
                              const oai::RepositoryInfo& info, oai::ListOutcome* outcome_out,
                              const std::function<void(const oai::HarvestState&)>& on_page = {}) {
    Harvested h;
    auto outcome = client.list_records(
        state, info, [&](const oai::RawOaiRecord& r) { h.records.push_back(r); }, on_page);
    if (outcome_out) *outcome_out = outcome;
    return h;
}

}  // namespace

TEST_CASE("identify parses the repository info") {
    mockrepo::MockRepository repo(load_corpus("mock-fu"));
    repo.start();
    oai::OaiClient client(endpoint_for("mock-fu", repo.base_url()));
    auto info = client.identify();
    CHECK(info.name == "mock-fu");
    CHECK(info.protocol_version == "2.0");
    CHECK(info.granularity == oai::Granularity::seconds);
    REQUIRE(info.earliest_datestamp.has_value());
}

TEST_CASE("identify rejects protocol version 1.1") {
    auto corpus = load_corpus("mock-tu");
    corpus.protocol_version = "1.1";
    mockrepo::MockRepository repo(corpus);
    repo.start();
    oai::OaiClient client(endpoint_for("mock-tu", repo.base_url()));
    CHECK_THROWS_AS(client.identify(), ProtocolError);
}

TEST_CASE("persistent HTTP 500 surfaces as NetworkError after retries") {
    httplib::Server broken;
    int hits = 0;
    broken.Get("/oai", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });
    int port = broken.bind_to_any_port("127.0.0.1");
    std::thread t([&] { broken.listen_after_bind(); });
    broken.wait_until_ready();

    auto ep = endpoint_for("broken", "http://127.0.0.1:" + std::to_string(port) + "/oai");
    ep.max_retries = 2;
    oai::OaiClient client(ep);
    CHECK_THROWS_AS(client.identify(), NetworkError);
    CHECK(hits == 3);  // initial try + 2 retries

    broken.stop();
    t.join();
}

TEST_CASE("full harvest yields 25 unique records in 3 requests") {
    mockrepo::MockRepository repo(load_corpus("mock-tu"));
    repo.start();
    oai::OaiClient client(endpoint_for("mock-tu", repo.base_url()));
    auto info = client.identify();

    oai::ListOutcome outcome;
    auto h = harvest_all_records(client, oai::HarvestState{}, info, &outcome);
    CHECK(h.records.size() == 25);
    CHECK(h.ids().size() == 25);
    CHECK(outcome.records_yielded == 25);
    CHECK_FALSE(outcome.state.resumption_token.has_value());
    CHECK(outcome.state.records_seen == 25);
    // Completed runs advance the cursor to the max datestamp seen.
    REQUIRE(outcome.state.last_success_datestamp.has_value());
    CHECK(util::format_datetime_utc(*outcome.state.last_success_datestamp) ==
          "2024-03-09T08:00:00Z");

    int list_requests = 0;
    for (const auto& e : repo.request_log())
        if (e.verb == "ListRecords") ++list_requests;
    CHECK(list_requests == 3);
}

TEST_CASE("incremental run with no changes sees zero records") {
    mockrepo::MockRepository repo(load_corpus("mock-tu"));
    repo.start();
    oai::OaiClient client(endpoint_for("mock-tu", repo.base_url()));
    auto info = client.identify();

    oai::ListOutcome first;
    harvest_all_records(client, oai::HarvestState{}, info, &first);

    oai::ListOutcome second;
    auto h = harvest_all_records(client, first.state, info, &second);
    CHECK(h.records.empty());
    CHECK(second.records_yielded == 0);
    // The cursor stays put when nothing new arrived.
    CHECK(second.state.last_success_datestamp == first.state.last_success_datestamp);
}

TEST_CASE("deleted records arrive as tombstones") {
    mockrepo::MockRepository repo(load_corpus("mock-tu"));
    repo.start();
    oai::OaiClient client(endpoint_for("mock-tu", repo.base_url()));
    auto info = client.identify();
    auto h = harvest_all_records(client, oai::HarvestState{}, info, nullptr);
    int deleted = 0;
    for (const auto& r : h.records) {
        if (r.deleted) {
            ++deleted;
            CHECK(r.identifier == "oai:mock-tu:item-0013");
            CHECK(r.payload.empty());
        } else {
            CHECK_FALSE(r.payload.empty());
        }
    }
    CHECK(deleted == 1);
}

TEST_CASE("identifier sets are identical across page sizes") {
    auto corpus = load_corpus("mock-hu");
    std::set<std::string> reference;
    for (int page_size : {1, 3, 10, 25}) {
        corpus.page_size = page_size;
        mockrepo::MockRepository repo(corpus);
        repo.start();
        oai::OaiClient client(endpoint_for("mock-hu", repo.base_url()));
        auto info = client.identify();
        auto h = harvest_all_records(client, oai::HarvestState{}, info, nullptr);
        CHECK(h.records.size() == 25);  // exactly once per run
        if (reference.empty())
            reference = h.ids();
        else
            CHECK(h.ids() == reference);
    }
    CHECK(reference.size() == 25);
}

TEST_CASE("a run interrupted after one page resumes without gaps or duplicates") {
    testing::TempDir dir("resume");
    mockrepo::MockRepository repo(load_corpus("mock-hu"));
    repo.start();
    auto ep = endpoint_for("mock-hu", repo.base_url());
    oai::OaiClient client(ep);
    auto info = client.identify();

    // Reference: uninterrupted run.
    auto reference = harvest_all_records(client, oai::HarvestState{}, info, nullptr).ids();

    // Interrupted run: persist state per page, abort after the first page.
    std::set<std::string> collected;
    struct Abort {};
    int pages = 0;
    try {
        client.list_records(
            oai::HarvestState{},  info,
            [&](const oai::RawOaiRecord& r) { collected.insert(r.identifier); },
            [&](const oai::HarvestState& s) {
                oai::save_state(dir.str(), s);
                if (++pages == 1) throw Abort{};
            });
        FAIL("expected abort");
    } catch (const Abort&) {
    }
    CHECK(collected.size() == 10);

    // Resume from the persisted token.
    auto resumed_state = oai::load_state(dir.str(), "mock-hu");
    REQUIRE(resumed_state.resumption_token.has_value());
    oai::ListOutcome rest;
    auto h2 = harvest_all_records(client, resumed_state, info, &rest);
    for (const auto& r : h2.records) {
        CHECK(collected.insert(r.identifier).second);  // no duplicates
    }
    CHECK(collected == reference);  // no gaps
    CHECK_FALSE(rest.state.resumption_token.has_value());
}

TEST_CASE("badResumptionToken clears the token and surfaces the code") {
    testing::TempDir dir("badtoken");
    auto corpus = load_corpus("mock-tu");
    corpus.failures.bad_token_once = true;
    mockrepo::MockRepository repo(corpus);
    repo.start();
    oai::OaiClient client(endpoint_for("mock-tu", repo.base_url()));
    auto info = client.identify();

    std::set<std::string> first_pass;
    try {
        client.list_records(
            oai::HarvestState{}, info,
            [&](const oai::RawOaiRecord& r) { first_pass.insert(r.identifier); },
            [&](const oai::HarvestState& s) { oai::save_state(dir.str(), s); });
        FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
        CHECK(e.code() == "badResumptionToken");
    }
    CHECK(first_pass.size() == 10);
    // The dead cursor was cleared through the persistence hook.
    CHECK_FALSE(oai::load_state(dir.str(), "mock-tu").resumption_token.has_value());

    // The caller's recovery path: full re-harvest from the datestamp cursor.
    auto h = harvest_all_records(client, oai::HarvestState{}, info, nullptr);
    CHECK(h.ids().size() == 25);
}

TEST_CASE("503 with Retry-After is honored and recovered") {
    auto corpus = load_corpus("mock-tu");
    corpus.failures.http_503_once = true;
    mockrepo::MockRepository repo(corpus);
    repo.start();
    oai::OaiClient client(endpoint_for("mock-tu", repo.base_url()));
    auto info = client.identify();
    auto h = harvest_all_records(client, oai::HarvestState{}, info, nullptr);
    CHECK(h.ids().size() == 25);
}

TEST_CASE("at most one in-flight request per endpoint") {
    mockrepo::MockRepository repo(load_corpus("mock-fu"));
    repo.start();
    oai::OaiClient client(endpoint_for("mock-fu", repo.base_url()));
    auto info = client.identify();
    harvest_all_records(client, oai::HarvestState{}, info, nullptr);
    CHECK(repo.max_inflight() == 1);
}

TEST_CASE("day granularity truncates from and backdates the cursor") {
    auto corpus = load_corpus("mock-tu");
    corpus.granularity = "YYYY-MM-DD";
    mockrepo::MockRepository repo(corpus);
    repo.start();
    oai::OaiClient client(endpoint_for("mock-tu", repo.base_url()));
    auto info = client.identify();
    CHECK(info.granularity == oai::Granularity::day);

    oai::HarvestState state;
    state.last_success_datestamp = util::parse_datestamp("2024-03-05T10:15:00Z");
    oai::ListOutcome outcome;
    harvest_all_records(client, state, info, &outcome);

    bool saw_day_from = false;
    for (const auto& e : repo.request_log()) {
        if (e.query.find("from=2024-03-05") != std::string::npos) saw_day_from = true;
        CHECK(e.query.find("from=2024-03-05T") == std::string::npos);  // truncated, not full
    }
    CHECK(saw_day_from);

    // Cursor lands one day before the run started.
    REQUIRE(outcome.state.last_success_datestamp.has_value());
    auto now = std::chrono::duration_cast<std::chrono::seconds>(
                   std::chrono::system_clock::now().time_since_epoch())
                   .count();
    CHECK(*outcome.state.last_success_datestamp <= now - 86400 + 5);
    CHECK(*outcome.state.last_success_datestamp >= now - 86400 - 60);
}

TEST_CASE("state files round trip and corruption is loud") {
    testing::TempDir dir("state");
    CHECK(oai::load_state(dir.str(), "fresh") == oai::HarvestState{"fresh", {}, {}, 0});

    oai::HarvestState s;
    s.endpoint_id = "mock-fu";
    s.last_success_datestamp = util::parse_datestamp("2024-03-18T08:00:00Z");
    s.resumption_token = "10.4242.7";
    s.records_seen = 35;
    oai::save_state(dir.str(), s);
    CHECK(oai::load_state(dir.str(), "mock-fu") == s);

    // Truncate the file: load must fail, never silently reset.
    auto path = dir.path() / "mock-fu.json";
    auto full = util::read_file(path.string());
    util::atomic_write_file(path.string(), full.substr(0, full.size() / 2));
    CHECK_THROWS_AS(oai::load_state(dir.str(), "mock-fu"), IoError);
}

TEST_CASE("state belonging to another endpoint is refused") {
    mockrepo::MockRepository repo(load_corpus("mock-tu"));
    repo.start();
    oai::OaiClient client(endpoint_for("mock-tu", repo.base_url()));
    oai::RepositoryInfo info;
    info.protocol_version = "2.0";
    oai::HarvestState other;
    other.endpoint_id = "mock-hu";
    CHECK_THROWS_AS(client.list_records(other, info, [](const oai::RawOaiRecord&) {}),
                    ConfigError);
}
