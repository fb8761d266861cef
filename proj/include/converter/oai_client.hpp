#pragma once

#include <functional>
#include <string>
#include <vector>

#include "converter/oai_types.hpp"

namespace converter::oai {

struct ListOutcome {
    HarvestState state;       // resumption_token cleared on clean completion
    std::int64_t records_yielded = 0;
};

/// OAI-PMH 2.0 harvesting client for one endpoint. Requests are strictly
/// sequential; retries use exponential backoff from backoff_initial_ms and
/// honor Retry-After on 503.
class OaiClient {
public:
    explicit OaiClient(EndpointConfig config);

    /// Identify round-trip; rejects protocol versions other than 2.0.
    RepositoryInfo identify();

    /// Follows the ListRecords token chain from the state's cursor, feeding
    /// each record to sink exactly once per call. When state carries a
    /// resumption token the chain resumes there; otherwise `from` is derived
    /// from last_success_datestamp and the repository granularity.
    /// on_page (optional) observes the updated state after every page, for
    /// mid-run persistence. noRecordsMatch completes cleanly with zero
    /// records. badResumptionToken clears the token and surfaces as
    /// ProtocolError with that code; callers restart from the datestamp
    /// cursor.
    ListOutcome list_records(const HarvestState& state, const RepositoryInfo& info,
                             const std::function<void(const RawOaiRecord&)>& sink,
                             const std::function<void(const HarvestState&)>& on_page = {});

private:
    std::string fetch(const std::string& query);  // GET with retry/backoff

    EndpointConfig config_;
};

/// State persistence: one JSON file per endpoint under state_dir, written
/// atomically. A missing file loads as a fresh state; a corrupt one throws
/// IoError.
void save_state(const std::string& state_dir, const HarvestState& state);
HarvestState load_state(const std::string& state_dir, const std::string& endpoint_id);

}  // namespace converter::oai
