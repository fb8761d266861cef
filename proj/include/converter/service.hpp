#pragma once

#include <memory>
#include <string>

#include "converter/pipeline.hpp"

namespace converter::service {

/// Read-only HTTP facade over the dataset store, polled by a downstream
/// harvester:
///
///   GET /catalogues                         catalog URI list (JSON)
///   GET /catalogues/{id}                    catalog graph
///   GET /catalogues/{id}/datasets?page=n    page of dataset graphs
///   GET /datasets?uri=...                   single dataset graph
///   GET /health                             status + last-run summaries (JSON)
///
/// Graph endpoints negotiate text/turtle (default) and application/rdf+xml;
/// anything else is 406. Every request resolves the current snapshot, so
/// readers always see the latest completed publish and never block on a
/// running harvest.
class PipelineServer {
public:
    explicit PipelineServer(pipeline::PipelineConfig config);
    ~PipelineServer();

    PipelineServer(const PipelineServer&) = delete;
    PipelineServer& operator=(const PipelineServer&) = delete;

    /// Binds and serves on a background thread; port 0 picks an ephemeral
    /// port. Returns the bound port.
    int start(int port);
    /// Serves on the configured bind/port, blocking (CLI `serve` mode).
    void run_blocking();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace converter::service
