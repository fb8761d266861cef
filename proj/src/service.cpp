#include "converter/service.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "converter/dcat_rdf.hpp"
#include "converter/errors.hpp"
#include "converter/rdf.hpp"
#include "converter/util.hpp"

namespace converter::service {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

enum class Format { turtle, rdfxml, unacceptable };

// Minimal content negotiation: first supported media type wins; absent or
// wildcard Accept defaults to Turtle.
Format negotiate(const httplib::Request& req) {
    if (!req.has_header("Accept")) return Format::turtle;
    std::string accept = req.get_header_value("Accept");
    for (auto part : util::split(accept, ',')) {
        std::string media = util::trim(part);
        if (auto semi = media.find(';'); semi != std::string::npos)
            media = util::trim(media.substr(0, semi));
        if (media == "text/turtle" || media == "text/*") return Format::turtle;
        if (media == "application/rdf+xml") return Format::rdfxml;
        if (media == "*/*" || media.empty()) return Format::turtle;
    }
    return Format::unacceptable;
}

void send_graph(const rdf::Graph& graph, Format format, httplib::Response& res) {
    if (format == Format::turtle)
        res.set_content(rdf::serialize_turtle(graph), "text/turtle");
    else
        res.set_content(rdf::serialize_rdfxml(graph), "application/rdf+xml");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    ordered_json doc;
    doc["error"] = message;
    res.set_content(doc.dump() + "\n", "application/json");
}

}  // namespace

struct PipelineServer::Impl {
    pipeline::PipelineConfig config;
    store::DatasetStore store;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit Impl(pipeline::PipelineConfig cfg)
        : config(std::move(cfg)), store(config.output_dir) {}

    std::string catalog_uri(const std::string& endpoint_id) const {
        std::string base = config.base_uri;
        while (!base.empty() && base.back() == '/') base.pop_back();
        return base + "/catalogues/" + util::percent_encode(endpoint_id);
    }

    rdf::Graph load_graph(const store::Snapshot& snap, const std::string& file) {
        return rdf::parse_turtle(store.read_file("", snap, file));
    }

    void routes() {
        server.Get("/catalogues", [this](const httplib::Request&, httplib::Response& res) {
            ordered_json doc = ordered_json::array();
            for (const auto& e : config.endpoints) {
                if (store.current(e.endpoint.id))
                    doc.push_back(catalog_uri(e.endpoint.id));
            }
            res.set_content(doc.dump(2) + "\n", "application/json");
        });

        server.Get("/catalogues/([^/]+)", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
            Format format = negotiate(req);
            if (format == Format::unacceptable) return send_error(res, 406, "unsupported media type");
            std::string id = req.matches[1];
            auto snap = store.current(id);
            if (!config.find_endpoint(id) || !snap) return send_error(res, 404, "unknown catalogue");
            send_graph(load_graph(*snap, "catalog.ttl"), format, res);
        });

        server.Get("/catalogues/([^/]+)/datasets",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       Format format = negotiate(req);
                       if (format == Format::unacceptable)
                           return send_error(res, 406, "unsupported media type");
                       std::string id = req.matches[1];
                       auto snap = store.current(id);
                       if (!config.find_endpoint(id) || !snap)
                           return send_error(res, 404, "unknown catalogue");
                       long page = 0;
                       if (req.has_param("page")) {
                           try {
                               page = std::stol(req.get_param_value("page"));
                           } catch (...) {
                               return send_error(res, 404, "bad page number");
                           }
                           if (page < 0) return send_error(res, 404, "bad page number");
                       }
                       // Stable URI ordering: the index map is URI-sorted.
                       std::vector<const store::DatasetEntry*> entries;
                       for (const auto& [_, e] : snap->datasets) entries.push_back(&e);
                       size_t size = static_cast<size_t>(config.serve.page_size);
                       size_t begin = static_cast<size_t>(page) * size;
                       std::vector<rdf::Graph> graphs;
                       for (size_t i = begin; i < entries.size() && i < begin + size; ++i)
                           graphs.push_back(load_graph(*snap, entries[i]->file));
                       send_graph(rdf::merge_disjoint(graphs), format, res);
                   });

        server.Get("/datasets", [this](const httplib::Request& req, httplib::Response& res) {
            Format format = negotiate(req);
            if (format == Format::unacceptable) return send_error(res, 406, "unsupported media type");
            if (!req.has_param("uri")) return send_error(res, 404, "uri parameter required");
            std::string uri = req.get_param_value("uri");
            for (const auto& e : config.endpoints) {
                auto snap = store.current(e.endpoint.id);
                if (!snap) continue;
                auto it = snap->datasets.find(uri);
                if (it == snap->datasets.end()) continue;
                return send_graph(load_graph(*snap, it->second.file), format, res);
            }
            send_error(res, 404, "unknown dataset");
        });

        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            ordered_json doc;
            doc["status"] = "ok";
            int runs = 0;
            doc["endpoints"] = ordered_json::array();
            for (const auto& e : config.endpoints) {
                ordered_json je;
                je["id"] = e.endpoint.id;
                if (auto last = store.read_last_run(e.endpoint.id)) {
                    je["last_run"] = json::parse(*last);
                    ++runs;
                } else {
                    je["last_run"] = nullptr;
                }
                doc["endpoints"].push_back(std::move(je));
            }
            doc["completed_endpoints"] = runs;
            res.set_content(doc.dump(2) + "\n", "application/json");
        });
    }
};

PipelineServer::PipelineServer(pipeline::PipelineConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {
    impl_->routes();
}

PipelineServer::~PipelineServer() { stop(); }

int PipelineServer::start(int port) {
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port(impl_->config.serve.bind);
    } else {
        if (!impl_->server.bind_to_port(impl_->config.serve.bind, port))
            throw NetworkError("cannot bind " + impl_->config.serve.bind + ":" +
                               std::to_string(port));
        impl_->port = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->port;
}

void PipelineServer::run_blocking() {
    if (!impl_->server.bind_to_port(impl_->config.serve.bind, impl_->config.serve.port))
        throw NetworkError("cannot bind " + impl_->config.serve.bind + ":" +
                           std::to_string(impl_->config.serve.port));
    impl_->port = impl_->config.serve.port;
    impl_->server.listen_after_bind();
}

void PipelineServer::stop() {
    if (impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

}  // namespace converter::service
