#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "converter/mock_repo.hpp"
#include "converter/pipeline.hpp"
#include "converter/util.hpp"

namespace testing {

inline const std::string kSourceDir = CONVERTER_SOURCE_DIR;

/// Self-deleting scratch directory under the build tree.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::absolute("scratch_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline converter::mockrepo::FixtureCorpus load_corpus(const std::string& name) {
    return converter::mockrepo::corpus_from_json(
        converter::util::read_file(kSourceDir + "/fixtures/corpora/" + name + ".json"));
}

inline converter::oai::EndpointConfig endpoint_for(const std::string& id,
                                                   const std::string& base_url) {
    converter::oai::EndpointConfig ep;
    ep.id = id;
    ep.base_url = base_url;
    ep.backoff_initial_ms = 5;  // fast retries in tests
    return ep;
}

/// Pipeline config with one endpoint per (id, url), state/output dirs under
/// `dir`, and the FU override wired for mock-fu.
inline converter::pipeline::PipelineConfig
pipeline_config(const TempDir& dir,
                const std::vector<std::pair<std::string, std::string>>& endpoints) {
    converter::pipeline::PipelineConfig cfg;
    cfg.base_uri = "https://bop.example";
    cfg.state_dir = (dir.path() / "state").string();
    cfg.output_dir = (dir.path() / "store").string();
    for (const auto& [id, url] : endpoints) {
        converter::pipeline::EndpointPipelineConfig ep;
        ep.endpoint = endpoint_for(id, url);
        ep.catalog.title = id + " repository";
        ep.catalog.description = "Research data published by " + id;
        ep.catalog.publisher_name = id;
        if (id == "mock-fu")
            ep.overrides_path = kSourceDir + "/fixtures/overrides/mock-fu.json";
        cfg.endpoints.push_back(std::move(ep));
    }
    cfg.check();
    return cfg;
}

}  // namespace testing
