#include "converter/matcher.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "converter/errors.hpp"
#include "converter/util.hpp"

namespace converter::matcher {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string> normalize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    char prev = '\0';
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        bool alnum = std::isalnum(c) || c >= 0x80;  // keep multibyte sequences in tokens
        if (alnum) {
            if (!cur.empty() && std::islower(static_cast<unsigned char>(prev)) &&
                std::isupper(c)) {
                tokens.push_back(cur);
                cur.clear();
            }
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
        prev = ch;
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

TermVector vectorize(const std::string& text) {
    TermVector v;
    auto tokens = normalize(text);
    if (tokens.empty()) return v;
    for (const auto& t : tokens) v.weights[t] += 1.0;
    std::string padded = " " + util::join(tokens, " ") + " ";
    for (size_t i = 0; i + 3 <= padded.size(); ++i) v.weights[padded.substr(i, 3)] += 0.5;
    return v;
}

double cosine(const TermVector& a, const TermVector& b) {
    if (a.empty() || b.empty()) return 0.0;
    const auto& small = a.weights.size() <= b.weights.size() ? a : b;
    const auto& large = &small == &a ? b : a;
    double dot = 0.0;
    for (const auto& [f, w] : small.weights) {
        auto it = large.weights.find(f);
        if (it != large.weights.end()) dot += w * it->second;
    }
    auto norm = [](const TermVector& v) {
        double s = 0.0;
        for (const auto& [_, w] : v.weights) s += w * w;
        return std::sqrt(s);
    };
    return dot / (norm(a) * norm(b));
}

double LexicalProvider::score(const std::string& a, const std::string& b) {
    return cosine(vectorize(a), vectorize(b));
}

RemoteProvider::RemoteProvider(std::string endpoint_url) : url_(std::move(endpoint_url)) {}

std::vector<double> RemoteProvider::score_batch(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
    auto parts = util::parse_http_url(url_);
    if (!parts) throw ConfigError("similarity provider url is not http(s): " + url_);
    json body;
    body["pairs"] = json::array();
    for (const auto& [a, b] : pairs) body["pairs"].push_back({a, b});

    httplib::Client client(parts->host, parts->port);
    client.set_read_timeout(30, 0);
    auto res = client.Post(parts->path, body.dump(), "application/json");
    if (!res) throw NetworkError("similarity provider unreachable: " + url_);
    if (res->status != 200)
        throw NetworkError("similarity provider returned HTTP " + std::to_string(res->status));
    json doc;
    try {
        doc = json::parse(res->body);
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("similarity provider response: ") + e.what());
    }
    if (!doc.contains("scores") || !doc["scores"].is_array() ||
        doc["scores"].size() != pairs.size())
        throw ProtocolError("similarity provider response lacks a matching scores array");
    std::vector<double> out;
    for (const auto& s : doc["scores"]) {
        double v = s.get<double>();
        if (v < 0.0 || v > 1.0 || !std::isfinite(v))
            throw ProtocolError("similarity provider score out of [0,1]");
        out.push_back(v);
    }
    return out;
}

double RemoteProvider::score(const std::string& a, const std::string& b) {
    return score_batch({{a, b}}).at(0);
}

void MatcherConfig::check() const {
    if (w_label < 0 || w_comment < 0 || w_definition < 0)
        throw ConfigError("matcher weights must be non-negative");
    if (w_label + w_comment + w_definition <= 0)
        throw ConfigError("matcher weights must not all be zero");
    if (threshold < 0.0 || threshold > 1.0)
        throw ConfigError("matcher threshold must lie in [0,1]");
    if (report_top_k < 1) throw ConfigError("matcher report_top_k must be >= 1");
}

const AlignmentEntry* MappingTable::find(const std::string& source_term) const {
    for (const auto& e : entries)
        if (e.source_term == source_term) return &e;
    return nullptr;
}

namespace {

bool channel_present(const std::string& text) { return !normalize(text).empty(); }

Candidate score_pair(const schema::TermDescriptor& src, const schema::TermDescriptor& tgt,
                     const MatcherConfig& cfg, SimilarityProvider& provider) {
    Candidate c;
    c.target_term = tgt.name;
    c.target_uri = tgt.uri;
    auto src_label = normalize(src.label);
    if (!src_label.empty() && src_label == normalize(tgt.label)) {
        c.exact_label = true;
        c.score = 1.0;
        return c;
    }
    double total_weight = 0.0;
    double acc = 0.0;
    auto channel = [&](const std::string& a, const std::string& b, double w,
                       std::optional<double>& slot) {
        if (w <= 0 || !channel_present(a) || !channel_present(b)) return;
        double s = provider.score(a, b);
        slot = s;
        total_weight += w;
        acc += w * s;
    };
    channel(src.label, tgt.label, cfg.w_label, c.channels.label);
    channel(src.comment, tgt.comment, cfg.w_comment, c.channels.comment);
    channel(src.definition, tgt.definition, cfg.w_definition, c.channels.definition);
    c.score = total_weight > 0 ? acc / total_weight : 0.0;
    return c;
}

// Exact-label candidates outrank equal-scored lexical ones; remaining ties
// fall to the smallest target URI.
bool candidate_less(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.exact_label != b.exact_label) return a.exact_label;
    return a.target_uri < b.target_uri;
}

}  // namespace

MatchResult match_schemas(const schema::SchemaDescriptor& source,
                          const schema::SchemaDescriptor& target, const MatcherConfig& config,
                          SimilarityProvider* provider) {
    config.check();
    LexicalProvider lexical;
    SimilarityProvider& prov = provider ? *provider : lexical;

    MatchResult result;
    result.table.source_schema_id = source.id;
    result.table.target_schema_id = target.id;
    result.report.source_schema_id = source.id;
    result.report.target_schema_id = target.id;

    for (const auto& src : source.terms) {
        std::vector<Candidate> candidates;
        candidates.reserve(target.terms.size());
        for (const auto& tgt : target.terms) candidates.push_back(score_pair(src, tgt, config, prov));
        std::sort(candidates.begin(), candidates.end(), candidate_less);

        if (!candidates.empty() && candidates.front().score >= config.threshold) {
            const Candidate& best = candidates.front();
            AlignmentEntry e;
            e.source_term = src.name;
            e.target_term = best.target_term;
            e.score = best.score;
            if (best.exact_label) {
                e.method = "exact-label";
            } else {
                e.method = prov.method_name();
                e.channel_scores = best.channels;
            }
            result.table.entries.push_back(std::move(e));
        } else {
            result.table.unmapped.push_back(src.name);
        }

        size_t keep = std::min(candidates.size(), static_cast<size_t>(config.report_top_k));
        candidates.resize(keep);
        result.report.ranked.emplace_back(src.name, std::move(candidates));
    }
    return result;
}

MappingTable apply_overrides(const MappingTable& table, const std::vector<Override>& overrides) {
    MappingTable out = table;
    auto covered = [&](const std::string& term) {
        if (out.find(term)) return true;
        return std::find(out.unmapped.begin(), out.unmapped.end(), term) != out.unmapped.end();
    };
    for (const auto& ov : overrides) {
        if (!covered(ov.source_term))
            throw UnknownTerm("override names unknown source term '" + ov.source_term + "'");
        out.entries.erase(std::remove_if(out.entries.begin(), out.entries.end(),
                                         [&](const AlignmentEntry& e) {
                                             return e.source_term == ov.source_term;
                                         }),
                          out.entries.end());
        out.unmapped.erase(std::remove(out.unmapped.begin(), out.unmapped.end(), ov.source_term),
                           out.unmapped.end());
        if (ov.remove) {
            out.unmapped.push_back(ov.source_term);
        } else {
            AlignmentEntry e;
            e.source_term = ov.source_term;
            e.target_term = ov.target_term;
            e.score = 1.0;
            e.method = "manual";
            out.entries.push_back(std::move(e));
        }
    }
    return out;
}

std::string mapping_to_json(const MappingTable& table) {
    ordered_json doc;
    doc["source"] = table.source_schema_id;
    doc["target"] = table.target_schema_id;
    doc["entries"] = ordered_json::array();
    for (const auto& e : table.entries) {
        ordered_json je;
        je["source_term"] = e.source_term;
        je["target_term"] = e.target_term;
        je["score"] = e.score;
        je["method"] = e.method;
        doc["entries"].push_back(std::move(je));
    }
    doc["unmapped"] = table.unmapped;
    return doc.dump(2) + "\n";
}

MappingTable mapping_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
        MappingTable t;
        t.source_schema_id = doc.at("source").get<std::string>();
        t.target_schema_id = doc.at("target").get<std::string>();
        for (const auto& je : doc.at("entries")) {
            AlignmentEntry e;
            e.source_term = je.at("source_term").get<std::string>();
            e.target_term = je.at("target_term").get<std::string>();
            e.score = je.at("score").get<double>();
            e.method = je.at("method").get<std::string>();
            t.entries.push_back(std::move(e));
        }
        for (const auto& u : doc.at("unmapped")) t.unmapped.push_back(u.get<std::string>());
        return t;
    } catch (const json::exception& e) {
        throw ParseError(std::string("mapping table: ") + e.what());
    }
}

std::string report_to_json(const MatchReport& report) {
    ordered_json doc;
    doc["source"] = report.source_schema_id;
    doc["target"] = report.target_schema_id;
    doc["terms"] = ordered_json::array();
    for (const auto& [term, candidates] : report.ranked) {
        ordered_json jt;
        jt["source_term"] = term;
        jt["candidates"] = ordered_json::array();
        for (const auto& c : candidates) {
            ordered_json jc;
            jc["target_term"] = c.target_term;
            jc["score"] = c.score;
            jc["exact_label"] = c.exact_label;
            ordered_json channels = ordered_json::object();
            if (c.channels.label) channels["label"] = *c.channels.label;
            if (c.channels.comment) channels["comment"] = *c.channels.comment;
            if (c.channels.definition) channels["definition"] = *c.channels.definition;
            jc["channels"] = std::move(channels);
            jt["candidates"].push_back(std::move(jc));
        }
        doc["terms"].push_back(std::move(jt));
    }
    return doc.dump(2) + "\n";
}

std::vector<Override> overrides_from_json(const std::string& text) {
    try {
        json doc = json::parse(text);
        std::vector<Override> out;
        for (const auto& jo : doc.at("overrides")) {
            Override ov;
            ov.source_term = jo.at("source_term").get<std::string>();
            ov.remove = jo.value("remove", false);
            if (!ov.remove) ov.target_term = jo.at("target_term").get<std::string>();
            out.push_back(std::move(ov));
        }
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("overrides file: ") + e.what());
    }
}

}  // namespace converter::matcher
