#include "converter/mock_repo.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "converter/errors.hpp"
#include "converter/util.hpp"
#include "converter/xml.hpp"

namespace converter::mockrepo {

using nlohmann::json;
using nlohmann::ordered_json;

void FixtureCorpus::check() const {
    std::set<std::string> ids;
    std::int64_t prev = 0;
    bool first = true;
    for (const auto& r : records) {
        if (!ids.insert(r.identifier).second)
            throw InvariantError("corpus has duplicate identifier " + r.identifier);
        auto ts = util::parse_datestamp(r.datestamp);
        if (!ts) throw InvariantError("corpus datestamp malformed: " + r.datestamp);
        if (!first && *ts < prev)
            throw InvariantError("corpus datestamps are not non-decreasing at " + r.identifier);
        prev = *ts;
        first = false;
    }
    if (page_size < 1) throw InvariantError("corpus page_size must be >= 1");
}

namespace {

Variant variant_from_string(const std::string& s) {
    if (s == "standard") return Variant::standard;
    if (s == "abstract-variant") return Variant::abstract_variant;
    if (s == "dcterms-variant") return Variant::dcterms_variant;
    throw ParseError("unknown corpus variant: " + s);
}

std::string variant_to_string(Variant v) {
    switch (v) {
        case Variant::standard: return "standard";
        case Variant::abstract_variant: return "abstract-variant";
        case Variant::dcterms_variant: return "dcterms-variant";
    }
    return "standard";
}

}  // namespace

FixtureCorpus corpus_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
        FixtureCorpus c;
        c.repository_name = doc.at("repository_name").get<std::string>();
        c.protocol_version = doc.value("protocol_version", "2.0");
        c.granularity = doc.value("granularity", "YYYY-MM-DDThh:mm:ssZ");
        c.page_size = doc.value("page_size", 10);
        c.variant = variant_from_string(doc.value("variant", "standard"));
        if (doc.contains("failures")) {
            const auto& f = doc["failures"];
            c.failures.http_503_once = f.value("http_503_once", false);
            c.failures.retry_after_seconds = f.value("retry_after_seconds", 0);
            c.failures.bad_token_once = f.value("bad_token_once", false);
            c.failures.token_expiry_uses = f.value("token_expiry_uses", 0);
        }
        for (const auto& jr : doc.at("records")) {
            FixtureRecord r;
            r.identifier = jr.at("identifier").get<std::string>();
            r.datestamp = jr.at("datestamp").get<std::string>();
            r.deleted = jr.value("deleted", false);
            if (jr.contains("fields")) {
                for (const auto& jf : jr["fields"]) {
                    FixtureField f;
                    f.term = jf.at("term").get<std::string>();
                    f.value = jf.at("value").get<std::string>();
                    f.lang = jf.value("lang", "");
                    r.fields.push_back(std::move(f));
                }
            }
            c.records.push_back(std::move(r));
        }
        c.check();
        return c;
    } catch (const json::exception& e) {
        throw ParseError(std::string("fixture corpus: ") + e.what());
    }
}

std::string corpus_to_json(const FixtureCorpus& corpus) {
    ordered_json doc;
    doc["repository_name"] = corpus.repository_name;
    doc["protocol_version"] = corpus.protocol_version;
    doc["granularity"] = corpus.granularity;
    doc["page_size"] = corpus.page_size;
    doc["variant"] = variant_to_string(corpus.variant);
    if (corpus.failures.http_503_once || corpus.failures.bad_token_once ||
        corpus.failures.token_expiry_uses > 0) {
        ordered_json f;
        f["http_503_once"] = corpus.failures.http_503_once;
        f["retry_after_seconds"] = corpus.failures.retry_after_seconds;
        f["bad_token_once"] = corpus.failures.bad_token_once;
        f["token_expiry_uses"] = corpus.failures.token_expiry_uses;
        doc["failures"] = std::move(f);
    }
    doc["records"] = ordered_json::array();
    for (const auto& r : corpus.records) {
        ordered_json jr;
        jr["identifier"] = r.identifier;
        jr["datestamp"] = r.datestamp;
        if (r.deleted) jr["deleted"] = true;
        jr["fields"] = ordered_json::array();
        for (const auto& f : r.fields) {
            ordered_json jf;
            jf["term"] = f.term;
            jf["value"] = f.value;
            if (!f.lang.empty()) jf["lang"] = f.lang;
            jr["fields"].push_back(std::move(jf));
        }
        doc["records"].push_back(std::move(jr));
    }
    return doc.dump(2) + "\n";
}

std::string render_payload(const FixtureRecord& record, Variant variant) {
    std::ostringstream out;
    out << "<oai_dc:dc xmlns:oai_dc=\"http://www.openarchives.org/OAI/2.0/oai_dc/\""
           " xmlns:dc=\"http://purl.org/dc/elements/1.1/\""
           " xmlns:dcterms=\"http://purl.org/dc/terms/\""
           " xmlns:xml=\"http://www.w3.org/XML/1998/namespace\">";
    for (const auto& f : record.fields) {
        std::string prefix = "dc";
        std::string term = f.term;
        if (variant != Variant::standard && term == "description") {
            prefix = "dcterms";
            term = "abstract";
        }
        if (variant == Variant::dcterms_variant && f.term == "date") {
            prefix = "dcterms";
            term = "issued";
        }
        out << "<" << prefix << ":" << term;
        if (!f.lang.empty()) out << " xml:lang=\"" << xml::escape_attr(f.lang) << "\"";
        out << ">" << xml::escape_text(f.value) << "</" << prefix << ":" << term << ">";
    }
    out << "</oai_dc:dc>";
    return out.str();
}

namespace {

std::string oai_header(const std::string& verb, const std::string& base_url) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<OAI-PMH xmlns=\"http://www.openarchives.org/OAI/2.0/\" "
           "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
           "xsi:schemaLocation=\"http://www.openarchives.org/OAI/2.0/ "
           "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd\">";
    out += "<responseDate>2024-01-01T00:00:00Z</responseDate>";
    out += "<request";
    if (!verb.empty()) out += " verb=\"" + verb + "\"";
    out += ">" + xml::escape_text(base_url) + "</request>";
    return out;
}

std::string oai_error(const std::string& verb, const std::string& base_url,
                      const std::string& code, const std::string& message) {
    std::string out = oai_header(verb, base_url);
    out += "<error code=\"" + code + "\">" + xml::escape_text(message) + "</error>";
    out += "</OAI-PMH>";
    return out;
}

// Opaque but self-contained paging cursor: offset, corpus fingerprint, a
// nonce so expiry can be tracked per issued token, and the harvesting
// window the chain was opened with.
std::string make_token(size_t offset, size_t corpus_hash, int nonce, const std::string& from,
                       const std::string& until) {
    return std::to_string(offset) + "|" + std::to_string(corpus_hash % 100000) + "|" +
           std::to_string(nonce) + "|" + from + "|" + until;
}

bool parse_token(const std::string& token, size_t& offset, size_t& hash, std::string& from,
                 std::string& until) {
    auto parts = util::split(token, '|');
    if (parts.size() < 3) return false;
    try {
        offset = std::stoul(parts[0]);
        hash = std::stoul(parts[1]);
    } catch (...) {
        return false;
    }
    from = parts.size() > 3 ? parts[3] : "";
    until = parts.size() > 4 ? parts[4] : "";
    return true;
}

}  // namespace

struct MockRepository::Impl {
    mutable std::mutex mutex;
    FixtureCorpus corpus;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    std::vector<RequestLogEntry> log;
    bool http_503_pending = false;
    bool bad_token_pending = false;
    std::map<std::string, int> token_uses;
    int token_nonce = 0;

    std::atomic<int> inflight{0};
    std::atomic<int> max_inflight{0};

    std::string base() const { return "http://127.0.0.1:" + std::to_string(port) + "/oai"; }

    size_t corpus_hash() const {
        size_t h = corpus.records.size();
        for (const auto& r : corpus.records) h ^= std::hash<std::string>{}(r.identifier);
        return h;
    }

    void handle(const httplib::Request& req, httplib::Response& res) {
        int current = ++inflight;
        int seen = max_inflight.load();
        while (current > seen && !max_inflight.compare_exchange_weak(seen, current)) {
        }

        std::lock_guard<std::mutex> lock(mutex);
        std::string verb = req.get_param_value("verb");
        log.push_back({verb, req.target, req.has_param("resumptionToken")});

        res.set_header("Content-Type", "text/xml");
        if (verb == "Identify") {
            res.set_content(identify(), "text/xml");
        } else if (verb == "ListMetadataFormats") {
            res.set_content(list_formats(), "text/xml");
        } else if (verb == "ListRecords") {
            list_records(req, res);
        } else {
            res.set_content(oai_error(verb, base(), "badVerb", "unsupported verb"), "text/xml");
        }
        --inflight;
    }

    std::string identify() const {
        std::string earliest =
            corpus.records.empty() ? "1970-01-01T00:00:00Z" : corpus.records.front().datestamp;
        std::string out = oai_header("Identify", base());
        out += "<Identify>";
        out += "<repositoryName>" + xml::escape_text(corpus.repository_name) +
               "</repositoryName>";
        out += "<baseURL>" + xml::escape_text(base()) + "</baseURL>";
        out += "<protocolVersion>" + corpus.protocol_version + "</protocolVersion>";
        out += "<adminEmail>admin@example.org</adminEmail>";
        out += "<earliestDatestamp>" + earliest + "</earliestDatestamp>";
        out += "<deletedRecord>persistent</deletedRecord>";
        out += "<granularity>" + corpus.granularity + "</granularity>";
        out += "</Identify></OAI-PMH>";
        return out;
    }

    std::string list_formats() const {
        std::string out = oai_header("ListMetadataFormats", base());
        out += "<ListMetadataFormats><metadataFormat>";
        out += "<metadataPrefix>oai_dc</metadataPrefix>";
        out += "<schema>http://www.openarchives.org/OAI/2.0/oai_dc.xsd</schema>";
        out += "<metadataNamespace>http://www.openarchives.org/OAI/2.0/oai_dc/"
               "</metadataNamespace>";
        out += "</metadataFormat></ListMetadataFormats></OAI-PMH>";
        return out;
    }

    void list_records(const httplib::Request& req, httplib::Response& res) {
        if (http_503_pending) {
            http_503_pending = false;
            res.status = 503;
            res.set_header("Retry-After",
                           std::to_string(corpus.failures.retry_after_seconds));
            res.set_content("temporarily unavailable", "text/plain");
            return;
        }

        size_t offset = 0;
        std::string from = req.get_param_value("from");
        std::string until = req.get_param_value("until");

        if (req.has_param("resumptionToken")) {
            std::string token = req.get_param_value("resumptionToken");
            if (bad_token_pending) {
                bad_token_pending = false;
                res.set_content(
                    oai_error("ListRecords", base(), "badResumptionToken", "token expired"),
                    "text/xml");
                return;
            }
            size_t hash = 0;
            if (!parse_token(token, offset, hash, from, until) ||
                hash != corpus_hash() % 100000) {
                res.set_content(
                    oai_error("ListRecords", base(), "badResumptionToken", "unknown token"),
                    "text/xml");
                return;
            }
            if (corpus.failures.token_expiry_uses > 0 &&
                ++token_uses[token] > corpus.failures.token_expiry_uses) {
                res.set_content(
                    oai_error("ListRecords", base(), "badResumptionToken", "token expired"),
                    "text/xml");
                return;
            }
        } else {
            std::string prefix = req.get_param_value("metadataPrefix");
            if (prefix.empty()) {
                res.set_content(oai_error("ListRecords", base(), "badArgument",
                                          "metadataPrefix is required"),
                                "text/xml");
                return;
            }
            if (prefix != "oai_dc") {
                res.set_content(oai_error("ListRecords", base(), "cannotDisseminateFormat",
                                          "only oai_dc is supported"),
                                "text/xml");
                return;
            }
        }

        // Inclusive bounds; day-granularity arguments compare on the date part.
        auto in_window = [&](const FixtureRecord& r) {
            if (!from.empty()) {
                std::string key = from.size() == 10 ? r.datestamp.substr(0, 10) : r.datestamp;
                if (key < from) return false;
            }
            if (!until.empty()) {
                std::string key = until.size() == 10 ? r.datestamp.substr(0, 10) : r.datestamp;
                if (key > until) return false;
            }
            return true;
        };

        std::vector<const FixtureRecord*> matching;
        for (const auto& r : corpus.records)
            if (in_window(r)) matching.push_back(&r);

        if (matching.empty()) {
            res.set_content(oai_error("ListRecords", base(), "noRecordsMatch",
                                      "no records match the request"),
                            "text/xml");
            return;
        }
        if (offset >= matching.size()) {
            res.set_content(oai_error("ListRecords", base(), "badResumptionToken",
                                      "cursor out of range"),
                            "text/xml");
            return;
        }

        size_t end = std::min(offset + static_cast<size_t>(corpus.page_size), matching.size());
        std::string out = oai_header("ListRecords", base());
        out += "<ListRecords>";
        for (size_t i = offset; i < end; ++i) {
            const auto& r = *matching[i];
            out += "<record><header";
            if (r.deleted) out += " status=\"deleted\"";
            out += ">";
            out += "<identifier>" + xml::escape_text(r.identifier) + "</identifier>";
            out += "<datestamp>" + r.datestamp + "</datestamp>";
            out += "</header>";
            if (!r.deleted)
                out += "<metadata>" + render_payload(r, corpus.variant) + "</metadata>";
            out += "</record>";
        }
        if (end < matching.size()) {
            std::string token = make_token(end, corpus_hash(), token_nonce++, from, until);
            out += "<resumptionToken completeListSize=\"" + std::to_string(matching.size()) +
                   "\" cursor=\"" + std::to_string(offset) + "\">" + token +
                   "</resumptionToken>";
        } else if (offset > 0) {
            // Last page of a token chain carries an empty terminating token.
            out += "<resumptionToken completeListSize=\"" + std::to_string(matching.size()) +
                   "\" cursor=\"" + std::to_string(offset) + "\"/>";
        }
        out += "</ListRecords></OAI-PMH>";
        res.set_content(out, "text/xml");
    }
};

MockRepository::MockRepository(FixtureCorpus corpus) : impl_(std::make_unique<Impl>()) {
    corpus.check();
    impl_->corpus = std::move(corpus);
    impl_->http_503_pending = impl_->corpus.failures.http_503_once;
    impl_->bad_token_pending = impl_->corpus.failures.bad_token_once;
    impl_->server.Get("/oai", [this](const httplib::Request& req, httplib::Response& res) {
        impl_->handle(req, res);
    });
}

MockRepository::~MockRepository() { stop(); }

int MockRepository::start(int port) {
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    } else {
        if (!impl_->server.bind_to_port("127.0.0.1", port))
            throw NetworkError("mock repository cannot bind port " + std::to_string(port));
        impl_->port = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->port;
}

void MockRepository::stop() {
    if (impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

std::string MockRepository::base_url() const { return impl_->base(); }

void MockRepository::replace_corpus(FixtureCorpus corpus) {
    corpus.check();
    std::lock_guard<std::mutex> lock(impl_->mutex);
    impl_->corpus = std::move(corpus);
    impl_->http_503_pending = impl_->corpus.failures.http_503_once;
    impl_->bad_token_pending = impl_->corpus.failures.bad_token_once;
}

std::vector<RequestLogEntry> MockRepository::request_log() const {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    return impl_->log;
}

int MockRepository::request_count() const {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    return static_cast<int>(impl_->log.size());
}

int MockRepository::max_inflight() const { return impl_->max_inflight.load(); }

}  // namespace converter::mockrepo
