#include "converter/dcat.hpp"

#include <algorithm>
#include <set>

#include "converter/errors.hpp"
#include "converter/util.hpp"

namespace converter::dcat {

std::string mint_uri(const std::string& base, const std::string& oai_identifier) {
    if (!util::is_absolute_uri(base)) throw InvalidBase("base URI is not absolute: " + base);
    std::string trimmed = base;
    while (!trimmed.empty() && trimmed.back() == '/') trimmed.pop_back();
    return trimmed + "/datasets/" + util::percent_encode(oai_identifier);
}

namespace {

// Parses "YYYY", "YYYY-MM-DD" or a full UTC datestamp down to an xsd:date
// lexical form. Years expand to YYYY-01-01 (the caller notes a diagnostic).
std::optional<std::string> parse_to_date(const std::string& value, bool& expanded_year) {
    expanded_year = false;
    if (value.size() == 4) {
        for (char c : value)
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        expanded_year = true;
        return value + "-01-01";
    }
    if (auto epoch = util::parse_datestamp(value)) return util::format_date_utc(*epoch);
    return std::nullopt;
}

Agent make_agent(const std::string& value) {
    if (util::is_absolute_uri(value)) return Agent{"", value};
    return Agent{value, ""};
}

struct DateCandidate {
    std::string date;  // xsd:date lexical form
    std::string raw;
    std::string source_term;
    bool expanded = false;
};

}  // namespace

ConvertOutcome convert(const records::SourceRecord& record, const matcher::MappingTable& mapping,
                       const TransformRules& rules, const std::string& base_uri) {
    ConvertOutcome out;
    out.report.identifier = record.identifier;
    out.report.diagnostics = record.diagnostics;  // surface parse-level notes

    DcatDataset ds;
    ds.uri = mint_uri(base_uri, record.identifier);
    ds.source_identifier = record.identifier;

    auto drop = [&](const records::FieldValue& fv, const std::string& reason) {
        out.report.dropped_fields.push_back({fv.term_name, fv.value, reason});
    };

    std::vector<DateCandidate> issued_candidates;
    std::vector<DateCandidate> modified_candidates;

    for (const auto& fv : record.fields) {
        const auto* entry = mapping.find(fv.term_name);
        if (!entry) {
            drop(fv, "unmapped");
            continue;
        }
        const std::string& target = entry->target_term;
        if (target == "title") {
            ds.titles.push_back({fv.value, fv.lang});
        } else if (target == "description") {
            ds.descriptions.push_back({fv.value, fv.lang});
        } else if (target == "keyword") {
            ds.keywords.push_back(fv.value);
        } else if (target == "theme") {
            if (util::is_absolute_uri(fv.value))
                ds.themes.push_back(fv.value);
            else
                drop(fv, "theme value is not a URI");
        } else if (target == "creator") {
            ds.creators.push_back(make_agent(fv.value));
        } else if (target == "contributor") {
            ds.contributors.push_back(make_agent(fv.value));
        } else if (target == "publisher") {
            ds.publishers.push_back(make_agent(fv.value));
        } else if (target == "issued" || target == "modified") {
            bool expanded = false;
            auto date = parse_to_date(fv.value, expanded);
            if (!date) {
                drop(fv, "value is not an ISO-8601 date or year");
                continue;
            }
            auto& candidates = target == "issued" ? issued_candidates : modified_candidates;
            candidates.push_back({*date, fv.value, fv.term_name, expanded});
        } else if (target == "identifier") {
            ds.identifiers.push_back(fv.value);
            bool is_url = util::starts_with(fv.value, "http://") ||
                          util::starts_with(fv.value, "https://");
            if (is_url && ds.landing_page.empty()) {
                ds.landing_page = fv.value;
                if (rules.distribution_from_url)
                    ds.distributions.push_back(DcatDistribution{fv.value, "", "", ""});
            }
        } else if (target == "language") {
            if (util::lang_tag_valid(fv.value))
                ds.languages.push_back(fv.value);
            else
                drop(fv, "value is not a language code");
        } else if (target == "accessRights") {
            if (ds.access_rights.empty())
                ds.access_rights = fv.value;
            else
                drop(fv, "accessRights already set");
        } else if (target == "landingPage") {
            if (!util::is_absolute_uri(fv.value))
                drop(fv, "landing page is not a URI");
            else if (ds.landing_page.empty())
                ds.landing_page = fv.value;
            else
                drop(fv, "landing page already set");
        } else {
            drop(fv, "no transform rule for target '" + target + "'");
        }
    }

    // Earliest parseable date wins for issued, latest for modified; the
    // others are accounted for as dropped.
    auto settle = [&](std::vector<DateCandidate>& candidates, bool earliest,
                      const std::string& term, std::optional<std::string>& slot) {
        if (candidates.empty()) return;
        size_t best = 0;
        for (size_t i = 1; i < candidates.size(); ++i) {
            bool better = earliest ? candidates[i].date < candidates[best].date
                                   : candidates[i].date > candidates[best].date;
            if (better) best = i;
        }
        slot = candidates[best].date;
        if (candidates[best].expanded)
            out.report.diagnostics.push_back(term + " year '" + candidates[best].raw +
                                             "' expanded to " + candidates[best].date);
        for (size_t i = 0; i < candidates.size(); ++i) {
            if (i == best) continue;
            records::FieldValue fv{candidates[i].source_term, candidates[i].raw, ""};
            drop(fv, std::string("superseded by ") + (earliest ? "earlier " : "later ") + term +
                         " date");
        }
    };
    settle(issued_candidates, /*earliest=*/true, "issued", ds.issued);
    settle(modified_candidates, /*earliest=*/false, "modified", ds.modified);

    ValidationResult vr = validate(ds);
    if (!vr.ok()) {
        out.report.converted = false;
        for (const auto& v : vr.violations)
            out.report.diagnostics.push_back("mandatory property " + v);
        return out;
    }
    out.report.converted = true;
    out.dataset = std::move(ds);
    return out;
}

ValidationResult validate(const DcatDataset& ds) {
    ValidationResult r;
    auto check_uri = [&](const std::string& uri, const std::string& what) {
        if (!uri.empty() && !util::is_absolute_uri(uri))
            r.violations.push_back(what + " is not an absolute URI");
    };
    if (!util::is_absolute_uri(ds.uri)) r.violations.push_back("uri absent or not absolute");
    if (ds.titles.empty()) r.violations.push_back("title absent");
    if (ds.descriptions.empty()) r.violations.push_back("description absent");
    for (const auto& d : ds.distributions) {
        if (d.access_url.empty())
            r.violations.push_back("distribution.access_url absent");
        else
            check_uri(d.access_url, "distribution.access_url");
        check_uri(d.license, "distribution.license");
    }
    for (const auto& t : ds.themes) check_uri(t, "theme");
    check_uri(ds.landing_page, "landingPage");
    for (const auto& a : ds.creators) check_uri(a.uri, "creator.uri");
    for (const auto& a : ds.contributors) check_uri(a.uri, "contributor.uri");
    for (const auto& a : ds.publishers) check_uri(a.uri, "publisher.uri");
    auto check_lang = [&](const std::string& tag, const std::string& what) {
        if (!tag.empty() && !util::lang_tag_valid(tag))
            r.violations.push_back(what + " has malformed language tag '" + tag + "'");
    };
    for (const auto& t : ds.titles) check_lang(t.lang, "title");
    for (const auto& t : ds.descriptions) check_lang(t.lang, "description");
    for (const auto& l : ds.languages) check_lang(l, "language");
    return r;
}

void CatalogMeta::check() const {
    if (title.empty()) throw ConfigError("catalog metadata: title missing");
    if (description.empty()) throw ConfigError("catalog metadata: description missing");
    if (publisher_name.empty()) throw ConfigError("catalog metadata: publisher missing");
}

CatalogBuild build_catalog(const std::string& endpoint_id, const CatalogMeta& meta,
                           const std::vector<std::string>& dataset_uris,
                           const std::string& base_uri) {
    meta.check();
    if (!util::is_absolute_uri(base_uri)) throw InvalidBase("base URI is not absolute: " + base_uri);

    CatalogBuild out;
    std::string trimmed = base_uri;
    while (!trimmed.empty() && trimmed.back() == '/') trimmed.pop_back();
    out.catalog.uri = trimmed + "/catalogues/" + util::percent_encode(endpoint_id);
    out.catalog.title = meta.title;
    out.catalog.description = meta.description;
    out.catalog.publisher = Agent{meta.publisher_name, ""};
    out.catalog.homepage = meta.homepage;

    std::set<std::string> seen;
    for (const auto& uri : dataset_uris) {
        if (!seen.insert(uri).second)
            out.diagnostics.push_back("duplicate dataset URI: " + uri);
    }
    out.catalog.dataset_uris.assign(seen.begin(), seen.end());
    return out;
}

namespace {

matcher::MappingTable make_table(const std::string& source_id,
                                 std::vector<std::pair<std::string, std::string>> pins,
                                 std::vector<std::string> unmapped) {
    matcher::MappingTable t;
    t.source_schema_id = source_id;
    t.target_schema_id = "dcat-ap";
    for (auto& [src, tgt] : pins) {
        matcher::AlignmentEntry e;
        e.source_term = std::move(src);
        e.target_term = std::move(tgt);
        e.score = 1.0;
        e.method = "manual";
        t.entries.push_back(std::move(e));
    }
    t.unmapped = std::move(unmapped);
    return t;
}

}  // namespace

matcher::MappingTable builtin_oai_dc_mapping() {
    return make_table("oai_dc",
                      {{"title", "title"},
                       {"description", "description"},
                       {"subject", "keyword"},
                       {"creator", "creator"},
                       {"contributor", "contributor"},
                       {"publisher", "publisher"},
                       {"date", "issued"},
                       {"language", "language"},
                       {"rights", "accessRights"},
                       {"identifier", "identifier"}},
                      {"type", "format", "source", "relation", "coverage"});
}

matcher::MappingTable builtin_dcterms_mapping() {
    auto pins = std::vector<std::pair<std::string, std::string>>{
        {"title", "title"},       {"description", "description"},
        {"subject", "keyword"},   {"creator", "creator"},
        {"contributor", "contributor"}, {"publisher", "publisher"},
        {"date", "issued"},       {"issued", "issued"},
        {"modified", "modified"}, {"language", "language"},
        {"rights", "accessRights"}, {"identifier", "identifier"}};
    std::set<std::string> pinned;
    for (const auto& [s, _] : pins) pinned.insert(s);

    std::vector<std::string> unmapped;
    for (const auto& d : schema::builtin_schemas()) {
        if (d.id != "dcterms") continue;
        for (const auto& term : d.terms)
            if (!pinned.count(term.name)) unmapped.push_back(term.name);
    }
    return make_table("dcterms", std::move(pins), std::move(unmapped));
}

std::optional<matcher::MappingTable> builtin_mapping_for(const std::string& schema_id) {
    if (schema_id == "oai_dc") return builtin_oai_dc_mapping();
    if (schema_id == "dcterms") return builtin_dcterms_mapping();
    return std::nullopt;
}

}  // namespace converter::dcat
