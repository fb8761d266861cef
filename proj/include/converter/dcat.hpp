#pragma once

#include <optional>
#include <string>
#include <vector>

#include "converter/matcher.hpp"
#include "converter/record_parser.hpp"

namespace converter::dcat {

/// Name-only agent unless the source value parses as an absolute URI.
struct Agent {
    std::string name;  // empty for URI-only agents
    std::string uri;   // empty for name-only agents

    bool operator==(const Agent&) const = default;
};

struct LangText {
    std::string text;
    std::string lang;  // empty when untagged

    bool operator==(const LangText&) const = default;
    auto operator<=>(const LangText&) const = default;
};

struct DcatDistribution {
    std::string access_url;  // mandatory
    std::string format;
    std::string media_type;
    std::string license;  // URI

    bool operator==(const DcatDistribution&) const = default;
};

struct DcatDataset {
    std::string uri;
    std::vector<LangText> titles;        // >= 1 after validation
    std::vector<LangText> descriptions;  // >= 1 after validation
    std::vector<std::string> keywords;
    std::vector<std::string> themes;  // URIs
    std::vector<Agent> creators;
    std::vector<Agent> contributors;
    std::vector<Agent> publishers;
    std::optional<std::string> issued;    // xsd:date lexical form
    std::optional<std::string> modified;  // xsd:date lexical form
    std::vector<std::string> identifiers;
    std::string landing_page;  // URI, empty when absent
    std::vector<std::string> languages;
    std::string access_rights;  // text or URI, empty when absent
    std::vector<DcatDistribution> distributions;
    std::string source_identifier;  // originating OAI identifier

    bool operator==(const DcatDataset&) const = default;
};

struct DcatCatalog {
    std::string uri;
    std::string title;
    std::string description;
    Agent publisher;
    std::vector<std::string> dataset_uris;  // sorted, unique
    std::string homepage;                   // optional URI
};

struct DroppedField {
    std::string term;
    std::string value;
    std::string reason;
};

struct ConversionReport {
    std::string identifier;
    bool converted = false;  // converted xor rejected
    std::vector<DroppedField> dropped_fields;
    std::vector<std::string> diagnostics;
};

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Per-target behavior toggles beyond the mapping table itself.
struct TransformRules {
    // When set, the first http(s) identifier also yields a Distribution
    // with that access URL. Off by default; landing_page is always minted.
    bool distribution_from_url = false;
};

/// base + "/datasets/" + percent-encoded OAI identifier. Deterministic and
/// injective over identifiers; throws InvalidBase.
std::string mint_uri(const std::string& base, const std::string& oai_identifier);

struct ConvertOutcome {
    std::optional<DcatDataset> dataset;  // present iff report.converted
    ConversionReport report;
};

/// Routes every mapped field value into the dataset through its target's
/// transform rule; everything else is accounted for in dropped_fields.
/// Never throws: failures reject the record via the report.
ConvertOutcome convert(const records::SourceRecord& record, const matcher::MappingTable& mapping,
                       const TransformRules& rules, const std::string& base_uri);

/// Mandatory-property validation: >= 1 title and description, absolute
/// URIs throughout, access_url on every distribution, well-formed language
/// tags.
ValidationResult validate(const DcatDataset& dataset);

struct CatalogMeta {
    std::string title;
    std::string description;
    std::string publisher_name;
    std::string homepage;  // optional

    void check() const;  // throws ConfigError when mandatory parts missing
};

struct CatalogBuild {
    DcatCatalog catalog;
    std::vector<std::string> diagnostics;  // e.g. duplicate dataset URIs
};

/// Catalog URI is base + "/catalogues/" + endpoint id; members are the
/// given dataset URIs, deduplicated and sorted.
CatalogBuild build_catalog(const std::string& endpoint_id, const CatalogMeta& meta,
                           const std::vector<std::string>& dataset_uris,
                           const std::string& base_uri);

/// The shipped reviewed oai_dc -> dcat-ap table (subject->keyword and the
/// other pinned correspondences; type/format/source/relation/coverage stay
/// unmapped).
matcher::MappingTable builtin_oai_dc_mapping();

/// Conservative dcterms -> dcat-ap table: the element-equivalent pins plus
/// issued/modified; abstract intentionally unmapped (per-endpoint overrides
/// decide it).
matcher::MappingTable builtin_dcterms_mapping();

/// Builtin table for a source schema id, or nullopt.
std::optional<matcher::MappingTable> builtin_mapping_for(const std::string& schema_id);

}  // namespace converter::dcat
