#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "converter/oai_types.hpp"
#include "converter/schema_model.hpp"

namespace converter::records {

struct FieldValue {
    std::string term_name;
    std::string value;  // whitespace-normalized, never empty
    std::string lang;   // xml:lang, empty when untagged

    bool operator==(const FieldValue&) const = default;
};

struct SourceRecord {
    std::string identifier;
    std::int64_t datestamp = 0;
    std::string schema_id;
    std::vector<FieldValue> fields;  // document order, repeats preserved
    std::string origin_endpoint;
    std::vector<std::string> diagnostics;  // unknown elements, truncations
};

// Values longer than this are truncated, with a diagnostic.
inline constexpr size_t kMaxFieldValueBytes = 64 * 1024;

/// Picks the registry schema matching the payload: dcterms when any
/// dcterms-namespace element is present, oai_dc for plain Dublin Core.
/// Throws UnknownSchema when no registered namespace matches, XmlError on
/// malformed payloads.
std::string detect_schema(const oai::RawOaiRecord& raw, const schema::SchemaRegistry& registry);

/// Parses the oai_dc envelope into a SourceRecord against the given schema.
/// Unknown elements become diagnostics, not errors. Throws XmlError and
/// SchemaMismatch.
SourceRecord parse_record(const oai::RawOaiRecord& raw, const schema::SchemaDescriptor& schema);

}  // namespace converter::records
