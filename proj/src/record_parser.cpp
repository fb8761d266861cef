#include "converter/record_parser.hpp"

#include "converter/errors.hpp"
#include "converter/util.hpp"
#include "converter/xml.hpp"

namespace converter::records {

namespace {

constexpr const char* kOaiDcNs = "http://www.openarchives.org/OAI/2.0/oai_dc/";
constexpr const char* kDcNs = "http://purl.org/dc/elements/1.1/";
constexpr const char* kDctermsNs = "http://purl.org/dc/terms/";
constexpr const char* kXmlNs = "http://www.w3.org/XML/1998/namespace";

bool recognized_root(const xml::Element& root) {
    return root.ns == kOaiDcNs || root.ns == kDcNs || root.ns == kDctermsNs;
}

bool contains_dcterms(const xml::Element& el) {
    if (el.ns == kDctermsNs) return true;
    for (const auto* child : el.elements())
        if (contains_dcterms(*child)) return true;
    return false;
}

}  // namespace

std::string detect_schema(const oai::RawOaiRecord& raw, const schema::SchemaRegistry& registry) {
    if (raw.payload.empty()) throw XmlError("record " + raw.identifier + " has no payload");
    xml::Element root = xml::parse(raw.payload);
    if (!recognized_root(root))
        throw UnknownSchema("no registered schema matches payload namespace '" + root.ns + "'");
    const char* id = contains_dcterms(root) ? "dcterms" : "oai_dc";
    if (!registry.find(id))
        throw UnknownSchema(std::string("schema '") + id + "' is not registered");
    return id;
}

SourceRecord parse_record(const oai::RawOaiRecord& raw, const schema::SchemaDescriptor& schema) {
    if (raw.deleted) throw XmlError("record " + raw.identifier + " is a deletion tombstone");
    xml::Element root = xml::parse(raw.payload);
    if (!recognized_root(root))
        throw SchemaMismatch("payload root namespace '" + root.ns + "' is not recognized");

    SourceRecord rec;
    rec.identifier = raw.identifier;
    rec.datestamp = raw.datestamp;
    rec.schema_id = schema.id;

    for (const auto* el : root.elements()) {
        if (el->ns != kDcNs && el->ns != kDctermsNs) {
            rec.diagnostics.push_back("unknown element namespace: {" + el->ns + "}" + el->local);
            continue;
        }
        if (!schema.has_term(el->local)) {
            rec.diagnostics.push_back("unknown element: " + el->local);
            continue;
        }
        std::string value = util::normalize_ws(el->text());
        if (value.empty()) continue;  // empty elements are dropped
        if (value.size() > kMaxFieldValueBytes) {
            value.resize(kMaxFieldValueBytes);
            rec.diagnostics.push_back("value truncated to 64 KiB: " + el->local);
        }
        FieldValue fv;
        fv.term_name = el->local;
        fv.value = std::move(value);
        if (auto lang = el->attr(kXmlNs, "lang")) fv.lang = *lang;
        rec.fields.push_back(std::move(fv));
    }
    return rec;
}

}  // namespace converter::records
