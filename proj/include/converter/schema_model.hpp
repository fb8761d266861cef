#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace converter::schema {

/// One vocabulary term: local name, URI, and the descriptive texts the
/// matcher scores (label, optional comment, optional definition).
struct TermDescriptor {
    std::string name;
    std::string uri;
    std::string label;
    std::string comment;     // empty when absent
    std::string definition;  // empty when absent

    bool operator==(const TermDescriptor&) const = default;
};

struct SchemaDescriptor {
    std::string id;
    std::string namespace_uri;
    std::vector<TermDescriptor> terms;

    const TermDescriptor* find_term(const std::string& name) const;
    bool has_term(const std::string& name) const { return find_term(name) != nullptr; }

    bool operator==(const SchemaDescriptor&) const = default;
};

/// Registry of loaded descriptors keyed by id. Ids are unique; inserting a
/// duplicate id throws InvariantError.
class SchemaRegistry {
public:
    void add(SchemaDescriptor d);
    const SchemaDescriptor* find(const std::string& id) const;
    const SchemaDescriptor& at(const std::string& id) const;  // throws UnknownSchema
    std::vector<const SchemaDescriptor*> all() const;

private:
    std::map<std::string, SchemaDescriptor> by_id_;
};

/// Parses a schema-descriptor JSON document and checks the type invariants
/// (non-empty whitespace-free term names, absolute URIs, unique names).
/// Throws ParseError / InvariantError.
SchemaDescriptor load_schema(const std::string& document);

/// Inverse of load_schema for valid descriptors.
std::string serialize_schema(const SchemaDescriptor& d);

/// The bundled descriptors: oai_dc (15 Dublin Core elements, also covering
/// dc_elements payloads), dcterms (full property set), and the dcat-ap
/// target set. Texts are carried as data and equal the files shipped under
/// schemas/.
const std::vector<SchemaDescriptor>& builtin_schemas();

/// Registry preloaded with builtin_schemas().
SchemaRegistry builtin_registry();

}  // namespace converter::schema
