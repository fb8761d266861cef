#include "converter/schema_model.hpp"

#include <cctype>
#include <set>

#include <json.hpp>

#include "converter/errors.hpp"
#include "converter/util.hpp"

namespace converter::schema {

using nlohmann::json;
using nlohmann::ordered_json;

const TermDescriptor* SchemaDescriptor::find_term(const std::string& name) const {
    for (const auto& t : terms)
        if (t.name == name) return &t;
    return nullptr;
}

void SchemaRegistry::add(SchemaDescriptor d) {
    if (by_id_.count(d.id))
        throw InvariantError("duplicate schema id in registry: " + d.id);
    by_id_.emplace(d.id, std::move(d));
}

const SchemaDescriptor* SchemaRegistry::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &it->second;
}

const SchemaDescriptor& SchemaRegistry::at(const std::string& id) const {
    const auto* d = find(id);
    if (!d) throw UnknownSchema("no schema registered with id: " + id);
    return *d;
}

std::vector<const SchemaDescriptor*> SchemaRegistry::all() const {
    std::vector<const SchemaDescriptor*> out;
    for (const auto& [_, d] : by_id_) out.push_back(&d);
    return out;
}

namespace {

void check_invariants(const SchemaDescriptor& d) {
    if (d.id.empty()) throw InvariantError("schema id is empty");
    std::set<std::string> seen;
    for (const auto& t : d.terms) {
        if (t.name.empty()) throw InvariantError("term with empty name in " + d.id);
        for (unsigned char c : t.name)
            if (std::isspace(c))
                throw InvariantError("term name contains whitespace: '" + t.name + "'");
        if (!util::is_absolute_uri(t.uri))
            throw InvariantError("term uri is not absolute: '" + t.uri + "' (term " + t.name +
                                 ")");
        if (!seen.insert(t.name).second)
            throw InvariantError("duplicate term name '" + t.name + "' in " + d.id);
    }
}

}  // namespace

SchemaDescriptor load_schema(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema descriptor: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("schema descriptor: root is not an object");
    SchemaDescriptor d;
    try {
        d.id = doc.at("id").get<std::string>();
        d.namespace_uri = doc.at("namespace").get<std::string>();
        for (const auto& jt : doc.at("terms")) {
            TermDescriptor t;
            t.name = jt.at("name").get<std::string>();
            t.uri = jt.at("uri").get<std::string>();
            t.label = jt.at("label").get<std::string>();
            t.comment = jt.value("comment", "");
            t.definition = jt.value("definition", "");
            d.terms.push_back(std::move(t));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema descriptor: ") + e.what());
    }
    check_invariants(d);
    return d;
}

std::string serialize_schema(const SchemaDescriptor& d) {
    ordered_json doc;
    doc["id"] = d.id;
    doc["namespace"] = d.namespace_uri;
    doc["terms"] = ordered_json::array();
    for (const auto& t : d.terms) {
        ordered_json jt;
        jt["name"] = t.name;
        jt["uri"] = t.uri;
        jt["label"] = t.label;
        if (!t.comment.empty()) jt["comment"] = t.comment;
        if (!t.definition.empty()) jt["definition"] = t.definition;
        doc["terms"].push_back(std::move(jt));
    }
    return doc.dump(2) + "\n";
}

namespace {

// Descriptor JSON embedded at build time from the schemas/ directory, so
// the builtins always equal the shipped files.
#include "schemas_data.inc"

}  // namespace

const std::vector<SchemaDescriptor>& builtin_schemas() {
    static const std::vector<SchemaDescriptor> schemas = {
        load_schema(kOaiDcJson),
        load_schema(kDctermsJson),
        load_schema(kDcatApJson),
    };
    return schemas;
}

SchemaRegistry builtin_registry() {
    SchemaRegistry r;
    for (const auto& d : builtin_schemas()) r.add(d);
    return r;
}

}  // namespace converter::schema
