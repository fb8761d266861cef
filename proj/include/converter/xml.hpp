#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace converter::xml {

struct Element;

/// Child node: nested element or character data (entity references already
/// resolved by the parser).
using Node = std::variant<Element, std::string>;

struct Attribute {
    std::string ns;     // resolved namespace URI, empty when unprefixed
    std::string local;  // local name
    std::string value;
};

struct Element {
    std::string ns;     // resolved namespace URI, empty when in no namespace
    std::string local;  // local name
    std::vector<Attribute> attributes;
    std::vector<Node> children;

    /// First attribute matching (ns, local), if any.
    std::optional<std::string> attr(const std::string& ns, const std::string& local) const;

    /// Concatenated direct text children (no descent into child elements).
    std::string text() const;

    /// Child elements, optionally filtered by namespace and local name.
    std::vector<const Element*> elements() const;
    std::vector<const Element*> elements(const std::string& ns, const std::string& local) const;
    const Element* first(const std::string& ns, const std::string& local) const;
};

/// Parses a complete XML document. Namespace-aware; throws XmlError on
/// malformed input.
Element parse(const std::string& document);

/// Serializes an element subtree back to markup. Namespaces are re-declared
/// with deterministic prefixes, text is entity-escaped; parse(serialize(e))
/// reproduces the same tree.
std::string serialize(const Element& root);

std::string escape_text(const std::string& s);
std::string escape_attr(const std::string& s);

}  // namespace converter::xml
