#include "converter/xml.hpp"

#include <expat.h>

#include <cstring>
#include <map>

#include "converter/errors.hpp"

namespace converter::xml {

namespace {

// expat namespace-triplet separator. U+0001 cannot appear in well-formed
// XML names, so splitting on it is unambiguous.
constexpr char kNsSep = '\x01';

struct ParseState {
    std::vector<Element*> stack;
    std::optional<Element> root;
    std::string error;
};

void split_name(const char* name, std::string& ns, std::string& local) {
    const char* sep = std::strchr(name, kNsSep);
    if (sep) {
        ns.assign(name, sep - name);
        local.assign(sep + 1);
    } else {
        ns.clear();
        local.assign(name);
    }
}

void XMLCALL on_start(void* ud, const char* name, const char** atts) {
    auto* st = static_cast<ParseState*>(ud);
    Element el;
    split_name(name, el.ns, el.local);
    for (const char** a = atts; *a; a += 2) {
        Attribute attr;
        split_name(a[0], attr.ns, attr.local);
        attr.value = a[1];
        el.attributes.push_back(std::move(attr));
    }
    if (st->stack.empty()) {
        st->root = std::move(el);
        st->stack.push_back(&*st->root);
    } else {
        st->stack.back()->children.emplace_back(std::move(el));
        st->stack.push_back(&std::get<Element>(st->stack.back()->children.back()));
    }
}

void XMLCALL on_end(void* ud, const char*) {
    auto* st = static_cast<ParseState*>(ud);
    if (!st->stack.empty()) st->stack.pop_back();
}

void XMLCALL on_text(void* ud, const char* s, int len) {
    auto* st = static_cast<ParseState*>(ud);
    if (st->stack.empty()) return;
    auto& children = st->stack.back()->children;
    if (!children.empty() && std::holds_alternative<std::string>(children.back())) {
        std::get<std::string>(children.back()).append(s, static_cast<size_t>(len));
    } else {
        children.emplace_back(std::string(s, static_cast<size_t>(len)));
    }
}

}  // namespace

std::optional<std::string> Element::attr(const std::string& target_ns,
                                         const std::string& target_local) const {
    for (const auto& a : attributes)
        if (a.ns == target_ns && a.local == target_local) return a.value;
    return std::nullopt;
}

std::string Element::text() const {
    std::string out;
    for (const auto& c : children)
        if (const auto* t = std::get_if<std::string>(&c)) out += *t;
    return out;
}

std::vector<const Element*> Element::elements() const {
    std::vector<const Element*> out;
    for (const auto& c : children)
        if (const auto* e = std::get_if<Element>(&c)) out.push_back(e);
    return out;
}

std::vector<const Element*> Element::elements(const std::string& target_ns,
                                              const std::string& target_local) const {
    std::vector<const Element*> out;
    for (const auto& c : children) {
        const auto* e = std::get_if<Element>(&c);
        if (e && e->ns == target_ns && e->local == target_local) out.push_back(e);
    }
    return out;
}

const Element* Element::first(const std::string& target_ns,
                              const std::string& target_local) const {
    for (const auto& c : children) {
        const auto* e = std::get_if<Element>(&c);
        if (e && e->ns == target_ns && e->local == target_local) return e;
    }
    return nullptr;
}

Element parse(const std::string& document) {
    XML_Parser parser = XML_ParserCreateNS(nullptr, kNsSep);
    if (!parser) throw XmlError("parser allocation failed");
    ParseState st;
    XML_SetUserData(parser, &st);
    XML_SetElementHandler(parser, on_start, on_end);
    XML_SetCharacterDataHandler(parser, on_text);
    XML_Status ok = XML_Parse(parser, document.data(), static_cast<int>(document.size()),
                              /*isFinal=*/1);
    if (ok != XML_STATUS_OK) {
        std::string msg = XML_ErrorString(XML_GetErrorCode(parser));
        auto line = XML_GetCurrentLineNumber(parser);
        XML_ParserFree(parser);
        throw XmlError(msg + " at line " + std::to_string(line));
    }
    XML_ParserFree(parser);
    if (!st.root) throw XmlError("document has no root element");
    return std::move(*st.root);
}

std::string escape_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attr(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

namespace {

constexpr const char* kXmlNs = "http://www.w3.org/XML/1998/namespace";

// Well-known prefixes keep re-serialized fragments readable.
const std::map<std::string, std::string>& well_known_prefixes() {
    static const std::map<std::string, std::string> m = {
        {"http://www.openarchives.org/OAI/2.0/", "oai"},
        {"http://www.openarchives.org/OAI/2.0/oai_dc/", "oai_dc"},
        {"http://purl.org/dc/elements/1.1/", "dc"},
        {"http://purl.org/dc/terms/", "dcterms"},
    };
    return m;
}

void collect_namespaces(const Element& el, std::map<std::string, std::string>& prefixes,
                        int& counter) {
    auto assign = [&](const std::string& ns) {
        if (ns.empty() || ns == kXmlNs || prefixes.count(ns)) return;
        auto wk = well_known_prefixes().find(ns);
        if (wk != well_known_prefixes().end()) {
            prefixes[ns] = wk->second;
        } else {
            prefixes[ns] = "ns" + std::to_string(counter++);
        }
    };
    assign(el.ns);
    for (const auto& a : el.attributes) assign(a.ns);
    for (const auto& c : el.children)
        if (const auto* e = std::get_if<Element>(&c)) collect_namespaces(*e, prefixes, counter);
}

void write_element(const Element& el, const std::map<std::string, std::string>& prefixes,
                   std::string& out) {
    auto qname = [&](const std::string& ns, const std::string& local) {
        if (ns.empty()) return local;
        if (ns == kXmlNs) return "xml:" + local;
        return prefixes.at(ns) + ":" + local;
    };
    out += '<';
    out += qname(el.ns, el.local);
    for (const auto& a : el.attributes) {
        out += ' ';
        out += qname(a.ns, a.local);
        out += "=\"";
        out += escape_attr(a.value);
        out += '"';
    }
    if (el.children.empty()) {
        out += "/>";
        return;
    }
    out += '>';
    for (const auto& c : el.children) {
        if (const auto* e = std::get_if<Element>(&c))
            write_element(*e, prefixes, out);
        else
            out += escape_text(std::get<std::string>(c));
    }
    out += "</";
    out += qname(el.ns, el.local);
    out += '>';
}

}  // namespace

std::string serialize(const Element& root) {
    std::map<std::string, std::string> prefixes;
    int counter = 0;
    collect_namespaces(root, prefixes, counter);

    // All xmlns declarations go on the root element.
    std::string out;
    out += '<';
    auto qname = [&](const std::string& ns, const std::string& local) {
        if (ns.empty()) return local;
        if (ns == kXmlNs) return "xml:" + local;
        return prefixes.at(ns) + ":" + local;
    };
    out += qname(root.ns, root.local);
    for (const auto& [ns, prefix] : prefixes) {
        out += " xmlns:" + prefix + "=\"" + escape_attr(ns) + "\"";
    }
    for (const auto& a : root.attributes) {
        out += ' ';
        out += qname(a.ns, a.local);
        out += "=\"";
        out += escape_attr(a.value);
        out += '"';
    }
    if (root.children.empty()) {
        out += "/>";
        return out;
    }
    out += '>';
    for (const auto& c : root.children) {
        if (const auto* e = std::get_if<Element>(&c))
            write_element(*e, prefixes, out);
        else
            out += escape_text(std::get<std::string>(c));
    }
    out += "</";
    out += qname(root.ns, root.local);
    out += '>';
    return out;
}

}  // namespace converter::xml
