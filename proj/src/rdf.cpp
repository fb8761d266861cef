#include "converter/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <functional>
#include <map>

#include "converter/errors.hpp"

namespace converter::rdf {

std::vector<Term> Graph::objects(const Term& subject, const std::string& predicate) const {
    std::vector<Term> out;
    Term p = Term::iri(predicate);
    for (const auto& t : triples_)
        if (t.subject == subject && t.predicate == p) out.push_back(t.object);
    return out;
}

std::vector<Term> Graph::subjects_of_type(const std::string& type_iri) const {
    std::vector<Term> out;
    Term p = Term::iri(std::string(ns::rdf) + "type");
    Term o = Term::iri(type_iri);
    for (const auto& t : triples_)
        if (t.predicate == p && t.object == o) out.push_back(t.subject);
    return out;
}

namespace {

const std::vector<std::pair<std::string, std::string>>& prefix_table() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"dcat", ns::dcat}, {"dct", ns::dct}, {"foaf", ns::foaf}, {"xsd", ns::xsd}};
    return table;
}

// Fixed predicate emission order; unknown predicates follow lexicographically.
const std::vector<std::string>& predicate_order() {
    static const std::vector<std::string> order = [] {
        std::vector<std::string> v;
        auto dct = [](const char* n) { return std::string(ns::dct) + n; };
        auto dcat = [](const char* n) { return std::string(ns::dcat) + n; };
        auto foaf = [](const char* n) { return std::string(ns::foaf) + n; };
        v.push_back(std::string(ns::rdf) + "type");
        v.push_back(dct("title"));
        v.push_back(dct("description"));
        v.push_back(dcat("keyword"));
        v.push_back(dcat("theme"));
        v.push_back(dct("creator"));
        v.push_back(dct("contributor"));
        v.push_back(dct("publisher"));
        v.push_back(dct("issued"));
        v.push_back(dct("modified"));
        v.push_back(dct("identifier"));
        v.push_back(dcat("landingPage"));
        v.push_back(dct("language"));
        v.push_back(dct("accessRights"));
        v.push_back(dcat("distribution"));
        v.push_back(dcat("accessURL"));
        v.push_back(dct("format"));
        v.push_back(dcat("mediaType"));
        v.push_back(dct("license"));
        v.push_back(foaf("name"));
        v.push_back(foaf("homepage"));
        v.push_back(dcat("dataset"));
        return v;
    }();
    return order;
}

int predicate_rank(const std::string& iri) {
    const auto& order = predicate_order();
    auto it = std::find(order.begin(), order.end(), iri);
    return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

bool predicate_less(const std::string& a, const std::string& b) {
    int ra = predicate_rank(a), rb = predicate_rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
}

bool valid_pn_local(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        unsigned char u = static_cast<unsigned char>(c);
        bool ok = (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') ||
                  c == '_' || c == '-';
        if (!ok) return false;
    }
    unsigned char first = static_cast<unsigned char>(s[0]);
    return std::isalpha(first) || s[0] == '_';
}

std::string iri_ref(const std::string& iri) {
    for (const auto& [prefix, base] : prefix_table()) {
        if (iri.size() > std::string(base).size() && iri.rfind(base, 0) == 0) {
            std::string local = iri.substr(std::string(base).size());
            if (valid_pn_local(local)) return prefix + ":" + local;
        }
    }
    return "<" + iri + ">";
}

void escape_literal_into(const std::string& s, std::string& out) {
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04X", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
}

struct Labeler {
    std::map<std::string, std::string> labels;  // original -> output
    int next = 0;

    const std::string& relabel(const std::string& original) {
        auto it = labels.find(original);
        if (it == labels.end())
            it = labels.emplace(original, "b" + std::to_string(next++)).first;
        return it->second;
    }
};

std::string term_ref(const Term& t, Labeler& labeler) {
    switch (t.kind) {
        case Term::Kind::iri:
            return iri_ref(t.value);
        case Term::Kind::blank:
            return "_:" + labeler.relabel(t.value);
        case Term::Kind::literal: {
            std::string out = "\"";
            escape_literal_into(t.value, out);
            out += '"';
            if (!t.lang.empty()) {
                out += "@" + t.lang;
            } else if (!t.datatype.empty()) {
                out += "^^" + iri_ref(t.datatype);
            }
            return out;
        }
    }
    return {};
}

// Subject emission order: all IRI subjects lexicographically, then blank
// subjects last, in the order they are first referenced while walking the
// emitted subjects (unreferenced blank subjects afterwards, label-ordered).
std::vector<Term> subject_order(const Graph& g) {
    std::set<Term> subjects;
    for (const auto& t : g.triples()) subjects.insert(t.subject);

    std::vector<Term> iri_order;
    for (const auto& s : subjects)
        if (s.kind == Term::Kind::iri) iri_order.push_back(s);

    std::vector<Term> blank_order;
    std::set<Term> queued;
    auto discover_from = [&](const Term& s) {
        // Walk this subject's triples in emitted order; queue blank objects
        // that are themselves subjects.
        std::vector<const Triple*> rows;
        for (const auto& t : g.triples())
            if (t.subject == s) rows.push_back(&t);
        std::sort(rows.begin(), rows.end(), [](const Triple* a, const Triple* b) {
            if (a->predicate.value != b->predicate.value)
                return predicate_less(a->predicate.value, b->predicate.value);
            return a->object < b->object;
        });
        for (const auto* t : rows) {
            if (t->object.kind == Term::Kind::blank && subjects.count(t->object) &&
                queued.insert(t->object).second)
                blank_order.push_back(t->object);
        }
    };

    for (const auto& s : iri_order) discover_from(s);
    for (size_t i = 0; i < blank_order.size(); ++i) discover_from(blank_order[i]);
    for (const auto& s : subjects) {  // unreferenced roots, label-ordered
        if (s.kind == Term::Kind::blank && queued.insert(s).second) blank_order.push_back(s);
    }
    for (size_t i = 0; i < blank_order.size(); ++i) discover_from(blank_order[i]);

    std::vector<Term> order = std::move(iri_order);
    order.insert(order.end(), blank_order.begin(), blank_order.end());
    return order;
}

}  // namespace

std::string serialize_turtle(const Graph& g) {
    std::string out;
    for (const auto& [prefix, base] : prefix_table())
        out += "@prefix " + prefix + ": <" + base + "> .\n";

    Labeler labeler;
    const std::string rdf_type = std::string(ns::rdf) + "type";
    for (const auto& subject : subject_order(g)) {
        std::vector<std::string> preds;
        std::map<std::string, std::vector<Term>> by_pred;
        for (const auto& t : g.triples()) {
            if (!(t.subject == subject)) continue;
            if (!by_pred.count(t.predicate.value)) preds.push_back(t.predicate.value);
            by_pred[t.predicate.value].push_back(t.object);
        }
        std::sort(preds.begin(), preds.end(), predicate_less);

        out += "\n" + term_ref(subject, labeler);
        for (size_t pi = 0; pi < preds.size(); ++pi) {
            const auto& p = preds[pi];
            auto objects = by_pred[p];
            std::sort(objects.begin(), objects.end());
            out += pi == 0 ? " " : "    ";
            out += p == rdf_type ? "a" : iri_ref(p);
            out += " ";
            for (size_t oi = 0; oi < objects.size(); ++oi) {
                if (oi) out += " , ";
                out += term_ref(objects[oi], labeler);
            }
            out += pi + 1 == preds.size() ? " .\n" : " ;\n";
        }
    }
    return out;
}

// ---- Turtle subset parser ------------------------------------------------

namespace {

class TurtleLexer {
public:
    explicit TurtleLexer(const std::string& text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    char take() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("turtle: unexpected end of input");
        return text_[pos_++];
    }

    void expect(char c) {
        char got = take();
        if (got != c)
            throw ParseError(std::string("turtle: expected '") + c + "' but found '" + got + "'");
    }

    std::string take_iri() {
        expect('<');
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '>') out.push_back(text_[pos_++]);
        if (pos_ >= text_.size()) throw ParseError("turtle: unterminated IRI");
        ++pos_;
        return out;
    }

    // Reads a word at the cursor without skipping whitespace first; callers
    // position the cursor (peek/skip_ws) where a token may begin.
    std::string take_word() {
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                c == '.' || c == ':') {
                out.push_back(c);
                ++pos_;
            } else {
                break;
            }
        }
        return out;
    }

    std::string take_lang_tag() {
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') {
                out.push_back(c);
                ++pos_;
            } else {
                break;
            }
        }
        return out;
    }

    std::string take_quoted() {
        expect('"');
        std::string out;
        while (true) {
            if (pos_ >= text_.size()) throw ParseError("turtle: unterminated literal");
            char c = text_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            if (pos_ >= text_.size()) throw ParseError("turtle: dangling escape");
            char e = text_[pos_++];
            switch (e) {
                case 't': out.push_back('\t'); break;
                case 'b': out.push_back('\b'); break;
                case 'n': out.push_back('\n'); break;
                case 'r': out.push_back('\r'); break;
                case 'f': out.push_back('\f'); break;
                case '"': out.push_back('"'); break;
                case '\'': out.push_back('\''); break;
                case '\\': out.push_back('\\'); break;
                case 'u': out += take_unicode(4); break;
                case 'U': out += take_unicode(8); break;
                default: throw ParseError(std::string("turtle: bad escape \\") + e);
            }
        }
        return out;
    }

    // Raw character access for context-sensitive spots (no ws skipping).
    bool raw_match(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

private:
    std::string take_unicode(int digits) {
        unsigned long cp = 0;
        for (int i = 0; i < digits; ++i) {
            if (pos_ >= text_.size()) throw ParseError("turtle: truncated \\u escape");
            char c = text_[pos_++];
            int v;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
            else throw ParseError("turtle: bad hex digit in escape");
            cp = cp * 16 + static_cast<unsigned long>(v);
        }
        std::string out;
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        return out;
    }

    const std::string& text_;
    size_t pos_ = 0;
};

class TurtleParser {
public:
    explicit TurtleParser(const std::string& text) : lex_(text) {}

    Graph parse() {
        Graph g;
        while (!lex_.eof()) {
            if (lex_.peek() == '@') {
                parse_prefix();
                continue;
            }
            parse_statement(g);
        }
        return g;
    }

private:
    void parse_prefix() {
        lex_.expect('@');
        std::string kw = lex_.take_word();
        if (kw != "prefix") throw ParseError("turtle: unsupported directive @" + kw);
        lex_.peek();  // position at the prefix name
        std::string name = lex_.take_word();
        if (name.empty() || name.back() != ':')
            throw ParseError("turtle: malformed prefix name '" + name + "'");
        name.pop_back();
        std::string iri = lex_.take_iri();
        lex_.expect('.');
        prefixes_[name] = iri;
    }

    Term parse_term(bool as_predicate) {
        char c = lex_.peek();
        if (c == '<') return Term::iri(lex_.take_iri());
        if (c == '"') {
            if (as_predicate) throw ParseError("turtle: literal in predicate position");
            std::string value = lex_.take_quoted();
            if (lex_.raw_match('@')) {
                std::string tag = lex_.take_lang_tag();
                if (tag.empty()) throw ParseError("turtle: empty language tag");
                return Term::literal(value, tag);
            }
            if (lex_.raw_match('^')) {
                if (!lex_.raw_match('^')) throw ParseError("turtle: lone '^'");
                Term dt = parse_term(false);
                if (dt.kind != Term::Kind::iri)
                    throw ParseError("turtle: datatype must be an IRI");
                return Term::literal(value, "", dt.value);
            }
            return Term::literal(value);
        }
        if (c == '_') {
            lex_.take();  // '_'
            if (!lex_.raw_match(':')) throw ParseError("turtle: malformed blank node");
            std::string label = lex_.take_word();
            if (label.empty()) throw ParseError("turtle: empty blank node label");
            return Term::blank(label);
        }
        std::string word = lex_.take_word();
        if (word.empty()) throw ParseError("turtle: unexpected character");
        if (word == "a") {
            if (!as_predicate) throw ParseError("turtle: 'a' outside predicate position");
            return Term::iri(std::string(ns::rdf) + "type");
        }
        auto colon = word.find(':');
        if (colon == std::string::npos)
            throw ParseError("turtle: bare word '" + word + "'");
        std::string prefix = word.substr(0, colon);
        std::string local = word.substr(colon + 1);
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end()) throw ParseError("turtle: unknown prefix '" + prefix + ":'");
        return Term::iri(it->second + local);
    }

    void parse_statement(Graph& g) {
        Term subject = parse_term(false);
        if (subject.kind == Term::Kind::literal)
            throw ParseError("turtle: literal in subject position");
        while (true) {
            Term predicate = parse_term(true);
            if (predicate.kind != Term::Kind::iri)
                throw ParseError("turtle: predicate must be an IRI");
            while (true) {
                Term object = parse_term(false);
                g.add(Triple{subject, predicate, object});
                char c = lex_.peek();
                if (c == ',') {
                    lex_.take();
                    continue;
                }
                break;
            }
            char c = lex_.take();
            if (c == ';') {
                if (lex_.peek() == '.') {  // tolerate trailing semicolon
                    lex_.take();
                    return;
                }
                continue;
            }
            if (c == '.') return;
            throw ParseError(std::string("turtle: expected ';' or '.' but found '") + c + "'");
        }
    }

    TurtleLexer lex_;
    std::map<std::string, std::string> prefixes_;
};

}  // namespace

Graph parse_turtle(const std::string& text) { return TurtleParser(text).parse(); }

// ---- RDF/XML writer --------------------------------------------------------

namespace {

std::string xml_escape(const std::string& s, bool attr) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += attr ? "&quot;" : "\""; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Splits a predicate IRI into (namespace, local) at the last '#' or '/'.
bool split_predicate(const std::string& iri, std::string& nsp, std::string& local) {
    auto pos = iri.find_last_of("#/");
    if (pos == std::string::npos || pos + 1 >= iri.size()) return false;
    nsp = iri.substr(0, pos + 1);
    local = iri.substr(pos + 1);
    return valid_pn_local(local);
}

}  // namespace

std::string serialize_rdfxml(const Graph& g) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<rdf:RDF xmlns:rdf=\"" + std::string(ns::rdf) + "\"";
    for (const auto& [prefix, base] : prefix_table())
        out += " xmlns:" + prefix + "=\"" + std::string(base) + "\"";
    out += ">\n";

    std::map<std::string, std::string> extra_ns;  // namespace -> prefix
    auto qname = [&](const std::string& iri, std::string& q, std::string& decl) -> bool {
        decl.clear();
        if (iri.rfind(ns::rdf, 0) == 0) {
            q = "rdf:" + iri.substr(std::string(ns::rdf).size());
            return true;
        }
        for (const auto& [prefix, base] : prefix_table()) {
            if (iri.size() > std::string(base).size() && iri.rfind(base, 0) == 0) {
                std::string local = iri.substr(std::string(base).size());
                if (valid_pn_local(local)) {
                    q = prefix + ":" + local;
                    return true;
                }
            }
        }
        std::string nsp, local;
        if (!split_predicate(iri, nsp, local)) return false;
        auto it = extra_ns.find(nsp);
        if (it == extra_ns.end())
            it = extra_ns.emplace(nsp, "ns" + std::to_string(extra_ns.size())).first;
        q = it->second + ":" + local;
        decl = " xmlns:" + it->second + "=\"" + xml_escape(nsp, true) + "\"";
        return true;
    };

    Labeler labeler;
    for (const auto& subject : subject_order(g)) {
        out += "  <rdf:Description ";
        if (subject.kind == Term::Kind::iri)
            out += "rdf:about=\"" + xml_escape(subject.value, true) + "\"";
        else
            out += "rdf:nodeID=\"" + labeler.relabel(subject.value) + "\"";
        out += ">\n";

        std::vector<std::string> preds;
        std::map<std::string, std::vector<Term>> by_pred;
        for (const auto& t : g.triples()) {
            if (!(t.subject == subject)) continue;
            if (!by_pred.count(t.predicate.value)) preds.push_back(t.predicate.value);
            by_pred[t.predicate.value].push_back(t.object);
        }
        std::sort(preds.begin(), preds.end(), predicate_less);
        for (const auto& p : preds) {
            std::string q, decl;
            if (!qname(p, q, decl))
                throw ParseError("rdfxml: predicate IRI not expressible as QName: " + p);
            auto objects = by_pred[p];
            std::sort(objects.begin(), objects.end());
            for (const auto& o : objects) {
                out += "    <" + q + decl;
                switch (o.kind) {
                    case Term::Kind::iri:
                        out += " rdf:resource=\"" + xml_escape(o.value, true) + "\"/>\n";
                        break;
                    case Term::Kind::blank:
                        out += " rdf:nodeID=\"" + labeler.relabel(o.value) + "\"/>\n";
                        break;
                    case Term::Kind::literal:
                        if (!o.lang.empty()) out += " xml:lang=\"" + xml_escape(o.lang, true) + "\"";
                        if (!o.datatype.empty())
                            out += " rdf:datatype=\"" + xml_escape(o.datatype, true) + "\"";
                        out += ">" + xml_escape(o.value, false) + "</" + q + ">\n";
                        break;
                }
            }
        }
        out += "  </rdf:Description>\n";
    }
    out += "</rdf:RDF>\n";
    return out;
}

// ---- isomorphism oracle ----------------------------------------------------

namespace {

std::vector<std::string> blank_labels(const Graph& g) {
    std::set<std::string> labels;
    for (const auto& t : g.triples()) {
        if (t.subject.kind == Term::Kind::blank) labels.insert(t.subject.value);
        if (t.object.kind == Term::Kind::blank) labels.insert(t.object.value);
    }
    return {labels.begin(), labels.end()};
}

bool triple_has_blank(const Triple& t) {
    return t.subject.kind == Term::Kind::blank || t.object.kind == Term::Kind::blank;
}

}  // namespace

bool isomorphic(const Graph& a, const Graph& b, int max_blank_nodes) {
    if (a.size() != b.size()) return false;

    auto blanks_a = blank_labels(a);
    auto blanks_b = blank_labels(b);
    if (blanks_a.size() != blanks_b.size()) return false;
    if (static_cast<int>(blanks_a.size()) > max_blank_nodes)
        throw TooLarge("isomorphism oracle limited to " + std::to_string(max_blank_nodes) +
                       " blank nodes, got " + std::to_string(blanks_a.size()));

    // Ground triples must match exactly.
    std::vector<Triple> blank_triples_a;
    for (const auto& t : a.triples()) {
        if (triple_has_blank(t))
            blank_triples_a.push_back(t);
        else if (!b.contains(t))
            return false;
    }
    size_t blank_count_b = 0;
    for (const auto& t : b.triples())
        if (triple_has_blank(t)) ++blank_count_b;
    if (blank_triples_a.size() != blank_count_b) return false;
    if (blanks_a.empty()) return true;

    std::map<std::string, std::string> mapping;
    std::set<std::string> used;

    // A triple is checkable once every blank node in it is mapped.
    auto mapped_triple = [&](const Triple& t, Triple& out) -> bool {
        out = t;
        if (t.subject.kind == Term::Kind::blank) {
            auto it = mapping.find(t.subject.value);
            if (it == mapping.end()) return false;
            out.subject = Term::blank(it->second);
        }
        if (t.object.kind == Term::Kind::blank) {
            auto it = mapping.find(t.object.value);
            if (it == mapping.end()) return false;
            out.object = Term::blank(it->second);
        }
        return true;
    };

    auto consistent = [&]() {
        Triple mapped;
        for (const auto& t : blank_triples_a)
            if (mapped_triple(t, mapped) && !b.contains(mapped)) return false;
        return true;
    };

    std::function<bool(size_t)> assign = [&](size_t idx) -> bool {
        if (idx == blanks_a.size()) return true;
        for (const auto& candidate : blanks_b) {
            if (used.count(candidate)) continue;
            mapping[blanks_a[idx]] = candidate;
            used.insert(candidate);
            if (consistent() && assign(idx + 1)) return true;
            mapping.erase(blanks_a[idx]);
            used.erase(candidate);
        }
        return false;
    };
    return assign(0);
}

}  // namespace converter::rdf
