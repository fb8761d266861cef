#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace converter::rdf {

/// RDF term. Literals appear only in object position; blank node values are
/// graph-local labels without the "_:" sigil.
struct Term {
    enum class Kind { iri, blank, literal };

    Kind kind = Kind::iri;
    std::string value;     // IRI, blank label, or literal lexical form
    std::string lang;      // language tag, literals only
    std::string datatype;  // datatype IRI, literals only

    static Term iri(std::string v) { return {Kind::iri, std::move(v), "", ""}; }
    static Term blank(std::string label) { return {Kind::blank, std::move(label), "", ""}; }
    static Term literal(std::string v, std::string lang = "", std::string datatype = "") {
        return {Kind::literal, std::move(v), std::move(lang), std::move(datatype)};
    }

    auto operator<=>(const Term&) const = default;
};

struct Triple {
    Term subject;    // iri or blank
    Term predicate;  // iri
    Term object;

    auto operator<=>(const Triple&) const = default;
};

/// A set of triples. Insertion order is irrelevant to serialization.
class Graph {
public:
    void add(Triple t) { triples_.insert(std::move(t)); }
    void add(Term s, const std::string& p, Term o) {
        add(Triple{std::move(s), Term::iri(p), std::move(o)});
    }
    bool contains(const Triple& t) const { return triples_.count(t) > 0; }
    size_t size() const { return triples_.size(); }
    const std::set<Triple>& triples() const { return triples_; }

    /// Objects of (subject, predicate), in term order.
    std::vector<Term> objects(const Term& subject, const std::string& predicate) const;
    /// Subjects carrying rdf:type `type_iri`, in term order.
    std::vector<Term> subjects_of_type(const std::string& type_iri) const;

    bool operator==(const Graph&) const = default;

private:
    std::set<Triple> triples_;
};

// Vocabulary IRIs used across the emitter.
namespace ns {
inline constexpr const char* rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr const char* dcat = "http://www.w3.org/ns/dcat#";
inline constexpr const char* dct = "http://purl.org/dc/terms/";
inline constexpr const char* foaf = "http://xmlns.com/foaf/0.1/";
inline constexpr const char* xsd = "http://www.w3.org/2001/XMLSchema#";
}  // namespace ns

/// Deterministic Turtle: IRI subjects in lexicographic order, blank-node
/// subjects after in first-reference order (relabeled _:b0, _:b1, ...),
/// predicates in fixed vocabulary order then lexicographic, objects sorted.
/// Equal graphs serialize byte-identically.
std::string serialize_turtle(const Graph& g);

/// Write-only RDF/XML rendering of the same ordering.
std::string serialize_rdfxml(const Graph& g);

/// Parses the emitter's Turtle subset (prefix directives, IRIs, prefixed
/// names, blank node labels, literals with language tag or datatype, "a",
/// object/predicate lists). Throws ParseError.
Graph parse_turtle(const std::string& text);

/// True iff some blank-node bijection maps a onto b exactly. Brute-force
/// backtracking over bijections with a ground-triple pre-check; graphs with
/// more than max_blank_nodes blank nodes throw TooLarge.
bool isomorphic(const Graph& a, const Graph& b, int max_blank_nodes = 12);

}  // namespace converter::rdf
