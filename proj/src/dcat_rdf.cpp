#include "converter/dcat_rdf.hpp"

#include <cctype>

#include "converter/util.hpp"

namespace converter::rdf {

namespace {

std::string dct(const char* n) { return std::string(ns::dct) + n; }
std::string dcat_(const char* n) { return std::string(ns::dcat) + n; }
std::string foaf(const char* n) { return std::string(ns::foaf) + n; }
std::string rdf_type() { return std::string(ns::rdf) + "type"; }
std::string xsd_date() { return std::string(ns::xsd) + "date"; }

// Language subtag lowercased, remaining subtags verbatim.
std::string canonical_lang(const std::string& tag) {
    std::string out = tag;
    for (auto& c : out) {
        if (c == '-') break;
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

Term lang_literal(const dcat::LangText& t) {
    return Term::literal(t.text, t.lang.empty() ? "" : canonical_lang(t.lang));
}

class BlankAllocator {
public:
    Term next() { return Term::blank("b" + std::to_string(counter_++)); }

private:
    int counter_ = 0;
};

// Emits the agent object plus its description triples; URI-bearing agents
// are named nodes, the rest blank nodes.
Term emit_agent(Graph& g, const dcat::Agent& agent, BlankAllocator& blanks) {
    Term node = agent.uri.empty() ? blanks.next() : Term::iri(agent.uri);
    g.add(node, rdf_type(), Term::iri(foaf("Agent")));
    if (!agent.name.empty()) g.add(node, foaf("name"), Term::literal(agent.name));
    return node;
}

}  // namespace

Graph dataset_to_graph(const dcat::DcatDataset& ds) {
    Graph g;
    BlankAllocator blanks;
    Term self = Term::iri(ds.uri);
    g.add(self, rdf_type(), Term::iri(dcat_("Dataset")));
    for (const auto& t : ds.titles) g.add(self, dct("title"), lang_literal(t));
    for (const auto& t : ds.descriptions) g.add(self, dct("description"), lang_literal(t));
    for (const auto& k : ds.keywords) g.add(self, dcat_("keyword"), Term::literal(k));
    for (const auto& t : ds.themes) g.add(self, dcat_("theme"), Term::iri(t));
    for (const auto& a : ds.creators) g.add(self, dct("creator"), emit_agent(g, a, blanks));
    for (const auto& a : ds.contributors)
        g.add(self, dct("contributor"), emit_agent(g, a, blanks));
    for (const auto& a : ds.publishers) g.add(self, dct("publisher"), emit_agent(g, a, blanks));
    if (ds.issued) g.add(self, dct("issued"), Term::literal(*ds.issued, "", xsd_date()));
    if (ds.modified) g.add(self, dct("modified"), Term::literal(*ds.modified, "", xsd_date()));
    for (const auto& i : ds.identifiers) g.add(self, dct("identifier"), Term::literal(i));
    if (!ds.landing_page.empty()) g.add(self, dcat_("landingPage"), Term::iri(ds.landing_page));
    for (const auto& l : ds.languages) g.add(self, dct("language"), Term::literal(l));
    if (!ds.access_rights.empty()) {
        Term o = util::is_absolute_uri(ds.access_rights) ? Term::iri(ds.access_rights)
                                                         : Term::literal(ds.access_rights);
        g.add(self, dct("accessRights"), o);
    }
    for (const auto& dist : ds.distributions) {
        Term node = blanks.next();
        g.add(self, dcat_("distribution"), node);
        g.add(node, rdf_type(), Term::iri(dcat_("Distribution")));
        g.add(node, dcat_("accessURL"), Term::iri(dist.access_url));
        if (!dist.format.empty()) g.add(node, dct("format"), Term::literal(dist.format));
        if (!dist.media_type.empty())
            g.add(node, dcat_("mediaType"), Term::literal(dist.media_type));
        if (!dist.license.empty()) g.add(node, dct("license"), Term::iri(dist.license));
    }
    return g;
}

Graph catalog_to_graph(const dcat::DcatCatalog& catalog) {
    Graph g;
    BlankAllocator blanks;
    Term self = Term::iri(catalog.uri);
    g.add(self, rdf_type(), Term::iri(dcat_("Catalog")));
    g.add(self, dct("title"), Term::literal(catalog.title));
    g.add(self, dct("description"), Term::literal(catalog.description));
    g.add(self, dct("publisher"), emit_agent(g, catalog.publisher, blanks));
    if (!catalog.homepage.empty()) g.add(self, foaf("homepage"), Term::iri(catalog.homepage));
    for (const auto& uri : catalog.dataset_uris) g.add(self, dcat_("dataset"), Term::iri(uri));
    return g;
}

Graph merge_disjoint(const std::vector<Graph>& graphs) {
    Graph out;
    for (size_t i = 0; i < graphs.size(); ++i) {
        std::string prefix = "g" + std::to_string(i) + "_";
        for (const auto& t : graphs[i].triples()) {
            Triple copy = t;
            if (copy.subject.kind == Term::Kind::blank) copy.subject.value = prefix + copy.subject.value;
            if (copy.object.kind == Term::Kind::blank) copy.object.value = prefix + copy.object.value;
            out.add(std::move(copy));
        }
    }
    return out;
}

Graph to_graph(const dcat::DcatCatalog& catalog, const std::vector<dcat::DcatDataset>& datasets) {
    std::vector<Graph> parts;
    parts.push_back(catalog_to_graph(catalog));
    for (const auto& ds : datasets) parts.push_back(dataset_to_graph(ds));
    return merge_disjoint(parts);
}

}  // namespace converter::rdf
