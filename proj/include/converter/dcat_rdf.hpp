#pragma once

#include "converter/dcat.hpp"
#include "converter/rdf.hpp"

namespace converter::rdf {

/// Triples for one dataset (including agent and distribution blank nodes).
/// Blank node labels are deterministic in field order.
Graph dataset_to_graph(const dcat::DcatDataset& dataset);

/// Catalog node triples plus dcat:dataset membership links; dataset bodies
/// are not included.
Graph catalog_to_graph(const dcat::DcatCatalog& catalog);

/// Full graph for a catalog and its datasets.
Graph to_graph(const dcat::DcatCatalog& catalog, const std::vector<dcat::DcatDataset>& datasets);

/// Merges graphs whose blank node labels may collide by prefixing each
/// input's labels with an index.
Graph merge_disjoint(const std::vector<Graph>& graphs);

}  // namespace converter::rdf
