#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "converter/schema_model.hpp"

namespace converter::matcher {

/// Sparse feature vector over normalized tokens (weight = term frequency)
/// and character trigrams of the padded, space-joined token text
/// (weight = frequency x 0.5). Zero-weight entries never appear.
struct TermVector {
    std::map<std::string, double> weights;

    bool empty() const { return weights.empty(); }
};

/// Lowercases and splits on non-alphanumeric boundaries and lower-to-upper
/// camel-case boundaries; empty tokens are dropped.
std::vector<std::string> normalize(const std::string& text);

TermVector vectorize(const std::string& text);

/// Cosine of sparse vectors; 0.0 when either side is empty.
double cosine(const TermVector& a, const TermVector& b);

/// Scores a pair of texts in [0,1]. The lexical default is
/// cosine(vectorize(a), vectorize(b)); the paper's embedding/LLM matchers
/// plug in behind the same interface.
class SimilarityProvider {
public:
    virtual ~SimilarityProvider() = default;
    virtual std::string method_name() const = 0;
    virtual double score(const std::string& a, const std::string& b) = 0;
};

class LexicalProvider final : public SimilarityProvider {
public:
    std::string method_name() const override { return "lexical"; }
    double score(const std::string& a, const std::string& b) override;
};

/// HTTP provider speaking the wire format
///   request  { "pairs": [[a, b], ...] }
///   response { "scores": [s, ...] }  with every s in [0,1].
class RemoteProvider final : public SimilarityProvider {
public:
    explicit RemoteProvider(std::string endpoint_url);
    std::string method_name() const override { return "provider"; }
    double score(const std::string& a, const std::string& b) override;
    std::vector<double> score_batch(const std::vector<std::pair<std::string, std::string>>& pairs);

private:
    std::string url_;
};

struct MatcherConfig {
    double w_label = 0.5;
    double w_comment = 0.2;
    double w_definition = 0.3;
    double threshold = 0.35;
    int report_top_k = 5;

    void check() const;  // throws ConfigError
};

struct ChannelScores {
    std::optional<double> label;
    std::optional<double> comment;
    std::optional<double> definition;

    bool operator==(const ChannelScores&) const = default;
};

struct AlignmentEntry {
    std::string source_term;
    std::string target_term;
    double score = 0.0;
    std::optional<ChannelScores> channel_scores;  // absent for exact-label and manual
    std::string method;                           // exact-label | lexical | provider | manual
};

struct Candidate {
    std::string target_term;
    std::string target_uri;
    double score = 0.0;
    bool exact_label = false;
    ChannelScores channels;
};

struct MappingTable {
    std::string source_schema_id;
    std::string target_schema_id;
    std::vector<AlignmentEntry> entries;  // at most one entry per source term
    std::vector<std::string> unmapped;    // entries + unmapped partition the source terms

    const AlignmentEntry* find(const std::string& source_term) const;
};

/// Ranked candidate lists per source term, retained for curator review.
struct MatchReport {
    std::string source_schema_id;
    std::string target_schema_id;
    std::vector<std::pair<std::string, std::vector<Candidate>>> ranked;
};

struct MatchResult {
    MappingTable table;
    MatchReport report;
};

/// Scores every source term against every target term. Channel weights are
/// renormalized over the channels present on both terms; identical
/// normalized labels short-circuit to an exact-label entry at score 1.0.
/// The best candidate wins when its score reaches config.threshold, ties
/// broken by exact-label first, then lexicographically smallest target URI.
MatchResult match_schemas(const schema::SchemaDescriptor& source,
                          const schema::SchemaDescriptor& target,
                          const MatcherConfig& config = {},
                          SimilarityProvider* provider = nullptr);

/// One manual override: pin source_term to target_term, or with remove set,
/// force source_term into unmapped.
struct Override {
    std::string source_term;
    std::string target_term;  // ignored when remove is true
    bool remove = false;
};

/// Applies reviewed overrides; replaced or added entries carry method
/// "manual" and score 1.0. Throws UnknownTerm for a source term the table
/// does not cover.
MappingTable apply_overrides(const MappingTable& table, const std::vector<Override>& overrides);

// JSON (de)serialization per the published wire formats.
std::string mapping_to_json(const MappingTable& table);
MappingTable mapping_from_json(const std::string& text);  // throws ParseError
std::string report_to_json(const MatchReport& report);
std::vector<Override> overrides_from_json(const std::string& text);  // throws ParseError

}  // namespace converter::matcher
