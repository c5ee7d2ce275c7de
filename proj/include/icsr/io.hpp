#pragma once
#include <stdexcept>
#include <string>
#include <vector>

#include "icsr/core.hpp"
#include "icsr/metrics.hpp"

namespace icsr {

// Raised for malformed input files; carries the offending field name.
struct FormatError : std::runtime_error {
    std::string field;
    FormatError(std::string f, const std::string& msg)
        : std::runtime_error(msg), field(std::move(f)) {}
};

// Binary embedding file: "ICSR" magic, u16 version, u8 flags (bit 0 = truth
// labels present), u64 N, u32 D, u32 K, then N*D little-endian f64 features,
// N u32 assignments, and optionally N u32 truth labels.
void write_embedding_file(const std::string& path, const EmbeddingSet& set);
EmbeddingSet read_embedding_file(const std::string& path);

// CSV interchange: header "id,dim0..dimD-1,cluster[,truth]".
EmbeddingSet read_embedding_csv(const std::string& path);
void write_embedding_csv(const std::string& path, const EmbeddingSet& set);

// JSON ranking report (per-cluster groups + config echo), schema-versioned.
std::string ranking_report_json(const std::vector<RankedGroups>& groups,
                                const RankingConfig& cfg, int epoch);
std::vector<RankedGroups> parse_ranking_report(const std::string& json_text);

std::string evaluation_report_json(const EvaluationReport& rep);
std::string evaluation_report_table(const EvaluationReport& rep);

}  // namespace icsr
