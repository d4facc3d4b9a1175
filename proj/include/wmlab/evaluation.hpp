#pragma once
// Detection-quality statistics: ROC/AUC, Pearson correlation of
// linguistic features against prediction correctness, run summaries.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wmlab/linguistics.hpp"

namespace wmlab {

struct RocPoint {
    double fpr;
    double tpr;
};

struct RocCurve {
    std::vector<RocPoint> points;  // (0,0) .. (1,1), monotone
    double auc = 0.0;              // trapezoid == normalized Mann-Whitney U
    int n_pos = 0;
    int n_neg = 0;
};

// Both sides nonempty or "degenerate ROC" is raised. Ties count 0.5.
RocCurve roc_auc(std::span<const double> pos_scores, std::span<const double> neg_scores);

// Two-pass Pearson r; zero variance -> "constant column", mismatched or
// short input -> error.
double pearson(std::span<const double> x, std::span<const double> y);

struct PredictionRecord {
    std::string doc_id;
    std::string scheme;
    std::string condition;  // clean | sim_paraphrase | sim_backtranslate | ...
    bool truth = false;     // actually watermarked
    double score = 0.0;     // detector z
    bool verdict = false;
    bool correct = false;   // verdict == truth
};

struct CorrelationMatrix {
    std::vector<std::pair<std::string, double>> entries;  // fixed feature order
    int n = 0;
    std::vector<std::string> dropped;  // constant columns, reported not zeroed
};

struct FeatureRow {
    std::string doc_id;
    FeatureVector features;
};

// Fixed feature column order used by the correlation matrix and CSV output.
const std::vector<std::string>& feature_columns();
std::vector<double> feature_column_values(const FeatureVector& fv);

// Point-biserial Pearson of each feature column against correctness
// (incorrect -> 0, correct -> 1), joined on doc id across all records.
CorrelationMatrix correlate_features(const std::vector<FeatureRow>& features,
                                     const std::vector<PredictionRecord>& predictions);

struct CellSummary {
    std::string scheme;
    std::string condition;
    std::optional<double> auc;  // absent when a truth class is missing
    double tpr = 0.0;           // at the configured threshold
    double fpr = 0.0;
    int n_pos = 0;
    int n_neg = 0;
    std::vector<RocPoint> roc;
};

struct EvalReport {
    std::vector<CellSummary> cells;  // ordered by (scheme, condition)
    std::vector<std::string> warnings;
};

EvalReport summarize_run(const std::vector<PredictionRecord>& records);

}  // namespace wmlab
