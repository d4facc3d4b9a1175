#include "wmlab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace wmlab {

RocCurve roc_auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
    if (pos_scores.empty() || neg_scores.empty())
        throw Error("degenerate ROC: both score sets must be nonempty");

    struct Scored {
        double score;
        bool pos;
    };
    std::vector<Scored> all;
    all.reserve(pos_scores.size() + neg_scores.size());
    for (double s : pos_scores) all.push_back({s, true});
    for (double s : neg_scores) all.push_back({s, false});
    std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
        return a.score > b.score;
    });

    RocCurve curve;
    curve.n_pos = static_cast<int>(pos_scores.size());
    curve.n_neg = static_cast<int>(neg_scores.size());
    curve.points.push_back({0.0, 0.0});

    const double np = static_cast<double>(curve.n_pos);
    const double nn = static_cast<double>(curve.n_neg);
    std::size_t i = 0;
    long long tp = 0, fp = 0;
    double area = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) {
            if (all[j].pos) ++tp;
            else ++fp;
            ++j;
        }
        double fpr = static_cast<double>(fp) / nn;
        double tpr = static_cast<double>(tp) / np;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        curve.points.push_back({fpr, tpr});
        prev_fpr = fpr;
        prev_tpr = tpr;
        i = j;
    }
    curve.auc = area;
    return curve;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw Error("pearson: need at least 3 samples");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw Error("constant column");
    return sxy / std::sqrt(sxx * syy);
}

const std::vector<std::string>& feature_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c = pos_tagset();
        c.insert(c.end(), {"sent_negative", "sent_neutral", "sent_positive",
                           "avg_sentence_len_words", "n_sentences", "avg_word_len_chars",
                           "n_words", "text_len_chars"});
        return c;
    }();
    return cols;
}

std::vector<double> feature_column_values(const FeatureVector& fv) {
    std::vector<double> out;
    out.reserve(feature_columns().size());
    for (const auto& tag : pos_tagset()) {
        auto it = fv.pos_counts.find(tag);
        out.push_back(it == fv.pos_counts.end() ? 0.0 : static_cast<double>(it->second));
    }
    out.push_back(fv.sentiment_label == "negative" ? 1.0 : 0.0);
    out.push_back(fv.sentiment_label == "neutral" ? 1.0 : 0.0);
    out.push_back(fv.sentiment_label == "positive" ? 1.0 : 0.0);
    out.push_back(fv.avg_sentence_len_words);
    out.push_back(static_cast<double>(fv.n_sentences));
    out.push_back(fv.avg_word_len_chars);
    out.push_back(static_cast<double>(fv.n_words));
    out.push_back(static_cast<double>(fv.text_len_chars));
    return out;
}

CorrelationMatrix correlate_features(const std::vector<FeatureRow>& features,
                                     const std::vector<PredictionRecord>& predictions) {
    std::unordered_map<std::string, const FeatureVector*> by_id;
    by_id.reserve(features.size());
    for (const auto& row : features) by_id[row.doc_id] = &row.features;

    const auto& cols = feature_columns();
    std::vector<std::vector<double>> x(cols.size());
    std::vector<double> y;
    for (const auto& rec : predictions) {
        auto it = by_id.find(rec.doc_id);
        if (it == by_id.end())
            throw Error("correlate_features: prediction references unknown doc id " + rec.doc_id);
        std::vector<double> vals = feature_column_values(*it->second);
        for (std::size_t c = 0; c < cols.size(); ++c) x[c].push_back(vals[c]);
        y.push_back(rec.correct ? 1.0 : 0.0);
    }
    if (y.size() < 3) throw Error("correlate_features: need at least 3 aligned rows");

    CorrelationMatrix matrix;
    matrix.n = static_cast<int>(y.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        try {
            matrix.entries.emplace_back(cols[c], pearson(x[c], y));
        } catch (const Error&) {
            matrix.dropped.push_back(cols[c]);
        }
    }
    return matrix;
}

EvalReport summarize_run(const std::vector<PredictionRecord>& records) {
    std::map<std::pair<std::string, std::string>, std::vector<const PredictionRecord*>> cells;
    for (const auto& rec : records) cells[{rec.scheme, rec.condition}].push_back(&rec);

    EvalReport report;
    for (const auto& [key, recs] : cells) {
        CellSummary cell;
        cell.scheme = key.first;
        cell.condition = key.second;
        std::vector<double> pos, neg;
        int tp = 0, fp = 0;
        for (const auto* r : recs) {
            if (r->truth) {
                pos.push_back(r->score);
                if (r->verdict) ++tp;
            } else {
                neg.push_back(r->score);
                if (r->verdict) ++fp;
            }
        }
        cell.n_pos = static_cast<int>(pos.size());
        cell.n_neg = static_cast<int>(neg.size());
        cell.tpr = cell.n_pos > 0 ? static_cast<double>(tp) / cell.n_pos : 0.0;
        cell.fpr = cell.n_neg > 0 ? static_cast<double>(fp) / cell.n_neg : 0.0;
        if (pos.empty() || neg.empty()) {
            report.warnings.push_back("cell " + cell.scheme + "/" + cell.condition +
                                      " has a single truth class; AUC omitted");
        } else {
            RocCurve curve = roc_auc(pos, neg);
            cell.auc = curve.auc;
            cell.roc = std::move(curve.points);
        }
        report.cells.push_back(std::move(cell));
    }
    return report;
}

}  // namespace wmlab
