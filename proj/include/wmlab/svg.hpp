#pragma once
// Minimal deterministic SVG emission for ROC curves, bar charts, and
// correlation heatmaps. No external renderer; plain shapes and text.

#include <string>
#include <vector>

#include "wmlab/evaluation.hpp"

namespace wmlab::svg {

std::string roc_chart(const std::string& title, const std::vector<RocPoint>& points,
                      const std::string& comment = "");

struct BarGroup {
    std::string label;                 // x-axis label (e.g. scheme)
    std::vector<double> values;        // one per series
};

std::string bar_chart(const std::string& title, const std::vector<std::string>& series,
                      const std::vector<BarGroup>& groups, const std::string& comment = "");

// values[row][col]; NaN cells render hollow.
std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels,
                    const std::vector<std::vector<double>>& values,
                    const std::string& comment = "");

}  // namespace wmlab::svg
