#pragma once

#include <span>
#include <string>

#include "stylo/experiments.hpp"

namespace stylo {

/// SVG line chart of mean accuracy against candidate pool size, one series
/// per strategy, with vertical bars spanning each 95% interval. Rows are
/// grouped by strategy in first-appearance order.
std::string accuracy_chart_svg(std::span<const SummaryRow> rows, const std::string& title);

}  // namespace stylo
