#include "stylo/charts.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

#include "stylo/error.hpp"

namespace stylo {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
                                   "#7f7f7f"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string accuracy_chart_svg(std::span<const SummaryRow> rows, const std::string& title) {
  if (rows.empty()) throw InvalidArgument("no summary rows to plot");
  std::vector<std::string> order;
  std::map<std::string, std::vector<const SummaryRow*>> series;
  std::size_t min_x = rows.front().set_size, max_x = min_x;
  for (const auto& r : rows) {
    if (!series.contains(r.strategy)) order.push_back(r.strategy);
    series[r.strategy].push_back(&r);
    min_x = std::min(min_x, r.set_size);
    max_x = std::max(max_x, r.set_size);
  }
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double span_x = max_x > min_x ? static_cast<double>(max_x - min_x) : 1.0;
  auto px = [&](std::size_t x) { return kLeft + plot_w * static_cast<double>(x - min_x) / span_x; };
  auto py = [&](double y) { return kTop + plot_h * (1.0 - std::clamp(y, 0.0, 1.0)); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
      kWidth, kHeight, kLeft + plot_w / 2, escape(title));

  // Axes, grid and ticks.
  for (int i = 0; i <= 10; i += 2) {
    const double y = py(i / 10.0);
    svg += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", kLeft, y,
                       kLeft + plot_w, y);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n", kLeft - 6, y + 4,
                       i / 10.0);
  }
  std::vector<std::size_t> xs;
  for (const auto& r : rows) xs.push_back(r.set_size);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (std::size_t x : xs)
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", px(x),
                       kTop + plot_h + 18, x);
  svg += fmt::format(
      "<path d=\"M{0:.1f} {1:.1f} V{2:.1f} H{3:.1f}\" fill=\"none\" stroke=\"black\"/>\n"
      "<text x=\"{4:.1f}\" y=\"{5:.1f}\" text-anchor=\"middle\">Number of candidate authors</text>\n"
      "<text transform=\"translate(16 {6:.1f}) rotate(-90)\" text-anchor=\"middle\">Accuracy</text>\n",
      kLeft, kTop, kTop + plot_h, kLeft + plot_w, kLeft + plot_w / 2, kHeight - 10, kTop + plot_h / 2);

  for (std::size_t s = 0; s < order.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    auto pts = series[order[s]];
    std::stable_sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->set_size < b->set_size; });
    std::string path;
    for (const auto* p : pts) {
      path += fmt::format("{}{:.1f} {:.1f} ", path.empty() ? "M" : "L", px(p->set_size), py(p->mean));
      svg += fmt::format(
          "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"{3}\"/>\n"
          "<circle cx=\"{0:.1f}\" cy=\"{4:.1f}\" r=\"3\" fill=\"{3}\"/>\n",
          px(p->set_size), py(p->ci_low), py(p->ci_high), color, py(p->mean));
    }
    svg += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", path, color);
    const double ly = kTop + 10 + 18 * static_cast<double>(s);
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n"
        "<text x=\"{4:.1f}\" y=\"{5:.1f}\">{6}</text>\n",
        kLeft + plot_w + 14, ly, kLeft + plot_w + 34, color, kLeft + plot_w + 40, ly + 4, escape(order[s]));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace stylo
