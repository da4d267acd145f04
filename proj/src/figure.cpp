#include "hwretail/figure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "hwretail/error.hpp"

namespace hwretail {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr std::string_view kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                         "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
                                         "#8c6d31", "#843c39", "#7b4173", "#3182bd"};

std::string esc(std::string_view s) {
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

struct Axes {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string header(std::string_view title) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
      kWidth, kHeight, kWidth, kHeight, (kLeft + kWidth - kRight) / 2, esc(title));
}

std::string frame(const Axes& ax, std::string_view xlabel, std::string_view ylabel, int xticks, int yticks) {
  std::string s = fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
                              kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
  for (int i = 0; i <= xticks; ++i) {
    const double v = ax.x0 + (ax.x1 - ax.x0) * i / xticks;
    const double x = ax.px(v);
    s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", x,
                     kHeight - kBottom, kHeight - kBottom + 5);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.2f}</text>\n", x,
                     kHeight - kBottom + 18, v);
  }
  for (int i = 0; yticks > 0 && i <= yticks; ++i) {
    const double v = ax.y0 + (ax.y1 - ax.y0) * i / yticks;
    const double y = ax.py(v);
    s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n",
                     kLeft - 5, y, kLeft);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n", kLeft - 8, y + 4, v);
  }
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                   (kLeft + kWidth - kRight) / 2, kHeight - 15, esc(xlabel));
  s += fmt::format("<text x=\"18\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.1f})\">{1}</text>\n",
                   (kTop + kHeight - kBottom) / 2, esc(ylabel));
  return s;
}

std::string legend_entry(int row, std::string_view color, std::string_view label, std::string_view dash = {}) {
  const double x = kWidth - kRight + 15;
  const double y = kTop + 10 + 20 * row;
  std::string s;
  if (dash.empty())
    s = fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"14\" height=\"10\" fill=\"{}\"/>\n", x, y - 5, color);
  else
    s = fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" stroke-width=\"2\" stroke-dasharray=\"{4}\"/>\n",
                    x, y, x + 14, color, dash);
  s += fmt::format("<text class=\"legend\" x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", x + 20, y + 4, esc(label));
  return s;
}

std::string segment(const Axes& ax, double xa, double ya, double xb, double yb, std::string_view color, bool dashed) {
  return fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
                     ax.px(xa), ax.py(ya), ax.px(xb), ax.py(yb), color, dashed ? " stroke-dasharray=\"6 4\"" : "");
}

std::string vline(const Axes& ax, double x, std::string_view color, std::string_view label) {
  if (!std::isfinite(x) || x < ax.x0 || x > ax.x1) return {};
  return fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.1f}\" x2=\"{0:.2f}\" y2=\"{2:.1f}\" stroke=\"{3}\" stroke-dasharray=\"2 3\"/>\n"
                     "<text x=\"{0:.2f}\" y=\"{4:.1f}\" text-anchor=\"middle\" fill=\"{3}\">{5}</text>\n",
                     ax.px(x), kTop, kHeight - kBottom, color, kTop - 4, esc(label));
}

}  // namespace

std::string_view to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::bifurcation: return "bifurcation";
    case FigureKind::partition_heatmap: return "partition_heatmap";
    case FigureKind::range_chart: return "range_chart";
  }
  return "bifurcation";
}

FigureKind parse_figure_kind(std::string_view name) {
  if (name == "bifurcation") return FigureKind::bifurcation;
  if (name == "partition_heatmap" || name == "partition") return FigureKind::partition_heatmap;
  if (name == "range_chart" || name == "ranges") return FigureKind::range_chart;
  throw Error(fmt::format("unknown figure kind '{}'", name));
}

std::string bifurcation_svg(const Bifurcation& b) {
  if (b.rows.empty()) throw Error("bifurcation figure needs at least one row");
  const Axes ax{b.rows.front().phi, b.rows.back().phi > b.rows.front().phi ? b.rows.back().phi : b.rows.front().phi + 1,
                0.0, 1.0};
  std::string s = header(fmt::format("Two-zone equilibria, alpha = {:g}", b.alpha));
  s += frame(ax, "phi", "x_1", 5, 4);
  constexpr std::string_view disp = "#1f77b4";
  constexpr std::string_view corner = "#d62728";
  for (std::size_t i = 0; i + 1 < b.rows.size(); ++i) {
    const auto& r = b.rows[i];
    const auto& n = b.rows[i + 1];
    s += segment(ax, r.phi, 0.5, n.phi, 0.5, disp, r.dispersion != Verdict::stable || n.dispersion != Verdict::stable);
    const bool c_dash = r.corner != Verdict::stable || n.corner != Verdict::stable;
    s += segment(ax, r.phi, 1.0, n.phi, 1.0, corner, c_dash);
    s += segment(ax, r.phi, 0.0, n.phi, 0.0, corner, c_dash);
  }
  for (const auto& r : b.rows) {
    const double y = r.winner == "dispersion" ? 0.5 : 1.0;
    s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"black\"/>\n", ax.px(r.phi), ax.py(y));
  }
  s += vline(ax, b.phi_star, "#555555", "phi*");
  s += vline(ax, b.phi_double_star, "#000000", "phi**");
  s += legend_entry(0, disp, "dispersion");
  s += legend_entry(1, corner, "agglomeration");
  s += legend_entry(2, "#000000", "stable", "none");
  s += legend_entry(3, "#000000", "unstable", "6 4");
  s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"black\"/>\n", kWidth - kRight + 22,
                   kTop + 10 + 20 * 4);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">global maximizer</text>\n", kWidth - kRight + 35,
                   kTop + 14 + 20 * 4);
  s += "</svg>\n";
  return s;
}

std::size_t partition_legend_size(std::span<const PartitionCell> cells) {
  std::set<int> ms;
  for (const auto& c : cells) ms.insert(c.winner_M);
  return ms.size();
}

std::string partition_svg(std::span<const PartitionCell> cells, std::string_view title) {
  if (cells.empty()) throw Error("partition figure needs at least one cell");
  std::set<double> phis, alphas;
  std::set<int> ms;
  for (const auto& c : cells) {
    phis.insert(c.phi);
    alphas.insert(c.alpha);
    ms.insert(c.winner_M);
  }
  const std::vector<double> pv(phis.begin(), phis.end());
  const std::vector<double> av(alphas.begin(), alphas.end());
  const double dphi = pv.size() > 1 ? pv[1] - pv[0] : 0.02;
  const double dalpha = av.size() > 1 ? av[1] - av[0] : 0.1;
  const Axes ax{pv.front() - dphi / 2, pv.back() + dphi / 2, av.front() - dalpha / 2, av.back() + dalpha / 2};

  std::vector<int> order(ms.rbegin(), ms.rend());  // legend lists large M first
  auto color_of = [&](int m) {
    const auto pos = static_cast<std::size_t>(std::find(order.begin(), order.end(), m) - order.begin());
    return kPalette[pos % std::size(kPalette)];
  };
  std::string s = header(title);
  for (const auto& c : cells) {
    const double x0 = ax.px(c.phi - dphi / 2), x1 = ax.px(c.phi + dphi / 2);
    const double y0 = ax.py(c.alpha + dalpha / 2), y1 = ax.py(c.alpha - dalpha / 2);
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", x0, y0,
                     x1 - x0, y1 - y0, color_of(c.winner_M));
  }
  s += frame(ax, "phi", "alpha", 5, 4);
  for (std::size_t i = 0; i < order.size(); ++i)
    s += legend_entry(static_cast<int>(i), color_of(order[i]), fmt::format("M = {}", order[i]));
  s += "</svg>\n";
  return s;
}

std::string range_chart_svg(const StabilityRanges& ranges, std::string_view title) {
  if (ranges.patterns.empty() || ranges.phi_grid.empty()) throw Error("range chart needs at least one pattern");
  std::vector<const PatternRange*> rows;
  for (const auto& p : ranges.patterns) rows.push_back(&p);
  std::stable_sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->M > b->M; });
  const double lo = ranges.phi_grid.front();
  const double hi = ranges.phi_grid.size() > 1 ? ranges.phi_grid.back() : lo + 1;
  const double n = static_cast<double>(rows.size());
  const Axes ax{lo, hi, 0.0, n};
  std::string s = header(title);
  const double band = (kHeight - kTop - kBottom) / n;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double ytop = ax.py(n - static_cast<double>(i));
    for (const auto& iv : rows[i]->stable)
      s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#9ecae1\"/>\n",
                       ax.px(iv.lo), ytop + band * 0.1, std::max(0.5, ax.px(iv.hi) - ax.px(iv.lo)), band * 0.8);
    for (const auto& iv : rows[i]->global)
      s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#08519c\"/>\n",
                       ax.px(iv.lo), ytop + band * 0.3, std::max(0.5, ax.px(iv.hi) - ax.px(iv.lo)), band * 0.4);
    if (rows.size() <= 40)
      s += fmt::format("<text x=\"{:.1f}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"9\">{:02d} (M={})</text>\n",
                       kLeft - 4, ytop + band * 0.5 + 3, rows[i]->id, rows[i]->M);
  }
  s += frame(ax, "phi", "", 5, 0);
  s += legend_entry(0, "#9ecae1", "locally stable");
  s += legend_entry(1, "#08519c", "global maximizer");
  s += "</svg>\n";
  return s;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace hwretail
