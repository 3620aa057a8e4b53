#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>

#include "modelcmp/errors.hpp"
#include "modelcmp/report.hpp"

namespace modelcmp {

namespace {

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string f4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Svg {
  std::ostringstream body;

  void open(double width, double height) {
    body << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(width)
         << "\" height=\"" << f2(height) << "\" viewBox=\"0 0 " << f2(width) << " "
         << f2(height) << "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
    body << "<rect width=\"" << f2(width) << "\" height=\"" << f2(height)
         << "\" fill=\"white\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const char* stroke,
            double width) {
    body << "<line x1=\"" << f2(x1) << "\" y1=\"" << f2(y1) << "\" x2=\"" << f2(x2)
         << "\" y2=\"" << f2(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
         << f2(width) << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill,
            const char* stroke = "none") {
    body << "<rect x=\"" << f2(x) << "\" y=\"" << f2(y) << "\" width=\"" << f2(w)
         << "\" height=\"" << f2(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
         << "\"/>\n";
  }
  void circle(double cx, double cy, double r, const char* fill,
              const char* extra = "") {
    body << "<circle cx=\"" << f2(cx) << "\" cy=\"" << f2(cy) << "\" r=\"" << f2(r)
         << "\" fill=\"" << fill << "\"" << extra << "/>\n";
  }
  void text(double x, double y, const std::string& content, double size,
            const char* anchor = "start", const char* extra = "") {
    body << "<text x=\"" << f2(x) << "\" y=\"" << f2(y) << "\" font-size=\""
         << f2(size) << "\" text-anchor=\"" << anchor << "\"" << extra << ">"
         << xml_escape(content) << "</text>\n";
  }
  std::string close() {
    body << "</svg>\n";
    return body.str();
  }
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> cd_rank_groups(
    const std::vector<double>& sorted_ranks, double cd) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  const std::size_t k = sorted_ranks.size();
  std::size_t prev_end = 0;
  bool have_prev = false;
  for (std::size_t a = 0; a < k; ++a) {
    std::size_t b = a;
    while (b + 1 < k && sorted_ranks[b + 1] - sorted_ranks[a] <= cd) ++b;
    if (b > a && (!have_prev || b > prev_end)) {
      groups.emplace_back(a, b);
      prev_end = b;
      have_prev = true;
    }
  }
  return groups;
}

std::vector<std::size_t> performance_order(const std::vector<double>& means,
                                           bool higher_is_better) {
  std::vector<std::size_t> order(means.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (means[a] != means[b])
      return higher_is_better ? means[a] > means[b] : means[a] < means[b];
    return a < b;
  });
  return order;
}

std::string cd_diagram(const std::vector<double>& avg_ranks, double cd,
                       const std::vector<std::string>& labels) {
  const std::size_t k = avg_ranks.size();
  if (k < 2 || labels.size() != k)
    throw ValidationError("cd_diagram: need k >= 2 ranks with matching labels");
  for (double r : avg_ranks)
    if (!std::isfinite(r)) throw ValidationError("cd_diagram: non-finite rank");

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (avg_ranks[a] != avg_ranks[b]) return avg_ranks[a] < avg_ranks[b];
    return labels[a] < labels[b];
  });
  std::vector<double> sorted_ranks(k);
  for (std::size_t i = 0; i < k; ++i) sorted_ranks[i] = avg_ranks[order[i]];

  const auto groups = cd_rank_groups(sorted_ranks, cd);

  const bool condensed = k > 40;
  const double width = 960.0;
  const double ml = 40.0, mr = 40.0;
  const double axis_span = width - ml - mr;
  auto x_of = [&](double rank) {
    return ml + (rank - 1.0) / (static_cast<double>(k) - 1.0) * axis_span;
  };

  // Bars stack above the axis; labels hang below.
  std::vector<std::size_t> bar_level(groups.size(), 0);
  std::size_t max_level = 0;
  {
    std::vector<double> level_end;  // rightmost rank drawn on each level
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::size_t lvl = 0;
      while (lvl < level_end.size() && sorted_ranks[groups[g].first] <= level_end[lvl])
        ++lvl;
      if (lvl == level_end.size()) level_end.push_back(0.0);
      level_end[lvl] = sorted_ranks[groups[g].second];
      bar_level[g] = lvl;
      max_level = std::max(max_level, lvl);
    }
  }

  const double bars_height = 16.0 + 9.0 * static_cast<double>(max_level + (groups.empty() ? 0 : 1));
  const double axis_y = 40.0 + bars_height;

  double height;
  const std::size_t columns = condensed ? 4 : 2;
  const std::size_t rows = (k + columns - 1) / columns;
  const double label_row_h = condensed ? 14.0 : 18.0;
  if (condensed) {
    height = axis_y + 40.0 + static_cast<double>(rows) * label_row_h + 20.0;
  } else {
    height = axis_y + 30.0 + static_cast<double>(rows) * label_row_h + 20.0;
  }

  Svg svg;
  svg.open(width, height);
  svg.text(ml, 20.0, "Critical difference diagram (CD = " + f4(cd) + ")", 13.0);

  // Axis with integer ticks.
  svg.line(x_of(1.0), axis_y, x_of(static_cast<double>(k)), axis_y, "black", 1.5);
  const std::size_t tick_step = std::max<std::size_t>(1, (k + 23) / 24);
  for (std::size_t t = 1; t <= k; t += tick_step) {
    const double x = x_of(static_cast<double>(t));
    svg.line(x, axis_y, x, axis_y - 5.0, "black", 1.0);
    svg.text(x, axis_y - 8.0, std::to_string(t), 9.0, "middle");
  }

  // CD scale bar at the top left.
  svg.line(x_of(1.0), 30.0, x_of(1.0 + cd), 30.0, "#555555", 2.0);
  svg.text(x_of(1.0), 26.0, "CD", 9.0);

  // Group bars: the group containing the best-ranked model is highlighted.
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const bool holds_best = groups[g].first == 0;
    const double y = axis_y - 14.0 - 9.0 * static_cast<double>(bar_level[g]);
    svg.line(x_of(sorted_ranks[groups[g].first]) - 2.0, y,
             x_of(sorted_ranks[groups[g].second]) + 2.0, y,
             holds_best ? "#ff7f00" : "#000000", holds_best ? 5.0 : 4.0);
  }

  // Model markers on the axis.
  for (std::size_t i = 0; i < k; ++i)
    svg.circle(x_of(sorted_ranks[i]), axis_y, 2.0, "black");

  if (condensed) {
    // Multi-column label grid, rank-sorted, no connector lines: the classic
    // two-sided layout is illegible at this scale.
    const double grid_top = axis_y + 30.0;
    const double col_w = (width - ml - mr) / static_cast<double>(columns);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t col = i / rows;
      const std::size_t row = i % rows;
      const double x = ml + static_cast<double>(col) * col_w;
      const double y = grid_top + static_cast<double>(row) * label_row_h;
      svg.text(x, y, f4(sorted_ranks[i]) + "  " + labels[order[i]], 10.0);
    }
  } else {
    // Two-sided layout: better half descends on the left, worse half on the
    // right, with elbow connectors to the axis positions.
    const std::size_t half = (k + 1) / 2;
    const double label_top = axis_y + 30.0;
    for (std::size_t i = 0; i < k; ++i) {
      const bool left = i < half;
      const double row = static_cast<double>(left ? i : k - 1 - i);
      const double y = label_top + row * label_row_h;
      const double x_axis = x_of(sorted_ranks[i]);
      const double x_label = left ? ml : width - mr;
      svg.line(x_axis, axis_y, x_axis, y - 4.0, "#888888", 0.75);
      svg.line(x_axis, y - 4.0, x_label, y - 4.0, "#888888", 0.75);
      svg.text(left ? ml : width - mr, y, labels[order[i]] + " (" + f4(sorted_ranks[i]) + ")",
               11.0, left ? "start" : "end");
    }
  }
  return svg.close();
}

std::string windowpane(const DecisionMatrix& matrix,
                       const std::vector<std::size_t>& order) {
  const std::size_t k = matrix.models.size();
  if (order.size() != k) throw ValidationError("windowpane: bad ordering size");

  const double cell = std::max(8.0, std::min(36.0, 900.0 / static_cast<double>(k)));
  const bool labeled = cell >= 12.0;
  const double ml = labeled ? 170.0 : 50.0;
  const double mt = labeled ? 120.0 : 60.0;
  const double legend_h = 40.0;
  const double width = ml + cell * static_cast<double>(k) + 30.0;
  const double height = mt + cell * static_cast<double>(k) + legend_h + 30.0;

  auto fill_of = [](Verdict v) -> const char* {
    switch (v) {
      case Verdict::x_better: return "#3182bd";
      case Verdict::y_better: return "#de2d26";
      case Verdict::rope: return "#31a354";
      case Verdict::no_decision: return "#f7f7f7";
    }
    return "#f7f7f7";
  };
  auto glyph_of = [](Verdict v) -> const char* {
    switch (v) {
      case Verdict::x_better: return ">";
      case Verdict::y_better: return "<";
      case Verdict::rope: return "=";
      case Verdict::no_decision: return "";
    }
    return "";
  };

  Svg svg;
  svg.open(width, height);
  svg.text(ml, 24.0, "Pairwise decisions (row vs column, decreasing performance)",
           13.0);

  for (std::size_t rr = 0; rr < k; ++rr) {
    for (std::size_t cc = 0; cc < k; ++cc) {
      const Verdict v = matrix.cell(order[rr], order[cc]);
      const double x = ml + cell * static_cast<double>(cc);
      const double y = mt + cell * static_cast<double>(rr);
      svg.rect(x, y, cell, cell, fill_of(v), "#cccccc");
      if (cell >= 14.0) {
        // Rank of the column model plus the verdict glyph.
        const std::string text = std::to_string(cc + 1) + glyph_of(v);
        const char* color = v == Verdict::no_decision ? " fill=\"#666666\"" : " fill=\"white\"";
        svg.text(x + cell / 2.0, y + cell / 2.0 + 3.5, text, std::min(10.0, cell / 2.5),
                 "middle", color);
      }
    }
  }

  if (labeled) {
    for (std::size_t rr = 0; rr < k; ++rr) {
      svg.text(ml - 6.0, mt + cell * (static_cast<double>(rr) + 0.5) + 3.0,
               std::to_string(rr + 1) + ". " + matrix.models[order[rr]],
               std::min(10.0, cell - 3.0), "end");
    }
    for (std::size_t cc = 0; cc < k; ++cc) {
      const double x = ml + cell * (static_cast<double>(cc) + 0.5);
      svg.body << "<text x=\"" << f2(x) << "\" y=\"" << f2(mt - 6.0)
               << "\" font-size=\"" << f2(std::min(10.0, cell - 3.0))
               << "\" text-anchor=\"start\" transform=\"rotate(-60 " << f2(x) << " "
               << f2(mt - 6.0) << ")\">" << xml_escape(matrix.models[order[cc]])
               << "</text>\n";
    }
  }

  const double ly = mt + cell * static_cast<double>(k) + 24.0;
  const struct {
    Verdict v;
    const char* name;
  } entries[] = {{Verdict::x_better, "row better (>)"},
                 {Verdict::y_better, "column better (<)"},
                 {Verdict::rope, "practically equivalent (=)"},
                 {Verdict::no_decision, "no decision"}};
  double lx = ml;
  for (const auto& e : entries) {
    svg.rect(lx, ly - 10.0, 12.0, 12.0, fill_of(e.v), "#999999");
    svg.text(lx + 16.0, ly, e.name, 10.0);
    lx += 16.0 + 7.0 * static_cast<double>(std::string(e.name).size()) + 24.0;
  }
  return svg.close();
}

std::string simplex_plot(std::span<const SimplexPoint> samples, double rope,
                         const std::string& title) {
  const double width = 600.0, height = 560.0;
  const double side = 460.0;
  const double base_y = 470.0;
  const double lx = (width - side) / 2.0, rx = lx + side;
  const double apex_y = base_y - side * std::sqrt(3.0) / 2.0;
  const double vleft[2] = {lx, base_y};
  const double vright[2] = {rx, base_y};
  const double vtop[2] = {(lx + rx) / 2.0, apex_y};

  auto project = [&](const SimplexPoint& p, double& x, double& y) {
    x = p.p_left * vleft[0] + p.p_rope * vtop[0] + p.p_right * vright[0];
    y = p.p_left * vleft[1] + p.p_rope * vtop[1] + p.p_right * vright[1];
  };

  std::size_t n_left = 0, n_rope = 0, n_right = 0;
  for (const auto& p : samples) {
    if (p.p_rope >= p.p_left && p.p_rope >= p.p_right) ++n_rope;
    else if (p.p_left >= p.p_right) ++n_left;
    else ++n_right;
  }
  const double total = std::max<std::size_t>(1, samples.size());

  Svg svg;
  svg.open(width, height);
  svg.text(width / 2.0, 22.0,
           title.empty() ? "Posterior simplex (ROPE = " + f4(rope) + ")"
                         : title + " (ROPE = " + f4(rope) + ")",
           13.0, "middle");

  // Triangle and the three sector boundaries (centroid to edge midpoints).
  svg.body << "<polygon points=\"" << f2(vleft[0]) << "," << f2(vleft[1]) << " "
           << f2(vright[0]) << "," << f2(vright[1]) << " " << f2(vtop[0]) << ","
           << f2(vtop[1]) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  const double cx = (vleft[0] + vright[0] + vtop[0]) / 3.0;
  const double cy = (vleft[1] + vright[1] + vtop[1]) / 3.0;
  svg.line(cx, cy, (vleft[0] + vright[0]) / 2.0, (vleft[1] + vright[1]) / 2.0,
           "#999999", 1.0);
  svg.line(cx, cy, (vleft[0] + vtop[0]) / 2.0, (vleft[1] + vtop[1]) / 2.0, "#999999",
           1.0);
  svg.line(cx, cy, (vright[0] + vtop[0]) / 2.0, (vright[1] + vtop[1]) / 2.0, "#999999",
           1.0);

  for (const auto& p : samples) {
    double x = 0.0, y = 0.0;
    project(p, x, y);
    svg.circle(x, y, 1.6, "#1f3b70", " opacity=\"0.25\"");
  }

  svg.text(vleft[0] - 4.0, vleft[1] + 16.0, "p(X > Y)", 12.0, "start");
  svg.text(vright[0] + 4.0, vright[1] + 16.0, "p(X < Y)", 12.0, "end");
  svg.text(vtop[0], vtop[1] - 8.0, "p(ROPE)", 12.0, "middle");

  svg.text(width / 2.0, height - 36.0,
           "sample proportions: left " + f4(static_cast<double>(n_left) / total) +
               ", rope " + f4(static_cast<double>(n_rope) / total) + ", right " +
               f4(static_cast<double>(n_right) / total),
           11.0, "middle");
  return svg.close();
}

}  // namespace modelcmp
