#include "atam/svg.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace atam {

namespace {

constexpr int kCell = 28;
constexpr int kPad = 12;
constexpr int kLegendRow = 18;

struct Bounds {
    int xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

template <typename It>
Bounds bounds_of(It begin, It end) {
    Bounds b{begin->first.x, begin->first.x, begin->first.y, begin->first.y};
    for (It it = begin; it != end; ++it) {
        b.xmin = std::min(b.xmin, it->first.x);
        b.xmax = std::max(b.xmax, it->first.x);
        b.ymin = std::min(b.ymin, it->first.y);
        b.ymax = std::max(b.ymax, it->first.y);
    }
    return b;
}

class Doc {
  public:
    Doc(const Bounds& b, int legend_rows)
        : b_(b),
          width_(kPad * 2 + (b.xmax - b.xmin + 1) * kCell),
          height_(kPad * 2 + (b.ymax - b.ymin + 1) * kCell + legend_rows * kLegendRow +
                  (legend_rows ? kPad : 0)) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
             << height_ << "\" font-family=\"monospace\" font-size=\"11\">\n";
        out_ << "<rect width=\"" << width_ << "\" height=\"" << height_ << "\" fill=\"white\"/>\n";
    }

    // y grows upward in assemblies, downward in SVG.
    int px(int x) const { return kPad + (x - b_.xmin) * kCell; }
    int py(int y) const { return kPad + (b_.ymax - y) * kCell; }

    void cell(int x, int y, const std::string& fill, const std::string& label, bool heavy) {
        out_ << "<rect x=\"" << px(x) << "\" y=\"" << py(y) << "\" width=\"" << kCell
             << "\" height=\"" << kCell << "\" fill=\"" << fill << "\" stroke=\"black\""
             << (heavy ? " stroke-width=\"2.5\"" : " stroke-width=\"1\"") << "/>\n";
        if (!label.empty())
            out_ << "<text x=\"" << px(x) + kCell / 2 << "\" y=\"" << py(y) + kCell / 2 + 4
                 << "\" text-anchor=\"middle\">" << label << "</text>\n";
    }

    void legend_row(int row, const std::string& fill, const std::string& text) {
        int y = kPad + (b_.ymax - b_.ymin + 1) * kCell + kPad + row * kLegendRow;
        out_ << "<rect x=\"" << kPad << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\""
             << fill << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        out_ << "<text x=\"" << kPad + 18 << "\" y=\"" << y + 10 << "\">" << text << "</text>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

  private:
    Bounds b_;
    int width_, height_;
    std::ostringstream out_;
};

std::string short_label(const std::string& name) {
    return name.size() <= 3 ? name : name.substr(0, 3);
}

}  // namespace

std::string tile_color(int tile_index) {
    // golden-angle hue walk keeps neighbors distinguishable for any count
    int hue = (tile_index * 137) % 360;
    std::ostringstream out;
    out << "hsl(" << hue << ",70%,75%)";
    return out.str();
}

std::string render_svg(const TAS& sys, const Assembly& a) {
    const Assembly& cells = a.empty() ? sys.seed : a;
    Doc doc(bounds_of(cells.begin(), cells.end()), static_cast<int>(sys.tiles.size()));
    std::set<int> used;
    for (const auto& [p, t] : cells) {
        doc.cell(p.x, p.y, tile_color(t), short_label(sys.tiles[t].name), sys.seed.count(p) != 0);
        used.insert(t);
    }
    int row = 0;
    for (int t = 0; t < static_cast<int>(sys.tiles.size()); ++t)
        doc.legend_row(row++, tile_color(t),
                       sys.tiles[t].name + (used.count(t) ? "" : " (unused)"));
    return doc.finish();
}

std::string render_svg(const TAS& sys, const LatticeState& st) {
    if (st.sites.empty()) return render_svg(sys, sys.seed);
    Doc doc(bounds_of(st.sites.begin(), st.sites.end()),
            static_cast<int>(sys.tiles.size()) + 2);
    for (const auto& [p, site] : st.sites) {
        if (site.resolved >= 0)
            doc.cell(p.x, p.y, tile_color(site.resolved),
                     short_label(sys.tiles[site.resolved].name), sys.seed.count(p) != 0);
        else if (site.config_final)
            doc.cell(p.x, p.y, "#c8c8c8", "", false);
        else
            doc.cell(p.x, p.y, "#efefef", "", false);
    }
    int row = 0;
    for (int t = 0; t < static_cast<int>(sys.tiles.size()); ++t)
        doc.legend_row(row++, tile_color(t), sys.tiles[t].name);
    doc.legend_row(row++, "#c8c8c8", "frame finalized, unresolved");
    doc.legend_row(row++, "#efefef", "touched, frame incomplete");
    return doc.finish();
}

}  // namespace atam
