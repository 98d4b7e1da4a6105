#pragma once

// Minimal SVG plotting for ROC curves. Self-contained files, fixed
// palette, enough for eyeballing curves next to the diagonal.

#include <fstream>
#include <string>
#include <vector>

#include "simtree/eval.hpp"

namespace simtree {

struct NamedCurve {
    std::string name;
    RocCurve curve;
};

inline void write_roc_svg(const std::string& path, const std::vector<NamedCurve>& curves,
                          const std::string& title = "ROC") {
    if (curves.empty()) throw Error("nothing to plot");
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const double W = 560, H = 560, m = 60;  // canvas and margin
    const double pw = W - 2 * m, ph = H - 2 * m;
    auto sx = [&](double a) { return m + a * pw; };
    auto sy = [&](double b) { return H - m - b * ph; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open \"" + path + "\" for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << title << "</text>\n";

    // frame, gridlines, tick labels at 0, .25, .5, .75, 1
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double t = i / 4.0;
        out << "<line x1=\"" << sx(t) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(t) << "\" y2=\""
            << sy(1) << "\" stroke=\"#ddd\"/>\n";
        out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(t) << "\" x2=\"" << sx(1) << "\" y2=\""
            << sy(t) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << sx(t) << "\" y=\"" << sy(0) + 18 << "\" text-anchor=\"middle\">"
            << fmt_double(t) << "</text>\n";
        out << "<text x=\"" << sx(0) - 8 << "\" y=\"" << sy(t) + 4 << "\" text-anchor=\"end\">"
            << fmt_double(t) << "</text>\n";
    }
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\">false positive rate</text>\n";
    out << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << H / 2 << ")\">true positive rate</text>\n";
    out << "</g>\n";
    out << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1) << "\" y2=\""
        << sy(1) << "\" stroke=\"#aaa\" stroke-dasharray=\"4 3\"/>\n";
    out << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (const auto& k : curves[c].curve.knots())
            out << fmt_double(sx(k.alpha)) << ',' << fmt_double(sy(k.beta)) << ' ';
        out << "\"/>\n";
        const double ly = m + 16 + 18 * double(c);
        out << "<line x1=\"" << sx(0.55) << "\" y1=\"" << ly << "\" x2=\"" << sx(0.55) + 26
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>\n";
        out << "<text x=\"" << sx(0.55) + 32 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << curves[c].name << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw Error("failed while writing \"" + path + "\"");
}

}  // namespace simtree
