#include "hawkes/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "hawkes/likelihood.hpp"

namespace hawkes {

namespace {

std::string fixed(double x, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

// Maps data coordinates into a plotting rectangle.
struct Frame {
    double left, top, width, height;
    double x0, x1, y0, y1;

    double x(double v) const { return left + (v - x0) / (x1 - x0) * width; }
    double y(double v) const { return top + height - (v - y0) / (y1 - y0) * height; }
};

void axes(std::ostringstream& svg, const Frame& f, const std::string& title, const std::string& xlabel,
          const std::string& ylabel) {
    svg << "<rect x=\"" << fixed(f.left) << "\" y=\"" << fixed(f.top) << "\" width=\"" << fixed(f.width)
        << "\" height=\"" << fixed(f.height) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << fixed(f.left + f.width / 2) << "\" y=\"" << fixed(f.top - 8)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
    svg << "<text x=\"" << fixed(f.left + f.width / 2) << "\" y=\"" << fixed(f.top + f.height + 30)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << xlabel << "</text>\n";
    svg << "<text x=\"" << fixed(f.left - 38) << "\" y=\"" << fixed(f.top + f.height / 2)
        << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " << fixed(f.left - 38) << ' '
        << fixed(f.top + f.height / 2) << ")\">" << ylabel << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
        svg << "<text x=\"" << fixed(f.x(xv)) << "\" y=\"" << fixed(f.top + f.height + 14)
            << "\" text-anchor=\"middle\" font-size=\"9\">" << fixed(xv) << "</text>\n";
        svg << "<text x=\"" << fixed(f.left - 4) << "\" y=\"" << fixed(f.y(yv) + 3)
            << "\" text-anchor=\"end\" font-size=\"9\">" << fixed(yv) << "</text>\n";
    }
}

void polyline(std::ostringstream& svg, const Frame& f, const std::vector<double>& xs, const std::vector<double>& ys,
              const std::string& style) {
    svg << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double y = std::clamp(ys[i], f.y0, f.y1);
        svg << (i ? " " : "") << fixed(f.x(xs[i])) << ',' << fixed(f.y(y));
    }
    svg << "\"/>\n";
}

std::string render_svg(const ReportBundle& b) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1080\" height=\"360\" font-family=\"sans-serif\">\n";
    svg << "<rect width=\"1080\" height=\"360\" fill=\"white\"/>\n";

    // Estimated vs fitted kernels
    const auto& c = b.curves;
    double lo = 0.0, hi = 0.0;
    for (const auto* series : {&c.phi_hat, &c.chosen}) {
        for (double v : *series) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi > lo)) hi = lo + 1.0;
    const double tmax = c.t.empty() ? 1.0 : std::max(c.t.back(), 1e-12);
    Frame kf{60, 40, 280, 260, 0.0, tmax, lo, hi + 0.05 * (hi - lo)};
    axes(svg, kf, "Kernel: estimate vs fits", "t", "phi(t)");
    polyline(svg, kf, c.t, c.phi_hat, "stroke=\"#888\" stroke-width=\"1.5\"");
    polyline(svg, kf, c.t, c.k1, "stroke=\"#2a7\" stroke-dasharray=\"4 3\"");
    polyline(svg, kf, c.t, c.k2, "stroke=\"#d82\" stroke-dasharray=\"2 2\"");
    polyline(svg, kf, c.t, c.chosen, "stroke=\"#24c\" stroke-width=\"2\"");
    const std::pair<const char*, const char*> legend[] = {
        {"#888", "estimate"}, {"#2a7", "K1"}, {"#d82", "K2"}, {"#24c", "chosen"}};
    for (std::size_t i = 0; i < 4; ++i) {
        const double y = 56 + 14.0 * static_cast<double>(i);
        svg << "<line x1=\"250\" x2=\"268\" y1=\"" << fixed(y) << "\" y2=\"" << fixed(y) << "\" stroke=\""
            << legend[i].first << "\" stroke-width=\"2\"/><text x=\"272\" y=\"" << fixed(y + 3)
            << "\" font-size=\"10\">" << legend[i].second << "</text>\n";
    }

    // Residues of every candidate
    const auto& audit = b.result.audit;
    double rmax = 0.0;
    for (const auto& f : audit) {
        if (std::isfinite(f.residue)) rmax = std::max(rmax, f.residue);
    }
    if (!(rmax > 0.0)) rmax = 1.0;
    Frame rf{420, 40, 280, 260, 0.0, static_cast<double>(std::max<std::size_t>(audit.size(), 1)), 0.0, rmax * 1.1};
    axes(svg, rf, "Residue per candidate", "", "L1 residue");
    const double slot = rf.width / std::max<std::size_t>(audit.size(), 1);
    for (std::size_t i = 0; i < audit.size(); ++i) {
        const auto& f = audit[i];
        const double r = std::isfinite(f.residue) ? f.residue : 0.0;
        const double x = rf.left + slot * static_cast<double>(i) + 2.0;
        const char* colour = f.verdict.stationary ? "#4a8" : "#c55";
        svg << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(rf.y(r)) << "\" width=\"" << fixed(slot - 4.0)
            << "\" height=\"" << fixed(rf.y(0.0) - rf.y(r)) << "\" fill=\"" << colour << "\"/>\n";
        const double lx = x + (slot - 4.0) / 2;
        svg << "<text x=\"" << fixed(lx) << "\" y=\"" << fixed(rf.top + rf.height + 12)
            << "\" font-size=\"9\" text-anchor=\"end\" transform=\"rotate(-45 " << fixed(lx) << ' '
            << fixed(rf.top + rf.height + 12) << ")\">" << f.label() << "</text>\n";
    }

    // Q-Q in log form
    std::vector<double> lx, ly;
    for (auto [a, o] : b.qq) {
        if (a > 0.0 && o > 0.0) {
            lx.push_back(std::log10(a));
            ly.push_back(std::log10(o));
        }
    }
    double qlo = -3.0, qhi = 1.0;
    if (!lx.empty()) {
        qlo = std::min(*std::min_element(lx.begin(), lx.end()), *std::min_element(ly.begin(), ly.end()));
        qhi = std::max(*std::max_element(lx.begin(), lx.end()), *std::max_element(ly.begin(), ly.end()));
        if (!(qhi > qlo)) qhi = qlo + 1.0;
    }
    Frame qf{780, 40, 260, 260, qlo, qhi, qlo, qhi};
    axes(svg, qf, "Q-Q (log10)", "exponential quantile", "observed quantile");
    svg << "<line x1=\"" << fixed(qf.x(qlo)) << "\" y1=\"" << fixed(qf.y(qlo)) << "\" x2=\"" << fixed(qf.x(qhi))
        << "\" y2=\"" << fixed(qf.y(qhi)) << "\" stroke=\"#aaa\"/>\n";
    for (std::size_t i = 0; i < lx.size(); ++i) {
        svg << "<circle cx=\"" << fixed(qf.x(lx[i])) << "\" cy=\"" << fixed(qf.y(ly[i]))
            << "\" r=\"2\" fill=\"#24c\"/>\n";
    }

    svg << "<text x=\"60\" y=\"350\" font-size=\"11\">chosen: " << chosen_name(b.result.chosen) << " = "
        << describe(b.result.chosen_model().kernel) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace

KernelCurves kernel_curves(const DecompositionResult& result) {
    KernelCurves c;
    const auto chosen = result.chosen_model().kernel;
    for (std::size_t k = 0; k < result.estimate.values.size(); ++k) {
        const double t = result.estimate.time(k);
        c.t.push_back(t);
        c.phi_hat.push_back(result.estimate.values[k]);
        c.k1.push_back(evaluate(result.k1.kernel, t));
        c.k2.push_back(evaluate(result.k2.kernel, t));
        c.chosen.push_back(evaluate(chosen, t));
    }
    return c;
}

std::vector<std::pair<double, double>> qq_pairs(const HawkesModel& model, const EventSequence& events,
                                                std::size_t quantiles) {
    if (quantiles == 0) throw InvalidInput("quantile count must be positive");
    auto inc = compensator_increments(model, events);
    if (inc.size() < 2) throw InvalidInput("Q-Q plot needs at least two events");
    std::sort(inc.begin(), inc.end());

    std::vector<std::pair<double, double>> out;
    out.reserve(quantiles);
    const double n = static_cast<double>(inc.size());
    for (std::size_t i = 0; i < quantiles; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(quantiles);
        const double pos = p * (n - 1.0);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, inc.size() - 1);
        const double observed = inc[lo] + (pos - static_cast<double>(lo)) * (inc[hi] - inc[lo]);
        out.emplace_back(-std::log1p(-p), observed);
    }
    return out;
}

ReportBundle make_report(DecompositionResult result, const EventSequence& events, std::size_t quantiles) {
    ReportBundle b;
    b.curves = kernel_curves(result);
    b.qq = qq_pairs(result.chosen_model(), events, quantiles);
    b.result = std::move(result);
    return b;
}

void emit_report(const ReportBundle& bundle, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw Error("cannot create report directory '" + out_dir.string() + "'" + (ec ? ": " + ec.message() : ""));
    }

    io::write_json(out_dir / "result.json", io::to_json(bundle.result));
    io::Json fits = io::Json::array();
    for (const auto& f : bundle.result.audit) fits.push_back(io::to_json(f));
    io::write_json(out_dir / "fits.json", fits);

    std::ostringstream curves;
    curves << "t,phi_hat,k1,k2,chosen\n";
    const auto& c = bundle.curves;
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        curves << io::format_number(c.t[i]) << ',' << io::format_number(c.phi_hat[i]) << ','
               << io::format_number(c.k1[i]) << ',' << io::format_number(c.k2[i]) << ','
               << io::format_number(c.chosen[i]) << "\n";
    }
    write_text(out_dir / "phi_curves.csv", curves.str());

    std::ostringstream qq;
    qq << "exponential_quantile,observed_quantile\n";
    for (auto [a, o] : bundle.qq) qq << io::format_number(a) << ',' << io::format_number(o) << "\n";
    write_text(out_dir / "qq.csv", qq.str());

    write_text(out_dir / "report.svg", render_svg(bundle));
}

}  // namespace hawkes
