#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "torres/grid.hpp"
#include "torres/version.hpp"

namespace torres {

/// Fixed float formatting for every CSV cell: 17 significant digits,
/// '.' decimal separator, no locale. Identical inputs give identical
/// bytes.
inline std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvRow {
    std::string kind;  // "resonance" | "viscous"
    int n = 0;
    std::optional<double> theta;
    std::optional<double> nu;
    double re = 0.0, im = 0.0;
    double residual = 0.0;
    std::optional<int> path_id;
    bool in_window = true;
};

struct CsvProvenance {
    int grid_n = 0;
    std::string symbol;
    std::string g0;
    bool full_mode_laplacian = false;
    std::int64_t seed = 0;
};

inline void write_rows_csv(const std::filesystem::path& path, const CsvProvenance& prov,
                           std::vector<CsvRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
        if (a.kind != b.kind) return a.kind < b.kind;  // "resonance" < "viscous"
        if (a.n != b.n) return a.n < b.n;
        const double ta = a.theta.value_or(-1.0), tb = b.theta.value_or(-1.0);
        if (ta != tb) return ta < tb;
        const int pa = a.path_id.value_or(-1), pb = b.path_id.value_or(-1);
        if (pa != pb) return pa < pb;
        const double na = a.nu.value_or(-1.0), nb = b.nu.value_or(-1.0);
        if (na != nb) return na > nb;  // sweep order: decreasing nu
        if (a.re != b.re) return a.re < b.re;
        return a.im < b.im;
    });
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "# torres " << kVersion << "\n";
    out << "# N=" << prov.grid_n << "\n";
    out << "# symbol=" << prov.symbol << "\n";
    out << "# g0=" << prov.g0 << "\n";
    out << "# full_mode_laplacian=" << (prov.full_mode_laplacian ? 1 : 0) << "\n";
    out << "# seed=" << prov.seed << "\n";
    out << "kind,n,theta,nu,re_lambda,im_lambda,residual,path_id,in_window\n";
    for (const CsvRow& r : rows) {
        out << r.kind << ',' << r.n << ',';
        if (r.theta) out << format17(*r.theta);
        out << ',';
        if (r.nu) out << format17(*r.nu);
        out << ',' << format17(r.re) << ',' << format17(r.im) << ',' << format17(r.residual)
            << ',';
        if (r.path_id) out << *r.path_id;
        out << ',' << (r.in_window ? 1 : 0) << "\n";
    }
}

struct SvgFigure {
    std::vector<Complex> resonances;
    std::vector<std::vector<Complex>> paths;
    double omega0 = 0.0;
    double window_theta = 0.0;
    std::string title;
};

/// Self-contained scatter of resonances (markers) and eigenvalue paths
/// (polylines) on a fixed 800x600 canvas; axes are auto-fit with padding
/// and the spectral window is drawn as a dashed box.
inline void write_figure_svg(const std::filesystem::path& path, const SvgFigure& fig) {
    double xmin = -fig.omega0, xmax = fig.omega0;
    double ymin = -fig.omega0 * fig.window_theta, ymax = 0.05;
    auto grow = [&](const Complex& z) {
        xmin = std::min(xmin, z.real());
        xmax = std::max(xmax, z.real());
        ymin = std::min(ymin, z.imag());
        ymax = std::max(ymax, z.imag());
    };
    for (const auto& z : fig.resonances) grow(z);
    for (const auto& p : fig.paths)
        for (const auto& z : p) grow(z);
    const double padx = 0.08 * std::max(xmax - xmin, 1e-6);
    const double pady = 0.08 * std::max(ymax - ymin, 1e-6);
    xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;

    const double W = 800.0, H = 600.0, L = 70.0, B = 50.0, T = 30.0, R = 20.0;
    auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto sy = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - B - T); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
    out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << fig.title << "</text>\n";
    // axes
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
        << H - B << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">Re</text>\n";
    out << "<text x=\"18\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 18 "
        << H / 2 << ")\">Im</text>\n";
    for (double x : {xmin, 0.0, xmax}) {
        if (x < xmin || x > xmax) continue;
        out << "<text x=\"" << sx(x) << "\" y=\"" << H - B + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">" << format17(x).substr(0, 7)
            << "</text>\n";
    }
    for (double y : {ymin, 0.0, ymax}) {
        if (y < ymin || y > ymax) continue;
        out << "<text x=\"" << L - 6 << "\" y=\"" << sy(y) + 3
            << "\" text-anchor=\"end\" font-size=\"10\">" << format17(y).substr(0, 7)
            << "</text>\n";
    }
    // spectral window
    if (fig.omega0 > 0.0) {
        const double x0 = sx(-fig.omega0), x1 = sx(fig.omega0);
        const double y1 = sy(-fig.omega0 * fig.window_theta);
        out << "<rect x=\"" << x0 << "\" y=\"" << T << "\" width=\"" << x1 - x0
            << "\" height=\"" << y1 - T
            << "\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";
    }
    for (const auto& p : fig.paths) {
        if (p.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"#2a2\" stroke-width=\"1.2\" points=\"";
        for (const auto& z : p) out << sx(z.real()) << ',' << sy(z.imag()) << ' ';
        out << "\"/>\n";
        for (const auto& z : p)
            out << "<circle cx=\"" << sx(z.real()) << "\" cy=\"" << sy(z.imag())
                << "\" r=\"1.6\" fill=\"#2a2\"/>\n";
    }
    for (const auto& z : fig.resonances) {
        const double cx = sx(z.real()), cy = sy(z.imag());
        out << "<path d=\"M" << cx - 4 << ' ' << cy << " L" << cx + 4 << ' ' << cy << " M" << cx
            << ' ' << cy - 4 << " L" << cx << ' ' << cy + 4 << " M" << cx - 2.8 << ' ' << cy - 2.8
            << " L" << cx + 2.8 << ' ' << cy + 2.8 << " M" << cx - 2.8 << ' ' << cy + 2.8 << " L"
            << cx + 2.8 << ' ' << cy - 2.8 << "\" stroke=\"#d33\" stroke-width=\"1.4\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace torres
