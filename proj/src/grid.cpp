#include "entsol/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "entsol/errors.hpp"

namespace entsol {

Grid1D Grid1D::make(double half_length, double spacing) {
    if (!(half_length > 0.0) || !(spacing > 0.0))
        throw NonConformingSpacingError(half_length, spacing);
    const double q = 2.0 * half_length / spacing;
    const long long intervals = std::llround(q);
    if (intervals < 2 || std::fabs(q - static_cast<double>(intervals)) > 1e-9 * q)
        throw NonConformingSpacingError(half_length, spacing);
    Grid1D g;
    g.half_length = half_length;
    g.spacing = spacing;
    g.n_interior = static_cast<int>(intervals) - 1;
    return g;
}

double sup_norm(const GridFn& f) {
    double s = 0.0;
    for (double v : f.values()) s = std::max(s, std::fabs(v));
    return s;
}

double h1_seminorm_sq(const GridFn& f) {
    const int n = f.nodes();
    const int m = f.components();
    const double h = f.grid().spacing;
    double total = 0.0;
    for (int c = 0; c < m; ++c) {
        double prev = 0.0;  // boundary
        for (int j = 0; j < n; ++j) {
            const double d = (f.at(j, c) - prev) / h;
            total += d * d * h;
            prev = f.at(j, c);
        }
        const double d = (0.0 - prev) / h;  // gap to the right boundary
        total += d * d * h;
    }
    return total;
}

GridFn restrict_to_window(const GridFn& f, double window_half_length) {
    const Grid1D& g = f.grid();
    if (window_half_length > g.half_length * (1.0 + 1e-12))
        throw WindowNotNestedError("window exceeds the grid half-length");
    Grid1D w;
    try {
        w = Grid1D::make(window_half_length, g.spacing);
    } catch (const NonConformingSpacingError&) {
        throw WindowNotNestedError("window half-length is not a node of the grid");
    }
    // Nodes coincide only when the two center offsets have equal parity.
    if ((g.intervals() - w.intervals()) % 2 != 0)
        throw WindowNotNestedError("window nodes are not a subset of the grid nodes");
    const int shift = (g.intervals() - w.intervals()) / 2;
    GridFn out(w, f.components());
    for (int j = 0; j < w.n_interior; ++j)
        for (int c = 0; c < f.components(); ++c) out.at(j, c) = f.at(j + shift, c);
    return out;
}

double derivative_bound_chain(double K0, double K2) { return 2.0 * K0 + 0.5 * K2; }

GridFn zero_extend(const GridFn& f, const Grid1D& larger) {
    const Grid1D& g = f.grid();
    if (larger.half_length < g.half_length || larger.spacing != g.spacing ||
        (larger.intervals() - g.intervals()) % 2 != 0)
        throw WindowNotNestedError("target grid does not nest the source grid");
    const int shift = (larger.intervals() - g.intervals()) / 2;
    GridFn out(larger, f.components());
    for (int j = 0; j < g.n_interior; ++j)
        for (int c = 0; c < f.components(); ++c) out.at(j + shift, c) = f.at(j, c);
    return out;
}

GridFn prolong_midpoint(const GridFn& f, const Grid1D& fine) {
    const Grid1D& g = f.grid();
    if (fine.half_length != g.half_length || fine.intervals() != 2 * g.intervals())
        throw WindowNotNestedError("fine grid is not the once-refined coarse grid");
    const int m = f.components();
    GridFn out(fine, m);
    for (int j = 0; j < fine.n_interior; ++j) {
        for (int c = 0; c < m; ++c) {
            if (j % 2 == 1) {
                out.at(j, c) = f.at(j / 2, c);
            } else {
                const double left = (j / 2 - 1) >= 0 ? f.at(j / 2 - 1, c) : 0.0;
                const double right = (j / 2) < g.n_interior ? f.at(j / 2, c) : 0.0;
                out.at(j, c) = 0.5 * (left + right);
            }
        }
    }
    return out;
}

void write_csv(std::ostream& out, const GridFn& f, std::string_view comment) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# L=%g h=%g m=%d\n", f.grid().half_length,
                  f.grid().spacing, f.components());
    out << buf;
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "t";
    for (int c = 0; c < f.components(); ++c) out << ",u" << (c + 1);
    out << "\n";
    auto row = [&](double t, int node) {
        std::snprintf(buf, sizeof(buf), "%.17g", t);
        out << buf;
        for (int c = 0; c < f.components(); ++c) {
            const double v = node < 0 ? 0.0 : f.at(node, c);
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        out << "\n";
    };
    row(-f.grid().half_length, -1);
    for (int j = 0; j < f.nodes(); ++j) row(f.grid().node(j), j);
    row(f.grid().half_length, -1);
}

}  // namespace entsol
