#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace entsol {

/// Uniform grid on [-L, L] with homogeneous Dirichlet boundary. Only interior
/// nodes carry unknowns; the two boundary nodes are implicitly zero.
///
/// Node coordinates are computed from integer indices against the grid
/// center, node(i) = s_i * (h/2) with an integer s_i, so grids that share h
/// produce bitwise-identical coordinates for shared nodes regardless of L.
/// That makes window restriction and domain-doubling comparisons exact.
struct Grid1D {
    double half_length = 0.0;  // L
    double spacing = 0.0;      // h
    int n_interior = 0;

    /// Requires 2L/h to be an integer >= 2; throws NonConformingSpacing.
    static Grid1D make(double half_length, double spacing);

    int intervals() const { return n_interior + 1; }  // 2L/h

    /// Coordinate of interior node i, 0 <= i < n_interior.
    double node(int i) const {
        return static_cast<double>(2 * (i + 1) - intervals()) * (0.5 * spacing);
    }

    bool same_layout(const Grid1D& other) const {
        return n_interior == other.n_interior && half_length == other.half_length &&
               spacing == other.spacing;
    }
};

/// Vector-valued grid function: m components per interior node, stored
/// node-major (values[node * m + component]). Boundary values are 0.
class GridFn {
public:
    GridFn() = default;
    GridFn(const Grid1D& grid, int components)
        : grid_(grid), m_(components),
          values_(static_cast<std::size_t>(grid.n_interior) * components, 0.0) {}

    const Grid1D& grid() const { return grid_; }
    int components() const { return m_; }
    int nodes() const { return grid_.n_interior; }

    double& at(int node, int component) { return values_[static_cast<std::size_t>(node) * m_ + component]; }
    double at(int node, int component) const { return values_[static_cast<std::size_t>(node) * m_ + component]; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

private:
    Grid1D grid_;
    int m_ = 0;
    std::vector<double> values_;
};

/// max over components and nodes of |value|
double sup_norm(const GridFn& f);

/// Sum over components of the squared forward differences, h * ((dv)/h)^2,
/// including the two gaps against the zero boundary values. Equals the H1
/// seminorm (squared) of the piecewise-linear interpolant.
double h1_seminorm_sq(const GridFn& f);

/// Copy the values on the shared nodes of [-W, W]. The window grid keeps the
/// spacing; throws WindowNotNested when the window nodes are not a subset of
/// the source nodes.
GridFn restrict_to_window(const GridFn& f, double window_half_length);

/// Bound on sup|u'| implied by sup|u| <= K0 and sup|u''| <= K2 through the
/// unit-interval Taylor identity: |u'(t)| <= 2 K0 + K2 / 2.
double derivative_bound_chain(double K0, double K2);

/// Zero-padded copy of f onto a larger grid with the same spacing.
GridFn zero_extend(const GridFn& f, const Grid1D& larger);

/// Values of f transferred to the once-refined grid (spacing h/2, same L):
/// original nodes are copied, midpoints linearly interpolated.
GridFn prolong_midpoint(const GridFn& f, const Grid1D& fine);

/// CSV serialization: a "# L=... h=... m=..." header, a column-name row,
/// then one row per node including the two boundary rows. The optional
/// comment is emitted as additional "# ..." lines after the header.
void write_csv(std::ostream& out, const GridFn& f, std::string_view comment = {});

}  // namespace entsol
