#include "rte/mesh.hpp"

#include "rte/core.hpp"

#include <cmath>

namespace rte {

namespace {

void check_nodes(const std::vector<double>& nodes, const char* axis)
{
    if (nodes.size() < 2)
        throw InvalidArgument(std::string("mesh: need at least one cell along ") + axis);
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw InvalidArgument(std::string("mesh: degenerate or unordered nodes along ") + axis);
}

} // namespace

SpatialMesh::SpatialMesh(std::vector<double> x_nodes, std::vector<double> y_nodes)
    : x_nodes_(std::move(x_nodes)), y_nodes_(std::move(y_nodes))
{
    check_nodes(x_nodes_, "x");
    if (!y_nodes_.empty())
        check_nodes(y_nodes_, "y");

    const int mx = nx();
    const int my = ny();
    cells_.reserve(static_cast<std::size_t>(mx) * my);
    for (int iy = 0; iy < my; ++iy) {
        for (int ix = 0; ix < mx; ++ix) {
            Cell c;
            c.ix = ix;
            c.iy = iy;
            c.lower[0] = x_nodes_[ix];
            c.upper[0] = x_nodes_[ix + 1];
            if (dimension() == 2) {
                c.lower[1] = y_nodes_[iy];
                c.upper[1] = y_nodes_[iy + 1];
            }
            cells_.push_back(c);
        }
    }

    // x-normal faces, then y-normal faces.
    for (int iy = 0; iy < my; ++iy) {
        edges_.push_back({cell_index(0, iy), -1, 0, {-1.0, 0.0}});
        for (int ix = 0; ix + 1 < mx; ++ix)
            edges_.push_back({cell_index(ix, iy), cell_index(ix + 1, iy), 0, {1.0, 0.0}});
        edges_.push_back({cell_index(mx - 1, iy), -1, 0, {1.0, 0.0}});
    }
    if (dimension() == 2) {
        for (int ix = 0; ix < mx; ++ix) {
            edges_.push_back({cell_index(ix, 0), -1, 1, {0.0, -1.0}});
            for (int iy = 0; iy + 1 < my; ++iy)
                edges_.push_back({cell_index(ix, iy), cell_index(ix, iy + 1), 1, {0.0, 1.0}});
            edges_.push_back({cell_index(ix, my - 1), -1, 1, {0.0, 1.0}});
        }
    }
}

int SpatialMesh::neighbor(int cell, Face face) const
{
    const Cell& c = cells_[cell];
    switch (face) {
    case Face::x_lower:
        return c.ix > 0 ? cell - 1 : -1;
    case Face::x_upper:
        return c.ix + 1 < nx() ? cell + 1 : -1;
    case Face::y_lower:
        return c.iy > 0 ? cell - nx() : -1;
    case Face::y_upper:
        return c.iy + 1 < ny() ? cell + nx() : -1;
    }
    return -1;
}

SpatialMesh build_mesh_1d(std::span<const MeshSegment> segments)
{
    if (segments.empty())
        throw InvalidArgument("build_mesh_1d: no segments");
    std::vector<double> nodes{segments.front().begin};
    for (const MeshSegment& s : segments) {
        const double length = s.end - s.begin;
        if (!(s.cell_size > 0.0) || !(length > 0.0))
            throw InvalidArgument("build_mesh_1d: segment with non-positive length or cell size");
        if (std::abs(s.begin - nodes.back()) > 1e-12 * std::max(1.0, std::abs(s.begin)))
            throw InvalidArgument("build_mesh_1d: segments are not contiguous");
        const double ratio = length / s.cell_size;
        const long n = std::lround(ratio);
        if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
            throw InvalidArgument("build_mesh_1d: segment length is not a multiple of the cell size");
        for (long i = 1; i < n; ++i)
            nodes.push_back(s.begin + length * static_cast<double>(i) / static_cast<double>(n));
        nodes.push_back(s.end);
    }
    return SpatialMesh(std::move(nodes), {});
}

SpatialMesh build_mesh_2d(int nx, int ny, std::array<double, 2> lower, std::array<double, 2> upper)
{
    if (nx < 1 || ny < 1)
        throw InvalidArgument("build_mesh_2d: cell counts must be positive");
    if (!(upper[0] > lower[0]) || !(upper[1] > lower[1]))
        throw InvalidArgument("build_mesh_2d: degenerate bounds");
    std::vector<double> xs(nx + 1);
    std::vector<double> ys(ny + 1);
    for (int i = 0; i <= nx; ++i)
        xs[i] = lower[0] + (upper[0] - lower[0]) * i / nx;
    for (int i = 0; i <= ny; ++i)
        ys[i] = lower[1] + (upper[1] - lower[1]) * i / ny;
    xs.back() = upper[0];
    ys.back() = upper[1];
    return SpatialMesh(std::move(xs), std::move(ys));
}

} // namespace rte
