#ifndef RTE_MESH_HPP
#define RTE_MESH_HPP

#include <array>
#include <span>
#include <vector>

namespace rte {

/// Interval (1D) or axis-aligned rectangle (2D). Unused y bounds are [0, 1].
struct Cell {
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{1.0, 1.0};
    int ix = 0;
    int iy = 0;

    double width(int axis) const { return upper[axis] - lower[axis]; }
};

/// Local face numbering: 0 = x lower, 1 = x upper, 2 = y lower, 3 = y upper.
enum class Face : int { x_lower = 0, x_upper = 1, y_lower = 2, y_upper = 3 };

/// A face shared by owner and neighbor; neighbor < 0 on the boundary.
/// The normal points out of the owner.
struct Edge {
    int owner = -1;
    int neighbor = -1;
    int axis = 0;
    std::array<double, 2> normal{0.0, 0.0};

    bool on_boundary() const { return neighbor < 0; }
};

class SpatialMesh {
public:
    /// Tensor mesh from node coordinates; an empty y list gives a 1D mesh.
    SpatialMesh(std::vector<double> x_nodes, std::vector<double> y_nodes);

    int dimension() const { return y_nodes_.empty() ? 1 : 2; }
    int nx() const { return static_cast<int>(x_nodes_.size()) - 1; }
    int ny() const { return y_nodes_.empty() ? 1 : static_cast<int>(y_nodes_.size()) - 1; }
    int num_cells() const { return static_cast<int>(cells_.size()); }

    const std::vector<Cell>& cells() const { return cells_; }
    const Cell& cell(int i) const { return cells_[i]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<double>& x_nodes() const { return x_nodes_; }
    const std::vector<double>& y_nodes() const { return y_nodes_; }

    int cell_index(int ix, int iy) const { return iy * nx() + ix; }

    /// Neighbor across a local face, or -1 on the boundary.
    int neighbor(int cell, Face face) const;
    int faces_per_cell() const { return 2 * dimension(); }

private:
    std::vector<double> x_nodes_;
    std::vector<double> y_nodes_;
    std::vector<Cell> cells_;
    std::vector<Edge> edges_;
};

struct MeshSegment {
    double begin;
    double end;
    double cell_size;
};

/// Piecewise uniform 1D mesh; each segment length must be a multiple of its cell size.
SpatialMesh build_mesh_1d(std::span<const MeshSegment> segments);

SpatialMesh build_mesh_2d(int nx, int ny, std::array<double, 2> lower, std::array<double, 2> upper);

} // namespace rte

#endif
