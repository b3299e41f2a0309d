#include "rte/assembly.hpp"

#include <cmath>

namespace rte {

namespace {

struct FacePoint {
    std::array<double, 2> xi;
    double weight;
};

// Quadrature on the reference face normal to `axis` at xi_axis = side.
std::vector<FacePoint> face_points(int dim, int axis, double side, int n)
{
    if (dim == 1)
        return {{{side, 0.0}, 1.0}};
    const GaussRule rule = gauss_rule(n);
    std::vector<FacePoint> pts;
    for (int q = 0; q < n; ++q) {
        std::array<double, 2> xi{};
        xi[axis] = side;
        xi[1 - axis] = rule.nodes[q];
        pts.push_back({xi, rule.weights[q]});
    }
    return pts;
}

double jacobian(const DGSpace& space, int cell)
{
    return space.measure(cell) / (space.dimension() == 1 ? 2.0 : 4.0);
}

// Face measure per unit reference length.
double face_scale(const DGSpace& space, int cell, int axis)
{
    if (space.dimension() == 1)
        return 1.0;
    return 0.5 * space.mesh().cell(cell).width(1 - axis);
}

const Face faces[4] = {Face::x_lower, Face::x_upper, Face::y_lower, Face::y_upper};

} // namespace

CoefficientMass::CoefficientMass(int num_cells, int local_size)
    : num_cells_(num_cells), local_size_(local_size),
      data_(static_cast<std::size_t>(num_cells) * local_size * local_size, 0.0)
{
}

Eigen::Map<Matrix> CoefficientMass::block(int cell)
{
    const std::size_t n = local_size_;
    return {data_.data() + cell * n * n, local_size_, local_size_};
}

Eigen::Map<const Matrix> CoefficientMass::block(int cell) const
{
    const std::size_t n = local_size_;
    return {data_.data() + cell * n * n, local_size_, local_size_};
}

void CoefficientMass::apply(const double* x, double* y) const
{
    const int n = local_size_;
    for (int i = 0; i < num_cells_; ++i) {
        const double* b = data_.data() + static_cast<std::size_t>(i) * n * n;
        const double* xi = x + static_cast<std::size_t>(i) * n;
        double* yi = y + static_cast<std::size_t>(i) * n;
        for (int m = 0; m < n; ++m) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += b[m + k * n] * xi[k];
            yi[m] = s;
        }
    }
}

Vector CoefficientMass::operator*(const Vector& x) const
{
    Vector y(size());
    apply(x.data(), y.data());
    return y;
}

Matrix CoefficientMass::apply_columns(const Matrix& x) const
{
    const Eigen::Index n = size();
    Matrix y(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        for (Eigen::Index off = 0; off < x.rows(); off += n)
            apply(x.col(c).data() + off, y.col(c).data() + off);
    return y;
}

Matrix CoefficientMass::dense() const
{
    Matrix m = Matrix::Zero(size(), size());
    for (int i = 0; i < num_cells_; ++i)
        m.block(i * local_size_, i * local_size_, local_size_, local_size_) = block(i);
    return m;
}

CoefficientMass assemble_coefficient_mass(const DGSpace& space, const Vector& field)
{
    const int n = space.local_size();
    CoefficientMass mass(space.num_cells(), n);
    if (field.size() == 0)
        return mass;
    if (field.size() != space.size())
        throw InvalidArgument("assemble_coefficient_mass: field size does not match the space");
    const ReferenceTable& t = space.element_table();
    const int nq = static_cast<int>(t.weights.size());
    for (int i = 0; i < space.num_cells(); ++i) {
        const double inv_sqrt_jac = 1.0 / std::sqrt(jacobian(space, i));
        auto b = mass.block(i);
        for (int q = 0; q < nq; ++q) {
            double sigma = 0.0;
            for (int k = 0; k < n; ++k)
                sigma += field[i * n + k] * t.values(q, k);
            const double w = t.weights[q] * sigma * inv_sqrt_jac;
            if (w == 0.0)
                continue;
            for (int c = 0; c < n; ++c)
                for (int r = 0; r < n; ++r)
                    b(r, c) += w * t.values(q, r) * t.values(q, c);
        }
    }
    return mass;
}

StreamingOperator::StreamingOperator(const DGSpace& space, const AngularQuadrature& quadrature)
    : local_size_(space.local_size()), num_cells_(space.num_cells())
{
    const int dim = space.dimension();
    if ((dim == 1) != (quadrature.mode == QuadratureMode::slab_1d))
        throw InvalidArgument("StreamingOperator: quadrature mode does not match the mesh dimension");
    const SpatialMesh& mesh = space.mesh();
    const int n = local_size_;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const ReferenceTable& t = space.element_table();
    const int nq = static_cast<int>(t.weights.size());
    const int nf = space.degree() + 2;

    // Reference face traces: trace[face][point][p].
    std::vector<std::vector<FacePoint>> fpts(2 * dim);
    std::vector<Matrix> trace(2 * dim);
    for (int f = 0; f < 2 * dim; ++f) {
        fpts[f] = face_points(dim, f / 2, f % 2 == 0 ? -1.0 : 1.0, nf);
        trace[f].resize(fpts[f].size(), n);
        for (std::size_t q = 0; q < fpts[f].size(); ++q)
            for (int p = 0; p < n; ++p)
                trace[f](q, p) = space.reference_value(p, fpts[f][q].xi);
    }

    dirs_.resize(quadrature.size());
    for (int j = 0; j < quadrature.size(); ++j) {
        const auto& v = quadrature.directions[j];
        Direction& dir = dirs_[j];

        const int mx = mesh.nx();
        const int my = mesh.ny();
        for (int b = 0; b < my; ++b) {
            const int iy = (dim == 1 || v[1] >= 0.0) ? b : my - 1 - b;
            for (int a = 0; a < mx; ++a) {
                const int ix = v[0] >= 0.0 ? a : mx - 1 - a;
                dir.order.push_back(mesh.cell_index(ix, iy));
            }
        }

        dir.diag.assign(num_cells_ * nn, 0.0);
        dir.ptr.assign(num_cells_ + 1, 0);
        for (int i = 0; i < num_cells_; ++i) {
            const Cell& cell = mesh.cell(i);
            Eigen::Map<Matrix> d(dir.diag.data() + i * nn, n, n);

            // -int (v . grad phi_m) phi_n; the Jacobians cancel.
            for (int q = 0; q < nq; ++q) {
                for (int m = 0; m < n; ++m) {
                    double vg = v[0] * 2.0 / cell.width(0) * t.derivs[0](q, m);
                    if (dim == 2)
                        vg += v[1] * 2.0 / cell.width(1) * t.derivs[1](q, m);
                    const double wm = t.weights[q] * vg;
                    for (int k = 0; k < n; ++k)
                        d(m, k) -= wm * t.values(q, k);
                }
            }

            for (int f = 0; f < 2 * dim; ++f) {
                const int axis = f / 2;
                const double sign = f % 2 == 0 ? -1.0 : 1.0;
                const double vn = sign * v[axis];
                const int nb = mesh.neighbor(i, faces[f]);
                if (vn >= 0.0) {
                    const double s = vn * face_scale(space, i, axis) / jacobian(space, i);
                    for (std::size_t q = 0; q < fpts[f].size(); ++q) {
                        const double w = s * fpts[f][q].weight;
                        for (int k = 0; k < n; ++k)
                            for (int m = 0; m < n; ++m)
                                d(m, k) += w * trace[f](q, m) * trace[f](q, k);
                    }
                } else if (nb >= 0) {
                    // Upwind value from the neighbor, whose matching face is the opposite one.
                    const int g = f ^ 1;
                    const double s = vn * face_scale(space, i, axis)
                        / std::sqrt(jacobian(space, i) * jacobian(space, nb));
                    const std::size_t offset = dir.coupling_data.size();
                    dir.coupling_data.resize(offset + nn, 0.0);
                    Eigen::Map<Matrix> c(dir.coupling_data.data() + offset, n, n);
                    for (std::size_t q = 0; q < fpts[f].size(); ++q) {
                        const double w = s * fpts[f][q].weight;
                        for (int k = 0; k < n; ++k)
                            for (int m = 0; m < n; ++m)
                                c(m, k) += w * trace[f](q, m) * trace[g](q, k);
                    }
                    dir.couplings.push_back({nb, offset});
                }
            }
            dir.ptr[i + 1] = static_cast<int>(dir.couplings.size());
        }
    }
}

Eigen::Map<const Matrix> StreamingOperator::diagonal_block(int j, int cell) const
{
    const std::size_t nn = static_cast<std::size_t>(local_size_) * local_size_;
    return {dirs_[j].diag.data() + cell * nn, local_size_, local_size_};
}

std::span<const StreamingOperator::Coupling> StreamingOperator::upwind(int j, int cell) const
{
    const Direction& d = dirs_[j];
    return {d.couplings.data() + d.ptr[cell], static_cast<std::size_t>(d.ptr[cell + 1] - d.ptr[cell])};
}

Eigen::Map<const Matrix> StreamingOperator::coupling_block(int j, const Coupling& c) const
{
    return {dirs_[j].coupling_data.data() + c.offset, local_size_, local_size_};
}

void StreamingOperator::apply(int j, const double* x, double* y) const
{
    const int n = local_size_;
    for (int i = 0; i < num_cells_; ++i) {
        Eigen::Map<Vector> yi(y + static_cast<std::size_t>(i) * n, n);
        yi.noalias() = diagonal_block(j, i) * Eigen::Map<const Vector>(x + static_cast<std::size_t>(i) * n, n);
        for (const Coupling& c : upwind(j, i))
            yi.noalias() += coupling_block(j, c)
                * Eigen::Map<const Vector>(x + static_cast<std::size_t>(c.neighbor) * n, n);
    }
}

Matrix StreamingOperator::dense(int j) const
{
    const int n = local_size_;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(num_cells_) * n, static_cast<Eigen::Index>(num_cells_) * n);
    for (int i = 0; i < num_cells_; ++i) {
        m.block(i * n, i * n, n, n) = diagonal_block(j, i);
        for (const Coupling& c : upwind(j, i))
            m.block(i * n, c.neighbor * n, n, n) = coupling_block(j, c);
    }
    return m;
}

Vector assemble_inflow(const DGSpace& space, const std::array<double, 3>& direction, const ScalarField& g)
{
    Vector out = Vector::Zero(space.size());
    if (!g)
        return out;
    const SpatialMesh& mesh = space.mesh();
    const int dim = space.dimension();
    const int n = space.local_size();
    for (int i = 0; i < space.num_cells(); ++i) {
        for (int f = 0; f < 2 * dim; ++f) {
            if (mesh.neighbor(i, faces[f]) >= 0)
                continue;
            const int axis = f / 2;
            const double sign = f % 2 == 0 ? -1.0 : 1.0;
            const double vn = sign * direction[axis];
            if (!(vn < 0.0))
                continue;
            const double s = -vn * face_scale(space, i, axis) / std::sqrt(jacobian(space, i));
            for (const FacePoint& fp : face_points(dim, axis, sign, DGSpace::projection_points)) {
                const auto r = space.to_physical(i, fp.xi);
                const double w = s * fp.weight * g(r[0], r[1]);
                for (int p = 0; p < n; ++p)
                    out[i * n + p] += w * space.reference_value(p, fp.xi);
            }
        }
    }
    return out;
}

} // namespace rte
