#include "rte/dsa.hpp"

#include <cmath>

namespace rte {

namespace {

const Face faces[4] = {Face::x_lower, Face::x_upper, Face::y_lower, Face::y_upper};

struct FaceQuad {
    std::vector<std::array<double, 2>> points;  // physical
    std::vector<double> weights;                // physical measure
};

FaceQuad face_quadrature(const DGSpace& space, int cell, int axis, bool upper_side, int n)
{
    const Cell& c = space.mesh().cell(cell);
    const double pos = upper_side ? c.upper[axis] : c.lower[axis];
    FaceQuad fq;
    if (space.dimension() == 1) {
        fq.points.push_back({pos, 0.0});
        fq.weights.push_back(1.0);
        return fq;
    }
    const int t = 1 - axis;
    const GaussRule rule = gauss_rule(n);
    for (int q = 0; q < n; ++q) {
        std::array<double, 2> p{};
        p[axis] = pos;
        p[t] = c.lower[t] + 0.5 * (rule.nodes[q] + 1.0) * c.width(t);
        fq.points.push_back(p);
        fq.weights.push_back(0.5 * c.width(t) * rule.weights[q]);
    }
    return fq;
}

} // namespace

DiffusionOperator::DiffusionOperator(const DiscreteProblem& problem, const DsaOptions& options)
    : scheme_(options.scheme), ndof_(problem.num_dofs()), eddington_(problem.quadrature().second_moments())
{
    if (scheme_ == DsaScheme::sip)
        assemble_sip(problem, options);
    else
        assemble_p1(problem);
}

void DiffusionOperator::assemble_sip(const DiscreteProblem& problem, const DsaOptions& options)
{
    const DGSpace& space = problem.space();
    const SpatialMesh& mesh = space.mesh();
    const int dim = space.dimension();
    const int n = space.local_size();
    const int cells = space.num_cells();

    // Cellwise diffusion coefficients from the cell mean of sigma_t.
    std::vector<std::array<double, 2>> kappa(cells);
    for (int i = 0; i < cells; ++i) {
        const double mean = problem.sigma_t()[i * n] / std::sqrt(space.measure(i));
        const double sd = std::max(mean, options.sigma_floor);
        kappa[i] = {eddington_[0] / sd, dim == 2 ? eddington_[1] / sd : 0.0};
    }

    std::vector<Eigen::Triplet<double>> trip;
    const ReferenceTable& t = space.element_table();

    // Volume terms: anisotropic stiffness plus absorption mass.
    for (int i = 0; i < cells; ++i) {
        const Cell& c = mesh.cell(i);
        Matrix k = problem.absorption_mass().block(i);
        for (std::size_t q = 0; q < t.weights.size(); ++q) {
            for (int d = 0; d < dim; ++d) {
                // grad phi = (2/h) grad phihat / sqrt(J); the J factors cancel against dx = J dxi.
                const double s = t.weights[q] * kappa[i][d] * 4.0 / (c.width(d) * c.width(d));
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        k(a, b) += s * t.derivs[d](q, a) * t.derivs[d](q, b);
            }
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                trip.emplace_back(i * n + a, i * n + b, k(a, b));
    }

    // Robin coefficient 2 sum_{v.n > 0} w_j v.n per face, the discrete Marshak condition.
    std::array<double, 4> half_current{};
    const auto& quad = problem.quadrature();
    for (int f = 0; f < 2 * dim; ++f) {
        const double sign = f % 2 == 0 ? -1.0 : 1.0;
        for (int j = 0; j < quad.size(); ++j)
            half_current[f] += 2.0 * quad.weights[j] * std::max(0.0, sign * quad.directions[j][f / 2]);
    }

    const double kk = static_cast<double>((space.degree() + 1) * (space.degree() + 1));
    const int nf = space.degree() + 2;
    for (int i = 0; i < cells; ++i) {
        for (int f = 0; f < 2 * dim; ++f) {
            const int axis = f / 2;
            const bool upper = f % 2 == 1;
            const int nb = mesh.neighbor(i, faces[f]);
            if (nb >= 0 && !upper)
                continue;  // each interior face once, from its lower cell
            const FaceQuad fq = face_quadrature(space, i, axis, upper, nf);
            if (nb < 0) {
                const double sign = upper ? 1.0 : -1.0;
                const double kap = kappa[i][axis];
                const double eta = options.penalty * kk * kap / mesh.cell(i).width(axis);
                const bool robin = options.boundary == DsaBoundary::robin;
                Matrix m = Matrix::Zero(n, n);
                for (std::size_t q = 0; q < fq.weights.size(); ++q) {
                    const auto& p = fq.points[q];
                    for (int a = 0; a < n; ++a) {
                        const double va = space.value(i, a, p[0], p[1]);
                        const double ga = sign * kap * space.gradient(i, a, p[0], p[1])[axis];
                        for (int b = 0; b < n; ++b) {
                            const double vb = space.value(i, b, p[0], p[1]);
                            const double gb = sign * kap * space.gradient(i, b, p[0], p[1])[axis];
                            if (robin)
                                m(a, b) += fq.weights[q] * half_current[f] * va * vb;
                            else
                                m(a, b) += fq.weights[q] * (-gb * va - ga * vb + eta * va * vb);
                        }
                    }
                }
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        trip.emplace_back(i * n + a, i * n + b, m(a, b));
                continue;
            }
            // Interior face with normal +e_axis from cell i (L) to nb (R).
            const double kl = kappa[i][axis];
            const double kr = kappa[nb][axis];
            const double h = std::min(mesh.cell(i).width(axis), mesh.cell(nb).width(axis));
            const double eta = options.penalty * kk * std::max(kl, kr) / h;
            const int cid[2] = {i, nb};
            const double jump_sign[2] = {1.0, -1.0};
            const double kap[2] = {kl, kr};
            Matrix m = Matrix::Zero(2 * n, 2 * n);
            for (std::size_t q = 0; q < fq.weights.size(); ++q) {
                const auto& p = fq.points[q];
                Vector val(2 * n);
                Vector flux(2 * n);  // 1/2 kappa d/dn phi, the average contribution
                Vector jump(2 * n);
                for (int s = 0; s < 2; ++s)
                    for (int a = 0; a < n; ++a) {
                        val[s * n + a] = space.value(cid[s], a, p[0], p[1]);
                        jump[s * n + a] = jump_sign[s] * val[s * n + a];
                        flux[s * n + a] = 0.5 * kap[s] * space.gradient(cid[s], a, p[0], p[1])[axis];
                    }
                const double w = fq.weights[q];
                m.noalias() += w * (-jump * flux.transpose() - flux * jump.transpose() + eta * jump * jump.transpose());
            }
            for (int s = 0; s < 2; ++s)
                for (int r = 0; r < 2; ++r)
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            trip.emplace_back(cid[s] * n + a, cid[r] * n + b, m(s * n + a, r * n + b));
        }
    }

    matrix_.resize(space.size(), space.size());
    matrix_.setFromTriplets(trip.begin(), trip.end());
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(matrix_);
    if (ldlt_->info() != Eigen::Success)
        throw NumericalFailure("DSA factorization failed");
}

void DiffusionOperator::assemble_p1(const DiscreteProblem& problem)
{
    const DGSpace& space = problem.space();
    const SpatialMesh& mesh = space.mesh();
    const AngularQuadrature& quad = problem.quadrature();
    const int dim = space.dimension();
    const int n = space.local_size();
    const int cells = space.num_cells();
    const int nd = space.size();

    // Half-range moments per face axis k: a_k = sum_{v_k>0} w v_k, b_kd = sum_{v_k>0} w v_k v_d^2.
    std::array<double, 2> a{};
    std::array<std::array<double, 2>, 2> b{};
    for (int j = 0; j < quad.size(); ++j) {
        const auto& v = quad.directions[j];
        for (int k = 0; k < dim; ++k) {
            if (!(v[k] > 0.0))
                continue;
            a[k] += quad.weights[j] * v[k];
            for (int d = 0; d < dim; ++d)
                b[k][d] += quad.weights[j] * v[k] * v[d] * v[d];
        }
    }
    const auto& dd = eddington_;

    // Unknown blocks: 0 = rho, 1 + d = J_d.
    const auto idx = [&](int field, int cell, int p) { return field * nd + cell * n + p; };
    std::vector<Eigen::Triplet<double>> trip;
    const ReferenceTable& t = space.element_table();

    for (int i = 0; i < cells; ++i) {
        const Cell& c = mesh.cell(i);
        const auto ma = problem.absorption_mass().block(i);
        const auto mt = problem.total_mass().block(i);
        for (int m = 0; m < n; ++m) {
            for (int k = 0; k < n; ++k) {
                trip.emplace_back(idx(0, i, m), idx(0, i, k), ma(m, k));
                for (int d = 0; d < dim; ++d) {
                    trip.emplace_back(idx(1 + d, i, m), idx(1 + d, i, k), mt(m, k));
                    // int d_d v_m u_k; the Jacobians cancel.
                    double g = 0.0;
                    for (std::size_t q = 0; q < t.weights.size(); ++q)
                        g += t.weights[q] * (2.0 / c.width(d)) * t.derivs[d](q, m) * t.values(q, k);
                    trip.emplace_back(idx(0, i, m), idx(1 + d, i, k), -g);
                    trip.emplace_back(idx(1 + d, i, m), idx(0, i, k), -dd[d] * g);
                }
            }
        }
    }

    // Face terms, seen from the cell that owns the test function.
    const int nf = space.degree() + 2;
    for (int i = 0; i < cells; ++i) {
        for (int f = 0; f < 2 * dim; ++f) {
            const int k = f / 2;
            const bool upper = f % 2 == 1;
            const double s = upper ? 1.0 : -1.0;
            const int nb = mesh.neighbor(i, faces[f]);
            const FaceQuad fq = face_quadrature(space, i, k, upper, nf);
            for (std::size_t q = 0; q < fq.weights.size(); ++q) {
                const auto& pt = fq.points[q];
                const double w = fq.weights[q];
                for (int m = 0; m < n; ++m) {
                    const double vm = w * space.value(i, m, pt[0], pt[1]);
                    for (int side = 0; side < 2; ++side) {
                        const int cell = side == 0 ? i : nb;
                        if (cell < 0)
                            continue;
                        const double in = side == 0 ? 1.0 : -1.0;
                        for (int p = 0; p < n; ++p) {
                            const double u = vm * space.value(cell, p, pt[0], pt[1]);
                            // rho equation: a [rho] + {J} . n
                            trip.emplace_back(idx(0, i, m), idx(0, cell, p), in * a[k] * u);
                            trip.emplace_back(idx(0, i, m), idx(1 + k, cell, p), 0.5 * s * u);
                            // J_d equations: (s D_k / 2) sum rho for d = k, plus b_kd / D_d [J_d]
                            for (int d = 0; d < dim; ++d) {
                                if (d == k)
                                    trip.emplace_back(idx(1 + d, i, m), idx(0, cell, p), 0.5 * s * dd[k] * u);
                                trip.emplace_back(idx(1 + d, i, m), idx(1 + d, cell, p), in * b[k][d] / dd[d] * u);
                            }
                        }
                    }
                }
            }
        }
    }

    matrix_.resize((1 + dim) * nd, (1 + dim) * nd);
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_->analyzePattern(matrix_);
    lu_->factorize(matrix_);
    if (lu_->info() != Eigen::Success)
        throw NumericalFailure("DSA factorization failed: " + lu_->lastErrorMessage());
}

Vector DiffusionOperator::solve(const Vector& rhs) const
{
    if (rhs.size() != ndof_)
        throw InvalidArgument("DSA solve: right-hand side has the wrong length");
    Vector x;
    if (ldlt_) {
        x = ldlt_->solve(rhs);
    } else {
        Vector full = Vector::Zero(matrix_.rows());
        full.head(ndof_) = rhs;
        x = lu_->solve(full).head(ndof_);
    }
    if (!x.allFinite())
        throw NumericalFailure("DSA solve produced non-finite values");
    return x;
}

std::shared_ptr<const DiffusionOperator> assemble_dsa(const DiscreteProblem& problem, const DsaOptions& options)
{
    return std::make_shared<const DiffusionOperator>(problem, options);
}

DensityField dsa_correct(const DiffusionOperator& dsa, const DensityField& residual, const DiscreteProblem& problem)
{
    return dsa.solve(problem.scattering_mass() * residual);
}

DsaCorrection::DsaCorrection(std::shared_ptr<const DiscreteProblem> problem,
                             std::shared_ptr<const DiffusionOperator> dsa)
    : problem_(std::move(problem)), dsa_(std::move(dsa))
{
}

DensityField DsaCorrection::correct(int, const DensityField& v)
{
    return dsa_correct(*dsa_, v, *problem_);
}

} // namespace rte
