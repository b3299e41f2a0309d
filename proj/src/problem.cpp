#include "rte/problem.hpp"

#include <cmath>
#include <sstream>

namespace rte {

std::string format_parameter(const Parameter& mu, char separator)
{
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (i)
            os << separator;
        os << mu[i];
    }
    return os.str();
}

std::vector<double> AffineDecomposition::operator_thetas(const Parameter& mu) const
{
    std::vector<double> t{1.0};
    for (const MaterialTerm& m : materials)
        t.push_back(m.theta(mu));
    return t;
}

std::vector<double> AffineDecomposition::source_thetas(const Parameter& mu) const
{
    std::vector<double> t;
    for (const SourceTerm& s : sources)
        t.push_back(s.theta(mu));
    return t;
}

void AffineDecomposition::check(const Parameter& mu) const
{
    if (mu.size() != ranges.size())
        throw InvalidArgument("parameter has " + std::to_string(mu.size()) + " components, expected "
                              + std::to_string(ranges.size()));
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const ParameterRange& r = ranges[i];
        const double slack = 1e-12 * std::max(1.0, std::abs(r.upper));
        if (!(mu[i] >= r.lower - slack && mu[i] <= r.upper + slack))
            throw InvalidArgument("parameter " + r.name + " = " + std::to_string(mu[i]) + " outside ["
                                  + std::to_string(r.lower) + ", " + std::to_string(r.upper) + "]");
    }
}

ParametricProblem::ParametricProblem(std::shared_ptr<const DGSpace> space, AngularQuadrature quadrature,
                                     AffineDecomposition affine)
    : space_(std::move(space)), quadrature_(std::move(quadrature)), affine_(std::move(affine))
{
    streaming_ = std::make_unique<StreamingOperator>(*space_, quadrature_);
    const int ndof = space_->size();
    for (const MaterialTerm& m : affine_.materials) {
        Vector a = m.absorption.size() ? m.absorption : Vector::Zero(ndof);
        Vector s = m.scattering.size() ? m.scattering : Vector::Zero(ndof);
        if (a.size() != ndof || s.size() != ndof)
            throw InvalidArgument("material term " + m.name + " has the wrong field size");
        total_masses_.push_back(assemble_coefficient_mass(*space_, a + s));
        scattering_masses_.push_back(assemble_coefficient_mass(*space_, s));
    }
    for (const SourceTerm& s : affine_.sources) {
        Vector q = s.source.size() ? s.source : Vector::Zero(ndof);
        if (q.size() != ndof)
            throw InvalidArgument("source term " + s.name + " has the wrong size");
        Matrix block(ndof, quadrature_.size());
        for (int j = 0; j < quadrature_.size(); ++j)
            block.col(j) = q + assemble_inflow(*space_, quadrature_.directions[j], s.inflow);
        source_blocks_.push_back(std::move(block));
    }
}

std::shared_ptr<ParametricProblem> ParametricProblem::create(std::shared_ptr<const DGSpace> space,
                                                             AngularQuadrature quadrature,
                                                             AffineDecomposition affine)
{
    return std::shared_ptr<ParametricProblem>(
        new ParametricProblem(std::move(space), std::move(quadrature), std::move(affine)));
}

std::shared_ptr<const DiscreteProblem> ParametricProblem::instantiate(const Parameter& mu) const
{
    return std::make_shared<const DiscreteProblem>(shared_from_this(), mu);
}

Vector ParametricProblem::apply_term(int q, const Vector& f) const
{
    const int ndof = num_dofs();
    const int nv = num_directions();
    if (f.size() != state_size())
        throw InvalidArgument("apply_term: state has the wrong size");
    Vector out(f.size());
    if (q == 0) {
        for (int j = 0; j < nv; ++j)
            streaming_->apply(j, f.data() + static_cast<Eigen::Index>(j) * ndof,
                              out.data() + static_cast<Eigen::Index>(j) * ndof);
        return out;
    }
    const CoefficientMass& mt = total_masses_.at(q - 1);
    const CoefficientMass& ms = scattering_masses_.at(q - 1);
    Vector rho = Vector::Zero(ndof);
    for (int j = 0; j < nv; ++j)
        rho += quadrature_.weights[j] * f.segment(static_cast<Eigen::Index>(j) * ndof, ndof);
    const Vector srho = ms * rho;
    for (int j = 0; j < nv; ++j) {
        const Eigen::Index off = static_cast<Eigen::Index>(j) * ndof;
        mt.apply(f.data() + off, out.data() + off);
        out.segment(off, ndof) -= srho;
    }
    return out;
}

Vector ParametricProblem::rhs_term(int p) const
{
    const Matrix& b = source_blocks_.at(p);
    return Eigen::Map<const Vector>(b.data(), b.size());
}

DiscreteProblem::DiscreteProblem(std::shared_ptr<const ParametricProblem> family, Parameter mu)
    : family_(std::move(family)), mu_(std::move(mu))
{
    const AffineDecomposition& affine = family_->affine();
    affine.check(mu_);
    const int ndof = family_->num_dofs();
    sigma_a_ = Vector::Zero(ndof);
    sigma_s_ = Vector::Zero(ndof);
    for (const MaterialTerm& m : affine.materials) {
        const double theta = m.theta(mu_);
        if (m.absorption.size())
            sigma_a_ += theta * m.absorption;
        if (m.scattering.size())
            sigma_s_ += theta * m.scattering;
    }
    sigma_t_ = sigma_a_ + sigma_s_;

    // Pointwise nonnegativity at the element quadrature points.
    const DGSpace& space = family_->space();
    const ReferenceTable& t = space.element_table();
    const int n = space.local_size();
    for (int i = 0; i < space.num_cells(); ++i) {
        const double scale = 1.0 / std::sqrt(space.measure(i) / (space.dimension() == 1 ? 2.0 : 4.0));
        for (Eigen::Index q = 0; q < t.values.rows(); ++q) {
            const double a = scale * t.values.row(q).dot(sigma_a_.segment(i * n, n));
            const double s = scale * t.values.row(q).dot(sigma_s_.segment(i * n, n));
            const double tol = 1e-12 * std::max(1.0, std::abs(a) + std::abs(s));
            if (a < -tol || s < -tol)
                throw InvalidArgument("cross sections must be nonnegative (parameter "
                                      + format_parameter(mu_) + ")");
        }
    }

    total_mass_ = assemble_coefficient_mass(space, sigma_t_);
    scattering_mass_ = assemble_coefficient_mass(space, sigma_s_);
    absorption_mass_ = assemble_coefficient_mass(space, sigma_a_);

    source_ = Vector::Zero(ndof);
    rhs_ = Matrix::Zero(ndof, family_->num_directions());
    const std::vector<double> thetas = affine.source_thetas(mu_);
    for (std::size_t p = 0; p < thetas.size(); ++p) {
        if (affine.sources[p].source.size())
            source_ += thetas[p] * affine.sources[p].source;
        rhs_ += thetas[p] * family_->source_block(static_cast<int>(p));
    }
}

Vector assemble_rhs(const DiscreteProblem& problem, int j)
{
    if (j < 0 || j >= problem.num_directions())
        throw InvalidArgument("assemble_rhs: direction index out of range");
    return problem.rhs().col(j);
}

Vector apply_full_operator(const DiscreteProblem& problem, const Vector& f)
{
    const int ndof = problem.num_dofs();
    const int nv = problem.num_directions();
    if (f.size() != problem.state_size())
        throw InvalidArgument("apply_full_operator: state has the wrong size");
    const auto& w = problem.quadrature().weights;
    Vector rho = Vector::Zero(ndof);
    for (int j = 0; j < nv; ++j)
        rho += w[j] * f.segment(static_cast<Eigen::Index>(j) * ndof, ndof);
    const Vector srho = problem.scattering_mass() * rho;
    Vector out(f.size());
    Vector tmp(ndof);
    for (int j = 0; j < nv; ++j) {
        const Eigen::Index off = static_cast<Eigen::Index>(j) * ndof;
        problem.streaming().apply(j, f.data() + off, out.data() + off);
        problem.total_mass().apply(f.data() + off, tmp.data());
        out.segment(off, ndof) += tmp - srho;
    }
    return out;
}

Matrix assemble_dense_direction(const DiscreteProblem& problem, int j)
{
    return problem.streaming().dense(j) + problem.total_mass().dense();
}

std::pair<Matrix, Vector> assemble_dense_full_system(const DiscreteProblem& problem)
{
    const Eigen::Index nh = problem.state_size();
    if (nh > max_dense_state)
        throw InvalidArgument("assemble_dense_full_system: N_h = " + std::to_string(nh) + " exceeds the dense cap");
    const int ndof = problem.num_dofs();
    const int nv = problem.num_directions();
    const auto& w = problem.quadrature().weights;
    const Matrix ms = problem.scattering_mass().dense();
    Matrix a = Matrix::Zero(nh, nh);
    Vector b(nh);
    for (int j = 0; j < nv; ++j) {
        a.block(j * ndof, j * ndof, ndof, ndof) = assemble_dense_direction(problem, j);
        for (int k = 0; k < nv; ++k)
            a.block(j * ndof, k * ndof, ndof, ndof) -= w[k] * ms;
        b.segment(j * ndof, ndof) = problem.rhs().col(j);
    }
    return {std::move(a), std::move(b)};
}

std::shared_ptr<ParametricProblem> make_fixed_problem(std::shared_ptr<const DGSpace> space,
                                                      AngularQuadrature quadrature,
                                                      const ScalarField& sigma_a,
                                                      const ScalarField& sigma_s,
                                                      const ScalarField& source,
                                                      const ScalarField& inflow)
{
    AffineDecomposition affine;
    const auto one = [](const Parameter&) { return 1.0; };
    MaterialTerm m{"fixed", one, {}, {}};
    if (sigma_a)
        m.absorption = space->project(sigma_a);
    if (sigma_s)
        m.scattering = space->project(sigma_s);
    affine.materials.push_back(std::move(m));
    SourceTerm s{"fixed", one, {}, inflow};
    if (source)
        s.source = space->project(source);
    affine.sources.push_back(std::move(s));
    return ParametricProblem::create(std::move(space), std::move(quadrature), std::move(affine));
}

} // namespace rte
