#ifndef RTE_PROBLEM_HPP
#define RTE_PROBLEM_HPP

#include "rte/assembly.hpp"

#include <functional>
#include <memory>
#include <string>

namespace rte {

using Coefficient = std::function<double(const Parameter&)>;

struct ParameterRange {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
};

/// theta(mu) times a cross-section pair: sigma_a += theta a, sigma_s += theta s.
struct MaterialTerm {
    std::string name;
    Coefficient theta;
    Vector absorption;  // DG coefficients; empty means zero
    Vector scattering;
};

/// theta(mu) times a source Q_p with isotropic inflow data g_p.
struct SourceTerm {
    std::string name;
    Coefficient theta;
    Vector source;
    ScalarField inflow;
};

/// Parameter-separable cross sections and right-hand side.
///
/// The operator terms are A_0 = blockdiag(D_j) with theta = 1, followed by one
/// term per material: A_q = I (x) M[a_q + s_q] - (1 w^T) (x) M[s_q].
struct AffineDecomposition {
    std::vector<MaterialTerm> materials;
    std::vector<SourceTerm> sources;
    std::vector<ParameterRange> ranges;

    std::vector<double> operator_thetas(const Parameter& mu) const;
    std::vector<double> source_thetas(const Parameter& mu) const;

    /// Throws InvalidArgument when mu has the wrong length or leaves the box.
    void check(const Parameter& mu) const;
};

class DiscreteProblem;

/// A problem family over parameter space: space, quadrature, and affine data.
class ParametricProblem : public std::enable_shared_from_this<ParametricProblem> {
public:
    static std::shared_ptr<ParametricProblem> create(std::shared_ptr<const DGSpace> space,
                                                     AngularQuadrature quadrature,
                                                     AffineDecomposition affine);

    const DGSpace& space() const { return *space_; }
    const AngularQuadrature& quadrature() const { return quadrature_; }
    const AffineDecomposition& affine() const { return affine_; }
    const StreamingOperator& streaming() const { return *streaming_; }

    int num_dofs() const { return space_->size(); }
    int num_directions() const { return quadrature_.size(); }
    Eigen::Index state_size() const { return static_cast<Eigen::Index>(num_dofs()) * num_directions(); }

    /// Columns Q_p + g_{p,j} for source term p, one per direction.
    const Matrix& source_block(int p) const { return source_blocks_[p]; }

    const CoefficientMass& material_total_mass(int q) const { return total_masses_[q]; }
    const CoefficientMass& material_scattering_mass(int q) const { return scattering_masses_[q]; }

    std::shared_ptr<const DiscreteProblem> instantiate(const Parameter& mu) const;

    /// Applies operator term q (0 = streaming) to a stacked state of length N_h.
    Vector apply_term(int q, const Vector& f) const;

    /// Stacked right-hand side of source term p.
    Vector rhs_term(int p) const;

private:
    ParametricProblem(std::shared_ptr<const DGSpace> space, AngularQuadrature quadrature, AffineDecomposition affine);

    std::shared_ptr<const DGSpace> space_;
    AngularQuadrature quadrature_;
    AffineDecomposition affine_;
    std::unique_ptr<StreamingOperator> streaming_;
    std::vector<Matrix> source_blocks_;
    std::vector<CoefficientMass> total_masses_;
    std::vector<CoefficientMass> scattering_masses_;
};

/// The family evaluated at one parameter.
class DiscreteProblem {
public:
    DiscreteProblem(std::shared_ptr<const ParametricProblem> family, Parameter mu);

    const ParametricProblem& family() const { return *family_; }
    std::shared_ptr<const ParametricProblem> family_ptr() const { return family_; }
    const DGSpace& space() const { return family_->space(); }
    const AngularQuadrature& quadrature() const { return family_->quadrature(); }
    const StreamingOperator& streaming() const { return family_->streaming(); }
    const Parameter& parameter() const { return mu_; }

    int num_dofs() const { return family_->num_dofs(); }
    int num_directions() const { return family_->num_directions(); }
    Eigen::Index state_size() const { return family_->state_size(); }

    const Vector& sigma_a() const { return sigma_a_; }
    const Vector& sigma_s() const { return sigma_s_; }
    const Vector& sigma_t() const { return sigma_t_; }
    const Vector& source() const { return source_; }

    const CoefficientMass& total_mass() const { return total_mass_; }
    const CoefficientMass& scattering_mass() const { return scattering_mass_; }
    const CoefficientMass& absorption_mass() const { return absorption_mass_; }

    /// Q~_j = Q + g_j for every direction, one column each.
    const Matrix& rhs() const { return rhs_; }

private:
    std::shared_ptr<const ParametricProblem> family_;
    Parameter mu_;
    Vector sigma_a_;
    Vector sigma_s_;
    Vector sigma_t_;
    Vector source_;
    CoefficientMass total_mass_;
    CoefficientMass scattering_mass_;
    CoefficientMass absorption_mass_;
    Matrix rhs_;
};

/// Q~_j for one direction.
Vector assemble_rhs(const DiscreteProblem& problem, int j);

/// Applies the full coupled operator A of the discrete ordinates system to a stacked state.
Vector apply_full_operator(const DiscreteProblem& problem, const Vector& f);

/// Dense A and b for small problems; refuses N_h above max_dense_state.
std::pair<Matrix, Vector> assemble_dense_full_system(const DiscreteProblem& problem);

/// Dense D_j + Sigma_t in natural cell ordering.
Matrix assemble_dense_direction(const DiscreteProblem& problem, int j);

inline constexpr Eigen::Index max_dense_state = 8192;

/// Single-parameter family with fixed fields, for tests and ad hoc runs.
std::shared_ptr<ParametricProblem> make_fixed_problem(std::shared_ptr<const DGSpace> space,
                                                      AngularQuadrature quadrature,
                                                      const ScalarField& sigma_a,
                                                      const ScalarField& sigma_s,
                                                      const ScalarField& source,
                                                      const ScalarField& inflow);

} // namespace rte

#endif
