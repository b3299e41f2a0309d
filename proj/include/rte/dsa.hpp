#ifndef RTE_DSA_HPP
#define RTE_DSA_HPP

#include "rte/transport.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <memory>

namespace rte {

enum class DsaScheme {
    /// First-moment (P1) system discretized with the transport's own upwind
    /// fluxes, closed by the quadrature's half-range moments.
    p1_consistent,
    /// Symmetric interior-penalty discretization of the diffusion equation.
    sip,
};

enum class DsaBoundary { dirichlet, robin };

struct DsaOptions {
    DsaScheme scheme = DsaScheme::p1_consistent;
    DsaBoundary boundary = DsaBoundary::dirichlet;  // sip only
    double penalty = 4.0;        // sip: c in eta = c (K+1)^2 kappa / h
    double sigma_floor = 1e-8;   // sip: lower bound on sigma_t in the diffusion coefficient
};

/// Discrete diffusion-limit correction operator C with a cached sparse factorization.
///
/// For the sip scheme the unknown is the density only and the matrix is SPD.
/// For p1_consistent the unknowns are [rho; J_x; J_y] and solve() returns rho.
class DiffusionOperator {
public:
    DiffusionOperator(const DiscreteProblem& problem, const DsaOptions& options = {});

    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
    const std::array<double, 3>& eddington() const { return eddington_; }
    DsaScheme scheme() const { return scheme_; }
    int num_dofs() const { return ndof_; }

    /// Solves C x = rhs for a density-space right-hand side.
    Vector solve(const Vector& rhs) const;

private:
    void assemble_sip(const DiscreteProblem& problem, const DsaOptions& options);
    void assemble_p1(const DiscreteProblem& problem);

    DsaScheme scheme_;
    int ndof_ = 0;
    Eigen::SparseMatrix<double> matrix_;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
    std::array<double, 3> eddington_{};
};

std::shared_ptr<const DiffusionOperator> assemble_dsa(const DiscreteProblem& problem, const DsaOptions& options = {});

/// delta rho = C^{-1} Sigma_s residual.
DensityField dsa_correct(const DiffusionOperator& dsa, const DensityField& residual, const DiscreteProblem& problem);

/// Constant DSA correction for every iteration.
class DsaCorrection final : public CorrectionSchedule {
public:
    DsaCorrection(std::shared_ptr<const DiscreteProblem> problem, std::shared_ptr<const DiffusionOperator> dsa);

    DensityField correct(int, const DensityField& v) override;
    std::string last_kind() const override { return "dsa"; }

    const DiffusionOperator& diffusion() const { return *dsa_; }

private:
    std::shared_ptr<const DiscreteProblem> problem_;
    std::shared_ptr<const DiffusionOperator> dsa_;
};

} // namespace rte

#endif
