#ifndef RTE_ROM_HPP
#define RTE_ROM_HPP

#include "rte/transport.hpp"

#include <Eigen/LU>

#include <string>

namespace rte {

/// Parameter and iteration level that produced a snapshot column (level 0 = converged solution).
struct SnapshotLabel {
    Parameter mu;
    int level = 0;
};

/// Column-wise collection of stacked states of a common length N_h.
class SnapshotMatrix {
public:
    explicit SnapshotMatrix(Eigen::Index rows = 0) : rows_(rows) {}

    void add(const Vector& column, SnapshotLabel label);
    void add(const Vector& column) { add(column, {}); }

    Eigen::Index rows() const { return rows_; }
    int cols() const { return static_cast<int>(columns_.size()); }
    const Vector& column(int i) const { return columns_[i]; }
    const SnapshotLabel& label(int i) const { return labels_[i]; }
    Matrix matrix() const;

private:
    Eigen::Index rows_;
    std::vector<Vector> columns_;
    std::vector<SnapshotLabel> labels_;
};

/// POD basis of stacked angular states plus its precomputed online data.
struct ReducedBasis {
    Matrix U;                  // N_h x r, orthonormal columns
    Vector singular_values;    // all singular values, descending
    double eps_svd = 0.0;
    int num_dofs = 0;
    int num_directions = 0;
    Matrix U_rho;              // sum_j w_j U_j, N_DOF x r
    Matrix U_iso;              // sum_j U_j, N_DOF x r
    std::vector<Matrix> operator_blocks;  // U^T A_q U
    std::vector<Vector> rhs_blocks;       // U^T b_p

    int rank() const { return static_cast<int>(U.cols()); }
    bool projected() const { return !operator_blocks.empty() || rank() == 0; }
    /// Fraction sum_{i<=r} s_i / sum_i s_i.
    double retained_energy() const;
};

/// Truncated SVD keeping the smallest rank whose singular-value sum fraction reaches 1 - eps_svd.
///
/// Columns with norm below 1e-14 times the largest are dropped first. An all-zero
/// matrix yields an empty basis and a warning on std::clog.
ReducedBasis pod(const SnapshotMatrix& snapshots, double eps_svd);

/// Fills U_rho, U_iso and the projected affine blocks of the family.
void project_operators(ReducedBasis& basis, const ParametricProblem& family);

/// U^T A(mu) U assembled from the projected blocks.
Matrix reduced_matrix(const ReducedBasis& basis, const AffineDecomposition& affine, const Parameter& mu);
/// U^T b(mu) assembled from the projected blocks.
Vector reduced_rhs(const ReducedBasis& basis, const AffineDecomposition& affine, const Parameter& mu);

/// Factorized reduced operator at one parameter.
class ReducedOperator {
public:
    ReducedOperator() = default;
    ReducedOperator(const ReducedBasis& basis, const AffineDecomposition& affine, const Parameter& mu);

    int rank() const { return static_cast<int>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }
    double rcond() const { return rcond_; }
    Vector solve(const Vector& rhs) const;

private:
    Matrix matrix_;
    Eigen::PartialPivLU<Matrix> lu_;
    double rcond_ = 1.0;
};

/// Solves the reduced system at mu; throws NumericalFailure when it is singular.
Vector reduced_solve(const ReducedBasis& basis, const AffineDecomposition& affine, const Parameter& mu,
                     const Vector& rhs);

/// rho_0 = U_rho A_r(mu)^{-1} b_r(mu) from a solution basis; zero when r = 0.
DensityField rom_initial_guess(const ReducedBasis& basis, const DiscreteProblem& problem);

/// Multiply-add counts of one ROM correction, by stage.
struct RomOpCount {
    long long scattering = 0;
    long long restrict = 0;
    long long reduced = 0;
    long long prolong = 0;
    long long total() const { return scattering + restrict + reduced + prolong; }
};

/// C_ROM^{-1} Sigma_s q = U_rho A_r^{-1} U_iso^T Sigma_s q with O(r (N_DOF + r^2)) work.
DensityField apply_rom_correction(const ReducedBasis& basis, const ReducedOperator& reduced,
                                  const DiscreteProblem& problem, const DensityField& q,
                                  RomOpCount* count = nullptr);

/// The same ROM correction in every iteration.
class RomCorrection final : public CorrectionSchedule {
public:
    RomCorrection(std::shared_ptr<const DiscreteProblem> problem, std::shared_ptr<const ReducedBasis> basis);

    DensityField correct(int, const DensityField& v) override;
    std::string last_kind() const override { return "rom"; }

private:
    std::shared_ptr<const DiscreteProblem> problem_;
    std::shared_ptr<const ReducedBasis> basis_;
    ReducedOperator reduced_;
};

} // namespace rte

#endif
