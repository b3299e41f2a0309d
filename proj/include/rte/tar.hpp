#ifndef RTE_TAR_HPP
#define RTE_TAR_HPP

#include "rte/dsa.hpp"
#include "rte/krylov.hpp"
#include "rte/rom.hpp"

#include <memory>
#include <string>

namespace rte {

enum class TarMode { si, fgmres };
enum class InitialGuessPolicy { zero, rom };

std::string to_string(TarMode mode);
std::string to_string(InitialGuessPolicy policy);

struct TrainingOptions {
    double tol = 1e-13;
    int max_iter = 500;
    int window = 0;         // keep f^(l) for l <= window
    DsaOptions dsa;
};

/// Converged SI-DSA solutions over a training set.
struct TrainingSet {
    std::vector<Parameter> mu;
    std::vector<Vector> flux;                        // stacked converged states
    std::vector<DensityField> density;
    std::vector<bool> converged;
    std::vector<std::vector<Vector>> window;         // stacked f^(l), zero initial guess
    long long sweeps = 0;
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(mu.size()); }
};

/// Solves every training parameter with SI-DSA from a zero guess. Unconverged runs
/// are kept and reported in warnings.
TrainingSet compute_training_set(const ParametricProblem& family, const std::vector<Parameter>& mu,
                                 const TrainingOptions& options = {});

/// Offline product: optional initial-guess basis and the per-iteration correction bases.
struct TarArtifact {
    TarMode mode = TarMode::si;
    InitialGuessPolicy policy = InitialGuessPolicy::zero;
    double eps_pod = 0.0;
    int requested_levels = 0;
    std::shared_ptr<const ReducedBasis> ig_basis;
    std::vector<std::shared_ptr<const ReducedBasis>> levels;
    std::vector<Parameter> training;
    std::vector<std::string> provenance;  // one line per level

    int aware_levels() const { return static_cast<int>(levels.size()); }
};

/// Offline diagnostics: per-level residual vectors of every training trajectory and timings.
struct OfflineTrace {
    std::vector<std::vector<DensityField>> residuals;  // [level][parameter]; SI increments or Krylov vectors
    std::vector<std::vector<DensityField>> etas;       // FGMRES only
    std::vector<int> frozen;                           // FGMRES: parameters frozen at each level
    long long sweeps = 0;
    double sweep_seconds = 0.0;
    double basis_seconds = 0.0;
    double projection_seconds = 0.0;
};

/// POD of the training solutions, projected onto the family.
std::shared_ptr<ReducedBasis> build_solution_basis(const ParametricProblem& family, const TrainingSet& training,
                                                   double eps_pod);

/// Trajectory-aware bases for source iteration. A given initial-guess basis is reused
/// instead of being rebuilt from the training set.
TarArtifact tar_offline_si(const ParametricProblem& family, const TrainingSet& training, InitialGuessPolicy policy,
                           int n_w, double eps_pod, OfflineTrace* trace = nullptr,
                           std::shared_ptr<const ReducedBasis> ig_basis = nullptr);

/// Trajectory-aware bases for flexible GMRES, built from eta vectors of lockstep Arnoldi processes.
TarArtifact tar_offline_fgmres(const ParametricProblem& family, const TrainingSet& training,
                               InitialGuessPolicy policy, int n_w, double eps_pod, OfflineTrace* trace = nullptr,
                               std::shared_ptr<const ReducedBasis> ig_basis = nullptr);

enum class EtaStatus { ok, converged, breakdown };

struct EtaResult {
    EtaStatus status = EtaStatus::ok;
    DensityField eta;
};

/// eta^(l) with (I - K Sigma_s) eta^(l) = q^(l), from the converged density and the Arnoldi data.
/// previous holds eta^(1..l-1).
EtaResult compute_eta(int l, const DensityField& rho, const DensityField& rho0, const KrylovState& state,
                      const std::vector<DensityField>& previous);

/// Initial guess of the artifact's policy; a failed reduced solve falls back to zero.
DensityField artifact_initial_guess(const TarArtifact& artifact, const DiscreteProblem& problem);

/// ROM correction of level l for l <= N_w, DSA afterwards. A failed reduced solve
/// switches to DSA for the rest of the run.
class TarSchedule final : public CorrectionSchedule {
public:
    TarSchedule(std::vector<std::shared_ptr<const ReducedBasis>> levels, std::shared_ptr<const DiscreteProblem> problem,
                std::shared_ptr<const DiffusionOperator> dsa);

    DensityField correct(int iteration, const DensityField& v) override;
    void reset() override;
    std::string last_kind() const override { return kind_; }
    bool fell_back() const { return failed_; }

private:
    std::vector<std::shared_ptr<const ReducedBasis>> levels_;
    std::vector<std::unique_ptr<ReducedOperator>> reduced_;
    std::shared_ptr<const DiscreteProblem> problem_;
    DsaCorrection dsa_;
    bool failed_ = false;
    std::string kind_ = "none";
};

/// M_l^{-1} = I + C_l^{-1} Sigma_s with ROM levels first and DSA afterwards.
std::unique_ptr<TarSchedule> build_preconditioner_schedule(const TarArtifact& artifact,
                                                           std::shared_ptr<const DiscreteProblem> problem,
                                                           std::shared_ptr<const DiffusionOperator> dsa);

SolveReport tar_online_si(const TarArtifact& artifact, const TransportOperator& op,
                          std::shared_ptr<const DiffusionOperator> dsa, const SolveOptions& options = {});

SolveReport tar_online_fgmres(const TarArtifact& artifact, const TransportOperator& op,
                              std::shared_ptr<const DiffusionOperator> dsa, const SolveOptions& options = {});

struct RomsadConfig {
    int window = 3;
    int switch_iteration = 3;  // L
    double tolerance = 0.0;    // nonpositive: 1e-3 times the first increment norm
};

/// One basis from windowed SI-DSA snapshots f_mu - f_mu^(l), l = 1..window.
std::shared_ptr<ReducedBasis> romsad_offline(const ParametricProblem& family, const TrainingSet& training,
                                             int window, double eps_pod);

/// ROM correction while l <= L and the increment is at least the tolerance, DSA otherwise.
class RomsadSchedule final : public CorrectionSchedule {
public:
    RomsadSchedule(RomsadConfig config, std::shared_ptr<const ReducedBasis> basis,
                   std::shared_ptr<const DiscreteProblem> problem, std::shared_ptr<const DiffusionOperator> dsa);

    DensityField correct(int iteration, const DensityField& v) override;
    void reset() override;
    std::string last_kind() const override { return kind_; }
    double tolerance() const { return tolerance_; }

private:
    RomsadConfig config_;
    std::shared_ptr<const ReducedBasis> basis_;
    std::shared_ptr<const DiscreteProblem> problem_;
    std::unique_ptr<ReducedOperator> reduced_;
    DsaCorrection dsa_;
    double tolerance_ = 0.0;
    bool failed_ = false;
    std::string kind_ = "none";
};

std::unique_ptr<RomsadSchedule> romsad_schedule(const RomsadConfig& config, std::shared_ptr<const ReducedBasis> basis,
                                                std::shared_ptr<const DiscreteProblem> problem,
                                                std::shared_ptr<const DiffusionOperator> dsa);

} // namespace rte

#endif
