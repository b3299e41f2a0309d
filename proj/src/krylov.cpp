#include "rte/krylov.hpp"

#include <cmath>

namespace rte {

HessenbergLeastSquares::HessenbergLeastSquares(double beta) : g_{beta} {}

double HessenbergLeastSquares::add_column(const Vector& h)
{
    const int m = size();
    if (h.size() != m + 2)
        throw InvalidArgument("Hessenberg column has the wrong length");
    Vector col = h;
    for (int i = 0; i < m; ++i) {
        const double a = cs_[i] * col[i] + sn_[i] * col[i + 1];
        col[i + 1] = -sn_[i] * col[i] + cs_[i] * col[i + 1];
        col[i] = a;
    }
    const double rr = std::hypot(col[m], col[m + 1]);
    double c = 1.0;
    double s = 0.0;
    if (rr > 0.0) {
        c = col[m] / rr;
        s = col[m + 1] / rr;
    }
    col[m] = rr;
    cs_.push_back(c);
    sn_.push_back(s);
    r_.push_back(col.head(m + 1));
    g_.push_back(-s * g_[m]);
    g_[m] = c * g_[m];
    return residual();
}

Vector HessenbergLeastSquares::solve() const
{
    const int m = size();
    Vector y(m);
    for (int i = m - 1; i >= 0; --i) {
        double v = g_[i];
        for (int k = i + 1; k < m; ++k)
            v -= r_[k][i] * y[k];
        y[i] = r_[i][i] != 0.0 ? v / r_[i][i] : 0.0;
    }
    return y;
}

std::pair<Vector, double> hessenberg_lsq(const Matrix& H, double beta)
{
    const Eigen::Index m = H.cols();
    if (m < 1 || H.rows() != m + 1)
        throw InvalidArgument("hessenberg_lsq expects an (m+1) x m matrix with m >= 1");
    HessenbergLeastSquares lsq(beta);
    for (Eigen::Index k = 0; k < m; ++k)
        lsq.add_column(H.col(k).head(k + 2));
    return {lsq.solve(), lsq.residual()};
}

FlexibleArnoldi::FlexibleArnoldi(const Vector& r0, double breakdown_scale)
    : lsq_(r0.norm()), breakdown_tol_(1e-14 * breakdown_scale)
{
    state_.beta = r0.norm();
    state_.H.resize(1, 0);
    if (state_.beta > 0.0)
        state_.q.push_back(r0 / state_.beta);
    else
        broken_ = true;
}

double FlexibleArnoldi::step(const TransportOperator& op, const Vector& z)
{
    if (broken_)
        throw InvalidArgument("flexible Arnoldi cannot continue after breakdown");
    const int m = steps();
    Vector w = op.apply_lhs_tilde(z);
    Vector h = Vector::Zero(m + 2);
    const double before = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= m; ++i) {
            const double c = w.dot(state_.q[i]);
            h[i] += c;
            w -= c * state_.q[i];
        }
        if (pass == 0 && w.norm() * 1e3 >= before)
            break;
    }
    h[m + 1] = w.norm();

    state_.z.push_back(z);
    state_.H.conservativeResize(m + 2, m + 1);
    state_.H.row(m + 1).setZero();
    state_.H.col(m) = h;
    lsq_.add_column(h);
    if (h[m + 1] <= breakdown_tol_)
        broken_ = true;
    else
        state_.q.push_back(w / h[m + 1]);
    return lsq_.residual();
}

Vector FlexibleArnoldi::solution(const Vector& rho0) const
{
    Vector rho = rho0;
    if (steps() == 0)
        return rho;
    const Vector y = lsq_.solve();
    for (int k = 0; k < steps(); ++k)
        rho += y[k] * state_.z[k];
    return rho;
}

SolveReport fgmres(const TransportOperator& op, CorrectionSchedule& schedule, const DensityField& rho0,
                   const SolveOptions& options, KrylovState* state)
{
    if (!(options.tol > 0.0))
        throw InvalidArgument("fgmres: tolerance must be positive");
    if (rho0.size() != op.num_dofs())
        throw InvalidArgument("fgmres: initial guess has the wrong length");
    schedule.reset();
    SolveReport rep;
    const DensityField b = op.b_tilde();
    rep.sweep_count = 1;
    Vector r0 = b;
    if (rho0.cwiseAbs().maxCoeff() > 0.0) {
        r0 -= op.apply_lhs_tilde(rho0);
        ++rep.sweep_count;
    }
    FlexibleArnoldi arnoldi(r0, b.norm());
    const double target = options.relative ? options.tol * arnoldi.beta() : options.tol;

    if (arnoldi.beta() < target || arnoldi.broken_down()) {
        rep.converged = true;
    } else {
        for (int l = 1; l <= options.max_iter; ++l) {
            const Vector& q = arnoldi.current();
            const Vector z = q + schedule.correct(l, q);
            const double res = arnoldi.step(op, z);
            rep.iterations = l;
            ++rep.sweep_count;
            rep.residual_history.push_back(res);
            if (options.record_trajectory) {
                rep.iterates.push_back(arnoldi.solution(rho0));
                rep.corrections.push_back(schedule.last_kind());
            }
            if (res < target || arnoldi.broken_down()) {
                rep.converged = true;
                break;
            }
        }
    }
    rep.final_density = arnoldi.solution(rho0);
    if (options.keep_flux)
        rep.final_flux = op.sweep(op.problem().scattering_mass() * rep.final_density, true);
    if (state)
        *state = arnoldi.state();
    return rep;
}

} // namespace rte
