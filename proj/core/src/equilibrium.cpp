#include "cstrph/equilibrium.hpp"

#include "cstrph/phs.hpp"
#include "cstrph/thermo.hpp"
#include "cstrph/transform.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cstrph {

std::string to_string(Stability s)
{
    switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
    }
    return "marginal";
}

Vector SteadyState::x() const
{
    Vector out(N.size() + 1);
    out(0) = U;
    out.tail(N.size()) = N;
    return out;
}

namespace {

Vector c_in_vector(const ReactionNetwork& net)
{
    return Eigen::Map<const Vector>(net.inlet.c_in.data(),
                                    static_cast<Eigen::Index>(net.inlet.c_in.size()));
}

Vector mass_balance(const ReactionNetwork& net, const Matrix& dz, const Vector& c_in, double T,
                    double q, const Vector& N)
{
    const double V = net.reactor.V;
    const RateVector r = reaction_rates(net, N, T);
    Vector F = q * (c_in - N / V);
    if (dz.cols() > 0) F += dz * (r.backward - r.forward) * V;
    return F;
}

}  // namespace

Vector mass_balance_steady(const ReactionNetwork& net, double T, double q,
                           const MassBalanceOptions& opts)
{
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
    const double V = net.reactor.V;
    const Vector c_in = c_in_vector(net);
    const Matrix dz = stoichiometry_change(net);
    const double scale = q * c_in.sum();
    const double n_scale = V * c_in.sum();
    const auto p = c_in.size();

    Vector N = V * c_in;
    if (dz.cols() == 0) return N;

    auto F = [&](const Vector& n) { return mass_balance(net, dz, c_in, T, q, n); };
    Vector f = F(N);
    for (int it = 0; it < opts.max_iterations; ++it) {
        const double res = f.lpNorm<Eigen::Infinity>() / scale;
        if (res < opts.tolerance) break;

        Matrix Jac(p, p);
        for (Eigen::Index j = 0; j < p; ++j) {
            const double h = 1e-7 * std::max(std::abs(N(j)), 1e-6 * n_scale);
            Vector Np = N, Nm = N;
            Np(j) += h;
            Nm(j) -= h;
            Jac.col(j) = (F(Np) - F(Nm)) / (2.0 * h);
        }
        const Vector step = Jac.fullPivLu().solve(-f);
        if (!step.allFinite()) throw ConvergenceError("mass balance Jacobian is singular");

        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 40; ++k, lambda *= 0.5) {
            const Vector trial = N + lambda * step;
            if ((trial.array() < 0.0).any()) continue;
            const Vector ft = F(trial);
            if (ft.norm() < f.norm() || k == 39) {
                N = trial;
                f = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) throw ConvergenceError("mass balance line search failed");
        if (it == opts.max_iterations - 1 &&
            f.lpNorm<Eigen::Infinity>() / scale >= opts.tolerance) {
            std::ostringstream os;
            os << "mass balance did not converge at T = " << T << " after "
               << opts.max_iterations << " iterations";
            throw ConvergenceError(os.str());
        }
    }
    if ((N.array() < 0.0).any()) throw ConvergenceError("mass balance solution is negative");
    return N;
}

double energy_residual(const ReactionNetwork& net, double T, double q, double T_w)
{
    const Vector N = mass_balance_steady(net, T, q);
    const double U = internal_energy(net, N, T);
    return q * (inlet_internal_energy(net) - U) / net.reactor.V + net.reactor.lambda * (T_w - T);
}

Matrix drift_jacobian(const DriftFunction& f, const Vector& x)
{
    const auto n = x.size();
    Matrix Jac(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = 1e-6 * std::max(std::abs(x(i)), 1.0);
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        Jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return Jac;
}

Classification classify(const DriftFunction& f, const Vector& x)
{
    Classification c;
    Eigen::EigenSolver<Matrix> solver(drift_jacobian(f, x), false);
    c.eigenvalues = solver.eigenvalues();
    c.max_real = c.eigenvalues.real().maxCoeff();
    if (std::abs(c.max_real) < kMarginalTol)
        c.stability = Stability::Marginal;
    else
        c.stability = c.max_real < 0.0 ? Stability::Stable : Stability::Unstable;
    return c;
}

Classification classify(const ReactionNetwork& net, const Vector& x, const InputVector& u)
{
    return classify(
        [&](const Vector& y) {
            return assemble(net, ThermoState::from_vector(net, y), u).sde.drift;
        },
        x);
}

Classification classify_jacket(const ReactionNetwork& net, const Vector& x, double q, double T_w)
{
    return classify(
        [&](const Vector& y) {
            const ThermoState s = ThermoState::from_vector(net, y);
            const InputVector u{q, net.reactor.lambda * (T_w - s.T())};
            return assemble(net, s, u).sde.drift;
        },
        x);
}

std::vector<SteadyState> steady_states(const ReactionNetwork& net, double q, double T_w,
                                       double T_lo, double T_hi, const ScanOptions& opts)
{
    if (!(T_lo > 0.0) || !(T_hi > T_lo)) throw std::invalid_argument("need 0 < T_lo < T_hi");
    if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
    if (opts.grid_points < 2) throw std::invalid_argument("grid needs at least 2 points");

    auto E = [&](double T) {
        try {
            return energy_residual(net, T, q, T_w);
        } catch (const ConvergenceError&) {
            return std::nan("");
        }
    };

    const int n = opts.grid_points;
    std::vector<double> Ts(static_cast<std::size_t>(n)), Es(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const auto sk = static_cast<std::size_t>(k);
        Ts[sk] = T_lo + (T_hi - T_lo) * k / (n - 1);
        Es[sk] = E(Ts[sk]);
    }

    std::vector<double> roots;
    for (std::size_t k = 0; k + 1 < Ts.size(); ++k) {
        const double ea = Es[k], eb = Es[k + 1];
        if (!std::isfinite(ea) || !std::isfinite(eb)) continue;
        if (ea == 0.0) {
            roots.push_back(Ts[k]);
            continue;
        }
        if (eb == 0.0) {
            if (k + 2 == Ts.size()) roots.push_back(Ts[k + 1]);
            continue;
        }
        if ((ea < 0.0) == (eb < 0.0)) continue;
        double a = Ts[k], b = Ts[k + 1], fa = ea;
        for (int it = 0; it < 200 && (b - a) > 1e-3 * opts.bisection_tol; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = E(m);
            if (!std::isfinite(fm) || fm == 0.0) {
                a = b = m;
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push_back(0.5 * (a + b));
    }

    std::vector<SteadyState> out;
    for (double T : roots) {
        SteadyState s;
        s.T = T;
        s.q = q;
        s.N = mass_balance_steady(net, T, q);
        s.U = internal_energy(net, s.N, T);
        s.Qdot_required = net.reactor.lambda * (T_w - T);
        const Classification c = classify_jacket(net, s.x(), q, T_w);
        s.classification = c.stability;
        s.eigenvalues = c.eigenvalues;
        s.max_real = c.max_real;
        s.residual = scaled_drift_residual(net, s.x(), InputVector{q, s.Qdot_required});
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace cstrph
