#include "choreo/stability.hpp"

#include <boost/numeric/odeint.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace choreo {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

using OdeState = std::vector<double>;

// Coupled orbit + first-variation field on (pos, vel, M) flattened row-major.
struct VariationalField {
    const ModelParams& p;
    int n;
    double s1, rs1;
    Eigen::Matrix3d Jb, Ib;

    explicit VariationalField(const ModelParams& params)
        : p(params), n(params.n), s1(params.s1), rs1(std::sqrt(params.s1)),
          Jb(jbar_matrix()), Ib(ibar_matrix()) {}

    void operator()(const OdeState& y, OdeState& dydt, double t) const {
        const int d = 6 * n;
        Eigen::Map<const Eigen::MatrixXd> M(y.data() + d, d, d);
        Eigen::Map<Eigen::MatrixXd> dM(dydt.data() + d, d, d);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3 * n, 3 * n);
        std::vector<Eigen::Vector3d> pos(n), vel(n), acc(n);
        for (int j = 0; j < n; ++j) {
            pos[j] = Eigen::Vector3d(y[3 * j], y[3 * j + 1], y[3 * j + 2]);
            vel[j] = Eigen::Vector3d(y[3 * n + 3 * j], y[3 * n + 3 * j + 1],
                                     y[3 * n + 3 * j + 2]);
        }
        for (int j = 0; j < n; ++j) {
            acc[j] = -2.0 * rs1 * (Jb * vel[j]) + s1 * (Ib * pos[j]);
            A.block<3, 3>(3 * j, 3 * j) += s1 * Ib;
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                const Eigen::Vector3d dij = pos[j] - pos[i];
                const double r = dij.norm();
                if (r < 1e-8) {
                    std::ostringstream msg;
                    msg << "monodromy: collision (distance " << r << ") at time " << t;
                    throw std::runtime_error(msg.str());
                }
                const double r3 = r * r * r;
                const double r5 = r3 * r * r;
                acc[j] -= dij / r3;
                const Eigen::Matrix3d K =
                    Eigen::Matrix3d::Identity() / r3 - 3.0 * (dij * dij.transpose()) / r5;
                A.block<3, 3>(3 * j, 3 * j) -= K;
                A.block<3, 3>(3 * j, 3 * i) += K;
            }
        }
        for (int j = 0; j < n; ++j) {
            for (int c = 0; c < 3; ++c) {
                dydt[3 * j + c] = vel[j][c];
                dydt[3 * n + 3 * j + c] = acc[j][c];
            }
        }
        // Df = [0 I; A C] with C the block-diagonal Coriolis part.
        Eigen::MatrixXd Df = Eigen::MatrixXd::Zero(d, d);
        Df.block(0, 3 * n, 3 * n, 3 * n).setIdentity();
        Df.block(3 * n, 0, 3 * n, 3 * n) = A;
        for (int j = 0; j < n; ++j)
            Df.block<3, 3>(3 * n + 3 * j, 3 * n + 3 * j) = -2.0 * rs1 * Jb;
        dM = Df * M;
    }
};

int env_thread_cap() {
    if (const char* env = std::getenv("CHOREO_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

std::vector<FourierVec3> reconstruct_bodies(const FourierVec3& u, const ModelParams& params) {
    std::vector<FourierVec3> bodies;
    bodies.reserve(static_cast<std::size_t>(params.n));
    for (int j = 1; j < params.n; ++j) {
        const auto js = static_cast<std::size_t>(j - 1);
        bodies.push_back(
            apply_matrix(params.rotations[js], delay_shift(u, params.delays[js])));
    }
    bodies.push_back(u);  // body n: rotation by 2 pi, shift by a multiple of 2 pi
    return bodies;
}

FullState rotating_vector_field(const FullState& state, const ModelParams& params) {
    const int n = params.n;
    const double s1 = params.s1;
    const double rs1 = std::sqrt(s1);
    const Eigen::Matrix3d Jb = jbar_matrix();
    const Eigen::Matrix3d Ib = ibar_matrix();
    FullState out;
    out.positions = state.velocities;
    out.velocities.resize(n, 3);
    for (int j = 0; j < n; ++j) {
        Eigen::Vector3d acc = -2.0 * rs1 * (Jb * state.velocities.row(j).transpose())
                              + s1 * (Ib * state.positions.row(j).transpose());
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            const Eigen::Vector3d dij =
                (state.positions.row(j) - state.positions.row(i)).transpose();
            const double r = dij.norm();
            if (r < 1e-8) throw std::runtime_error("rotating_vector_field: collision");
            acc -= dij / (r * r * r);
        }
        out.velocities.row(j) = acc.transpose();
    }
    return out;
}

double rotating_energy(const FullState& state, const ModelParams& params) {
    const int n = params.n;
    double E = 0.0;
    for (int j = 0; j < n; ++j) {
        E += 0.5 * state.velocities.row(j).squaredNorm();
        E -= 0.5 * params.s1
             * (state.positions(j, 0) * state.positions(j, 0)
                + state.positions(j, 1) * state.positions(j, 1));
        for (int i = j + 1; i < n; ++i)
            E -= 1.0 / (state.positions.row(j) - state.positions.row(i)).norm();
    }
    return E;
}

FullState initial_full_state(const FourierVec3& u, double omega, const ModelParams& params) {
    const auto bodies = reconstruct_bodies(u, params);
    const int n = params.n;
    FullState st;
    st.positions.resize(n, 3);
    st.velocities.resize(n, 3);
    for (int j = 0; j < n; ++j) {
        const FourierVec3& b = bodies[static_cast<std::size_t>(j)];
        st.positions.row(j) = evaluate_at(b, 0.0).transpose();
        st.velocities.row(j) = (omega * evaluate_at(differentiate(b), 0.0)).transpose();
    }
    return st;
}

MonodromyResult monodromy(const FourierVec3& u, double omega, const ModelParams& params,
                          const IntegratorOptions& opts) {
    namespace odeint = boost::numeric::odeint;
    const int n = params.n;
    const int d = 6 * n;
    const FullState st0 = initial_full_state(u, omega, params);
    OdeState y(static_cast<std::size_t>(d + d * d), 0.0);
    for (int j = 0; j < n; ++j)
        for (int c = 0; c < 3; ++c) {
            y[static_cast<std::size_t>(3 * j + c)] = st0.positions(j, c);
            y[static_cast<std::size_t>(3 * n + 3 * j + c)] = st0.velocities(j, c);
        }
    for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(d + i * d + i)] = 1.0;  // M(0) = Id

    const double T = kTwoPi / omega;
    VariationalField field(params);
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(
        opts.atol, opts.rtol);
    odeint::integrate_adaptive(stepper, std::cref(field), y, 0.0, T, T / 1024.0);

    Eigen::MatrixXd M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = y[static_cast<std::size_t>(d + i * d + j)];

    MonodromyResult res;
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
    res.multipliers = es.eigenvalues();
    res.symplectic_defect = std::abs(M.partialPivLu().determinant() - 1.0);
    int morse = 0;
    double trivial_defect = 0.0;
    for (Eigen::Index i = 0; i < res.multipliers.size(); ++i) {
        const Complex lam = res.multipliers[i];
        const bool trivial = std::abs(lam - Complex(1.0, 0.0)) < 1e-4;
        if (trivial) trivial_defect = std::max(trivial_defect, std::abs(std::abs(lam) - 1.0));
        // count a multiplier unstable only when it clears the unit circle by
        // more than the numerical drift of exactly-elliptic multipliers
        // (integration + eigenvalue conditioning pushes them ~1e-6..1e-5 off)
        if (!trivial && std::abs(lam) > 1.0 + 1e-4) ++morse;
    }
    res.morse_index = morse;
    res.unit_circle_defect = trivial_defect;
    return res;
}

Eigen::Vector3d inertial_point(const FourierVec3& u_body, double omega, double s1, double s) {
    const double ang = std::sqrt(s1) * s;
    Eigen::Matrix3d R;
    R << std::cos(ang), -std::sin(ang), 0,
         std::sin(ang),  std::cos(ang), 0,
         0, 0, 1;
    return R * evaluate_at(u_body, omega * s);
}

std::vector<MorseProfileEntry> morse_profile(const std::vector<BranchRecord>& records,
                                             const std::vector<Eigen::VectorXd>& states,
                                             const ModelParams& params, int stride,
                                             int max_threads) {
    if (stride < 1) stride = 1;
    std::vector<std::size_t> sampled;
    for (std::size_t i = 0; i < records.size(); i += static_cast<std::size_t>(stride))
        sampled.push_back(i);
    std::vector<MorseProfileEntry> out(sampled.size());

    const int nthreads =
        std::max(1, std::min(max_threads > 0 ? max_threads : env_thread_cap(),
                             static_cast<int>(sampled.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= sampled.size()) return;
            const std::size_t rec_idx = sampled[idx];
            MorseProfileEntry entry;
            entry.step = records[rec_idx].step;
            try {
                const StateVector sv =
                    StateVector::unpack(states[rec_idx], params.n, params.m);
                entry.morse_index = monodromy(sv.u, sv.omega, params).morse_index;
            } catch (const std::exception&) {
                // gap, not fatal
            }
            out[idx] = entry;
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace choreo
