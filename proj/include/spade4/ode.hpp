#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

#include "spade4/errors.hpp"
#include "spade4/timeseries.hpp"

namespace spade4 {

struct CompartmentState {
    double S = 0.0;
    double E = 0.0;
    double I = 0.0;
    double R = 0.0;
    double t = 0.0;  // days

    double total() const { return S + E + I + R; }
};

struct CompartmentRates {
    double dS = 0.0;
    double dE = 0.0;
    double dI = 0.0;
    double dR = 0.0;
};

// Legendre polynomial P_k(x) via the Bonnet three-term recurrence
//   (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1},  P_0 = 1, P_1 = x.
inline double legendre_eval(int order_k, double x) {
    if (order_k < 0) throw ValidationError("legendre_eval: order must be >= 0");
    if (order_k == 0) return 1.0;
    double pkm1 = 1.0;
    double pk = x;
    for (int k = 1; k < order_k; ++k) {
        const double pkp1 = ((2.0 * k + 1.0) * x * pk - k * pkm1) / (k + 1.0);
        pkm1 = pk;
        pk = pkp1;
    }
    return pk;
}

// Time-varying transmission rate expressed in a Legendre basis on [t_min, t_max].
struct TransmissionBasis {
    std::vector<double> coeffs;  // xi_0 .. xi_q
    double t_min = 0.0;
    double t_max = 1.0;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    void check() const {
        if (coeffs.empty())
            throw ValidationError("transmission basis needs at least one coefficient");
        if (!(t_min < t_max))
            throw ValidationError("transmission basis requires t_min < t_max");
    }
};

namespace detail {

// Evaluates sum_k xi_k P_k(x) in one recurrence pass.
inline double legendre_series(const std::vector<double>& coeffs, double x) {
    double acc = coeffs[0];
    if (coeffs.size() == 1) return acc;
    double pkm1 = 1.0;
    double pk = x;
    acc += coeffs[1] * pk;
    for (std::size_t k = 1; k + 1 < coeffs.size(); ++k) {
        const double kk = static_cast<double>(k);
        const double pkp1 = ((2.0 * kk + 1.0) * x * pk - kk * pkm1) / (kk + 1.0);
        pkm1 = pk;
        pk = pkp1;
        acc += coeffs[k + 1] * pkp1;
    }
    return acc;
}

inline double map_to_unit_interval(const TransmissionBasis& b, double t) {
    return (2.0 * t - b.t_max - b.t_min) / (b.t_max - b.t_min);
}

}  // namespace detail

inline double beta_of_t(const TransmissionBasis& b, double t) {
    b.check();
    double x = detail::map_to_unit_interval(b, t);
    constexpr double slack = 1e-9;  // absorb roundoff at the endpoints
    if (x < -1.0 - slack || x > 1.0 + slack)
        throw ValidationError("beta_of_t: t = " + std::to_string(t) +
                              " lies outside the basis domain");
    x = std::clamp(x, -1.0, 1.0);
    return detail::legendre_series(b.coeffs, x);
}

// Constant extension outside [t_min, t_max]; used when a fitted model is
// integrated past its training span.
inline double beta_of_t_clamped(const TransmissionBasis& b, double t) {
    b.check();
    const double x = std::clamp(detail::map_to_unit_interval(b, t), -1.0, 1.0);
    return detail::legendre_series(b.coeffs, x);
}

struct SeirParams {
    std::variant<double, TransmissionBasis> beta = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
    double population = 0.0;

    double beta_at(double t) const {
        if (const double* fixed = std::get_if<double>(&beta)) return *fixed;
        return beta_of_t_clamped(std::get<TransmissionBasis>(beta), t);
    }
    void check() const {
        if (!(sigma > 0.0) || !(gamma > 0.0))
            throw ValidationError("seir params require sigma > 0 and gamma > 0");
        if (!(population > 0.0))
            throw ValidationError("seir params require population > 0");
        if (const double* fixed = std::get_if<double>(&beta)) {
            if (*fixed < 0.0) throw ValidationError("constant beta must be >= 0");
        } else {
            std::get<TransmissionBasis>(beta).check();
        }
    }
};

struct SueirParams {
    double beta = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
    double mu = 1.0;  // discovery rate in [0, 1]
    double population = 0.0;

    void check() const {
        if (beta < 0.0) throw ValidationError("sueir params require beta >= 0");
        if (!(sigma > 0.0) || !(gamma > 0.0))
            throw ValidationError("sueir params require sigma > 0 and gamma > 0");
        if (mu < 0.0 || mu > 1.0)
            throw ValidationError("discovery rate mu must lie in [0, 1]");
        if (!(population > 0.0))
            throw ValidationError("sueir params require population > 0");
    }
};

// Shared flux terms are computed once so the component sum telescopes.
inline CompartmentRates seir_rhs(const CompartmentState& x, const SeirParams& p) {
    const double infection = p.beta_at(x.t) * x.S * x.I / p.population;
    const double latency = p.sigma * x.E;
    const double removal = p.gamma * x.I;
    return {-infection, infection - latency, latency - removal, removal};
}

inline CompartmentRates sueir_rhs(const CompartmentState& x, const SueirParams& p) {
    const double infection = p.beta * (x.I + x.E) * x.S / p.population;
    const double latency = p.sigma * x.E;
    const double removal = p.gamma * x.I;
    return {-infection, infection - latency, p.mu * latency - removal, removal};
}

struct SeirRhs {
    SeirParams params;
    CompartmentRates operator()(const CompartmentState& x) const { return seir_rhs(x, params); }
};

struct SueirRhs {
    SueirParams params;
    CompartmentRates operator()(const CompartmentState& x) const { return sueir_rhs(x, params); }
};

namespace detail {

inline CompartmentState advance(const CompartmentState& x, const CompartmentRates& k, double h) {
    return {x.S + h * k.dS, x.E + h * k.dE, x.I + h * k.dI, x.R + h * k.dR, x.t + h};
}

inline bool finite(const CompartmentState& x) {
    return std::isfinite(x.S) && std::isfinite(x.E) && std::isfinite(x.I) && std::isfinite(x.R);
}

inline long steps_for(double horizon, double step) {
    const double ratio = horizon / step;
    const long n = std::lround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-6)
        throw ValidationError("integration horizon must be a positive multiple of the step");
    return n;
}

}  // namespace detail

// Classical fixed-step RK4 without storing the trajectory. The observer is
// invoked at every observe_every-th step, the initial state included.
template <typename Rhs, typename Observer>
void integrate_observe(Rhs&& rhs, const CompartmentState& initial, double step,
                       long n_steps, long observe_every, Observer&& observe) {
    if (!(step > 0.0)) throw ValidationError("integrate: step must be positive");
    if (n_steps < 0) throw ValidationError("integrate: negative step count");
    if (observe_every < 1) throw ValidationError("integrate: observe_every must be >= 1");

    CompartmentState x = initial;
    observe(static_cast<const CompartmentState&>(x));
    const double half = 0.5 * step;
    for (long i = 0; i < n_steps; ++i) {
        const CompartmentRates k1 = rhs(x);
        const CompartmentRates k2 = rhs(detail::advance(x, k1, half));
        const CompartmentRates k3 = rhs(detail::advance(x, k2, half));
        const CompartmentRates k4 = rhs(detail::advance(x, k3, step));
        CompartmentState next{
            x.S + step / 6.0 * (k1.dS + 2.0 * k2.dS + 2.0 * k3.dS + k4.dS),
            x.E + step / 6.0 * (k1.dE + 2.0 * k2.dE + 2.0 * k3.dE + k4.dE),
            x.I + step / 6.0 * (k1.dI + 2.0 * k2.dI + 2.0 * k3.dI + k4.dI),
            x.R + step / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR),
            initial.t + static_cast<double>(i + 1) * step};
        if (!detail::finite(next))
            throw DivergenceError("integration diverged", next.t);
        x = next;
        if ((i + 1) % observe_every == 0) observe(static_cast<const CompartmentState&>(x));
    }
}

// As above but returning the state at every step, initial state included.
template <typename Rhs>
std::vector<CompartmentState> integrate(Rhs&& rhs, const CompartmentState& initial,
                                        double step, double horizon) {
    if (!(step > 0.0)) throw ValidationError("integrate: step must be positive");
    if (!(horizon > 0.0)) throw ValidationError("integrate: horizon must be positive");
    const long n = detail::steps_for(horizon, step);
    std::vector<CompartmentState> traj;
    traj.reserve(static_cast<std::size_t>(n) + 1);
    integrate_observe(rhs, initial, step, n, 1,
                      [&](const CompartmentState& x) { traj.push_back(x); });
    return traj;
}

// Subsamples a fixed-step trajectory at integer days.
inline std::vector<CompartmentState> daily_samples(const std::vector<CompartmentState>& traj,
                                                   double step) {
    const long per_day = detail::steps_for(1.0, step);
    std::vector<CompartmentState> out;
    for (std::size_t i = 0; i < traj.size(); i += static_cast<std::size_t>(per_day))
        out.push_back(traj[i]);
    return out;
}

// Daily samples of I(t)/P over [0, horizon_days].
inline TimeSeries simulate_sueir_observable(const SueirParams& params,
                                            const CompartmentState& initial,
                                            int horizon_days, double step = 0.01) {
    params.check();
    if (horizon_days < 1)
        throw ValidationError("simulate_sueir_observable: horizon must be >= 1 day");
    const long per_day = detail::steps_for(1.0, step);
    TimeSeries out;
    out.t0 = std::lround(initial.t);
    out.dt = 1.0;
    out.values.reserve(static_cast<std::size_t>(horizon_days) + 1);
    integrate_observe(SueirRhs{params}, initial, step,
                      static_cast<long>(horizon_days) * per_day, per_day,
                      [&](const CompartmentState& x) { out.values.push_back(x.I / params.population); });
    return out;
}

}  // namespace spade4
