#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace testutil {

inline std::string config_path(const std::string& name) {
    return std::string(RISRADAR_CONFIG_DIR) + "/" + name;
}

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol, int depth = 55) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

} // namespace detail

// Quadrature oracle for the detection probability: survival of X1 + X2 above
// gamma, X_i exponential with mean mu_i = 1 + snr_i. Independent of the
// closed form under test (integrates the density).
inline double hypoexp_survival_quadrature(double snr1, double snr2, double gamma) {
    if (gamma <= 0.0) return 1.0;
    const double mu1 = 1.0 + snr1;
    const double mu2 = 1.0 + snr2;
    const bool erlang = std::abs(mu1 - mu2) <= 1e-12 * std::max(mu1, mu2);
    const auto density = [&](double t) {
        if (erlang) {
            const double mu = 0.5 * (mu1 + mu2);
            return t * std::exp(-t / mu) / (mu * mu);
        }
        return (std::exp(-t / mu1) - std::exp(-t / mu2)) / (mu1 - mu2);
    };
    const double upper = gamma + 60.0 * std::max(mu1, mu2);
    return detail::integrate(density, gamma, upper, 1e-13);
}

struct McResult {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double ci3 = 0.0; // 3 binomial standard deviations
};

// Monte Carlo oracle: sample the two exponentials directly with an engine
// unrelated to the library's generator.
inline McResult mc_two_exponentials(double snr1, double snr2, double gamma, std::uint64_t n,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto u01 = [&rng] {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    };
    const double mu1 = 1.0 + snr1;
    const double mu2 = 1.0 + snr2;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = -mu1 * std::log(u01()) - mu2 * std::log(u01());
        hits += x > gamma ? 1 : 0;
    }
    McResult r;
    r.hits = hits;
    r.trials = n;
    r.p_hat = static_cast<double>(hits) / static_cast<double>(n);
    r.ci3 = 3.0 * std::sqrt(r.p_hat * (1.0 - r.p_hat) / static_cast<double>(n));
    return r;
}

} // namespace testutil
