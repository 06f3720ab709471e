#include "risradar/detection.hpp"

#include <algorithm>
#include <cmath>

#include "risradar/design.hpp"
#include "risradar/errors.hpp"

namespace risradar {

double pfa_from_threshold(double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("threshold must be >= 0");
    return (1.0 + gamma) * std::exp(-gamma);
}

double threshold_from_pfa(double pfa) {
    if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("pfa must lie in (0, 1)");
    // (1+g)e^{-g} is strictly decreasing on g > 0; bisect until the bracket
    // collapses to adjacent doubles. 745 is where the map underflows.
    double lo = 0.0;
    double hi = 745.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pfa_from_threshold(mid) > pfa)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> compute_snrs(const Design& design, const LinkBudget& link,
                                       const TargetStats& target, const RadarParams& radar,
                                       const RisParams& ris) {
    const double snr1 =
        link.alpha_1 * link.alpha_1 * target.sigma2_g1 * design.p_r / radar.p_w1;
    if (design.l <= 0) return {snr1, 0.0};
    const double l = static_cast<double>(design.l);
    const double sum_a = l * design.amplitude;                      // sum a_l
    const double sum_a2 = l * design.amplitude * design.amplitude;  // sum a_l^2
    const double noise2 = radar.p_w2 + link.alpha_sr * link.alpha_sr * ris.p_v * sum_a2;
    const double snr2 =
        link.alpha_2 * link.alpha_2 * target.sigma2_g2 * design.p_r * sum_a * sum_a / noise2;
    return {snr1, snr2};
}

double pd_two_channel(double snr1, double snr2, double gamma) {
    if (snr2 > snr1) std::swap(snr1, snr2); // formula is symmetric; fix the order
    // Numerically-equal SNRs: Erlang-2 limit, no cancellation. At (0,0) this
    // reproduces pfa_from_threshold(gamma) bit for bit.
    if (snr1 - snr2 <= 1e-9 * (1.0 + snr1)) {
        const double mu = 1.0 + 0.5 * (snr1 + snr2);
        const double t = gamma / mu;
        return (1.0 + t) * std::exp(-t);
    }
    // With mu_i = 1 + snr_i, t_i = gamma/mu_i and delta = t2 - t1 > 0:
    //   PD = e^{-t1} (1 + t1 (1 - e^{-delta})/delta)
    // which is the hypo-exponential survival rewritten without subtractive
    // cancellation; every factor is positive.
    const double mu1 = 1.0 + snr1;
    const double mu2 = 1.0 + snr2;
    const double t1 = gamma / mu1;
    const double delta = gamma * (snr1 - snr2) / (mu1 * mu2);
    const double ratio = -std::expm1(-delta) / delta;
    double pd = std::exp(-t1) * (1.0 + t1 * ratio);
    return std::clamp(pd, 0.0, 1.0); // guards sub-epsilon rounding only
}

double pd_single_channel(double snr, double pfa) {
    if (!(snr >= 0.0)) throw DomainError("snr must be >= 0");
    if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("pfa must lie in (0, 1)");
    return std::exp(std::log(pfa) / (1.0 + snr));
}

} // namespace risradar
