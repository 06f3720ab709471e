#pragma once

#include <utility>

#include "risradar/scenario.hpp"

namespace risradar {

struct Design; // full definition in design.hpp

// One point on the analytic detection characteristic.
struct OperatingPoint {
    double snr1 = 0.0;
    double snr2 = 0.0;
    double gamma = 0.0;
    double pfa = 0.0;
    double pd = 0.0;
};

// PFA of the two-channel GLRT at threshold gamma: (1+gamma) e^{-gamma}.
double pfa_from_threshold(double gamma);

// Unique gamma > 0 with (1+gamma) e^{-gamma} = pfa, to 1e-12 relative.
double threshold_from_pfa(double pfa);

// Per-channel SNRs for a uniform-amplitude design.
//   snr1 = alpha_1^2 sigma2_g1 p_r / p_w1
//   snr2 = alpha_2^2 sigma2_g2 p_r (l a)^2 / (p_w2 + alpha_sr^2 p_v l a^2)
std::pair<double, double> compute_snrs(const Design& design, const LinkBudget& link,
                                       const TargetStats& target, const RadarParams& radar,
                                       const RisParams& ris);

// Hypo-exponential detection probability of the two-channel statistic; falls
// back to the Erlang-2 limit when the SNRs are numerically equal.
double pd_two_channel(double snr1, double snr2, double gamma);

// Swerling-1 single square-law channel at false-alarm rate pfa:
// PD = pfa^{1/(1+snr)}.
double pd_single_channel(double snr, double pfa);

} // namespace risradar
