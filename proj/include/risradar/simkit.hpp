#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "risradar/design.hpp"
#include "risradar/scenario.hpp"

namespace risradar {

struct McEstimate {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double p_hat = 0.0;
    double ci_halfwidth = 0.0; // 3 sqrt(p_hat (1-p_hat) / trials)
    std::uint64_t seed = 0;
};

enum class Hypothesis { target_absent, target_present };

// Trial-level Monte Carlo of the two-channel GLRT. Counter-based streams:
// trials are split into 2^16-trial blocks, substream id = block index, so the
// hit count is identical for any worker count. Per trial the draw order is
// fixed (gamma1, gamma2, w1, z2) and all four are always consumed, which makes
// runs with different scenario parameters share their random numbers.
McEstimate estimate_detection_mc(const Design& design, const ScenarioConfig& cfg,
                                 Hypothesis hyp, std::uint64_t trials, std::uint64_t seed);

// Serial reference implementation with identical output; kept for tests and
// the benchmark.
McEstimate estimate_detection_mc_serial(const Design& design, const ScenarioConfig& cfg,
                                        Hypothesis hyp, std::uint64_t trials, std::uint64_t seed);

// Uniform linear array with lambda/2 spacing centered at the RIS position,
// plus the per-element phase delays toward target and radar and the applied
// phases phi_l = -(beta_tl + beta_lr), all stored mod 2 pi.
struct ElementLayout {
    std::vector<Vec2> positions;
    std::vector<double> beta_t;
    std::vector<double> beta_r;
    std::vector<double> phi;
};

ElementLayout make_element_layout(std::int64_t l, const Vec2& ris_pos, double orientation_deg,
                                  double wavelength, const Vec2& target_pos, const Vec2& radar_pos);

struct CoherenceReport {
    std::complex<double> coherent_factor; // sum a_l e^{i(beta_tl + phi_l + beta_lr)}
    double sum_amplitude = 0.0;           // sum a_l
    double residual = 0.0;                // |factor - sum a_l|
    double expected_var = 0.0;            // p_v sum a_l^2
    double var_aligned = 0.0;             // dynamic-noise sample variance, aligned phases
    double var_random = 0.0;              // same with uniformly random phases
    double rse = 0.0;                     // one relative standard error, 1/sqrt(trials)
    bool factor_ok = false;
    bool var_ok = false;
};

// Element-level check that the phase rule collapses the RIS sum to sum a_l and
// that the dynamic-noise variance is phase-independent.
CoherenceReport element_level_coherence_check(const ElementLayout& layout,
                                              const std::vector<double>& amplitudes,
                                              std::uint64_t trials, std::uint64_t seed,
                                              double p_v);

} // namespace risradar
