#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risradar/detection.hpp"
#include "risradar/scenario.hpp"

namespace risradar {

// Decision triple of the joint design problem. Amplitude is common to all elements (the
// per-element maximization collapses to a uniform vector); the phase rule
// phi_l = -(beta_tl + beta_lr) is declarative and only materialized by simkit.
struct Design {
    double p_r = 0.0;       // radar transmit power [W]
    std::int64_t l = 0;     // RIS element count
    double amplitude = 1.0; // common element amplitude

    static constexpr const char* phase_rule = "phi_l = -(beta_tl + beta_lr)";
};

// Quantities of the RIS subproblem at fixed radar power: residual budget
// kappa, per-a^2 amplifier cost zeta, integer cap l_bar, and the breakpoints
// of the relaxed objective.
struct SubproblemContext {
    double kappa = 0.0;
    double zeta = 0.0;
    std::int64_t l_bar = 0;
    double l1 = 0.0;
    double l2_minus = 0.0;
    double l2_plus = 0.0;
    bool l2_degenerate = false; // rho_s = 0 or p_v = 0: closed form taken in the limit

    // carried along so the objective is self-contained
    double rho_s = 0.0;
    double a_max = 1.0;
    double p_w2 = 0.0;
    double asr2_pv = 0.0;  // alpha_sr^2 * p_v
    double gain2 = 0.0;    // alpha_2^2 * sigma2_g2 * p_r
};

struct PowerBreakdown {
    double radar_circuit = 0.0; // rho_r
    double radar_amp = 0.0;     // eta_r^-1 p_r
    double ris_circuit = 0.0;   // l rho_s
    double ris_amp = 0.0;       // eta_s^-1 (alpha_rts^2 sigma2_g2 p_r + p_v) l a^2

    double total() const { return radar_circuit + radar_amp + ris_circuit + ris_amp; }
};

struct DesignReport {
    Design design;
    OperatingPoint operating_point;
    PowerBreakdown consumed;
    int iterations = 0;
    bool converged = true;
    bool budget_ok = true;
};

// Largest radar power satisfying the budget at fixed (l, amplitude); the
// constraint is tight at the result. Throws InfeasibleError when the RIS
// fixed costs alone exceed the budget.
double optimal_radar_power(std::int64_t l, double amplitude, const RadarParams& radar,
                           const RisParams& ris, const LinkBudget& link,
                           const TargetStats& target);

SubproblemContext subproblem_context(double p_r, const RadarParams& radar, const RisParams& ris,
                                     const LinkBudget& link, const TargetStats& target);

// Optimal common amplitude g(l) at the given context; g(0) = 1.
double amplitude_for_count(std::int64_t l, const SubproblemContext& ctx);

// RIS-subproblem objective f(l) = snr2 at amplitude g(l).
double ris_objective(std::int64_t l, const SubproblemContext& ctx);

// Integer solution of the RIS subproblem via the relaxed case analysis:
// candidates floor/ceil of min(max(l1, l2_minus), l_bar), ties to smaller l.
struct RisChoice {
    std::int64_t l = 0;
    double amplitude = 1.0;
};
RisChoice optimal_ris(double p_r, const RadarParams& radar, const RisParams& ris,
                      const LinkBudget& link, const TargetStats& target);

struct BcaOptions {
    int max_sweeps = 50;
    double pd_tol = 1e-12;
    int random_starts = 8;   // seeded random feasible inits
    bool ladder_starts = true; // deterministic l-ladder inits (all l when L_max small)
    bool polish = true;        // final +-1 hill climb on l
    std::uint64_t seed = 0x5eed5eedULL;
    std::vector<Design> extra_inits; // caller-provided warm starts
};

// One block-coordinate ascent run from a given initial design. pd_trace, when
// non-null, receives the PD after every sweep (ascent property is testable).
DesignReport bca_from_init(const ScenarioConfig& cfg, const Design& init, int max_sweeps,
                           double pd_tol, std::vector<double>* pd_trace = nullptr);

// Multistart block-coordinate ascent for the joint design; deterministic for a
// fixed seed regardless of evaluation order (reduce by pd desc, l asc, p_r asc).
DesignReport alternating_maximization(const ScenarioConfig& cfg, const BcaOptions& opts = {});

// No-RIS baseline: p_r = (P_max - rho_r) eta_r, l = 0; detector per config.
DesignReport baseline_no_ris(const ScenarioConfig& cfg);

// Passive-RIS baseline: rho_s -> P_c, p_v -> 0, eta_s -> 1, amplitude 1,
// exact enumeration over l. The l = 0 candidate is scored with the configured
// No-RIS detector so the two baselines coincide when the RIS stays off.
DesignReport baseline_passive(const ScenarioConfig& cfg);

// Design with sigma2_g2 replaced by sigma2_g2_design everywhere, then
// re-evaluated under the true sigma2_g2; budget_ok reflects realized power.
DesignReport mismatched_design(const ScenarioConfig& cfg, double sigma2_g2_design);

// Budget consumption of a design under the active power model.
PowerBreakdown power_breakdown(const Design& d, const RadarParams& radar, const RisParams& ris,
                               const LinkBudget& link, const TargetStats& target);

// Analytic operating point of a design (two-channel detector).
OperatingPoint evaluate_design(const Design& d, const ScenarioConfig& cfg);

} // namespace risradar
