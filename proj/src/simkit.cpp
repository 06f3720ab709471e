#include "risradar/simkit.hpp"

#include <cmath>
#include <numbers>

#include "risradar/errors.hpp"
#include "risradar/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace risradar {

namespace {

constexpr std::uint64_t kBlockTrials = 1u << 16; // normative substream granularity

// everything a trial needs, precomputed once
struct TrialCtx {
    double c1 = 0.0;   // alpha_1 sqrt(p_r), scales gamma1
    double c2 = 0.0;   // alpha_2 sqrt(p_r) sum a_l, scales gamma2
    double s2g1 = 0.0; // var of gamma1
    double s2g2 = 0.0; // var of gamma2
    double p_w1 = 0.0; // var of w1
    double p_z2 = 0.0; // var of z2 (p_w2 + alpha_sr^2 p_v sum a_l^2)
    double gamma = 0.0;
    bool present = false;
};

// Hits of one 2^16-trial block. Counter layout per draw:
// {trial_in_block, draw_index, block_lo, block_hi}; draw order gamma1,
// gamma2, w1, z2 is fixed and all four are always consumed.
std::uint64_t block_hits(std::uint64_t seed, std::uint64_t block, std::uint64_t n,
                         const TrialCtx& ctx) {
    const auto b_lo = static_cast<std::uint32_t>(block);
    const auto b_hi = static_cast<std::uint32_t>(block >> 32);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < n; ++t) {
        const auto ti = static_cast<std::uint32_t>(t);
        const rng::CnSample g1 = rng::draw_cn(seed, {ti, 0, b_lo, b_hi}, ctx.s2g1);
        const rng::CnSample g2 = rng::draw_cn(seed, {ti, 1, b_lo, b_hi}, ctx.s2g2);
        const rng::CnSample w1 = rng::draw_cn(seed, {ti, 2, b_lo, b_hi}, ctx.p_w1);
        const rng::CnSample z2 = rng::draw_cn(seed, {ti, 3, b_lo, b_hi}, ctx.p_z2);
        double y1r = w1.re, y1i = w1.im, y2r = z2.re, y2i = z2.im;
        if (ctx.present) {
            y1r += ctx.c1 * g1.re;
            y1i += ctx.c1 * g1.im;
            y2r += ctx.c2 * g2.re;
            y2i += ctx.c2 * g2.im;
        }
        const double stat =
            (y1r * y1r + y1i * y1i) / ctx.p_w1 + (y2r * y2r + y2i * y2i) / ctx.p_z2;
        if (stat > ctx.gamma) ++hits;
    }
    return hits;
}

TrialCtx make_ctx(const Design& design, const ScenarioConfig& cfg, Hypothesis hyp) {
    TrialCtx ctx;
    const double ld = static_cast<double>(design.l);
    const double sum_a = ld * design.amplitude;
    const double sum_a2 = ld * design.amplitude * design.amplitude;
    const double sqrt_pr = std::sqrt(design.p_r);
    ctx.c1 = cfg.link.alpha_1 * sqrt_pr;
    ctx.c2 = cfg.link.alpha_2 * sqrt_pr * sum_a;
    ctx.s2g1 = cfg.target.sigma2_g1;
    ctx.s2g2 = cfg.target.sigma2_g2;
    ctx.p_w1 = cfg.radar.p_w1;
    ctx.p_z2 = cfg.radar.p_w2 +
               cfg.link.alpha_sr * cfg.link.alpha_sr * cfg.ris.p_v * sum_a2;
    ctx.gamma = threshold_from_pfa(cfg.pfa);
    ctx.present = hyp == Hypothesis::target_present;
    return ctx;
}

McEstimate finish(std::uint64_t trials, std::uint64_t hits, std::uint64_t seed) {
    McEstimate est;
    est.trials = trials;
    est.hits = hits;
    est.seed = seed;
    est.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
    est.ci_halfwidth =
        3.0 * std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(trials));
    return est;
}

std::uint64_t trials_in_block(std::uint64_t block, std::uint64_t n_blocks,
                              std::uint64_t trials) {
    return block + 1 < n_blocks ? kBlockTrials : trials - block * kBlockTrials;
}

} // namespace

McEstimate estimate_detection_mc_serial(const Design& design, const ScenarioConfig& cfg,
                                        Hypothesis hyp, std::uint64_t trials,
                                        std::uint64_t seed) {
    if (trials == 0) throw DomainError("trials must be >= 1");
    const TrialCtx ctx = make_ctx(design, cfg, hyp);
    const std::uint64_t n_blocks = (trials + kBlockTrials - 1) / kBlockTrials;
    std::uint64_t hits = 0;
    for (std::uint64_t b = 0; b < n_blocks; ++b)
        hits += block_hits(seed, b, trials_in_block(b, n_blocks, trials), ctx);
    return finish(trials, hits, seed);
}

McEstimate estimate_detection_mc(const Design& design, const ScenarioConfig& cfg,
                                 Hypothesis hyp, std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw DomainError("trials must be >= 1");
    const TrialCtx ctx = make_ctx(design, cfg, hyp);
    const auto n_blocks =
        static_cast<std::int64_t>((trials + kBlockTrials - 1) / kBlockTrials);
    std::uint64_t hits = 0;
#ifdef _OPENMP
#pragma omp parallel for reduction(+ : hits) schedule(static)
#endif
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        const auto block = static_cast<std::uint64_t>(b);
        hits += block_hits(seed, block,
                           trials_in_block(block, static_cast<std::uint64_t>(n_blocks), trials),
                           ctx);
    }
    return finish(trials, hits, seed);
}

ElementLayout make_element_layout(std::int64_t l, const Vec2& ris_pos, double orientation_deg,
                                  double wavelength, const Vec2& target_pos,
                                  const Vec2& radar_pos) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double theta = orientation_deg * std::numbers::pi / 180.0;
    const Vec2 dir{std::cos(theta), std::sin(theta)};
    const double spacing = 0.5 * wavelength;

    const auto wrap = [two_pi](double x) {
        double w = std::fmod(x, two_pi);
        if (w < 0.0) w += two_pi;
        return w;
    };

    ElementLayout layout;
    layout.positions.reserve(static_cast<std::size_t>(l));
    for (std::int64_t i = 0; i < l; ++i) {
        const double off = (static_cast<double>(i) - 0.5 * static_cast<double>(l - 1)) * spacing;
        layout.positions.push_back({ris_pos.x + off * dir.x, ris_pos.y + off * dir.y});
    }
    const double k = two_pi / wavelength;
    layout.beta_t.resize(layout.positions.size());
    layout.beta_r.resize(layout.positions.size());
    layout.phi.resize(layout.positions.size());
    for (std::size_t i = 0; i < layout.positions.size(); ++i) {
        layout.beta_t[i] = wrap(k * distance(target_pos, layout.positions[i]));
        layout.beta_r[i] = wrap(k * distance(layout.positions[i], radar_pos));
        layout.phi[i] = wrap(-(layout.beta_t[i] + layout.beta_r[i]));
    }
    return layout;
}

CoherenceReport element_level_coherence_check(const ElementLayout& layout,
                                              const std::vector<double>& amplitudes,
                                              std::uint64_t trials, std::uint64_t seed,
                                              double p_v) {
    const std::size_t n = layout.positions.size();
    if (amplitudes.size() != n)
        throw ValidationError("amplitudes size does not match the element layout");
    if (trials == 0) throw DomainError("trials must be >= 1");
    constexpr double two_pi = 2.0 * std::numbers::pi;

    CoherenceReport rep;
    std::complex<double> factor{0.0, 0.0};
    double sum_a = 0.0;
    double sum_a2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double arg = layout.beta_t[i] + layout.phi[i] + layout.beta_r[i];
        factor += amplitudes[i] * std::exp(std::complex<double>(0.0, arg));
        sum_a += amplitudes[i];
        sum_a2 += amplitudes[i] * amplitudes[i];
    }
    rep.coherent_factor = factor;
    rep.sum_amplitude = sum_a;
    rep.residual = std::abs(factor - std::complex<double>(sum_a, 0.0));
    rep.expected_var = p_v * sum_a2;
    rep.factor_ok = rep.residual <= 1e-10 * sum_a;

    // random comparison phases, one per element
    std::vector<double> phi_rand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto w = rng::Philox4x32::block(
            seed, {static_cast<std::uint32_t>(i), 0, 0, 0xC0FFEE02u});
        phi_rand[i] = two_pi * rng::u01_open(w[0]);
    }

    // dynamic-noise sum over trials under both phase choices, with common v_l
    // draws; the distribution must not depend on the phases
    std::vector<std::complex<double>> rot_al(n);
    std::vector<std::complex<double>> rot_rd(n);
    for (std::size_t i = 0; i < n; ++i) {
        rot_al[i] = amplitudes[i] *
                    std::exp(std::complex<double>(0.0, layout.phi[i] + layout.beta_r[i]));
        rot_rd[i] = amplitudes[i] *
                    std::exp(std::complex<double>(0.0, phi_rand[i] + layout.beta_r[i]));
    }
    double acc_aligned = 0.0;
    double acc_random = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::complex<double> s_al{0.0, 0.0};
        std::complex<double> s_rd{0.0, 0.0};
        const auto t_lo = static_cast<std::uint32_t>(t);
        const auto t_hi = static_cast<std::uint32_t>(t >> 32);
        for (std::size_t i = 0; i < n; ++i) {
            const rng::CnSample v = rng::draw_cn(
                seed, {static_cast<std::uint32_t>(i), t_lo, t_hi, 0xC0FFEE01u}, p_v);
            const std::complex<double> vc{v.re, v.im};
            s_al += rot_al[i] * vc;
            s_rd += rot_rd[i] * vc;
        }
        acc_aligned += std::norm(s_al);
        acc_random += std::norm(s_rd);
    }
    rep.var_aligned = acc_aligned / static_cast<double>(trials);
    rep.var_random = acc_random / static_cast<double>(trials);
    rep.rse = 1.0 / std::sqrt(static_cast<double>(trials));
    const double tol = 5.0 * rep.expected_var * rep.rse;
    rep.var_ok = std::abs(rep.var_aligned - rep.expected_var) <= tol &&
                 std::abs(rep.var_random - rep.expected_var) <= tol;
    return rep;
}

} // namespace risradar
