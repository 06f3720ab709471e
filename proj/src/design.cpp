#include "risradar/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "risradar/errors.hpp"

namespace risradar {

namespace {

constexpr double kBudgetSlack = 1e-9; // absolute power slack for rounding

double pd_of(const Design& d, const ScenarioConfig& cfg, double gamma) {
    const auto [s1, s2] = compute_snrs(d, cfg.link, cfg.target, cfg.radar, cfg.ris);
    return pd_two_channel(s1, s2, gamma);
}

// order used for multistart reduction and tie-breaking
bool better_than(const DesignReport& a, const DesignReport& b) {
    if (a.operating_point.pd != b.operating_point.pd)
        return a.operating_point.pd > b.operating_point.pd;
    if (a.design.l != b.design.l) return a.design.l < b.design.l;
    return a.design.p_r < b.design.p_r;
}

// deterministic l-init ladder: everything when L_max is small, ~96 log-spaced
// rungs otherwise (the +-1 polish closes the gaps)
std::vector<std::int64_t> ladder_values(std::int64_t l_max) {
    std::vector<std::int64_t> out;
    if (l_max <= 0) return out;
    if (l_max <= 96) {
        for (std::int64_t l = 1; l <= l_max; ++l) out.push_back(l);
        return out;
    }
    const double top = static_cast<double>(l_max);
    for (int k = 0; k <= 95; ++k) {
        const auto l =
            static_cast<std::int64_t>(std::llround(std::pow(top, k / 95.0)));
        if (out.empty() || l > out.back()) out.push_back(std::clamp(l, std::int64_t{1}, l_max));
    }
    if (out.back() != l_max) out.push_back(l_max);
    return out;
}

} // namespace

double optimal_radar_power(std::int64_t l, double amplitude, const RadarParams& radar,
                           const RisParams& ris, const LinkBudget& link,
                           const TargetStats& target) {
    const double ld = static_cast<double>(l);
    const double la2 = ld * amplitude * amplitude;
    const double num =
        radar.p_max - radar.rho_r - ld * ris.rho_s() - la2 * ris.p_v / ris.eta_s;
    if (num < 0.0)
        throw InfeasibleError("RIS fixed costs exceed the power budget at l = " +
                              std::to_string(l));
    const double den = 1.0 / radar.eta_r +
                       la2 * link.alpha_rts * link.alpha_rts * target.sigma2_g2 / ris.eta_s;
    return num / den;
}

SubproblemContext subproblem_context(double p_r, const RadarParams& radar, const RisParams& ris,
                                     const LinkBudget& link, const TargetStats& target) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    SubproblemContext ctx;
    ctx.rho_s = ris.rho_s();
    ctx.a_max = ris.a_max;
    ctx.p_w2 = radar.p_w2;
    ctx.asr2_pv = link.alpha_sr * link.alpha_sr * ris.p_v;
    ctx.gain2 = link.alpha_2 * link.alpha_2 * target.sigma2_g2 * p_r;
    ctx.kappa = radar.p_max - radar.rho_r - p_r / radar.eta_r;
    ctx.zeta = (link.alpha_rts * link.alpha_rts * target.sigma2_g2 * p_r + ris.p_v) / ris.eta_s;
    ctx.l2_degenerate = (ctx.rho_s == 0.0) || (ris.p_v == 0.0);

    if (ctx.kappa <= 0.0) {
        ctx.l_bar = 0;
        return ctx;
    }
    const double den = ctx.rho_s + ctx.zeta;
    if (den > 0.0) {
        const double q = std::floor(ctx.kappa / den);
        ctx.l_bar = q >= static_cast<double>(ris.l_max) ? ris.l_max
                                                        : static_cast<std::int64_t>(q);
    } else {
        ctx.l_bar = ris.l_max;
    }
    ctx.l1 = ctx.kappa / (ctx.rho_s + ctx.a_max * ctx.a_max * ctx.zeta);

    // Stationary points of the second branch of f. The textbook form
    //   (b -+ sqrt(bc)) / (alpha_sr^2 p_v rho_s),  b = p_w2 zeta + asr2_pv kappa,
    //   c = p_w2 zeta
    // cancels badly as p_v -> 0; multiplying by the conjugate gives
    //   l2_minus = (kappa/rho_s) sqrt(b)/(sqrt(b)+sqrt(c))
    // which is exact in both degenerate limits (p_v = 0: kappa/(2 rho_s);
    // rho_s = 0: +inf, so the relaxed optimum collapses to l_bar).
    const double b = ctx.p_w2 * ctx.zeta + ctx.asr2_pv * ctx.kappa;
    const double c = ctx.p_w2 * ctx.zeta;
    if (b <= 0.0) {
        ctx.l2_minus = inf;
        ctx.l2_plus = inf;
        return ctx;
    }
    const double sb = std::sqrt(b);
    const double sc = std::sqrt(c);
    const double base = ctx.rho_s > 0.0 ? ctx.kappa / ctx.rho_s : inf;
    ctx.l2_minus = base * (sb / (sb + sc));
    ctx.l2_plus = sb > sc ? base * (sb / (sb - sc)) : inf;
    return ctx;
}

double amplitude_for_count(std::int64_t l, const SubproblemContext& ctx) {
    if (l < 0 || l > ctx.l_bar)
        throw InfeasibleError("element count " + std::to_string(l) +
                              " outside feasible range [0, " + std::to_string(ctx.l_bar) + "]");
    if (l == 0) return 1.0;
    if (ctx.zeta <= 0.0) return ctx.a_max; // amplifier output is free
    const double t = (ctx.kappa - ctx.rho_s * static_cast<double>(l)) /
                     (ctx.zeta * static_cast<double>(l));
    const double g = std::min(ctx.a_max, std::sqrt(std::max(t, 0.0)));
    return std::max(1.0, g);
}

double ris_objective(std::int64_t l, const SubproblemContext& ctx) {
    if (l <= 0) return 0.0;
    const double a = amplitude_for_count(l, ctx);
    const double ld = static_cast<double>(l);
    const double sum_a = ld * a;
    const double den = ctx.p_w2 + ctx.asr2_pv * ld * a * a;
    return ctx.gain2 * sum_a * sum_a / den;
}

RisChoice optimal_ris(double p_r, const RadarParams& radar, const RisParams& ris,
                      const LinkBudget& link, const TargetStats& target) {
    const SubproblemContext ctx = subproblem_context(p_r, radar, ris, link, target);
    if (ctx.l_bar <= 0 || ctx.gain2 <= 0.0) return {0, 1.0};

    // relaxed optimum; f is unimodal on [0, l_bar] with its peak here
    const double l_rel =
        std::min(std::max(ctx.l1, ctx.l2_minus), static_cast<double>(ctx.l_bar));
    std::int64_t cand[2] = {static_cast<std::int64_t>(std::floor(l_rel)),
                            static_cast<std::int64_t>(std::ceil(l_rel))};
    std::int64_t best_l = 0;
    double best_f = 0.0;
    for (std::int64_t l : cand) {
        l = std::clamp<std::int64_t>(l, 0, ctx.l_bar);
        const double f = ris_objective(l, ctx);
        if (f > best_f || (f == best_f && l < best_l)) {
            best_f = f;
            best_l = l;
        }
    }
    if (best_l == 0) return {0, 1.0};
    return {best_l, amplitude_for_count(best_l, ctx)};
}

PowerBreakdown power_breakdown(const Design& d, const RadarParams& radar, const RisParams& ris,
                               const LinkBudget& link, const TargetStats& target) {
    PowerBreakdown pb;
    pb.radar_circuit = radar.rho_r;
    pb.radar_amp = d.p_r / radar.eta_r;
    const double ld = static_cast<double>(d.l);
    pb.ris_circuit = ld * ris.rho_s();
    pb.ris_amp = (link.alpha_rts * link.alpha_rts * target.sigma2_g2 * d.p_r + ris.p_v) * ld *
                 d.amplitude * d.amplitude / ris.eta_s;
    return pb;
}

OperatingPoint evaluate_design(const Design& d, const ScenarioConfig& cfg) {
    OperatingPoint op;
    op.gamma = threshold_from_pfa(cfg.pfa);
    op.pfa = cfg.pfa;
    const auto [s1, s2] = compute_snrs(d, cfg.link, cfg.target, cfg.radar, cfg.ris);
    op.snr1 = s1;
    op.snr2 = s2;
    op.pd = pd_two_channel(s1, s2, op.gamma);
    return op;
}

DesignReport bca_from_init(const ScenarioConfig& cfg, const Design& init, int max_sweeps,
                           double pd_tol, std::vector<double>* pd_trace) {
    const double gamma = threshold_from_pfa(cfg.pfa);

    Design d = init;
    d.p_r = optimal_radar_power(d.l, d.amplitude, cfg.radar, cfg.ris, cfg.link, cfg.target);
    double pd = pd_of(d, cfg, gamma);

    int sweeps = 0;
    bool converged = false;
    while (sweeps < max_sweeps) {
        ++sweeps;
        const RisChoice rc = optimal_ris(d.p_r, cfg.radar, cfg.ris, cfg.link, cfg.target);
        Design nd{d.p_r, rc.l, rc.amplitude};
        nd.p_r = optimal_radar_power(nd.l, nd.amplitude, cfg.radar, cfg.ris, cfg.link,
                                     cfg.target);
        const double npd = pd_of(nd, cfg, gamma);
        if (npd < pd) { // only possible through rounding; treat as converged
            converged = true;
            break;
        }
        d = nd;
        if (pd_trace) pd_trace->push_back(npd);
        if (npd - pd < pd_tol) {
            pd = npd;
            converged = true;
            break;
        }
        pd = npd;
    }

    DesignReport rep;
    rep.design = d;
    rep.operating_point = evaluate_design(d, cfg);
    rep.consumed = power_breakdown(d, cfg.radar, cfg.ris, cfg.link, cfg.target);
    rep.iterations = sweeps;
    rep.converged = converged;
    rep.budget_ok = rep.consumed.total() <= cfg.radar.p_max + kBudgetSlack;
    return rep;
}

DesignReport alternating_maximization(const ScenarioConfig& cfg, const BcaOptions& opts) {
    if (!(cfg.radar.p_max > cfg.radar.rho_r))
        throw InfeasibleError("budget does not cover the radar circuit power");

    std::vector<Design> inits;
    inits.push_back({0.0, 0, 1.0}); // no-surface start: l = 0, then the tight radar power
    if (opts.ladder_starts) {
        for (std::int64_t l : ladder_values(cfg.ris.l_max))
            inits.push_back({0.0, l, cfg.ris.a_max});
    }
    if (opts.random_starts > 0) {
        std::mt19937_64 gen(opts.seed);
        std::uniform_int_distribution<std::int64_t> pick_l(0, cfg.ris.l_max);
        std::uniform_real_distribution<double> pick_a(1.0, cfg.ris.a_max);
        for (int i = 0; i < opts.random_starts; ++i) {
            for (int attempt = 0; attempt < 100; ++attempt) {
                Design d{0.0, pick_l(gen), pick_a(gen)};
                try {
                    optimal_radar_power(d.l, d.amplitude, cfg.radar, cfg.ris, cfg.link,
                                        cfg.target);
                } catch (const InfeasibleError&) {
                    continue;
                }
                inits.push_back(d);
                break;
            }
        }
    }
    inits.insert(inits.end(), opts.extra_inits.begin(), opts.extra_inits.end());

    std::optional<DesignReport> best;
    for (const Design& init : inits) {
        try {
            DesignReport rep = bca_from_init(cfg, init, opts.max_sweeps, opts.pd_tol, nullptr);
            if (!best || better_than(rep, *best)) best = rep;
        } catch (const InfeasibleError&) {
            // infeasible start, not an error of the scenario
        }
    }
    if (!best) throw InfeasibleError("no feasible design exists for this scenario");

    if (opts.polish) {
        // +-1 hill climb on l; pd(l) along the tight-budget manifold is
        // unimodal, so this removes any ladder-granularity error
        std::int64_t guard = 2 * cfg.ris.l_max + 8;
        bool moved = true;
        while (moved && guard-- > 0) {
            moved = false;
            for (const std::int64_t dl : {-1, +1}) {
                const std::int64_t l = best->design.l + dl;
                if (l < 0 || l > cfg.ris.l_max) continue;
                try {
                    DesignReport rep = bca_from_init(cfg, {0.0, l, cfg.ris.a_max},
                                                     opts.max_sweeps, opts.pd_tol, nullptr);
                    if (better_than(rep, *best)) {
                        best = rep;
                        moved = true;
                        break;
                    }
                } catch (const InfeasibleError&) {
                }
            }
        }
    }
    return *best;
}

DesignReport baseline_no_ris(const ScenarioConfig& cfg) {
    DesignReport rep;
    rep.design = {(cfg.radar.p_max - cfg.radar.rho_r) * cfg.radar.eta_r, 0, 1.0};
    const auto [s1, s2] =
        compute_snrs(rep.design, cfg.link, cfg.target, cfg.radar, cfg.ris);
    OperatingPoint op;
    op.snr1 = s1;
    op.snr2 = s2;
    op.pfa = cfg.pfa;
    if (cfg.no_ris_detector == NoRisDetector::single_channel) {
        op.gamma = -std::log(cfg.pfa); // single square-law threshold
        op.pd = pd_single_channel(s1, cfg.pfa);
    } else {
        op.gamma = threshold_from_pfa(cfg.pfa);
        op.pd = pd_two_channel(s1, 0.0, op.gamma);
    }
    rep.operating_point = op;
    rep.consumed = power_breakdown(rep.design, cfg.radar, cfg.ris, cfg.link, cfg.target);
    rep.iterations = 0;
    rep.converged = true;
    rep.budget_ok = rep.consumed.total() <= cfg.radar.p_max + kBudgetSlack;
    return rep;
}

DesignReport baseline_passive(const ScenarioConfig& cfg) {
    // passive overrides: rho_s -> P_c, p_v -> 0, eta_s -> 1, amplitude 1
    const double p_c = cfg.ris.p_c;
    const double avail = cfg.radar.p_max - cfg.radar.rho_r;
    std::int64_t l_cap = cfg.ris.l_max;
    if (p_c > 0.0)
        l_cap = std::min<std::int64_t>(l_cap,
                                       static_cast<std::int64_t>(std::floor(avail / p_c)));

    const double gamma = threshold_from_pfa(cfg.pfa);
    const double g1 = cfg.link.alpha_1 * cfg.link.alpha_1 * cfg.target.sigma2_g1;
    const double g2 = cfg.link.alpha_2 * cfg.link.alpha_2 * cfg.target.sigma2_g2;

    std::int64_t best_l = 0;
    double best_pd = -1.0;
    double best_pr = 0.0;
    for (std::int64_t l = 0; l <= l_cap; ++l) {
        const double ld = static_cast<double>(l);
        const double p_r = (avail - ld * p_c) * cfg.radar.eta_r;
        const double s1 = g1 * p_r / cfg.radar.p_w1;
        double pd;
        if (l == 0) {
            // the RIS-off leg follows the configured No-RIS detector so the
            // two baselines coincide when the RIS stays off
            pd = cfg.no_ris_detector == NoRisDetector::single_channel
                     ? pd_single_channel(s1, cfg.pfa)
                     : pd_two_channel(s1, 0.0, gamma);
        } else {
            const double s2 = g2 * p_r * ld * ld / cfg.radar.p_w2;
            pd = pd_two_channel(s1, s2, gamma);
        }
        if (pd > best_pd) { // strict: ties stay at the smaller l
            best_pd = pd;
            best_l = l;
            best_pr = p_r;
        }
    }

    DesignReport rep;
    rep.design = {best_pr, best_l, 1.0};
    OperatingPoint op;
    op.pfa = cfg.pfa;
    op.snr1 = g1 * best_pr / cfg.radar.p_w1;
    op.snr2 = best_l > 0 ? g2 * best_pr * static_cast<double>(best_l) *
                               static_cast<double>(best_l) / cfg.radar.p_w2
                         : 0.0;
    if (best_l == 0 && cfg.no_ris_detector == NoRisDetector::single_channel)
        op.gamma = -std::log(cfg.pfa);
    else
        op.gamma = gamma;
    op.pd = best_pd;
    rep.operating_point = op;
    rep.consumed.radar_circuit = cfg.radar.rho_r;
    rep.consumed.radar_amp = best_pr / cfg.radar.eta_r;
    rep.consumed.ris_circuit = static_cast<double>(best_l) * p_c;
    rep.consumed.ris_amp = 0.0;
    rep.iterations = 0;
    rep.converged = true;
    rep.budget_ok = rep.consumed.total() <= cfg.radar.p_max + kBudgetSlack;
    return rep;
}

DesignReport mismatched_design(const ScenarioConfig& cfg, double sigma2_g2_design) {
    if (!(sigma2_g2_design > 0.0))
        throw DomainError("sigma2_g2_design must be strictly positive");
    ScenarioConfig design_cfg = cfg;
    design_cfg.target.sigma2_g2 = sigma2_g2_design;
    DesignReport rep = alternating_maximization(design_cfg);

    // re-evaluate the frozen design under the true sigma2_g2
    rep.operating_point = evaluate_design(rep.design, cfg);
    rep.consumed = power_breakdown(rep.design, cfg.radar, cfg.ris, cfg.link, cfg.target);
    rep.budget_ok = rep.consumed.total() <= cfg.radar.p_max + kBudgetSlack;
    return rep;
}

} // namespace risradar
