#include "risradar/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "risradar/design.hpp"
#include "risradar/detection.hpp"
#include "risradar/errors.hpp"
#include "risradar/experiments.hpp"
#include "risradar/scenario.hpp"
#include "risradar/simkit.hpp"
#include "risradar/units.hpp"

namespace risradar::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key.path=value, got: " + spec);
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw; // bare strings pass through unquoted
    }
    json* node = &doc;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key =
            dot == std::string::npos ? path.substr(pos) : path.substr(pos, dot - pos);
        if (key.empty()) throw ConfigError("--set path has an empty segment: " + path);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        json& next = (*node)[key];
        if (!next.is_object() && !next.is_null())
            throw ConfigError("--set path crosses a non-object value: " + path);
        node = &next;
        pos = dot + 1;
    }
}

json load_document(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    for (const std::string& s : overrides) apply_override(doc, s);
    return doc;
}

// snr0_db implied by the configured target strength (inverse of sigma2_from_snr0)
double implied_snr0_db(const ScenarioConfig& cfg) {
    if (cfg.snr0_db) return *cfg.snr0_db;
    const double snr0 = cfg.link.alpha_1 * cfg.link.alpha_1 * cfg.target.sigma2_g1 *
                        (cfg.radar.p_max - cfg.radar.rho_r) * cfg.radar.eta_r / cfg.radar.p_w1;
    return units::lin_to_db(snr0);
}

SweepRecord record_of(const std::string& label, const DesignReport& rep,
                      const ScenarioConfig& cfg) {
    SweepRecord r;
    r.case_label = label;
    r.snr0_db = implied_snr0_db(cfg);
    r.pd = rep.operating_point.pd;
    r.p_r_w = rep.design.p_r;
    r.l = rep.design.l;
    r.amplitude = rep.design.amplitude;
    r.radar_consumed_w = rep.consumed.radar_circuit + rep.consumed.radar_amp;
    r.ris_consumed_w = rep.consumed.ris_circuit + rep.consumed.ris_amp;
    r.budget_ok = rep.budget_ok;
    r.iterations = rep.iterations;
    r.converged = rep.converged;
    return r;
}

void write_report(std::ostream& out, const std::string& label, const DesignReport& rep,
                  const ScenarioConfig& cfg, const std::string& fingerprint) {
    const OperatingPoint& op = rep.operating_point;
    out << "case:          " << label << '\n';
    out << "fingerprint:   " << fingerprint << '\n';
    out << "snr0 [dB]:     " << fmt(implied_snr0_db(cfg)) << '\n';
    out << "p_r [W]:       " << fmt(rep.design.p_r) << '\n';
    out << "l:             " << rep.design.l << '\n';
    out << "amplitude:     " << fmt(rep.design.amplitude) << " (a_max " << fmt(cfg.ris.a_max)
        << ")\n";
    out << "phase rule:    " << Design::phase_rule << '\n';
    out << "snr1:          " << fmt(op.snr1) << '\n';
    out << "snr2:          " << fmt(op.snr2) << '\n';
    out << "threshold:     " << fmt(op.gamma) << '\n';
    out << "pfa:           " << fmt(op.pfa) << '\n';
    out << "pd:            " << fmt(op.pd) << '\n';
    out << "consumed [W]:  radar " << fmt(rep.consumed.radar_circuit + rep.consumed.radar_amp)
        << " (circuit " << fmt(rep.consumed.radar_circuit) << " + amp "
        << fmt(rep.consumed.radar_amp) << "), ris "
        << fmt(rep.consumed.ris_circuit + rep.consumed.ris_amp) << " (circuit "
        << fmt(rep.consumed.ris_circuit) << " + amp " << fmt(rep.consumed.ris_amp) << ")\n";
    out << "budget [W]:    " << fmt(rep.consumed.total()) << " of " << fmt(cfg.radar.p_max)
        << (rep.budget_ok ? " (ok)" : " (EXCEEDED)") << '\n';
    out << "iterations:    " << rep.iterations << '\n';
    out << "converged:     " << (rep.converged ? "yes" : "no") << '\n';
}

DesignReport design_for(const std::string& name, const ScenarioConfig& cfg) {
    if (name == "active") return alternating_maximization(cfg);
    if (name == "no_ris") return baseline_no_ris(cfg);
    if (name == "passive") return baseline_passive(cfg);
    throw ConfigError("unknown design case: " + name);
}

struct Invocation {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    std::string design_case = "active";
    std::string hypothesis = "both";
    bool dump_config = false;
    bool with_mismatched = false;
    double start_db = 0.0;
    double stop_db = 30.0;
    double step_db = 0.25;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open output file: " + path);
    f << text;
    f.flush();
    if (!f) throw IoError("write failed: " + path);
}

int cmd_optimize(const Invocation& inv, std::ostream& out) {
    const json doc = load_document(inv.config_path, inv.overrides);
    const ScenarioConfig cfg = parse_config(doc);
    if (inv.dump_config) {
        out << doc.dump(2) << '\n';
        return 0;
    }
    const DesignReport rep = design_for(inv.design_case, cfg);
    write_report(out, inv.design_case, rep, cfg, config_fingerprint(doc));

    std::ostringstream csv;
    emit_records({record_of(inv.design_case, rep, cfg)}, csv);
    out << '\n' << csv.str();
    if (!inv.out_path.empty()) write_text(inv.out_path, csv.str());
    return 0;
}

int cmd_sweep(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const json doc = load_document(inv.config_path, inv.overrides);
    const ScenarioConfig cfg = parse_config(doc);
    SweepGrid grid;
    grid.start_db = inv.start_db;
    grid.stop_db = inv.stop_db;
    grid.step_db = inv.step_db;

    std::vector<CaseSpec> cases = default_cases();
    if (inv.with_mismatched) {
        for (const int db : {20, 30, 40}) {
            CaseSpec cs;
            cs.label = "mismatched_amax" + std::to_string(db);
            cs.kind = CaseSpec::mismatched;
            cs.a_max_db = static_cast<double>(db);
            cases.push_back(cs);
        }
    }

    err << "fingerprint: " << config_fingerprint(doc) << '\n';
    const std::vector<SweepRecord> records = sweep_snr0(cfg, grid, cases);
    if (inv.out_path.empty()) {
        emit_records(records, out);
    } else {
        emit_records(records, inv.out_path);
        err << "wrote " << records.size() << " records to " << inv.out_path << '\n';
    }
    return 0;
}

int cmd_simulate(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const json doc = load_document(inv.config_path, inv.overrides);
    const ScenarioConfig cfg = parse_config(doc);
    const std::uint64_t trials = inv.trials.value_or(cfg.mc_trials);
    const std::uint64_t seed = inv.seed.value_or(cfg.mc_seed);

    const DesignReport rep = design_for(inv.design_case, cfg);
    // the MC engine always runs the two-channel statistic, so the analytic
    // reference is the two-channel operating point even for l = 0 designs
    const OperatingPoint op = evaluate_design(rep.design, cfg);

    std::vector<Hypothesis> hyps;
    if (inv.hypothesis == "absent" || inv.hypothesis == "both")
        hyps.push_back(Hypothesis::target_absent);
    if (inv.hypothesis == "present" || inv.hypothesis == "both")
        hyps.push_back(Hypothesis::target_present);
    if (hyps.empty()) throw ConfigError("unknown hypothesis: " + inv.hypothesis);

    err << "fingerprint: " << config_fingerprint(doc) << '\n';
    std::ostringstream csv;
    csv << "case,hypothesis,trials,hits,p_hat,ci_halfwidth,seed,analytic\n";
    for (const Hypothesis hyp : hyps) {
        const McEstimate est = estimate_detection_mc(rep.design, cfg, hyp, trials, seed);
        const bool present = hyp == Hypothesis::target_present;
        csv << inv.design_case << ',' << (present ? "present" : "absent") << ',' << est.trials
            << ',' << est.hits << ',' << fmt(est.p_hat) << ',' << fmt(est.ci_halfwidth) << ','
            << est.seed << ',' << fmt(present ? op.pd : op.pfa) << '\n';
    }
    if (inv.out_path.empty())
        out << csv.str();
    else
        write_text(inv.out_path, csv.str());
    return 0;
}

int cmd_validate(const Invocation& inv, std::ostream& out, std::ostream& err) {
    const json doc = load_document(inv.config_path, inv.overrides);
    const ScenarioConfig base = parse_config(doc);
    const std::uint64_t trials = inv.trials.value_or(base.mc_trials);
    const std::uint64_t seed = inv.seed.value_or(base.mc_seed);

    err << "fingerprint: " << config_fingerprint(doc) << '\n';

    bool all_ok = true;
    char line[160];
    out << "check                             analytic          estimate          tolerance         status\n";
    const auto row = [&](const char* name, double analytic, double estimate, double tol,
                         bool ok) {
        std::snprintf(line, sizeof line, "%-32s  %-16.10g  %-16.10g  %-16.10g  %s\n", name,
                      analytic, estimate, tol, ok ? "pass" : "FAIL");
        out << line;
        all_ok = all_ok && ok;
    };

    for (const double pfa : {1e-1, 1e-2, 1e-3}) {
        ScenarioConfig cfg = base;
        cfg.pfa = pfa;
        const DesignReport rep = alternating_maximization(cfg);
        const OperatingPoint op = rep.operating_point;

        const McEstimate eh0 =
            estimate_detection_mc(rep.design, cfg, Hypothesis::target_absent, trials, seed);
        char name[64];
        std::snprintf(name, sizeof name, "pfa %g", pfa);
        row(name, pfa, eh0.p_hat, eh0.ci_halfwidth, std::abs(eh0.p_hat - pfa) <= eh0.ci_halfwidth);

        const McEstimate eh1 =
            estimate_detection_mc(rep.design, cfg, Hypothesis::target_present, trials, seed);
        std::snprintf(name, sizeof name, "pd  @ pfa %g", pfa);
        row(name, op.pd, eh1.p_hat, eh1.ci_halfwidth,
            std::abs(eh1.p_hat - op.pd) <= eh1.ci_halfwidth);
    }

    if (base.geometry.radar_pos && base.geometry.target_pos && base.geometry.ris_pos) {
        const DesignReport rep = alternating_maximization(base);
        std::int64_t l = rep.design.l;
        double amp = rep.design.amplitude;
        if (l == 0) { // keep the geometry check meaningful when the design turns the RIS off
            l = std::min<std::int64_t>(base.ris.l_max, 64);
            amp = base.ris.a_max;
        }
        if (l > 0) {
            const ElementLayout layout = make_element_layout(
                l, *base.geometry.ris_pos, base.ris.orientation_deg, base.radar.wavelength,
                *base.geometry.target_pos, *base.geometry.radar_pos);
            const std::vector<double> amplitudes(static_cast<std::size_t>(l), amp);
            const CoherenceReport cr =
                element_level_coherence_check(layout, amplitudes, 100000, seed, base.ris.p_v);
            row("coherence residual / sum_a", 0.0, cr.residual / cr.sum_amplitude, 1e-10,
                cr.factor_ok);
            const double tol = 5.0 * cr.rse * cr.expected_var;
            row("dyn-noise var (aligned)", cr.expected_var, cr.var_aligned, tol,
                std::abs(cr.var_aligned - cr.expected_var) <= tol);
            row("dyn-noise var (random phi)", cr.expected_var, cr.var_random, tol,
                std::abs(cr.var_random - cr.expected_var) <= tol);
        }
    } else {
        out << "coherence checks skipped: config provides distances, not positions\n";
    }

    out << (all_ok ? "VALIDATE: all checks passed\n" : "VALIDATE: some checks FAILED\n");
    return all_ok ? 0 : 2;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"design and validation tool for an active-RIS-assisted radar detector"};
    app.require_subcommand(1);
    Invocation inv;

    const auto add_common = [&inv](CLI::App* sub) {
        sub->add_option("--config", inv.config_path, "scenario config (JSON)")
            ->required();
        sub->add_option("--set", inv.overrides,
                        "override a config entry, dotted.path=value (repeatable)");
        sub->add_option("-o,--out", inv.out_path, "write CSV output to this file");
    };

    CLI::App* optimize = app.add_subcommand("optimize", "solve the design problem once");
    add_common(optimize);
    optimize->add_option("--case", inv.design_case, "active | no_ris | passive")
        ->check(CLI::IsMember({"active", "no_ris", "passive"}));
    optimize->add_flag("--dump-config", inv.dump_config,
                       "print the effective config (after --set) and exit");

    CLI::App* sweep = app.add_subcommand("sweep", "reproduce the snr0 sweep as CSV");
    add_common(sweep);
    sweep->add_option("--start", inv.start_db, "sweep start [dB]");
    sweep->add_option("--stop", inv.stop_db, "sweep stop [dB]");
    sweep->add_option("--step", inv.step_db, "sweep step [dB]");
    sweep->add_flag("--with-mismatched", inv.with_mismatched,
                    "append mismatched-design cases for a_max^2 in {20,30,40} dB");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo a designed operating point");
    add_common(simulate);
    simulate->add_option("--design", inv.design_case, "active | no_ris | passive")
        ->check(CLI::IsMember({"active", "no_ris", "passive"}));
    simulate->add_option("--hypothesis", inv.hypothesis, "present | absent | both")
        ->check(CLI::IsMember({"present", "absent", "both"}));
    simulate->add_option("--trials", inv.trials, "Monte Carlo trials");
    simulate->add_option("--seed", inv.seed, "RNG seed");

    CLI::App* validate = app.add_subcommand("validate", "analytic vs Monte Carlo cross-checks");
    add_common(validate);
    validate->add_option("--trials", inv.trials, "Monte Carlo trials per check");
    validate->add_option("--seed", inv.seed, "RNG seed");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("risradar");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(optimize)) return cmd_optimize(inv, out);
        if (app.got_subcommand(sweep)) return cmd_sweep(inv, out, err);
        if (app.got_subcommand(simulate)) return cmd_simulate(inv, out, err);
        return cmd_validate(inv, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace risradar::cli
