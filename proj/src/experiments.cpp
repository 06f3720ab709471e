#include "risradar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include "risradar/errors.hpp"
#include "risradar/units.hpp"

namespace risradar {

namespace {

SweepRecord record_from(const std::string& label, double snr0_db, const DesignReport& rep) {
    SweepRecord r;
    r.case_label = label;
    r.snr0_db = snr0_db;
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

ScenarioConfig at_sweep_point(const ScenarioConfig& base, double snr0_db) {
    ScenarioConfig cfg = base;
    const double s = sigma2_from_snr0(snr0_db, base.radar, base.link);
    cfg.target.sigma2_g1 = s;
    cfg.target.sigma2_g2 = s; // the sweep sets sigma2_g2 = sigma2_g1
    cfg.snr0_db = snr0_db;
    return cfg;
}

std::string format_field(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

} // namespace

std::vector<double> SweepGrid::points() const {
    if (!(step_db > 0.0) || !(stop_db >= start_db))
        throw DomainError("sweep grid must have positive step and stop >= start");
    const auto count =
        static_cast<std::size_t>(std::llround((stop_db - start_db) / step_db)) + 1;
    std::vector<double> pts(count);
    for (std::size_t i = 0; i < count; ++i)
        pts[i] = start_db + static_cast<double>(i) * step_db;
    return pts;
}

std::vector<CaseSpec> default_cases() {
    std::vector<CaseSpec> cases;
    CaseSpec no_ris;
    no_ris.label = "no_ris";
    no_ris.kind = CaseSpec::no_ris;
    cases.push_back(no_ris);
    CaseSpec passive;
    passive.label = "passive";
    passive.kind = CaseSpec::passive;
    cases.push_back(passive);
    for (const int db : {10, 20, 30, 40}) {
        CaseSpec active;
        active.label = "active_amax" + std::to_string(db);
        active.kind = CaseSpec::active;
        active.a_max_db = static_cast<double>(db);
        cases.push_back(active);
    }
    return cases;
}

double sigma_from_snr0(double snr0_db, const ScenarioConfig& cfg) {
    return sigma2_from_snr0(snr0_db, cfg.radar, cfg.link);
}

std::vector<SweepRecord> sweep_snr0(const ScenarioConfig& cfg, const SweepGrid& grid,
                                    const std::vector<CaseSpec>& cases) {
    if (cases.empty()) throw DomainError("sweep requires at least one case");
    const std::vector<double> pts = grid.points();

    std::vector<SweepRecord> records;
    records.reserve(cases.size() * pts.size());
    for (const CaseSpec& cs : cases) {
        ScenarioConfig case_cfg = cfg;
        if ((cs.kind == CaseSpec::active || cs.kind == CaseSpec::mismatched) &&
            !std::isnan(cs.a_max_db))
            case_cfg.ris.a_max = units::db_to_amplitude(cs.a_max_db);

        // design-time sigma2_g2 for the mismatched variant: where the matched
        // curve reaches PD = 0.5
        double sigma2_design = 0.0;
        if (cs.kind == CaseSpec::mismatched)
            sigma2_design = sigma2_at_pd_level(case_cfg, 0.5);

        std::optional<Design> warm;
        for (const double snr0_db : pts) {
            const ScenarioConfig pt_cfg = at_sweep_point(case_cfg, snr0_db);
            try {
                DesignReport rep;
                switch (cs.kind) {
                    case CaseSpec::no_ris: rep = baseline_no_ris(pt_cfg); break;
                    case CaseSpec::passive: rep = baseline_passive(pt_cfg); break;
                    case CaseSpec::active: {
                        BcaOptions opts;
                        if (warm) opts.extra_inits.push_back(*warm);
                        rep = alternating_maximization(pt_cfg, opts);
                        warm = rep.design;
                        break;
                    }
                    case CaseSpec::mismatched: {
                        rep = mismatched_design(pt_cfg, sigma2_design);
                        warm = rep.design;
                        break;
                    }
                }
                records.push_back(record_from(cs.label, snr0_db, rep));
            } catch (const Error&) {
                SweepRecord bad;
                bad.case_label = cs.label;
                bad.snr0_db = snr0_db;
                bad.budget_ok = false;
                bad.converged = false;
                records.push_back(bad);
            }
        }
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const SweepRecord& a, const SweepRecord& b) {
                         if (a.case_label != b.case_label) return a.case_label < b.case_label;
                         return a.snr0_db < b.snr0_db;
                     });
    return records;
}

double snr0_at_pd_level(const std::vector<SweepRecord>& records, double pd_level) {
    if (records.size() < 2) throw DomainError("need at least two records to interpolate");
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].pd < records[i - 1].pd - 1e-9)
            throw DomainError("record set is not monotone in pd along snr0_db");
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double p0 = records[i - 1].pd;
        const double p1 = records[i].pd;
        if (p0 <= pd_level && pd_level <= p1) {
            if (p1 == p0) return records[i - 1].snr0_db; // flat at the level
            const double w = (pd_level - p0) / (p1 - p0);
            return records[i - 1].snr0_db + w * (records[i].snr0_db - records[i - 1].snr0_db);
        }
    }
    throw DomainError("pd level not bracketed by the record set");
}

double gain_at_pd_level(const std::vector<SweepRecord>& records_a,
                        const std::vector<SweepRecord>& records_b, double pd_level) {
    return snr0_at_pd_level(records_b, pd_level) - snr0_at_pd_level(records_a, pd_level);
}

double sigma2_at_pd_level(const ScenarioConfig& cfg, double pd_level) {
    if (!(pd_level > 0.0 && pd_level < 1.0))
        throw DomainError("pd level must lie in (0, 1)");
    const auto pd_at = [&cfg](double snr0_db) {
        return alternating_maximization(at_sweep_point(cfg, snr0_db)).operating_point.pd;
    };
    double lo = -20.0;
    double hi = 50.0;
    if (pd_at(lo) >= pd_level || pd_at(hi) <= pd_level)
        throw DomainError("pd level not reachable on the snr0 bracket [-20, 50] dB");
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double pd = pd_at(mid);
        if (std::abs(pd - pd_level) <= 1e-4) return sigma_from_snr0(mid, cfg);
        if (pd < pd_level)
            lo = mid;
        else
            hi = mid;
    }
    return sigma_from_snr0(0.5 * (lo + hi), cfg);
}

void emit_records(const std::vector<SweepRecord>& records, std::ostream& out) {
    out << "case,snr0_db,pd,p_r_w,l,amplitude,radar_consumed_w,ris_consumed_w,"
           "budget_ok,iterations,converged\n";
    for (const SweepRecord& r : records) {
        out << r.case_label << ',' << format_field(r.snr0_db) << ',' << format_field(r.pd)
            << ',' << format_field(r.p_r_w) << ',' << r.l << ',' << format_field(r.amplitude)
            << ',' << format_field(r.radar_consumed_w) << ','
            << format_field(r.ris_consumed_w) << ',' << (r.budget_ok ? 1 : 0) << ','
            << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

void emit_records(const std::vector<SweepRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    emit_records(records, out);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

} // namespace risradar
