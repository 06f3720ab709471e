#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "risradar/design.hpp"
#include "risradar/scenario.hpp"

namespace risradar {

// One row of the sweep output; columns mirror the CSV schema.
struct SweepRecord {
    std::string case_label;
    double snr0_db = 0.0;
    double pd = 0.0;
    double p_r_w = 0.0;
    std::int64_t l = 0;
    double amplitude = 1.0;
    double radar_consumed_w = 0.0;
    double ris_consumed_w = 0.0;
    bool budget_ok = true;
    int iterations = 0;
    bool converged = true;
};

struct SweepGrid {
    double start_db = 0.0;
    double stop_db = 30.0;
    double step_db = 0.25;

    std::vector<double> points() const;
};

struct CaseSpec {
    enum Kind { no_ris, passive, active, mismatched };
    std::string label;
    Kind kind = active;
    // a_max^2 [dB] override for active/mismatched cases; NaN keeps the config value
    double a_max_db = std::numeric_limits<double>::quiet_NaN();
};

// Standard sweep case set: no_ris, passive, active at a_max^2 in {10,20,30,40} dB.
std::vector<CaseSpec> default_cases();

// sigma2_g1 for a sweep point (wrapper over the scenario-level helper using
// the config's own link budget). The sweep sets sigma2_g2 = sigma2_g1.
double sigma_from_snr0(double snr0_db, const ScenarioConfig& cfg);

// One record per (case, grid point); records sorted by (case, snr0_db).
// Active cases chain the previous grid point's design as a warm start.
std::vector<SweepRecord> sweep_snr0(const ScenarioConfig& cfg, const SweepGrid& grid,
                                    const std::vector<CaseSpec>& cases);

// snr0_db at which a monotone record set crosses pd_level (piecewise-linear).
double snr0_at_pd_level(const std::vector<SweepRecord>& records, double pd_level);

// gain = snr0(b at level) - snr0(a at level) [dB].
double gain_at_pd_level(const std::vector<SweepRecord>& records_a,
                        const std::vector<SweepRecord>& records_b, double pd_level);

// sigma2_g2 at which the matched active design reaches pd_level on the sweep
// axis (bisection in snr0_db, 1e-4 PD tolerance).
double sigma2_at_pd_level(const ScenarioConfig& cfg, double pd_level);

// CSV emission; header always present, 15-significant-digit formatting,
// byte-identical for identical records.
void emit_records(const std::vector<SweepRecord>& records, std::ostream& out);
void emit_records(const std::vector<SweepRecord>& records, const std::string& path);

} // namespace risradar
