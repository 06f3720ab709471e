#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace risradar {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Radar-side hardware: budget, circuit power, amplifier efficiency, antenna
// gains, waveform parameters, receive noise. All linear SI units.
struct RadarParams {
    double p_max = 0.0;          // total power budget [W]
    double rho_r = 0.0;          // radar circuit power [W]
    double eta_r = 1.0;          // radar amplifier efficiency (0,1]
    double g_tx_rt = 1.0;        // tx gain, radar->target
    double g_rx_rt = 1.0;        // rx gain, target->radar
    double g_rx_rs = 1.0;        // rx gain, RIS->radar
    double wavelength = 0.0;     // lambda [m]
    double bandwidth = 0.0;      // W [Hz]
    double pulse_duration = 0.0; // T [s]
    double p_w1 = 0.0;           // direct-channel noise power [W]
    double p_w2 = 0.0;           // RIS-channel noise power [W]

    double matched_filter_gain() const { return std::sqrt(bandwidth * pulse_duration); }
};

struct RisParams {
    std::int64_t l_max = 0; // max element count
    double a_max = 1.0;     // max element amplitude (>= 1)
    double p_c = 0.0;       // per-element phase-shifter supply P_c [W]
    double p_dc = 0.0;      // per-element amplifier bias P_dc [W]
    double eta_s = 1.0;     // RIS amplifier efficiency (0,1]
    double p_v = 0.0;       // per-element dynamic noise power P_v [W]
    double g_st = 1.0;      // per-element gain, target side
    double g_sr = 1.0;      // per-element gain, radar side
    double orientation_deg = 0.0; // ULA orientation for the element layout

    // per-element operating power rho_s = P_c + P_dc
    double rho_s() const { return p_c + p_dc; }
};

struct Geometry {
    std::optional<Vec2> radar_pos;
    std::optional<Vec2> target_pos;
    std::optional<Vec2> ris_pos;
    double d_rt = 0.0; // radar <-> target [m]
    double d_ts = 0.0; // target <-> RIS [m]
    double d_sr = 0.0; // RIS <-> radar [m]
};

// Swerling-1 mean-square channel responses (target RCS folded in).
struct TargetStats {
    double sigma2_g1 = 0.0;
    double sigma2_g2 = 0.0;
};

struct LinkBudget {
    double alpha_rt = 0.0;  // radar -> target
    double alpha_tr = 0.0;  // target -> radar
    double alpha_ts = 0.0;  // target -> RIS element
    double alpha_sr = 0.0;  // RIS element -> radar
    double alpha_1 = 0.0;   // alpha_rt * alpha_tr * sqrt(WT)
    double alpha_2 = 0.0;   // alpha_rt * alpha_ts * alpha_sr * sqrt(WT)
    double alpha_rts = 0.0; // alpha_rt * alpha_ts
};

enum class NoRisDetector { single_channel, two_channel };

struct ScenarioConfig {
    RadarParams radar;
    RisParams ris;
    Geometry geometry;
    TargetStats target;
    double pfa = 1e-6;
    NoRisDetector no_ris_detector = NoRisDetector::single_channel;
    std::uint64_t mc_trials = 1000000;
    std::uint64_t mc_seed = 1;
    // set when the config pinned target strength through the reference SNR
    std::optional<double> snr0_db;

    LinkBudget link; // derived at parse time, kept with the config
};

// Euclidean distances from the three node positions.
Geometry derive_geometry(const Vec2& radar_pos, const Vec2& target_pos, const Vec2& ris_pos);

// Per-hop and composite propagation coefficients.
LinkBudget link_budget(const RadarParams& radar, const RisParams& ris, const Geometry& geo);

// sigma2_g1 realizing a given reference SNR0 = alpha_1^2 sigma2_g1 (P_max-rho_r) eta_r / P_w1.
double sigma2_from_snr0(double snr0_db, const RadarParams& radar, const LinkBudget& link);

// Parse + validate a configuration document. Accepts dB/dBm-suffixed variants
// of physical fields; rejects documents carrying both variants of one field.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// FNV-1a 64 over the canonical serialization; stable fingerprint for reports.
std::string config_fingerprint(const nlohmann::json& doc);

} // namespace risradar
