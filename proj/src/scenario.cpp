#include "risradar/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "risradar/errors.hpp"
#include "risradar/units.hpp"

namespace risradar {

using nlohmann::json;

namespace {

// How the dB-suffixed variant of a field converts to linear.
enum class Alt { none, db_power, db_amplitude, dbm };

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

std::string alt_suffix(Alt alt) { return alt == Alt::dbm ? "_dbm" : "_db"; }

double from_alt(double x, Alt alt) {
    switch (alt) {
        case Alt::db_power: return units::db_to_lin(x);
        case Alt::db_amplitude: return units::db_to_amplitude(x);
        case Alt::dbm: return units::dbm_to_watt(x);
        default: return x;
    }
}

// Reads sec[key] or its dB/dBm variant; at most one may be present.
std::optional<double> read_quantity(const json& sec, const std::string& section,
                                    const std::string& key, Alt alt) {
    const std::string name = section + "." + key;
    const bool has_lin = sec.contains(key);
    if (alt == Alt::none) {
        if (!has_lin) return std::nullopt;
        return get_number(sec.at(key), name);
    }
    const std::string alt_key = key + alt_suffix(alt);
    const bool has_alt = sec.contains(alt_key);
    if (has_lin && has_alt)
        throw ConfigError(name + ": both " + key + " and " + alt_key + " given");
    if (has_lin) return get_number(sec.at(key), name);
    if (has_alt) return from_alt(get_number(sec.at(alt_key), section + "." + alt_key), alt);
    return std::nullopt;
}

double require_quantity(const json& sec, const std::string& section, const std::string& key,
                        Alt alt) {
    auto v = read_quantity(sec, section, key, alt);
    if (!v) throw ConfigError(section + "." + key + ": missing required field");
    return *v;
}

void check_positive(double v, const std::string& name) {
    if (!(v > 0.0)) throw ValidationError(name + ": must be strictly positive");
}

void check_nonneg(double v, const std::string& name) {
    if (!(v >= 0.0)) throw ValidationError(name + ": must be non-negative");
}

const json& require_section(const json& doc, const std::string& name) {
    if (!doc.contains(name) || !doc.at(name).is_object())
        throw ConfigError(name + ": missing required section");
    return doc.at(name);
}

Vec2 read_point(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(where + ": expected a 2-element array [x, y]");
    return {get_number(v.at(0), where + "[0]"), get_number(v.at(1), where + "[1]")};
}

RadarParams parse_radar(const json& sec) {
    RadarParams r;
    r.p_max = require_quantity(sec, "radar", "p_max", Alt::dbm);
    r.rho_r = require_quantity(sec, "radar", "rho_r", Alt::dbm);
    r.eta_r = require_quantity(sec, "radar", "eta_r", Alt::none);
    r.g_tx_rt = require_quantity(sec, "radar", "g_tx_rt", Alt::db_power);
    r.g_rx_rt = require_quantity(sec, "radar", "g_rx_rt", Alt::db_power);
    r.g_rx_rs = require_quantity(sec, "radar", "g_rx_rs", Alt::db_power);
    r.wavelength = require_quantity(sec, "radar", "wavelength", Alt::none);
    r.bandwidth = require_quantity(sec, "radar", "bandwidth", Alt::none);
    r.pulse_duration = require_quantity(sec, "radar", "pulse_duration", Alt::none);
    r.p_w1 = require_quantity(sec, "radar", "p_w1", Alt::dbm);
    r.p_w2 = require_quantity(sec, "radar", "p_w2", Alt::dbm);

    check_positive(r.p_max, "radar.p_max");
    check_positive(r.rho_r, "radar.rho_r");
    check_positive(r.eta_r, "radar.eta_r");
    if (r.eta_r > 1.0) throw ValidationError("radar.eta_r: must be in (0, 1]");
    check_positive(r.g_tx_rt, "radar.g_tx_rt");
    check_positive(r.g_rx_rt, "radar.g_rx_rt");
    check_positive(r.g_rx_rs, "radar.g_rx_rs");
    check_positive(r.wavelength, "radar.wavelength");
    check_positive(r.bandwidth, "radar.bandwidth");
    check_positive(r.pulse_duration, "radar.pulse_duration");
    check_positive(r.p_w1, "radar.p_w1");
    check_positive(r.p_w2, "radar.p_w2");
    if (!(r.p_max > r.rho_r))
        throw ValidationError("radar.p_max: must exceed rho_r, no transmit power otherwise");
    return r;
}

RisParams parse_ris(const json& sec) {
    RisParams s;
    if (!sec.contains("l_max")) throw ConfigError("ris.l_max: missing required field");
    if (!sec.at("l_max").is_number_integer() || sec.at("l_max").get<std::int64_t>() < 0)
        throw ValidationError("ris.l_max: must be a non-negative integer");
    s.l_max = sec.at("l_max").get<std::int64_t>();

    s.a_max = require_quantity(sec, "ris", "a_max", Alt::db_amplitude);

    const auto rho_s = read_quantity(sec, "ris", "rho_s", Alt::dbm);
    const auto p_c = read_quantity(sec, "ris", "p_c", Alt::dbm);
    const auto p_dc = read_quantity(sec, "ris", "p_dc", Alt::dbm);
    if (rho_s && (p_c || p_dc))
        throw ConfigError("ris.rho_s: conflicts with p_c/p_dc, give one form only");
    if (rho_s) {
        s.p_c = *rho_s; // single-figure form: all of rho_s is the operating supply
        s.p_dc = 0.0;
    } else if (p_c && p_dc) {
        s.p_c = *p_c;
        s.p_dc = *p_dc;
    } else if (p_c || p_dc) {
        throw ConfigError(std::string("ris.") + (p_c ? "p_dc" : "p_c") +
                          ": missing, p_c and p_dc must be given together");
    } else {
        throw ConfigError("ris.rho_s: missing required field (or give p_c and p_dc)");
    }

    s.eta_s = require_quantity(sec, "ris", "eta_s", Alt::none);
    s.p_v = require_quantity(sec, "ris", "p_v", Alt::dbm);
    s.g_st = require_quantity(sec, "ris", "g_st", Alt::db_power);
    s.g_sr = require_quantity(sec, "ris", "g_sr", Alt::db_power);
    s.orientation_deg = read_quantity(sec, "ris", "orientation_deg", Alt::none).value_or(0.0);

    if (!(s.a_max >= 1.0)) throw ValidationError("ris.a_max: must be >= 1");
    check_nonneg(s.p_c, "ris.p_c");
    check_nonneg(s.p_dc, "ris.p_dc");
    check_positive(s.eta_s, "ris.eta_s");
    if (s.eta_s > 1.0) throw ValidationError("ris.eta_s: must be in (0, 1]");
    check_nonneg(s.p_v, "ris.p_v");
    check_positive(s.g_st, "ris.g_st");
    check_positive(s.g_sr, "ris.g_sr");
    return s;
}

Geometry parse_geometry(const json& sec) {
    const bool has_pos =
        sec.contains("radar_pos") || sec.contains("target_pos") || sec.contains("ris_pos");
    const bool has_dist = sec.contains("d_rt") || sec.contains("d_ts") || sec.contains("d_sr");
    if (has_pos && has_dist)
        throw ConfigError("geometry: positions and explicit distances are mutually exclusive");
    if (has_pos) {
        if (!sec.contains("radar_pos")) throw ConfigError("geometry.radar_pos: missing");
        if (!sec.contains("target_pos")) throw ConfigError("geometry.target_pos: missing");
        if (!sec.contains("ris_pos")) throw ConfigError("geometry.ris_pos: missing");
        return derive_geometry(read_point(sec.at("radar_pos"), "geometry.radar_pos"),
                               read_point(sec.at("target_pos"), "geometry.target_pos"),
                               read_point(sec.at("ris_pos"), "geometry.ris_pos"));
    }
    if (has_dist) {
        Geometry g;
        g.d_rt = require_quantity(sec, "geometry", "d_rt", Alt::none);
        g.d_ts = require_quantity(sec, "geometry", "d_ts", Alt::none);
        g.d_sr = require_quantity(sec, "geometry", "d_sr", Alt::none);
        check_positive(g.d_rt, "geometry.d_rt");
        check_positive(g.d_ts, "geometry.d_ts");
        check_positive(g.d_sr, "geometry.d_sr");
        return g;
    }
    throw ConfigError("geometry: give positions (radar_pos/target_pos/ris_pos) or distances");
}

} // namespace

Geometry derive_geometry(const Vec2& radar_pos, const Vec2& target_pos, const Vec2& ris_pos) {
    Geometry g;
    g.radar_pos = radar_pos;
    g.target_pos = target_pos;
    g.ris_pos = ris_pos;
    g.d_rt = distance(radar_pos, target_pos);
    g.d_ts = distance(target_pos, ris_pos);
    g.d_sr = distance(ris_pos, radar_pos);
    if (!(g.d_rt > 0.0) || !(g.d_ts > 0.0) || !(g.d_sr > 0.0))
        throw ValidationError("geometry: degenerate, positions must be pairwise distinct");
    return g;
}

LinkBudget link_budget(const RadarParams& radar, const RisParams& ris, const Geometry& geo) {
    constexpr double four_pi = 4.0 * std::numbers::pi;
    LinkBudget lb;
    lb.alpha_rt = std::sqrt(radar.g_tx_rt / four_pi) / geo.d_rt;
    lb.alpha_tr = radar.wavelength * std::sqrt(radar.g_rx_rt) / (four_pi * geo.d_rt);
    lb.alpha_ts = radar.wavelength * std::sqrt(ris.g_st) / (four_pi * geo.d_ts);
    lb.alpha_sr = radar.wavelength * std::sqrt(ris.g_sr * radar.g_rx_rs) / (four_pi * geo.d_sr);
    const double mf = radar.matched_filter_gain();
    lb.alpha_1 = lb.alpha_rt * lb.alpha_tr * mf;
    lb.alpha_2 = lb.alpha_rt * lb.alpha_ts * lb.alpha_sr * mf;
    lb.alpha_rts = lb.alpha_rt * lb.alpha_ts;
    return lb;
}

double sigma2_from_snr0(double snr0_db, const RadarParams& radar, const LinkBudget& link) {
    const double p_r0 = (radar.p_max - radar.rho_r) * radar.eta_r;
    return units::db_to_lin(snr0_db) * radar.p_w1 / (link.alpha_1 * link.alpha_1 * p_r0);
}

ScenarioConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");

    ScenarioConfig cfg;
    cfg.radar = parse_radar(require_section(doc, "radar"));
    cfg.ris = parse_ris(require_section(doc, "ris"));
    cfg.geometry = parse_geometry(require_section(doc, "geometry"));
    cfg.link = link_budget(cfg.radar, cfg.ris, cfg.geometry);

    const json& tgt = require_section(doc, "target");
    const bool has_snr0_db = tgt.contains("snr0_db");
    const bool has_snr0_lin = tgt.contains("snr0");
    if (has_snr0_db && has_snr0_lin)
        throw ConfigError("target.snr0: both snr0 and snr0_db given");
    const auto s1 = read_quantity(tgt, "target", "sigma2_g1", Alt::db_power);
    const auto s2 = read_quantity(tgt, "target", "sigma2_g2", Alt::db_power);
    if ((has_snr0_db || has_snr0_lin) && (s1 || s2))
        throw ConfigError("target.snr0_db: conflicts with sigma2_g1/sigma2_g2");
    if (has_snr0_db || has_snr0_lin) {
        const double snr0_db = has_snr0_db
                                   ? get_number(tgt.at("snr0_db"), "target.snr0_db")
                                   : units::lin_to_db(get_number(tgt.at("snr0"), "target.snr0"));
        cfg.snr0_db = snr0_db;
        cfg.target.sigma2_g1 = sigma2_from_snr0(snr0_db, cfg.radar, cfg.link);
        cfg.target.sigma2_g2 = cfg.target.sigma2_g1;
    } else {
        if (!s1) throw ConfigError("target.sigma2_g1: missing (or give target.snr0_db)");
        cfg.target.sigma2_g1 = *s1;
        cfg.target.sigma2_g2 = s2.value_or(*s1);
    }
    check_positive(cfg.target.sigma2_g1, "target.sigma2_g1");
    check_positive(cfg.target.sigma2_g2, "target.sigma2_g2");

    const json& det = require_section(doc, "detection");
    cfg.pfa = require_quantity(det, "detection", "pfa", Alt::none);
    if (!(cfg.pfa > 0.0 && cfg.pfa < 1.0))
        throw ValidationError("detection.pfa: must lie in (0, 1)");
    if (det.contains("no_ris_detector")) {
        const std::string d = det.at("no_ris_detector").get<std::string>();
        if (d == "single")
            cfg.no_ris_detector = NoRisDetector::single_channel;
        else if (d == "two")
            cfg.no_ris_detector = NoRisDetector::two_channel;
        else
            throw ConfigError("detection.no_ris_detector: expected \"single\" or \"two\"");
    }

    if (doc.contains("mc")) {
        const json& mc = doc.at("mc");
        if (mc.contains("trials")) {
            if (!mc.at("trials").is_number_integer() || mc.at("trials").get<std::int64_t>() < 1)
                throw ValidationError("mc.trials: must be a positive integer");
            cfg.mc_trials = mc.at("trials").get<std::uint64_t>();
        }
        if (mc.contains("seed")) cfg.mc_seed = mc.at("seed").get<std::uint64_t>();
    }
    return cfg;
}

ScenarioConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_fingerprint(const json& doc) {
    const std::string s = doc.dump();
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace risradar
