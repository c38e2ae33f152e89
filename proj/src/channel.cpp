#include "regencool/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "regencool/errors.hpp"

namespace regencool {

void ChannelGeometry::validate() const {
    if (!(width_mm > 0.0) || !(height_mm > 0.0) || !(wall_thickness_mm > 0.0) ||
        !(fin_thickness_mm > 0.0) || !(length_mm > 0.0) || !(roughness_um > 0.0)) {
        throw ValidationError("channel geometry: all dimensions must be positive");
    }
}

std::vector<std::string> ChannelGeometry::envelope_warnings() const {
    std::vector<std::string> w;
    char buf[128];
    if (area_mm2() < 1.0 || area_mm2() > 10.0) {
        std::snprintf(buf, sizeof buf, "channel area %.3g mm2 outside the trained band [1, 10] mm2",
                      area_mm2());
        w.emplace_back(buf);
    }
    if (aspect_ratio() < 1.0 || aspect_ratio() > 9.2) {
        std::snprintf(buf, sizeof buf,
                      "aspect ratio %.3g outside the trained band [1.0, 9.2]", aspect_ratio());
        w.emplace_back(buf);
    }
    return w;
}

double hydraulic_diameter(const ChannelGeometry& geom) {
    geom.validate();
    return 2.0 * geom.width_mm * geom.height_mm / (geom.width_mm + geom.height_mm);
}

double friction_factor(double reynolds, double rel_roughness) {
    if (!(reynolds > 0.0)) throw ValidationError("friction_factor: Re must be positive");
    if (rel_roughness < 0.0) {
        throw ValidationError("friction_factor: relative roughness must be >= 0");
    }
    const double log_arg = std::pow(7.0 / reynolds, 0.9) + 0.27 * rel_roughness;
    if (!(log_arg > 0.0)) throw ValidationError("friction_factor: degenerate log argument");
    const double a = std::pow(2.457 * std::log(1.0 / log_arg), 16.0);
    const double b = std::pow(37530.0 / reynolds, 16.0);
    const double laminar = std::pow(8.0 / reynolds, 12.0);
    return 8.0 * std::pow(laminar + 1.0 / std::pow(a + b, 1.5), 1.0 / 12.0);
}

double HeatFluxProfile::at(double z_mm) const {
    auto it = std::upper_bound(breaks_mm.begin(), breaks_mm.end(), z_mm);
    const std::size_t i = (it == breaks_mm.begin()) ? 0 : static_cast<std::size_t>(it - breaks_mm.begin()) - 1;
    return q_w_m2[i];
}

void HeatFluxProfile::validate() const {
    if (breaks_mm.empty() || breaks_mm.size() != q_w_m2.size()) {
        throw ValidationError("heat flux profile: need one value per segment start");
    }
    if (breaks_mm.front() != 0.0) {
        throw ValidationError("heat flux profile: first segment must start at z = 0");
    }
    for (std::size_t i = 1; i < breaks_mm.size(); ++i) {
        if (!(breaks_mm[i] > breaks_mm[i - 1])) {
            throw ValidationError("heat flux profile: segment starts must be ascending");
        }
    }
    for (double q : q_w_m2) {
        if (!(q >= 0.0) || !std::isfinite(q)) {
            throw ValidationError("heat flux profile: q must be finite and >= 0");
        }
    }
}

void MarchConfig::validate() const {
    if (!(mdot > 0.0)) throw ValidationError("march config: mdot must be positive");
    if (!(T_in > 0.0)) throw ValidationError("march config: inlet temperature must be positive");
    if (p_in.has_value() == p_out.has_value()) {
        throw ValidationError("march config: exactly one of p_in / p_out must be set");
    }
    if (!(dz_mm > 0.0)) throw ValidationError("march config: dz must be positive");
    heat_flux.validate();
}

double darcy_pressure_drop(double f, double rho, double v, double dz_mm, double d_h_mm) {
    return 0.5 * f * rho * v * v * dz_mm / d_h_mm;
}

double pressure_step(const FlowState& state, const ChannelGeometry& geom, double dz_mm) {
    if (!(dz_mm > 0.0)) throw ValidationError("pressure_step: dz must be positive");
    if (state.v_b == 0.0) return 0.0;
    const double d_h_mm = hydraulic_diameter(geom);
    const double f = friction_factor(state.Re, geom.roughness_um * 1e-3 / d_h_mm);
    return darcy_pressure_drop(f, state.rho_b, state.v_b, dz_mm, d_h_mm);
}

double enthalpy_step(double q_local, const ChannelGeometry& geom, double dz_mm, double mdot) {
    if (q_local < 0.0) throw ValidationError("enthalpy_step: q must be >= 0");
    if (!(mdot > 0.0)) throw ValidationError("enthalpy_step: mdot must be positive");
    const double heated_area_m2 = (geom.width_mm + geom.fin_thickness_mm) * 1e-3 * dz_mm * 1e-3;
    return q_local * heated_area_m2 / mdot;
}

namespace {

// closes (T, rho, v, h_stat) at fixed p and h_tot via the equation of state;
// fixed-point iteration on T, with a bisection fallback for the rare
// high-velocity states where the kinetic-energy coupling stops contracting
FlowState close_station(const PropertyTable& table, std::size_t station, double z_mm, double p,
                        double h_tot, double mass_flux, double d_h_m, double t_guess) {
    double t = t_guess;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        const double rho = table.query(p, t).rho;
        const double v = mass_flux / rho;
        const double h_stat = h_tot - 0.5 * v * v;
        const double t_new = table.temperature_from_enthalpy(p, h_stat);
        const bool done = std::abs(t_new - t) < 1e-4;
        t = t_new;
        if (done) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        // residual g(T) = h_tot - v(T)^2/2 - h(T) is strictly decreasing in T
        auto residual = [&](double ti) {
            const PropertyState s = table.query(p, ti);
            const double v = mass_flux / s.rho;
            return h_tot - 0.5 * v * v - s.h;
        };
        double lo = table.t_min();
        double hi = PropertyTable::kTMaxExtended;
        if (residual(lo) < 0.0) {
            throw ConvergenceError("march: no admissible state at station " +
                                   std::to_string(station) + " (z = " + std::to_string(z_mm) +
                                   " mm)");
        }
        if (residual(hi) > 0.0) {
            // the outer march loop adds the station context
            throw OutOfRangeError("fluid left the table envelope");
        }
        while (hi - lo > 1e-4) {
            const double mid = 0.5 * (lo + hi);
            (residual(mid) >= 0.0 ? lo : hi) = mid;
        }
        t = 0.5 * (lo + hi);
    }
    FlowState s;
    s.z_mm = z_mm;
    s.p = p;
    s.h_tot = h_tot;
    const PropertyState ps = table.query(p, t);
    s.T_b = t;
    s.rho_b = ps.rho;
    s.v_b = mass_flux / ps.rho;
    s.h_stat = h_tot - 0.5 * s.v_b * s.v_b;
    s.Re = ps.rho * s.v_b * d_h_m / ps.mu;
    return s;
}

std::vector<FlowState> march_from_inlet(const PropertyTable& table, const ChannelGeometry& geom,
                                        const MarchConfig& cfg, double p_in) {
    const double area_m2 = geom.area_mm2() * 1e-6;
    const double mass_flux = cfg.mdot / area_m2; // G [kg/(m2 s)]
    const double d_h_m = hydraulic_diameter(geom) * 1e-3;

    // inlet state straight from (p_in, T_in); h_stat is re-derived from h_tot
    // so that h_stat = h_tot - v^2/2 holds bitwise at every station
    const PropertyState inlet = table.query(p_in, cfg.T_in);
    FlowState s0;
    s0.z_mm = 0.0;
    s0.p = p_in;
    s0.T_b = cfg.T_in;
    s0.rho_b = inlet.rho;
    s0.v_b = mass_flux / inlet.rho;
    s0.h_tot = inlet.h + 0.5 * s0.v_b * s0.v_b;
    s0.h_stat = s0.h_tot - 0.5 * s0.v_b * s0.v_b;
    s0.Re = inlet.rho * s0.v_b * d_h_m / inlet.mu;

    std::vector<FlowState> stations{s0};
    stations.reserve(static_cast<std::size_t>(geom.length_mm / cfg.dz_mm) + 2);

    double z = 0.0;
    while (z < geom.length_mm - 1e-9) {
        const double dz = std::min(cfg.dz_mm, geom.length_mm - z);
        const FlowState& prev = stations.back();
        const double q_seg = cfg.heat_flux.at(z + 0.5 * dz);
        const double h_tot_next = prev.h_tot + enthalpy_step(q_seg, geom, dz, cfg.mdot);
        const double p_next = prev.p - pressure_step(prev, geom, dz);
        z += dz;
        try {
            stations.push_back(close_station(table, stations.size(), z, p_next, h_tot_next,
                                             mass_flux, d_h_m, prev.T_b));
        } catch (const OutOfRangeError& e) {
            throw OutOfRangeError("march: station " + std::to_string(stations.size()) + " (z = " +
                                  std::to_string(z) + " mm): " + e.what());
        }
    }
    return stations;
}

} // namespace

std::vector<FlowState> march(const PropertyTable& table, const ChannelGeometry& geom,
                             const MarchConfig& cfg) {
    geom.validate();
    cfg.validate();
    if (cfg.p_in) return march_from_inlet(table, geom, cfg, *cfg.p_in);

    // outlet pressure given: secant iteration on the inlet pressure
    const double target = *cfg.p_out;
    const double area_m2 = geom.area_mm2() * 1e-6;
    const double mass_flux = cfg.mdot / area_m2;
    const double d_h_m = hydraulic_diameter(geom) * 1e-3;

    // rough Darcy estimate of the total drop from inlet-like conditions
    const PropertyState ref = table.query(target, cfg.T_in);
    const double v_ref = mass_flux / ref.rho;
    const double re_ref = ref.rho * v_ref * d_h_m / ref.mu;
    const double f_ref = friction_factor(re_ref, geom.roughness_um * 1e-3 / (d_h_m * 1e3));
    const double dp_est =
        0.5 * f_ref * ref.rho * v_ref * v_ref * (geom.length_mm * 1e-3) / d_h_m;

    auto outlet_pressure = [&](double p_in) {
        return march_from_inlet(table, geom, cfg, p_in).back().p;
    };

    double p0 = std::min(target + dp_est, table.p_max());
    double g0;
    // back off if the probe leaves the table envelope
    for (int attempt = 0;; ++attempt) {
        try {
            g0 = outlet_pressure(p0) - target;
            break;
        } catch (const OutOfRangeError&) {
            if (attempt >= 8 || p0 >= table.p_max()) throw;
            p0 = std::min(p0 * 1.15, table.p_max());
        }
    }
    if (std::abs(g0) <= 100.0) return march_from_inlet(table, geom, cfg, p0);

    double p1 = std::min(p0 * 1.02 + 1e4, table.p_max());
    double g1 = outlet_pressure(p1) - target;
    for (int it = 0; it < 30; ++it) {
        if (std::abs(g1) <= 100.0) return march_from_inlet(table, geom, cfg, p1);
        const double denom = g1 - g0;
        if (denom == 0.0) break;
        double p2 = p1 - g1 * (p1 - p0) / denom;
        p2 = std::clamp(p2, table.p_min(), table.p_max());
        p0 = p1;
        g0 = g1;
        p1 = p2;
        g1 = outlet_pressure(p1) - target;
    }
    throw ConvergenceError("march: inlet-pressure iteration did not reach the outlet pressure " +
                           std::to_string(target) + " Pa within 100 Pa");
}

double station_feature(const std::string& name, const FlowState& state,
                       const ChannelGeometry& geom, double q_local) {
    if (name == "h_b") return state.h_stat;
    if (name == "p_b") return state.p;
    if (name == "G") return state.rho_b * state.v_b;
    if (name == "q") return q_local;
    if (name == "r") return geom.roughness_um;
    if (name == "A") return geom.area_mm2();
    if (name == "AR") return geom.aspect_ratio();
    if (name == "d") return geom.wall_thickness_mm;
    if (name == "z") return state.z_mm;
    if (name == "T_b") return state.T_b;
    if (name == "v_b") return state.v_b;
    throw ValidationError("station_feature: unknown feature '" + name + "'");
}

std::vector<std::pair<FlowState, double>> predict_channel(const PropertyTable& table,
                                                          const ChannelGeometry& geom,
                                                          const MarchConfig& cfg, const Mlp& model,
                                                          const ScalerParams& scaler) {
    if (scaler.feature_names.empty() || scaler.dim() != model.input_dim()) {
        throw ValidationError("predict_channel: model input dimension does not match the scaler");
    }
    const std::vector<FlowState> stations = march(table, geom, cfg);
    std::vector<std::pair<FlowState, double>> out;
    out.reserve(stations.size());
    std::vector<double> x(scaler.dim()), xs(scaler.dim());
    for (const FlowState& s : stations) {
        const double q_local = cfg.heat_flux.at(s.z_mm);
        for (std::size_t i = 0; i < scaler.feature_names.size(); ++i) {
            x[i] = station_feature(scaler.feature_names[i], s, geom, q_local);
        }
        scaler.transform(x, xs);
        out.emplace_back(s, forward(model, xs));
    }
    return out;
}

void write_march_csv(std::ostream& out, const std::vector<FlowState>& stations,
                     const ChannelGeometry& geom, const std::vector<double>* wall_temps) {
    const double d_h_mm = hydraulic_diameter(geom);
    out << "z[mm],p[Pa],h_tot[J/kg],h_stat[J/kg],T_b[K],rho[kg/m3],v[m/s],Re,f";
    if (wall_temps) out << ",T_w[K]";
    out << "\n";
    char buf[512];
    for (std::size_t i = 0; i < stations.size(); ++i) {
        const FlowState& s = stations[i];
        const double f = friction_factor(s.Re, geom.roughness_um * 1e-3 / d_h_mm);
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", s.z_mm, s.p,
                      s.h_tot, s.h_stat, s.T_b, s.rho_b, s.v_b, s.Re, f);
        out << buf;
        if (wall_temps) {
            std::snprintf(buf, sizeof buf, ",%.17g", (*wall_temps)[i]);
            out << buf;
        }
        out << "\n";
    }
}

} // namespace regencool
