#include "regencool/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "regencool/channel.hpp"
#include "regencool/errors.hpp"
#include "regencool/rng.hpp"

namespace regencool {

void GeneratorConfig::validate(const PropertyTable& table) const {
    if (n_channels < 1) throw ValidationError("generator: n_channels must be >= 1");
    for (const auto* r : {&p_out_bar, &t_in_k, &roughness_um, &area_mm2, &aspect_ratio,
                          &wall_thickness_mm, &mass_flux}) {
        if (!(r->hi >= r->lo) || !(r->lo > 0.0)) {
            throw ValidationError("generator: ranges must be positive with hi >= lo");
        }
    }
    if (!(heat_flux_w_m2.hi >= heat_flux_w_m2.lo) || heat_flux_w_m2.lo < 0.0) {
        throw ValidationError("generator: heat flux range must be >= 0 with hi >= lo");
    }
    if (p_out_bar.lo * 1e5 < table.p_min() || max_inlet_pressure_bar * 1e5 > table.p_max()) {
        throw ValidationError("generator: pressure range leaves the property table");
    }
    if (t_in_k.lo < table.t_min()) {
        throw ValidationError("generator: inlet temperature below the property table");
    }
    if (near_critical_fraction < 0.0 || near_critical_fraction > 1.0) {
        throw ValidationError("generator: near-critical fraction must be in [0, 1]");
    }
    if (!(dz_mm > 0.0) || !(channel_length_mm > 0.0)) {
        throw ValidationError("generator: dz and channel length must be positive");
    }
    if (label_noise_std_k < 0.0) throw ValidationError("generator: label noise must be >= 0");
}

double convective_htc(double reynolds, double prandtl, double conductivity, double d_h_m,
                      double rel_roughness) {
    return kNusseltCoefficient * (conductivity / d_h_m) * std::pow(reynolds, 0.8) *
           std::pow(prandtl, 0.4) *
           (1.0 + kRoughnessGain * std::pow(rel_roughness, kRoughnessExponent));
}

double fin_efficiency(double alpha0, double fin_thickness_m, double fin_height_m) {
    const double m = std::sqrt(2.0 * alpha0 / (kSolidConductivity * fin_thickness_m));
    const double mh = m * fin_height_m;
    return mh < 1e-12 ? 1.0 : std::tanh(mh) / mh;
}

double wall_temperature_label(const LabelInputs& in) {
    const double alpha0 = convective_htc(in.reynolds, in.prandtl, in.conductivity, in.d_h_m,
                                         in.rel_roughness);
    const double alpha_eff = alpha0 * in.fin_effectiveness;
    return in.T_b + in.q_w / alpha_eff + in.q * in.wall_thickness_m / kSolidConductivity;
}

namespace {

struct ChannelDraw {
    ChannelGeometry geom;
    double p_out = 0.0; // [Pa]
    double t_in = 0.0;  // [K]
    double q = 0.0;     // [W/m2]
    double mass_flux = 0.0;
};

// One channel design; (q, G) pairs are re-drawn until the energy input, the
// estimated inlet pressure and the estimated outlet velocity stay inside the
// configured caps, mirroring how the underlying campaigns pair higher mass
// flow densities with higher heat fluxes. Designs where no admissible pair
// exists (e.g. gas-like inlet in a very narrow channel) are re-drawn whole.
ChannelDraw draw_channel(const PropertyTable& table, const GeneratorConfig& cfg, Rng& rng) {
    for (int redraw = 0; redraw < 32; ++redraw) {
        ChannelDraw c;
        const double area = rng.uniform(cfg.area_mm2.lo, cfg.area_mm2.hi);
        const double ar = rng.uniform(cfg.aspect_ratio.lo, cfg.aspect_ratio.hi);
        c.geom.width_mm = std::sqrt(area / ar);
        c.geom.height_mm = std::sqrt(area * ar);
        c.geom.wall_thickness_mm = rng.uniform(cfg.wall_thickness_mm.lo, cfg.wall_thickness_mm.hi);
        c.geom.roughness_um = rng.uniform(cfg.roughness_um.lo, cfg.roughness_um.hi);
        c.geom.fin_thickness_mm = cfg.fin_thickness_mm;
        c.geom.length_mm = cfg.channel_length_mm;

        if (rng.uniform() < cfg.near_critical_fraction) {
            c.p_out = rng.uniform(cfg.p_out_bar.lo, std::min(cfg.p_out_bar.hi, 65.0)) * 1e5;
            const double t_pc = pseudo_fluid_t_pc(c.p_out);
            c.t_in = rng.uniform(std::max(cfg.t_in_k.lo, t_pc - 35.0),
                                 std::min(cfg.t_in_k.hi, t_pc + 25.0));
        } else {
            c.p_out = rng.uniform(cfg.p_out_bar.lo, cfg.p_out_bar.hi) * 1e5;
            c.t_in = rng.uniform(cfg.t_in_k.lo, cfg.t_in_k.hi);
        }

        const double d_h_m = hydraulic_diameter(c.geom) * 1e-3;
        const double h_in = table.query(c.p_out, c.t_in).h;
        const double h_cap = table.query(c.p_out, cfg.max_bulk_temperature_k).h;
        const double pitch_m = (c.geom.width_mm + c.geom.fin_thickness_mm) * 1e-3;
        const double area_m2 = c.geom.area_mm2() * 1e-6;

        for (int attempt = 0; attempt < 64; ++attempt) {
            c.q = rng.uniform(cfg.heat_flux_w_m2.lo, cfg.heat_flux_w_m2.hi);
            // pair higher heat fluxes with higher mass flow densities
            const double q_rel = (c.q - cfg.heat_flux_w_m2.lo) /
                                 std::max(1.0, cfg.heat_flux_w_m2.hi - cfg.heat_flux_w_m2.lo);
            const double g_lo = cfg.mass_flux.lo +
                                0.35 * q_rel * (cfg.mass_flux.hi - cfg.mass_flux.lo);
            c.mass_flux = rng.uniform(g_lo, cfg.mass_flux.hi);

            const double mdot = c.mass_flux * area_m2;
            const double dh_total = c.q * pitch_m * (cfg.channel_length_mm * 1e-3) / mdot;
            if (h_in + dh_total > h_cap) continue;

            // inlet-pressure estimate from a Darcy drop at the heavier of the
            // inlet and capped-outlet states
            const double t_out_est = table.temperature_from_enthalpy(c.p_out, h_in + dh_total);
            const PropertyState out_est = table.query(c.p_out, t_out_est);
            const double v_out = c.mass_flux / out_est.rho;
            if (v_out > cfg.max_outlet_velocity) continue;

            const PropertyState in_est = table.query(c.p_out, c.t_in);
            const double v_in = c.mass_flux / in_est.rho;
            const double re_in = in_est.rho * v_in * d_h_m / in_est.mu;
            const double f_est = friction_factor(re_in, c.geom.roughness_um * 1e-6 / d_h_m);
            const double dyn_worst =
                std::max(in_est.rho * v_in * v_in, out_est.rho * v_out * v_out);
            const double dp_est =
                0.5 * f_est * dyn_worst * (cfg.channel_length_mm * 1e-3) / d_h_m;
            if (c.p_out + 1.4 * dp_est > cfg.max_inlet_pressure_bar * 1e5) continue;
            return c;
        }
    }
    throw ConvergenceError("generate: could not draw an admissible channel");
}

} // namespace

GenerateOutcome generate(const PropertyTable& table, const GeneratorConfig& cfg) {
    cfg.validate(table);
    Rng rng(cfg.rng_seed);
    // a separate stream keeps the channel draws identical with or without noise
    Rng noise_rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ull);
    GenerateOutcome out;

    for (int ch = 0; ch < cfg.n_channels; ++ch) {
        ChannelDraw c;
        try {
            c = draw_channel(table, cfg, rng);
        } catch (const Error& e) {
            ++out.channels_skipped;
            out.skip_messages.emplace_back(e.what());
            continue;
        }

        MarchConfig mc;
        mc.mdot = c.mass_flux * c.geom.area_mm2() * 1e-6;
        mc.T_in = c.t_in;
        mc.p_out = c.p_out;
        mc.heat_flux = HeatFluxProfile::constant(c.q);
        mc.dz_mm = cfg.dz_mm;

        std::vector<FlowState> stations;
        try {
            stations = march(table, c.geom, mc);
        } catch (const Error& e) {
            ++out.channels_skipped;
            out.skip_messages.emplace_back(e.what());
            continue;
        }

        const double d_h_m = hydraulic_diameter(c.geom) * 1e-3;
        const double rel_rough = c.geom.roughness_um * 1e-6 / d_h_m;
        // flux rescaled from the heated pitch onto the wetted perimeter
        const double perimeter_ratio = (c.geom.width_mm + c.geom.fin_thickness_mm) /
                                       (c.geom.width_mm + 2.0 * c.geom.height_mm);
        bool ok = true;
        std::vector<SampleRecord> records;
        records.reserve(stations.size());
        for (const FlowState& s : stations) {
            const PropertyState ps = table.query(s.p, s.T_b);
            LabelInputs li;
            li.T_b = s.T_b;
            li.q = c.q;
            li.q_w = c.q * perimeter_ratio;
            li.reynolds = s.Re;
            li.prandtl = ps.cp * ps.mu / ps.k;
            li.conductivity = ps.k;
            li.d_h_m = d_h_m;
            li.rel_roughness = rel_rough;
            li.wall_thickness_m = c.geom.wall_thickness_mm * 1e-3;
            const double alpha0 = convective_htc(li.reynolds, li.prandtl, li.conductivity,
                                                 li.d_h_m, li.rel_roughness);
            li.fin_effectiveness = fin_efficiency(alpha0, c.geom.fin_thickness_mm * 1e-3,
                                                  c.geom.height_mm * 1e-3);
            double t_w = wall_temperature_label(li);
            if (cfg.label_noise_std_k > 0.0) t_w += cfg.label_noise_std_k * noise_rng.normal();
            if (!std::isfinite(t_w) || t_w <= 0.0) {
                ok = false;
                break;
            }
            SampleRecord rec;
            rec.z = s.z_mm;
            rec.T_b = s.T_b;
            rec.h_b = s.h_stat;
            rec.p_b = s.p;
            rec.v_b = s.v_b;
            rec.G = c.mass_flux;
            rec.q = c.q;
            rec.r = c.geom.roughness_um;
            rec.A = c.geom.area_mm2();
            rec.AR = c.geom.aspect_ratio();
            rec.d = c.geom.wall_thickness_mm;
            rec.T_w = t_w;
            records.push_back(rec);
        }
        if (!ok) {
            ++out.channels_skipped;
            out.skip_messages.emplace_back("non-finite wall-temperature label");
            continue;
        }
        for (const auto& rec : records) out.dataset.append(rec);
        ++out.channels_generated;
    }
    return out;
}

} // namespace regencool
