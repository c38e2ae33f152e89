#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "regencool/mlp.hpp"
#include "regencool/property_table.hpp"

namespace regencool {

// Rectangular cooling-channel cross section. Lengths in mm, roughness in um.
struct ChannelGeometry {
    double width_mm = 1.0;          // b
    double height_mm = 1.0;         // channel height
    double wall_thickness_mm = 1.0; // hot-gas-side wall
    double fin_thickness_mm = 1.0;
    double length_mm = 250.0;
    double roughness_um = 1.0;

    double area_mm2() const { return width_mm * height_mm; }
    double aspect_ratio() const { return height_mm / width_mm; }

    void validate() const;
    // Area / aspect-ratio combinations outside the trained envelope are legal
    // but worth flagging.
    std::vector<std::string> envelope_warnings() const;
};

// D_h = 2 b h / (b + h) for a rectangular duct, in mm.
double hydraulic_diameter(const ChannelGeometry& geom);

// Churchill correlation, valid across laminar, transitional and turbulent
// flow: f = 8 [ (8/Re)^12 + (A+B)^-1.5 ]^(1/12) with
// A = [2.457 ln(1/((7/Re)^0.9 + 0.27 r/D_h))]^16, B = (37530/Re)^16.
double friction_factor(double reynolds, double rel_roughness);

// Bulk state at one stream-wise station.
struct FlowState {
    double z_mm = 0.0;
    double p = 0.0;      // static pressure [Pa]
    double h_tot = 0.0;  // total specific enthalpy [J/kg]
    double h_stat = 0.0; // static specific enthalpy [J/kg]
    double T_b = 0.0;    // bulk temperature [K]
    double rho_b = 0.0;  // bulk density [kg/m3]
    double v_b = 0.0;    // bulk velocity [m/s]
    double Re = 0.0;
};

// Piecewise-constant heat flux over stream-wise position. breaks_mm[i] starts
// segment i; the last segment extends to the channel end.
struct HeatFluxProfile {
    std::vector<double> breaks_mm{0.0};
    std::vector<double> q_w_m2{0.0};

    static HeatFluxProfile constant(double q) { return {{0.0}, {q}}; }
    double at(double z_mm) const;
    void validate() const;
};

struct MarchConfig {
    double mdot = 0.0; // [kg/s]
    double T_in = 0.0; // inlet bulk temperature [K]
    std::optional<double> p_in;  // [Pa]; exactly one of p_in / p_out
    std::optional<double> p_out; // [Pa]
    HeatFluxProfile heat_flux;
    double dz_mm = 2.0;

    void validate() const;
};

// Darcy-Weisbach drop 1/2 f rho v^2 dz/D_h [Pa].
double darcy_pressure_drop(double f, double rho, double v, double dz_mm, double d_h_mm);

// Darcy-Weisbach segment pressure drop [Pa] at the upstream station state,
// with the friction factor taken at the station's Reynolds number.
double pressure_step(const FlowState& state, const ChannelGeometry& geom, double dz_mm);

// Total-enthalpy rise [J/kg] over one segment: q (b + fin) dz / mdot; the heat
// enters through one channel pitch at the hot-gas face.
double enthalpy_step(double q_local, const ChannelGeometry& geom, double dz_mm, double mdot);

// Marches bulk pressure and total enthalpy from inlet to outlet; stations at
// z = 0, dz, ..., length. Each station closes (T, rho, v) through the
// equation of state by fixed-point iteration (|dT| < 1e-4 K, max 50). With
// p_out given, an outer secant iteration finds the matching inlet pressure
// to within 100 Pa.
std::vector<FlowState> march(const PropertyTable& table, const ChannelGeometry& geom,
                             const MarchConfig& cfg);

// march plus a wall-temperature prediction per station. The feature vector is
// assembled from scaler.feature_names, standardized, and fed to the model.
std::vector<std::pair<FlowState, double>> predict_channel(const PropertyTable& table,
                                                          const ChannelGeometry& geom,
                                                          const MarchConfig& cfg, const Mlp& model,
                                                          const ScalerParams& scaler);

// Station feature by name (see datapipe's canonical ordering).
double station_feature(const std::string& name, const FlowState& state,
                       const ChannelGeometry& geom, double q_local);

// CSV: z[mm],p[Pa],h_tot[J/kg],h_stat[J/kg],T_b[K],rho[kg/m3],v[m/s],Re,f,T_w[K]
// (T_w column only when wall temperatures are given).
void write_march_csv(std::ostream& out, const std::vector<FlowState>& stations,
                     const ChannelGeometry& geom, const std::vector<double>* wall_temps = nullptr);

} // namespace regencool
