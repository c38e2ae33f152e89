#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regencool/dataset.hpp"
#include "regencool/property_table.hpp"

namespace regencool {

struct ParamRange {
    double lo = 0.0, hi = 0.0;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

// Sampling box for synthetic channel campaigns. Ranges default to the trained
// envelope; draws are coupled so that channels stay within the property table
// (bounded bulk heating, inlet pressure and outlet velocity).
struct GeneratorConfig {
    int n_channels = 100;
    ParamRange p_out_bar{50.0, 150.0};
    ParamRange t_in_k{120.0, 400.0};
    ParamRange roughness_um{0.2, 15.0};
    ParamRange area_mm2{1.0, 10.0};
    ParamRange aspect_ratio{1.0, 9.2};
    ParamRange wall_thickness_mm{0.8, 1.2};
    ParamRange heat_flux_w_m2{9e6, 80e6};
    ParamRange mass_flux{3100.0, 35000.0};
    // fraction of channels drawn from narrow bands around the pseudo-critical
    // point instead of the full (T_in, p_out) box
    double near_critical_fraction = 0.3;
    std::uint64_t rng_seed = 0;
    double dz_mm = 2.0;
    double label_noise_std_k = 0.0;
    double channel_length_mm = 250.0;
    double fin_thickness_mm = 1.0;
    // draw-coupling caps
    double max_bulk_temperature_k = 430.0;
    double max_inlet_pressure_bar = 230.0;
    double max_outlet_velocity = 450.0;

    void validate(const PropertyTable& table) const;
};

// Closed-form wall-temperature law for labels. Fixed constants, documented
// here, make the labels an implementation-independent ground truth:
//   alpha0   = 0.023 (k / D_h) Re^0.8 Pr^0.4 (1 + 3.0 (r/D_h)^0.3)
//   eta_fin  = tanh(m H) / (m H),  m = sqrt(2 alpha0 / (k_solid t_fin))
//   T_w      = T_b + q_w / (alpha0 eta_fin) + q d / k_solid
// with k_solid = 340 W/(m K) and q_w the flux rescaled from one heated pitch
// (b + fin) onto the coolant-wetted perimeter (b + 2 h).
inline constexpr double kNusseltCoefficient = 0.023;
inline constexpr double kRoughnessGain = 3.0;
inline constexpr double kRoughnessExponent = 0.3;
inline constexpr double kSolidConductivity = 340.0; // W/(m K)

// Convective coefficient before the fin-efficiency factor [W/(m2 K)].
double convective_htc(double reynolds, double prandtl, double conductivity, double d_h_m,
                      double rel_roughness);

// Straight-fin efficiency tanh(mH)/(mH) evaluated with the unfinned
// coefficient.
double fin_efficiency(double alpha0, double fin_thickness_m, double fin_height_m);

struct LabelInputs {
    double T_b = 0.0;           // [K]
    double q = 0.0;             // hot-gas heat flux [W/m2]
    double q_w = 0.0;           // coolant-side flux [W/m2]
    double reynolds = 0.0;
    double prandtl = 0.0;
    double conductivity = 0.0;  // coolant k [W/(m K)]
    double d_h_m = 0.0;
    double rel_roughness = 0.0;
    double wall_thickness_m = 0.0;
    double fin_effectiveness = 1.0;
};

double wall_temperature_label(const LabelInputs& in);

struct GenerateOutcome {
    Dataset dataset{"oracle", true};
    int channels_generated = 0;
    int channels_skipped = 0;
    std::vector<std::string> skip_messages; // one per skipped channel
};

// Samples n_channels channel designs, marches each with the reduced-order
// flow model and labels every dz station with the closed-form law above.
// Deterministic for a fixed seed; failed marches are skipped and counted.
GenerateOutcome generate(const PropertyTable& table, const GeneratorConfig& cfg);

} // namespace regencool
