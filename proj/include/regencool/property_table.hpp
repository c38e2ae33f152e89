#pragma once

#include <filesystem>
#include <optional>
#include <vector>

namespace regencool {

struct PropertyState {
    double rho; // density [kg/m3]
    double h;   // specific enthalpy [J/kg]
    double mu;  // dynamic viscosity [Pa.s]
    double k;   // thermal conductivity [W/(m.K)]
    double cp;  // isobaric heat capacity [J/(kg.K)]
    double T;   // temperature [K]
    double p;   // pressure [Pa]
};

// Tabulated equation of state on a rectangular (pressure, temperature) grid
// with bilinear interpolation inside the grid and an ideal-gas extension
// above the highest tabulated temperature. Immutable after construction,
// safe for concurrent reads.
class PropertyTable {
public:
    // Grids are row-major with shape (pressures.size() x temperatures.size()).
    PropertyTable(std::vector<double> pressures, std::vector<double> temperatures,
                  std::vector<double> rho, std::vector<double> h, std::vector<double> mu,
                  std::vector<double> k, std::vector<double> cp, double gas_constant_specific);

    const std::vector<double>& pressures() const { return p_; }
    const std::vector<double>& temperatures() const { return t_; }
    double t_min() const { return t_.front(); }
    double t_max_table() const { return t_.back(); }
    double p_min() const { return p_.front(); }
    double p_max() const { return p_.back(); }
    double gas_constant_specific() const { return gas_constant_; }

    // Highest temperature served by the ideal-gas branch.
    static constexpr double kTMaxExtended = 2000.0;

    // Bilinear interpolation for T <= t_max_table; above it density follows
    // p/(R T), enthalpy grows linearly with the edge cp, and mu/k/cp are
    // frozen at their table-edge values.
    PropertyState query(double p, double T) const;

    // Inverse of query(...).h in T at fixed p, by bisection. h must lie in
    // [h(p, t_min), h(p, kTMaxExtended)].
    double temperature_from_enthalpy(double p, double h) const;

    double rho_at(std::size_t i, std::size_t j) const { return rho_[idx(i, j)]; }
    double h_at(std::size_t i, std::size_t j) const { return h_[idx(i, j)]; }
    double mu_at(std::size_t i, std::size_t j) const { return mu_[idx(i, j)]; }
    double k_at(std::size_t i, std::size_t j) const { return k_[idx(i, j)]; }
    double cp_at(std::size_t i, std::size_t j) const { return cp_[idx(i, j)]; }

private:
    std::size_t idx(std::size_t i, std::size_t j) const { return i * t_.size() + j; }
    void validate() const;
    double interpolate(const std::vector<double>& grid, double p, double T) const;

    std::vector<double> p_, t_;
    std::vector<double> rho_, h_, mu_, k_, cp_;
    double gas_constant_;
};

// CSV schema: optional sidecar line `#R=<value>`, then a header row
// `p[Pa],T[K],rho[kg/m3],h[J/kg],mu[Pa.s],k[W/m.K],cp[J/kg.K]`, then one row
// per (p, T) node ordered p-major. The grid must be complete.
PropertyTable load_table(const std::filesystem::path& path,
                         std::optional<double> gas_constant = std::nullopt);
void save_table(const PropertyTable& table, const std::filesystem::path& path);

// Analytic stand-in for a supercritical fluid on a 40x60 grid: sigmoid
// density drop and a cp peak along the pseudo-critical line
// T_pc(p) = 190 K + 0.06 K/bar * (p - 46 bar), with h the exact integral of
// cp. Covers 30-320 bar and 110-625 K.
PropertyTable make_pseudo_fluid();

// Pseudo-critical temperature of the bundled pseudo-fluid [K] at p [Pa].
double pseudo_fluid_t_pc(double p);

} // namespace regencool
