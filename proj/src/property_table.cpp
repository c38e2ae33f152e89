#include "regencool/property_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "regencool/errors.hpp"

namespace regencool {

namespace {

bool all_positive_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x) && x > 0.0; });
}

bool strictly_ascending(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) return false;
    }
    return true;
}

// index of the cell [axis[i], axis[i+1]] containing x, clamped to the last cell
std::size_t cell_index(const std::vector<double>& axis, double x) {
    auto it = std::upper_bound(axis.begin(), axis.end(), x);
    std::size_t i = (it == axis.begin()) ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
    return std::min(i, axis.size() - 2);
}

} // namespace

PropertyTable::PropertyTable(std::vector<double> pressures, std::vector<double> temperatures,
                             std::vector<double> rho, std::vector<double> h, std::vector<double> mu,
                             std::vector<double> k, std::vector<double> cp,
                             double gas_constant_specific)
    : p_(std::move(pressures)), t_(std::move(temperatures)), rho_(std::move(rho)),
      h_(std::move(h)), mu_(std::move(mu)), k_(std::move(k)), cp_(std::move(cp)),
      gas_constant_(gas_constant_specific) {
    validate();
}

void PropertyTable::validate() const {
    if (p_.size() < 2 || t_.size() < 2) {
        throw ValidationError("property table: each grid axis needs at least 2 nodes");
    }
    if (!strictly_ascending(p_)) {
        throw ValidationError("property table: pressure axis must be strictly ascending");
    }
    if (!strictly_ascending(t_)) {
        throw ValidationError("property table: temperature axis must be strictly ascending");
    }
    const std::size_t n = p_.size() * t_.size();
    for (const auto* grid : {&rho_, &h_, &mu_, &k_, &cp_}) {
        if (grid->size() != n) {
            throw ValidationError("property table: grid shape does not match the axes");
        }
    }
    if (!all_positive_finite(rho_) || !all_positive_finite(mu_) || !all_positive_finite(k_) ||
        !all_positive_finite(cp_)) {
        throw ValidationError("property table: rho, mu, k, cp must be positive everywhere");
    }
    for (double v : h_) {
        if (!std::isfinite(v)) throw ValidationError("property table: non-finite enthalpy");
    }
    // invertibility of h(T) at fixed p
    for (std::size_t i = 0; i < p_.size(); ++i) {
        for (std::size_t j = 1; j < t_.size(); ++j) {
            if (!(h_[idx(i, j)] > h_[idx(i, j - 1)])) {
                throw ValidationError("property table: h must be strictly increasing in T at fixed p");
            }
        }
    }
    if (!(gas_constant_ > 0.0) || !std::isfinite(gas_constant_)) {
        throw ValidationError("property table: specific gas constant must be positive");
    }
}

double PropertyTable::interpolate(const std::vector<double>& grid, double p, double T) const {
    const std::size_t i = cell_index(p_, p);
    const std::size_t j = cell_index(t_, T);
    const double tx = (p - p_[i]) / (p_[i + 1] - p_[i]);
    const double ty = (T - t_[j]) / (t_[j + 1] - t_[j]);
    const double g00 = grid[idx(i, j)], g01 = grid[idx(i, j + 1)];
    const double g10 = grid[idx(i + 1, j)], g11 = grid[idx(i + 1, j + 1)];
    return (1.0 - tx) * ((1.0 - ty) * g00 + ty * g01) + tx * ((1.0 - ty) * g10 + ty * g11);
}

PropertyState PropertyTable::query(double p, double T) const {
    if (!(p >= p_min() && p <= p_max())) {
        throw OutOfRangeError("query: pressure " + std::to_string(p) + " Pa outside table axis [" +
                              std::to_string(p_min()) + ", " + std::to_string(p_max()) + "]");
    }
    if (!(T >= t_min())) {
        throw OutOfRangeError("query: temperature " + std::to_string(T) +
                              " K below table minimum " + std::to_string(t_min()));
    }
    PropertyState s{};
    s.p = p;
    s.T = T;
    if (T <= t_max_table()) {
        s.rho = interpolate(rho_, p, T);
        s.h = interpolate(h_, p, T);
        s.mu = interpolate(mu_, p, T);
        s.k = interpolate(k_, p, T);
        s.cp = interpolate(cp_, p, T);
        return s;
    }
    // ideal-gas extension; transport properties frozen at the table edge
    const double t_edge = t_max_table();
    s.rho = p / (gas_constant_ * T);
    s.cp = interpolate(cp_, p, t_edge);
    s.h = interpolate(h_, p, t_edge) + s.cp * (T - t_edge);
    s.mu = interpolate(mu_, p, t_edge);
    s.k = interpolate(k_, p, t_edge);
    return s;
}

double PropertyTable::temperature_from_enthalpy(double p, double h) const {
    double lo = t_min();
    double hi = kTMaxExtended;
    const double h_lo = query(p, lo).h;
    const double h_hi = query(p, hi).h;
    if (!(h >= h_lo && h <= h_hi)) {
        throw OutOfRangeError("temperature_from_enthalpy: h = " + std::to_string(h) +
                              " J/kg outside [" + std::to_string(h_lo) + ", " +
                              std::to_string(h_hi) + "] at p = " + std::to_string(p) + " Pa");
    }
    // monotone in T by table invariant; bisect until the bracket is tight in
    // both T (relative 1e-9) and h (1 J/kg)
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double hm = query(p, mid).h;
        if (hm < h) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-9 * hi && std::abs(hm - h) < 1.0) break;
    }
    return 0.5 * (lo + hi);
}

PropertyTable load_table(const std::filesystem::path& path, std::optional<double> gas_constant) {
    std::ifstream in(path);
    if (!in) throw IoError("load_table: cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    std::optional<double> r_sidecar;
    bool header_seen = false;
    std::vector<std::array<double, 7>> rows;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line.front() == '#') {
            if (line.rfind("#R=", 0) == 0) {
                try {
                    r_sidecar = std::stod(line.substr(3));
                } catch (const std::exception&) {
                    throw ParseError("load_table: bad #R= line at line " + std::to_string(line_no));
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("p[Pa]", 0) != 0) {
                throw ParseError("load_table: missing header row at line " + std::to_string(line_no));
            }
            header_seen = true;
            continue;
        }
        std::array<double, 7> row{};
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= 7) break;
            char* end = nullptr;
            row[col] = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                throw ParseError("load_table: malformed number at line " + std::to_string(line_no));
            }
            ++col;
        }
        if (col != 7) {
            throw ParseError("load_table: expected 7 columns at line " + std::to_string(line_no));
        }
        rows.push_back(row);
    }
    if (!header_seen || rows.empty()) {
        throw ParseError("load_table: no data rows in " + path.string());
    }

    // reconstruct the axes: p-major ordering, first block defines the T axis
    std::vector<double> pressures, temperatures;
    for (const auto& r : rows) {
        if (pressures.empty() || r[0] != pressures.back()) pressures.push_back(r[0]);
    }
    const std::size_t np = pressures.size();
    if (rows.size() % np != 0) {
        throw ValidationError("load_table: row count is not a complete (p x T) grid");
    }
    const std::size_t nt = rows.size() / np;
    temperatures.reserve(nt);
    for (std::size_t j = 0; j < nt; ++j) temperatures.push_back(rows[j][1]);

    std::vector<double> rho(np * nt), h(np * nt), mu(np * nt), k(np * nt), cp(np * nt);
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = 0; j < nt; ++j) {
            const auto& r = rows[i * nt + j];
            if (r[0] != pressures[i] || r[1] != temperatures[j]) {
                throw ValidationError("load_table: grid not p-major-complete near data row " +
                                      std::to_string(i * nt + j + 1));
            }
            rho[i * nt + j] = r[2];
            h[i * nt + j] = r[3];
            mu[i * nt + j] = r[4];
            k[i * nt + j] = r[5];
            cp[i * nt + j] = r[6];
        }
    }

    const std::optional<double> r_spec = gas_constant ? gas_constant : r_sidecar;
    if (!r_spec) {
        throw ValidationError("load_table: specific gas constant missing (no #R= line and no flag)");
    }
    return PropertyTable(std::move(pressures), std::move(temperatures), std::move(rho),
                         std::move(h), std::move(mu), std::move(k), std::move(cp), *r_spec);
}

void save_table(const PropertyTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_table: cannot open " + path.string() + " for writing");
    char buf[512];
    std::snprintf(buf, sizeof buf, "#R=%.17g\n", table.gas_constant_specific());
    out << buf;
    out << "p[Pa],T[K],rho[kg/m3],h[J/kg],mu[Pa.s],k[W/m.K],cp[J/kg.K]\n";
    const auto& ps = table.pressures();
    const auto& ts = table.temperatures();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < ts.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", ps[i],
                          ts[j], table.rho_at(i, j), table.h_at(i, j), table.mu_at(i, j),
                          table.k_at(i, j), table.cp_at(i, j));
            out << buf;
        }
    }
    if (!out) throw IoError("save_table: write failed for " + path.string());
}

namespace {

constexpr double kBar = 1e5;
constexpr double kGasConstant = 518.28; // J/(kg.K), methane-like
constexpr double kTRef = 110.0;
constexpr double kCpBase = 2200.0;  // J/(kg.K)
constexpr double kCpWidth = 40.0;   // K, width of the pseudo-critical cp peak
constexpr double kSigmoidWidth = 9.0; // K, liquid-to-gas density transition

double cp_amplitude(double p) { return 5000.0 * std::exp(-(p - 46.0 * kBar) / 1.5e7); }

double rho_liquid(double p, double T) {
    return 430.0 - 0.52 * (T - kTRef) + 4.0e-6 * (p - 46.0 * kBar);
}

double gas_fraction(double p, double T) {
    return 1.0 / (1.0 + std::exp(-(T - pseudo_fluid_t_pc(p)) / kSigmoidWidth));
}

double pseudo_cp(double p, double T) {
    const double u = (T - pseudo_fluid_t_pc(p)) / kCpWidth;
    return kCpBase + cp_amplitude(p) * std::exp(-u * u);
}

// exact integral of pseudo_cp from kTRef to T
double pseudo_h(double p, double T) {
    const double t_pc = pseudo_fluid_t_pc(p);
    const double h_ref = 40000.0 + (p - 46.0 * kBar) / 420.0;
    const double bump = cp_amplitude(p) * kCpWidth * (0.5 * std::sqrt(std::numbers::pi)) *
                        (std::erf((T - t_pc) / kCpWidth) - std::erf((kTRef - t_pc) / kCpWidth));
    return h_ref + kCpBase * (T - kTRef) + bump;
}

double pseudo_rho(double p, double T) {
    const double s = gas_fraction(p, T);
    return (1.0 - s) * rho_liquid(p, T) + s * p / (kGasConstant * T);
}

double pseudo_mu(double p, double T) {
    const double s = gas_fraction(p, T);
    const double mu_liq = 1.6e-4 * std::exp(-0.010 * (T - kTRef));
    const double mu_gas = 9.0e-6 + 2.6e-8 * T;
    return (1.0 - s) * mu_liq + s * mu_gas;
}

double pseudo_k(double p, double T) {
    const double s = gas_fraction(p, T);
    const double k_liq = 0.21 - 2.0e-4 * (T - kTRef);
    const double k_gas = 0.010 + 7.0e-5 * T;
    return (1.0 - s) * k_liq + s * k_gas;
}

} // namespace

double pseudo_fluid_t_pc(double p) { return 190.0 + 0.06 * (p / kBar - 46.0); }

PropertyTable make_pseudo_fluid() {
    std::vector<double> pressures(40);
    for (std::size_t i = 0; i < pressures.size(); ++i) {
        pressures[i] = 30.0 * kBar + (320.0 - 30.0) * kBar * static_cast<double>(i) / 39.0;
    }
    // temperature axis clustered across the pseudo-critical band: uniform
    // spacing inside [150, 330] keeps linear interpolation of the cp peak
    // consistent with the tabulated h to well under 0.1 %
    std::vector<double> temperatures;
    temperatures.reserve(60);
    for (int j = 0; j < 5; ++j) temperatures.push_back(110.0 + 10.0 * j);         // 110..150
    for (int j = 1; j <= 45; ++j) temperatures.push_back(150.0 + 4.0 * j);        // 154..330
    for (int j = 1; j <= 10; ++j) temperatures.push_back(330.0 + 29.5 * j);       // 359.5..625
    const std::size_t np = pressures.size(), nt = temperatures.size();

    std::vector<double> rho(np * nt), h(np * nt), mu(np * nt), k(np * nt), cp(np * nt);
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = 0; j < nt; ++j) {
            const double p = pressures[i], T = temperatures[j];
            rho[i * nt + j] = pseudo_rho(p, T);
            h[i * nt + j] = pseudo_h(p, T);
            mu[i * nt + j] = pseudo_mu(p, T);
            k[i * nt + j] = pseudo_k(p, T);
            cp[i * nt + j] = pseudo_cp(p, T);
        }
    }
    return PropertyTable(std::move(pressures), std::move(temperatures), std::move(rho),
                         std::move(h), std::move(mu), std::move(k), std::move(cp), kGasConstant);
}

} // namespace regencool
