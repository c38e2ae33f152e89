#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "regencool/mlp.hpp"

namespace regencool {

// One station sample: bulk state, boundary conditions, geometry and the
// hot-gas-side maximum wall temperature as the label.
struct SampleRecord {
    double z = 0.0;    // flow length [mm]
    double T_b = 0.0;  // bulk temperature [K]
    double h_b = 0.0;  // bulk static enthalpy [J/kg]
    double p_b = 0.0;  // bulk pressure [Pa]
    double v_b = 0.0;  // bulk velocity [m/s]
    double G = 0.0;    // mass flow density [kg/(m2 s)]
    double q = 0.0;    // heat flux [W/m2]
    double r = 0.0;    // surface roughness [um]
    double A = 0.0;    // channel area [mm2]
    double AR = 0.0;   // aspect ratio [-]
    double d = 0.0;    // wall thickness [mm]
    std::optional<double> T_w; // label [K]
};

// Columnar store of SampleRecord. Labels are all-present (training/test) or
// all-absent (inference); immutable in practice after load/generation.
class Dataset {
public:
    static constexpr std::size_t kNumFeatures = 11;
    static constexpr std::array<const char*, kNumFeatures> kFieldNames = {
        "z", "T_b", "h_b", "p_b", "v_b", "G", "q", "r", "A", "AR", "d"};
    static constexpr const char* kLabelName = "T_w";

    Dataset() = default;
    explicit Dataset(std::string provenance, bool has_labels = true)
        : provenance_(std::move(provenance)), has_labels_(has_labels) {}

    void append(const SampleRecord& rec);
    std::size_t size() const { return cols_[0].size(); }
    bool has_labels() const { return has_labels_; }
    const std::string& provenance() const { return provenance_; }

    const std::vector<double>& column(const std::string& name) const;
    const std::vector<double>& labels() const;
    SampleRecord record(std::size_t i) const;

    // row-level invariants; row_offset only shifts reported indices
    void validate(std::size_t row_offset = 1) const;

    std::uint64_t checksum() const;

private:
    std::array<std::vector<double>, kNumFeatures> cols_;
    std::vector<double> labels_;
    std::string provenance_ = "external";
    bool has_labels_ = true;
};

// CSV with one header row carrying the field names (units in brackets are
// accepted and ignored); the T_w column is optional.
Dataset load_dataset(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const Dataset& ds);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// Reproducible shuffle split into ceil(n * train_fraction) / remainder.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// Pearson correlation for the named columns ("T_w" allowed); unit diagonal.
Matrix correlation_matrix(const Dataset& ds, const std::vector<std::string>& columns);

struct ColumnStats {
    std::string name;
    double mean = 0.0;
    double stddev = 0.0; // population
    std::array<double, 5> percentiles{}; // 1, 25, 50, 75, 99 by linear interpolation
};

std::vector<ColumnStats> stats_summary(const Dataset& ds);

// Ordered ANN input features; a subset of the SampleRecord fields.
struct FeatureSpec {
    std::vector<std::string> names;

    static FeatureSpec canonical() {
        return {{"h_b", "p_b", "G", "q", "r", "A", "AR", "d", "z"}};
    }
    void validate() const;
};

Matrix feature_matrix(const Dataset& ds, const FeatureSpec& spec);

} // namespace regencool
