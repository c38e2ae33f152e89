#include "regencool/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "regencool/errors.hpp"
#include "regencool/rng.hpp"

namespace regencool {

namespace {

std::size_t field_index(const std::string& name) {
    for (std::size_t i = 0; i < Dataset::kNumFeatures; ++i) {
        if (name == Dataset::kFieldNames[i]) return i;
    }
    throw ValidationError("dataset: unknown column '" + name + "'");
}

// z and q may be zero, everything else must be strictly positive
bool strictly_positive_field(std::size_t i) {
    const char* n = Dataset::kFieldNames[i];
    return std::strcmp(n, "z") != 0 && std::strcmp(n, "q") != 0;
}

std::string strip_unit(const std::string& header_cell) {
    const auto bracket = header_cell.find('[');
    std::string s = header_cell.substr(0, bracket);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
    return s;
}

constexpr const char* kCsvHeader =
    "z[mm],T_b[K],h_b[J/kg],p_b[Pa],v_b[m/s],G[kg/m2.s],q[W/m2],r[um],A[mm2],AR[-],d[mm]";

} // namespace

void Dataset::append(const SampleRecord& rec) {
    const std::array<double, kNumFeatures> vals = {rec.z, rec.T_b, rec.h_b, rec.p_b, rec.v_b,
                                                   rec.G, rec.q,   rec.r,   rec.A,   rec.AR,
                                                   rec.d};
    if (has_labels_ != rec.T_w.has_value()) {
        throw ValidationError("dataset: label presence must be uniform across records");
    }
    for (std::size_t i = 0; i < kNumFeatures; ++i) cols_[i].push_back(vals[i]);
    if (rec.T_w) labels_.push_back(*rec.T_w);
}

const std::vector<double>& Dataset::column(const std::string& name) const {
    if (name == kLabelName) return labels();
    return cols_[field_index(name)];
}

const std::vector<double>& Dataset::labels() const {
    if (!has_labels_) throw ValidationError("dataset: no labels present");
    return labels_;
}

SampleRecord Dataset::record(std::size_t i) const {
    SampleRecord r;
    r.z = cols_[0][i];
    r.T_b = cols_[1][i];
    r.h_b = cols_[2][i];
    r.p_b = cols_[3][i];
    r.v_b = cols_[4][i];
    r.G = cols_[5][i];
    r.q = cols_[6][i];
    r.r = cols_[7][i];
    r.A = cols_[8][i];
    r.AR = cols_[9][i];
    r.d = cols_[10][i];
    if (has_labels_) r.T_w = labels_[i];
    return r;
}

void Dataset::validate(std::size_t row_offset) const {
    for (std::size_t i = 1; i < kNumFeatures; ++i) {
        if (cols_[i].size() != cols_[0].size()) {
            throw ValidationError("dataset: ragged columns");
        }
    }
    if (has_labels_ && labels_.size() != cols_[0].size()) {
        throw ValidationError("dataset: label column length mismatch");
    }
    for (std::size_t row = 0; row < size(); ++row) {
        for (std::size_t i = 0; i < kNumFeatures; ++i) {
            const double v = cols_[i][row];
            if (!std::isfinite(v) || v < 0.0 || (v == 0.0 && strictly_positive_field(i))) {
                throw ValidationError("dataset: invalid " + std::string(kFieldNames[i]) + " = " +
                                      std::to_string(v) + " in data row " +
                                      std::to_string(row + row_offset));
            }
        }
        if (has_labels_ && (!std::isfinite(labels_[row]) || labels_[row] <= 0.0)) {
            throw ValidationError("dataset: invalid T_w in data row " +
                                  std::to_string(row + row_offset));
        }
    }
}

std::uint64_t Dataset::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& c : cols_) h = fnv1a_doubles(c, h);
    h = fnv1a_doubles(labels_, h);
    return h;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_dataset: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError("load_dataset: empty file " + path.string());

    std::vector<std::size_t> col_to_field; // position -> field index, kNumFeatures == label
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const std::string name = strip_unit(cell);
            if (name == Dataset::kLabelName) {
                col_to_field.push_back(Dataset::kNumFeatures);
            } else {
                col_to_field.push_back(field_index(name));
            }
        }
    }
    const bool has_label_col =
        std::find(col_to_field.begin(), col_to_field.end(), Dataset::kNumFeatures) !=
        col_to_field.end();
    std::vector<bool> seen(Dataset::kNumFeatures, false);
    for (std::size_t f : col_to_field) {
        if (f < Dataset::kNumFeatures) seen[f] = true;
    }
    for (std::size_t i = 0; i < Dataset::kNumFeatures; ++i) {
        if (!seen[i]) {
            throw ParseError("load_dataset: header misses column '" +
                             std::string(Dataset::kFieldNames[i]) + "'");
        }
    }

    Dataset ds("external", has_label_col);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        SampleRecord rec;
        std::array<double, Dataset::kNumFeatures + 1> vals{};
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= col_to_field.size()) break;
            char* end = nullptr;
            vals[col_to_field[col]] = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                throw ParseError("load_dataset: malformed number at line " +
                                 std::to_string(line_no));
            }
            ++col;
        }
        if (col != col_to_field.size()) {
            throw ParseError("load_dataset: wrong column count at line " + std::to_string(line_no));
        }
        rec.z = vals[0];
        rec.T_b = vals[1];
        rec.h_b = vals[2];
        rec.p_b = vals[3];
        rec.v_b = vals[4];
        rec.G = vals[5];
        rec.q = vals[6];
        rec.r = vals[7];
        rec.A = vals[8];
        rec.AR = vals[9];
        rec.d = vals[10];
        if (has_label_col) rec.T_w = vals[Dataset::kNumFeatures];
        ds.append(rec);
    }
    ds.validate(2); // header occupies line 1
    return ds;
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
    out << kCsvHeader;
    if (ds.has_labels()) out << ",T_w[K]";
    out << "\n";
    char buf[64];
    for (std::size_t row = 0; row < ds.size(); ++row) {
        const SampleRecord r = ds.record(row);
        const std::array<double, Dataset::kNumFeatures> vals = {r.z, r.T_b, r.h_b, r.p_b, r.v_b,
                                                                r.G, r.q,   r.r,   r.A,   r.AR,
                                                                r.d};
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof buf, i == 0 ? "%.17g" : ",%.17g", vals[i]);
            out << buf;
        }
        if (ds.has_labels()) {
            std::snprintf(buf, sizeof buf, ",%.17g", *r.T_w);
            out << buf;
        }
        out << "\n";
    }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_dataset: cannot open " + path.string() + " for writing");
    write_dataset_csv(out, ds);
    if (!out) throw IoError("save_dataset: write failed for " + path.string());
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("split: train fraction must be in (0, 1)");
    }
    if (ds.size() < 2) throw ValidationError("split: need at least 2 records");

    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    const auto n_train = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(ds.size())));
    Dataset train(ds.provenance(), ds.has_labels());
    Dataset val(ds.provenance(), ds.has_labels());
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? train : val).append(ds.record(order[i]));
    }
    return {std::move(train), std::move(val)};
}

Matrix correlation_matrix(const Dataset& ds, const std::vector<std::string>& columns) {
    if (ds.size() < 2) throw ValidationError("correlation_matrix: need at least 2 rows");
    const std::size_t n = ds.size(), c = columns.size();
    std::vector<const std::vector<double>*> cols;
    cols.reserve(c);
    for (const auto& name : columns) cols.push_back(&ds.column(name));

    std::vector<double> mean(c, 0.0), sd(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
        mean[j] = std::accumulate(cols[j]->begin(), cols[j]->end(), 0.0) / static_cast<double>(n);
        for (double v : *cols[j]) sd[j] += (v - mean[j]) * (v - mean[j]);
        if (sd[j] == 0.0) {
            throw ValidationError("correlation_matrix: constant column '" + columns[j] + "'");
        }
        sd[j] = std::sqrt(sd[j]);
    }

    Matrix out(c, c);
    for (std::size_t a = 0; a < c; ++a) {
        out(a, a) = 1.0;
        for (std::size_t b = a + 1; b < c; ++b) {
            double cov = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cov += ((*cols[a])[i] - mean[a]) * ((*cols[b])[i] - mean[b]);
            }
            out(a, b) = out(b, a) = cov / (sd[a] * sd[b]);
        }
    }
    return out;
}

namespace {

double percentile_sorted(const std::vector<double>& sorted, double pct) {
    const double rank = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = static_cast<std::size_t>(std::ceil(rank));
    const double t = rank - static_cast<double>(lo);
    return (1.0 - t) * sorted[lo] + t * sorted[hi];
}

} // namespace

std::vector<ColumnStats> stats_summary(const Dataset& ds) {
    if (ds.size() == 0) throw ValidationError("stats_summary: empty dataset");
    std::vector<std::string> names(Dataset::kFieldNames.begin(), Dataset::kFieldNames.end());
    if (ds.has_labels()) names.emplace_back(Dataset::kLabelName);

    std::vector<ColumnStats> out;
    out.reserve(names.size());
    for (const auto& name : names) {
        const auto& col = ds.column(name);
        ColumnStats st;
        st.name = name;
        st.mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
        for (double v : col) st.stddev += (v - st.mean) * (v - st.mean);
        st.stddev = std::sqrt(st.stddev / static_cast<double>(col.size()));
        std::vector<double> sorted(col);
        std::sort(sorted.begin(), sorted.end());
        const std::array<double, 5> pcts = {1.0, 25.0, 50.0, 75.0, 99.0};
        for (std::size_t i = 0; i < pcts.size(); ++i) {
            st.percentiles[i] = percentile_sorted(sorted, pcts[i]);
        }
        out.push_back(std::move(st));
    }
    return out;
}

void FeatureSpec::validate() const {
    if (names.empty()) throw ValidationError("feature spec: empty feature list");
    for (const auto& n : names) {
        field_index(n); // throws on unknown / label
        if (std::count(names.begin(), names.end(), n) != 1) {
            throw ValidationError("feature spec: duplicate feature '" + n + "'");
        }
    }
}

Matrix feature_matrix(const Dataset& ds, const FeatureSpec& spec) {
    spec.validate();
    Matrix x(ds.size(), spec.names.size());
    for (std::size_t j = 0; j < spec.names.size(); ++j) {
        const auto& col = ds.column(spec.names[j]);
        for (std::size_t i = 0; i < ds.size(); ++i) x(i, j) = col[i];
    }
    return x;
}

} // namespace regencool
