#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "regencool/channel.hpp"
#include "regencool/dataset.hpp"
#include "regencool/errors.hpp"
#include "regencool/kde.hpp"
#include "regencool/mlp.hpp"
#include "regencool/pipeline.hpp"
#include "regencool/property_table.hpp"
#include "regencool/synthetic.hpp"

namespace py = pybind11;
using namespace regencool;

namespace {

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols) {
            throw ValidationError("matrix rows must have equal length");
        }
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) rows[i].assign(m.row(i).begin(), m.row(i).end());
    return rows;
}

} // namespace

PYBIND11_MODULE(_regencool, m) {
    m.doc() = "reduced-order cooling-channel model with an MLP wall-temperature surrogate";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<PropertyState>(m, "PropertyState")
        .def_readonly("rho", &PropertyState::rho)
        .def_readonly("h", &PropertyState::h)
        .def_readonly("mu", &PropertyState::mu)
        .def_readonly("k", &PropertyState::k)
        .def_readonly("cp", &PropertyState::cp)
        .def_readonly("T", &PropertyState::T)
        .def_readonly("p", &PropertyState::p);

    py::class_<PropertyTable>(m, "PropertyTable")
        .def("query", &PropertyTable::query, py::arg("p"), py::arg("T"))
        .def("temperature_from_enthalpy", &PropertyTable::temperature_from_enthalpy,
             py::arg("p"), py::arg("h"))
        .def_property_readonly("pressures", &PropertyTable::pressures)
        .def_property_readonly("temperatures", &PropertyTable::temperatures)
        .def_property_readonly("t_max_table", &PropertyTable::t_max_table)
        .def_property_readonly("gas_constant_specific", &PropertyTable::gas_constant_specific);

    m.def("make_pseudo_fluid", &make_pseudo_fluid);
    m.def("load_table", &load_table, py::arg("path"), py::arg("gas_constant") = std::nullopt);
    m.def("save_table", &save_table, py::arg("table"), py::arg("path"));
    m.def("pseudo_fluid_t_pc", &pseudo_fluid_t_pc, py::arg("p"));

    py::class_<ChannelGeometry>(m, "ChannelGeometry")
        .def(py::init([](double width, double height, double wall, double fin, double length,
                         double roughness) {
                 return ChannelGeometry{width, height, wall, fin, length, roughness};
             }),
             py::arg("width_mm"), py::arg("height_mm"), py::arg("wall_thickness_mm") = 1.0,
             py::arg("fin_thickness_mm") = 1.0, py::arg("length_mm") = 250.0,
             py::arg("roughness_um") = 1.0)
        .def_readwrite("width_mm", &ChannelGeometry::width_mm)
        .def_readwrite("height_mm", &ChannelGeometry::height_mm)
        .def_readwrite("wall_thickness_mm", &ChannelGeometry::wall_thickness_mm)
        .def_readwrite("fin_thickness_mm", &ChannelGeometry::fin_thickness_mm)
        .def_readwrite("length_mm", &ChannelGeometry::length_mm)
        .def_readwrite("roughness_um", &ChannelGeometry::roughness_um)
        .def_property_readonly("area_mm2", &ChannelGeometry::area_mm2)
        .def_property_readonly("aspect_ratio", &ChannelGeometry::aspect_ratio);

    py::class_<FlowState>(m, "FlowState")
        .def_readonly("z_mm", &FlowState::z_mm)
        .def_readonly("p", &FlowState::p)
        .def_readonly("h_tot", &FlowState::h_tot)
        .def_readonly("h_stat", &FlowState::h_stat)
        .def_readonly("T_b", &FlowState::T_b)
        .def_readonly("rho_b", &FlowState::rho_b)
        .def_readonly("v_b", &FlowState::v_b)
        .def_readonly("Re", &FlowState::Re);

    py::class_<MarchConfig>(m, "MarchConfig")
        .def(py::init([](double mdot, double t_in, std::optional<double> p_in,
                         std::optional<double> p_out, double q, double dz) {
                 MarchConfig cfg;
                 cfg.mdot = mdot;
                 cfg.T_in = t_in;
                 cfg.p_in = p_in;
                 cfg.p_out = p_out;
                 cfg.heat_flux = HeatFluxProfile::constant(q);
                 cfg.dz_mm = dz;
                 return cfg;
             }),
             py::arg("mdot"), py::arg("T_in"), py::arg("p_in") = std::nullopt,
             py::arg("p_out") = std::nullopt, py::arg("q") = 0.0, py::arg("dz_mm") = 2.0);

    m.def("hydraulic_diameter", &hydraulic_diameter, py::arg("geometry"));
    m.def("friction_factor", &friction_factor, py::arg("reynolds"), py::arg("rel_roughness"));
    m.def("march", &march, py::arg("table"), py::arg("geometry"), py::arg("config"));
    m.def("predict_channel", &predict_channel, py::arg("table"), py::arg("geometry"),
          py::arg("config"), py::arg("model"), py::arg("scaler"));

    py::class_<SampleRecord>(m, "SampleRecord")
        .def(py::init<>())
        .def_readwrite("z", &SampleRecord::z)
        .def_readwrite("T_b", &SampleRecord::T_b)
        .def_readwrite("h_b", &SampleRecord::h_b)
        .def_readwrite("p_b", &SampleRecord::p_b)
        .def_readwrite("v_b", &SampleRecord::v_b)
        .def_readwrite("G", &SampleRecord::G)
        .def_readwrite("q", &SampleRecord::q)
        .def_readwrite("r", &SampleRecord::r)
        .def_readwrite("A", &SampleRecord::A)
        .def_readwrite("AR", &SampleRecord::AR)
        .def_readwrite("d", &SampleRecord::d)
        .def_readwrite("T_w", &SampleRecord::T_w);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<std::string, bool>(), py::arg("provenance") = "external",
             py::arg("has_labels") = true)
        .def("append", &Dataset::append)
        .def("__len__", &Dataset::size)
        .def("column", &Dataset::column, py::return_value_policy::reference_internal)
        .def("record", &Dataset::record)
        .def_property_readonly("has_labels", &Dataset::has_labels)
        .def_property_readonly("provenance", &Dataset::provenance)
        .def("checksum", &Dataset::checksum);

    m.def("load_dataset", &load_dataset, py::arg("path"));
    m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));
    m.def("split", &split, py::arg("dataset"), py::arg("train_fraction"), py::arg("seed"));
    m.def(
        "correlation_matrix",
        [](const Dataset& ds, const std::vector<std::string>& columns) {
            return matrix_to_rows(correlation_matrix(ds, columns));
        },
        py::arg("dataset"), py::arg("columns"));

    py::class_<ColumnStats>(m, "ColumnStats")
        .def_readonly("name", &ColumnStats::name)
        .def_readonly("mean", &ColumnStats::mean)
        .def_readonly("stddev", &ColumnStats::stddev)
        .def_readonly("percentiles", &ColumnStats::percentiles);
    m.def("stats_summary", &stats_summary, py::arg("dataset"));

    m.def(
        "kde_importance_weights",
        [](const std::vector<std::vector<double>>& train_rows,
           const std::vector<std::vector<double>>& target_rows, std::optional<double> bandwidth) {
            return kde_importance_weights(matrix_from_rows(train_rows),
                                          matrix_from_rows(target_rows), bandwidth);
        },
        py::arg("train_features"), py::arg("target_features"),
        py::arg("bandwidth") = std::nullopt);

    py::class_<FeatureSpec>(m, "FeatureSpec")
        .def(py::init([](std::vector<std::string> names) { return FeatureSpec{std::move(names)}; }),
             py::arg("names"))
        .def_static("canonical", &FeatureSpec::canonical)
        .def_readonly("names", &FeatureSpec::names);

    py::class_<HyperParams>(m, "HyperParams")
        .def(py::init<>())
        .def_readwrite("n_hidden_layers", &HyperParams::n_hidden_layers)
        .def_readwrite("neurons_per_layer", &HyperParams::neurons_per_layer)
        .def_readwrite("alpha_l2", &HyperParams::alpha_l2)
        .def_readwrite("minibatch_size", &HyperParams::minibatch_size)
        .def_readwrite("epochs", &HyperParams::epochs)
        .def_readwrite("learning_rate", &HyperParams::learning_rate)
        .def_readwrite("rng_seed", &HyperParams::rng_seed);

    py::class_<TrainReport>(m, "TrainReport")
        .def_readonly("train_cost", &TrainReport::train_cost)
        .def_readonly("val_mae", &TrainReport::val_mae)
        .def_readonly("val_mae_std", &TrainReport::val_mae_std)
        .def_readonly("epoch_ms", &TrainReport::epoch_ms)
        .def_readonly("weights_checksum", &TrainReport::weights_checksum)
        .def_readonly("diverged", &TrainReport::diverged);

    py::class_<Mlp>(m, "Mlp")
        .def_property_readonly("layer_dims", [](const Mlp& mlp) { return mlp.layer_dims; })
        .def("checksum", &Mlp::checksum);
    py::class_<ScalerParams>(m, "ScalerParams")
        .def_readonly("mean", &ScalerParams::mean)
        .def_readonly("std", &ScalerParams::std)
        .def_readonly("feature_names", &ScalerParams::feature_names);
    m.def("forward", [](const Mlp& model, const std::vector<double>& x) {
        return forward(model, x);
    });

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("scaler", &TrainResult::scaler)
        .def_readonly("report", &TrainResult::report);

    m.def(
        "fit_model",
        [](const Dataset& train_ds, const Dataset& val_ds, const FeatureSpec& spec,
           const HyperParams& hp, const std::vector<double>& sample_weights) {
            return fit_model(train_ds, val_ds, spec, hp, sample_weights);
        },
        py::arg("train_ds"), py::arg("val_ds"), py::arg("features"), py::arg("hyperparams"),
        py::arg("sample_weights") = std::vector<double>{});
    m.def("save_model", &save_model, py::arg("model"), py::arg("scaler"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));

    py::class_<EvalMetrics>(m, "EvalMetrics")
        .def_readonly("mae", &EvalMetrics::mae)
        .def_readonly("std_abs_err", &EvalMetrics::std_abs_err)
        .def_readonly("mape", &EvalMetrics::mape)
        .def_readonly("n", &EvalMetrics::n);
    m.def("evaluate", &evaluate, py::arg("model"), py::arg("scaler"), py::arg("dataset"));
    m.def("predict", &predict, py::arg("model"), py::arg("scaler"), py::arg("dataset"));

    py::class_<HeatmapGrid>(m, "HeatmapGrid")
        .def_readonly("x", &HeatmapGrid::x)
        .def_readonly("y", &HeatmapGrid::y)
        .def_readonly("values", &HeatmapGrid::values);
    m.def("heatmap_grid", &heatmap_grid, py::arg("model"), py::arg("scaler"), py::arg("x_feature"),
          py::arg("y_feature"), py::arg("x_range"), py::arg("y_range"), py::arg("resolution"),
          py::arg("fixed"));

    py::class_<ParamRange>(m, "ParamRange")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &ParamRange::lo)
        .def_readwrite("hi", &ParamRange::hi);

    py::class_<GeneratorConfig>(m, "GeneratorConfig")
        .def(py::init<>())
        .def_readwrite("n_channels", &GeneratorConfig::n_channels)
        .def_readwrite("p_out_bar", &GeneratorConfig::p_out_bar)
        .def_readwrite("t_in_k", &GeneratorConfig::t_in_k)
        .def_readwrite("roughness_um", &GeneratorConfig::roughness_um)
        .def_readwrite("area_mm2", &GeneratorConfig::area_mm2)
        .def_readwrite("aspect_ratio", &GeneratorConfig::aspect_ratio)
        .def_readwrite("wall_thickness_mm", &GeneratorConfig::wall_thickness_mm)
        .def_readwrite("heat_flux_w_m2", &GeneratorConfig::heat_flux_w_m2)
        .def_readwrite("mass_flux", &GeneratorConfig::mass_flux)
        .def_readwrite("near_critical_fraction", &GeneratorConfig::near_critical_fraction)
        .def_readwrite("rng_seed", &GeneratorConfig::rng_seed)
        .def_readwrite("dz_mm", &GeneratorConfig::dz_mm)
        .def_readwrite("label_noise_std_k", &GeneratorConfig::label_noise_std_k)
        .def_readwrite("channel_length_mm", &GeneratorConfig::channel_length_mm);

    py::class_<GenerateOutcome>(m, "GenerateOutcome")
        .def_readonly("dataset", &GenerateOutcome::dataset)
        .def_readonly("channels_generated", &GenerateOutcome::channels_generated)
        .def_readonly("channels_skipped", &GenerateOutcome::channels_skipped)
        .def_readonly("skip_messages", &GenerateOutcome::skip_messages);
    m.def("generate", &generate, py::arg("table"), py::arg("config"));

    m.attr("__version__") = "0.1.0";
}
