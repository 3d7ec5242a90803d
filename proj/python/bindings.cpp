#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/eigen.h>

#include <optional>

#include "slads/engine.hpp"
#include "slads/error.hpp"
#include "slads/features.hpp"
#include "slads/linear.hpp"
#include "slads/metrics.hpp"
#include "slads/pgm.hpp"
#include "slads/rng.hpp"
#include "slads/recon.hpp"
#include "slads/synth.hpp"
#include "slads/training.hpp"

namespace py = pybind11;
using namespace slads;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Dims dims_of(const Array& a) {
    if (a.ndim() != 2) throw DimensionError("expected a 2-D array");
    return Dims{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0))};
}

std::vector<double> values_of(const Array& a) { return std::vector<double>(a.data(), a.data() + a.size()); }

GroundTruthImage truth_of(const Array& a) { return GroundTruthImage(dims_of(a), values_of(a)); }

ImageGrid grid_of(const Array& a) { return ImageGrid(dims_of(a), values_of(a)); }

Array to_array(const ImageGrid& g) {
    Array out({g.height(), g.width()});
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

py::array_t<std::uint8_t> to_mask(const std::vector<std::uint8_t>& mask, Dims d) {
    py::array_t<std::uint8_t> out({d.height, d.width});
    std::copy(mask.begin(), mask.end(), out.mutable_data());
    return out;
}

IdwParams idw_params(int neighbors, double power, int window) {
    IdwParams p;
    p.neighbors = neighbors;
    p.power = power;
    p.window = window;
    p.validate();
    return p;
}

py::dict run_to_dict(const SamplingRun& run) {
    py::list history;
    for (const auto& h : run.history)
        history.append(py::make_tuple(h.step, h.location.row, h.location.col, h.value, h.predicted_erd));
    py::list checkpoints;
    for (const auto& cp : run.checkpoints) {
        py::dict d;
        d["density"] = cp.density;
        d["measured"] = cp.measured;
        d["psnr"] = cp.psnr ? py::cast(*cp.psnr) : py::none();
        d["distortion"] = cp.distortion ? py::cast(*cp.distortion) : py::none();
        d["recon"] = to_array(cp.recon);
        d["mask"] = to_mask(cp.mask, run.dims);
        checkpoints.append(d);
    }
    py::dict out;
    out["method"] = run.method;
    out["history"] = history;
    out["checkpoints"] = checkpoints;
    out["wall_time_s"] = run.wall_time_s;
    out["history_csv"] = run.history_csv();
    return out;
}

}  // namespace

PYBIND11_MODULE(_slads, m) {
    m.doc() = "Learned dynamic sparse sampling";

    // Translators registered later are tried first.
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ContractError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const NumericError& e) {
            PyErr_SetString(PyExc_ArithmeticError, e.what());
        }
    });
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

    m.def("load_image", [](const std::string& path) { return to_array(load_image(path)); }, py::arg("path"),
          "Read an 8-bit binary PGM as a float64 array");
    m.def("save_image", [](const std::string& path, const Array& a) { write_pgm(path, grid_of(a)); },
          py::arg("path"), py::arg("image"));
    m.def("distortion", [](const Array& a, const Array& b) { return distortion(grid_of(a), grid_of(b)); });
    m.def("psnr", [](const Array& a, const Array& b) { return psnr(grid_of(a), grid_of(b)); });
    m.def("synth", [](const std::string& family, int size, std::uint64_t seed) {
        return to_array(synth::generate(family, Dims{size, size}, seed));
    }, py::arg("family"), py::arg("size") = 64, py::arg("seed") = 0);

    py::class_<IdwParams>(m, "IdwParams")
        .def(py::init(&idw_params), py::arg("neighbors") = 10, py::arg("power") = 2.0, py::arg("window") = 15)
        .def_readwrite("neighbors", &IdwParams::neighbors)
        .def_readwrite("power", &IdwParams::power)
        .def_readwrite("window", &IdwParams::window);

    py::class_<MeasurementSet>(m, "MeasurementSet")
        .def(py::init([](int height, int width) { return MeasurementSet(Dims{width, height}); }),
             py::arg("height"), py::arg("width"))
        .def("add", [](MeasurementSet& s, int row, int col, double v) { s.add_measurement({row, col}, v); },
             py::arg("row"), py::arg("col"), py::arg("value"))
        .def("is_measured", [](const MeasurementSet& s, int row, int col) {
            if (!s.dims().contains(row, col)) throw ContractError("location out of bounds");
            return s.is_measured(PixelLocation{row, col});
        })
        .def("mask", [](const MeasurementSet& s) { return to_mask(mask_pixels(s), s.dims()); })
        .def_property_readonly("density", &MeasurementSet::density)
        .def("__len__", &MeasurementSet::size);

    m.def("reconstruct", [](const MeasurementSet& s, const IdwParams& p) { return to_array(reconstruct(s, p)); },
          py::arg("measurements"), py::arg("idw") = IdwParams{});
    m.def("extract_features", [](const Array& recon, const MeasurementSet& s, int row, int col, const IdwParams& p) {
        const Reconstruction r(dims_of(recon), values_of(recon));
        const auto f = extract_features(r, s, PixelLocation{row, col}, p);
        return std::vector<double>(f.values.begin(), f.values.end());
    }, py::arg("recon"), py::arg("measurements"), py::arg("row"), py::arg("col"), py::arg("idw") = IdwParams{});
    m.def("fit_linear", [](const Eigen::MatrixXd& V, const Eigen::VectorXd& R) {
        return fit_linear(V, R).model.theta;
    });

    py::class_<ErdModel>(m, "ErdModel")
        .def_property_readonly("kind", [](const ErdModel& e) { return to_string(e.kind); })
        .def_property_readonly("metadata", [](const ErdModel& e) { return e.metadata.dump(); })
        .def("predict", [](const ErdModel& e, const std::vector<double>& f) { return predict(e, f); })
        .def("save", [](const ErdModel& e, const std::string& path) { save_model(e, path); })
        .def("to_bytes", [](const ErdModel& e) {
            const auto b = serialize_model(e);
            return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
        });
    m.def("load_model", [](const std::string& path) { return load_model(path); });

    m.def("training_database", [](const std::vector<Array>& images, std::vector<double> densities,
                                  std::size_t samples_per_level, std::uint64_t seed, const IdwParams& idw) {
        std::vector<GroundTruthImage> truth;
        for (const auto& a : images) truth.push_back(truth_of(a));
        TrainingSchedule schedule;
        schedule.densities = std::move(densities);
        schedule.samples_per_level = samples_per_level;
        schedule.rd_window = idw.window;
        schedule.seed = seed;
        schedule.validate();
        const TrainingDatabase db = generate_training_db(truth, schedule, idw);
        return py::make_tuple(db.feature_matrix(), db.targets());
    }, py::arg("images"), py::arg("densities") = std::vector<double>{0.01, 0.05, 0.10, 0.20, 0.30, 0.40},
       py::arg("samples_per_level") = 500, py::arg("seed") = 0, py::arg("idw") = IdwParams{});

    m.def("train", [](const std::vector<Array>& images, const std::string& regressor, std::vector<double> densities,
                      std::size_t samples_per_level, std::uint64_t seed, int epochs, const std::string& activation,
                      const IdwParams& idw) {
        std::vector<GroundTruthImage> truth;
        for (const auto& a : images) truth.push_back(truth_of(a));
        TrainingSchedule schedule;
        schedule.densities = std::move(densities);
        schedule.samples_per_level = samples_per_level;
        schedule.rd_window = idw.window;
        schedule.seed = seed;
        schedule.validate();
        RegressorOptions options;
        options.mlp.epochs = epochs;
        options.mlp.activation = activation_from_string(activation);
        options.mlp.seed = derive_seed(seed, 0x4d4c50);
        options.svr.seed = derive_seed(seed, 0x535652);
        const RegressorKind kind = regressor_from_string(regressor);
        py::gil_scoped_release release;
        const TrainingDatabase db = generate_training_db(truth, schedule, idw);
        return fit_erd_model(db, kind, options, idw).model;
    }, py::arg("images"), py::arg("regressor") = "nn",
       py::arg("densities") = std::vector<double>{0.01, 0.05, 0.10, 0.20, 0.30, 0.40},
       py::arg("samples_per_level") = 500, py::arg("seed") = 0, py::arg("epochs") = 500,
       py::arg("activation") = "relu", py::arg("idw") = IdwParams{});

    m.def("run_sampling", [](const Array& image, std::optional<ErdModel> model, double initial, double budget,
                             std::vector<double> checkpoints, std::uint64_t seed, double noise_sigma) {
        const GroundTruthImage truth = truth_of(image);
        RunConfig config;
        config.initial_density = initial;
        config.budget_density = budget;
        config.checkpoint_densities = std::move(checkpoints);
        config.seed = seed;
        config.validate();
        SamplingRun run;
        {
            py::gil_scoped_release release;
            SimulatedSource source(truth, noise_sigma, derive_seed(seed, 0x534f5552));
            run = model ? run_sampling(source, *model, config, &truth) : run_random_baseline(source, config, &truth);
        }
        return run_to_dict(run);
    }, py::arg("image"), py::arg("model") = std::nullopt, py::arg("initial") = 0.01, py::arg("budget") = 0.40,
       py::arg("checkpoints") = std::vector<double>{0.10, 0.20, 0.30, 0.40}, py::arg("seed") = 0,
       py::arg("noise_sigma") = 0.0);
}
