#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cli.hpp"
#include "skinbench/skinbench.hpp"

namespace py = pybind11;
using namespace skinbench;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image to_image(const U8Array& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw DimensionMismatch("expected an HxWx3 uint8 array");
    const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
    Image img(w, h);
    const auto* p = a.data();
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = {p[3 * i], p[3 * i + 1], p[3 * i + 2]};
    return img;
}

py::array_t<std::uint8_t> from_image(const Image& img) {
    py::array_t<std::uint8_t> a({img.height(), img.width(), 3});
    auto* p = a.mutable_data();
    for (std::size_t i = 0; i < img.size(); ++i) {
        p[3 * i] = img[i].r;
        p[3 * i + 1] = img[i].g;
        p[3 * i + 2] = img[i].b;
    }
    return a;
}

// masks travel as HxW uint8 arrays: 0 non-skin, 1 skin, 2 don't care
LabelMask to_mask(const U8Array& a) {
    if (a.ndim() != 2) throw DimensionMismatch("expected an HxW uint8 mask");
    LabelMask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    const auto* p = a.data();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (p[i] > 2) throw std::invalid_argument("mask values must be 0, 1 or 2");
        m[i] = static_cast<Label>(p[i]);
    }
    return m;
}

py::array_t<std::uint8_t> from_mask(const LabelMask& m) {
    py::array_t<std::uint8_t> a({m.height(), m.width()});
    auto* p = a.mutable_data();
    for (std::size_t i = 0; i < m.size(); ++i) p[i] = static_cast<std::uint8_t>(m[i]);
    return a;
}

template <class G>
py::array_t<double> from_grid(const G& g) {
    py::array_t<double> a({g.height(), g.width()});
    std::copy(g.values().begin(), g.values().end(), a.mutable_data());
    return a;
}

ProbabilityMap to_map(const F64Array& a) {
    if (a.ndim() != 2) throw DimensionMismatch("expected an HxW float array");
    return ProbabilityMap(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                          std::vector<double>(a.data(), a.data() + a.size()));
}

Method to_method(const std::string& name) {
    const auto m = parse_method(name);
    if (!m) throw UsageError("unknown method '" + name + "'");
    return *m;
}

DetectorSettings settings(const std::string& method, std::optional<double> tau, const std::string& base) {
    auto s = DetectorSettings::with_defaults(to_method(method));
    if (tau) s.tau = *tau;
    s.base = to_method(base);
    return s;
}

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["precision"] = m.precision;
    d["recall"] = m.recall;
    d["f1"] = m.f1;
    d["tpr"] = m.tpr;
    d["fpr"] = m.fpr;
    d["degenerate"] = m.degenerate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_skinbench, m) {
    m.doc() = "Skin detection and benchmarking";

    static py::exception<Error> base_error(m, "SkinbenchError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(base_error, e.what());
        }
    });

    m.def("methods", [] {
        std::vector<std::string> out;
        for (auto x : all_methods()) out.emplace_back(method_name(x));
        return out;
    });
    m.def("default_tau", [](const std::string& name) { return default_tau(to_method(name)); });

    m.def("load_image", [](const std::filesystem::path& p) { return from_image(load_image(p)); });
    m.def("save_image", [](const U8Array& a, const std::filesystem::path& p) { save_image(to_image(a), p); });
    m.def("load_mask", [](const std::filesystem::path& p) { return from_mask(load_mask(p)); });
    m.def("save_mask", [](const U8Array& a, const std::filesystem::path& p) { save_mask(to_mask(a), p); });
    m.def("load_probability_map", [](const std::filesystem::path& p) { return from_grid(load_probability_map(p)); });

    py::class_<ModelSet>(m, "ModelSet")
        .def(py::init<>())
        .def("add_file", &ModelSet::add_file, py::arg("path"))
        .def("missing", [](const ModelSet& ms, const std::string& method, const std::string& base) {
            return missing_models(settings(method, std::nullopt, base), ms);
        }, py::arg("method"), py::arg("base") = "bayes");

    m.def("train_histogram",
          [](const std::filesystem::path& manifest, const std::filesystem::path& out, int bins, int workers) {
              const auto h = train_histogram(DatasetManifest::load(manifest), bins, workers);
              save_model_file(h, out);
              return py::make_tuple(h.skin_total(), h.nonskin_total());
          },
          py::arg("manifest"), py::arg("output"), py::arg("bins") = HistogramModel::default_bins,
          py::arg("workers") = 1, "Trains a colour histogram and writes it; returns (skin, nonskin) pixel counts.");

    m.def("chen_detect", [](const U8Array& img) { return from_mask(chen_detect(to_image(img))); });
    m.def("detect",
          [](const U8Array& img, const std::string& method, const ModelSet& models, std::optional<double> tau,
             const std::string& base) { return from_mask(detect(settings(method, tau, base), to_image(img), models)); },
          py::arg("image"), py::arg("method"), py::arg("models") = ModelSet{}, py::arg("tau") = py::none(),
          py::arg("base") = "bayes");
    m.def("probability_map",
          [](const U8Array& img, const std::string& method, const ModelSet& models, const std::string& base) {
              return from_grid(probability_map(settings(method, std::nullopt, base), to_image(img), models));
          },
          py::arg("image"), py::arg("method"), py::arg("models") = ModelSet{}, py::arg("base") = "bayes");

    m.def("vote",
          [](const std::vector<U8Array>& masks, const std::vector<double>& weights, double wtau) {
              std::vector<LabelMask> ms;
              for (const auto& a : masks) ms.push_back(to_mask(a));
              return from_mask(vote(ms, weights, wtau));
          },
          py::arg("masks"), py::arg("weights"), py::arg("wtau"));

    m.def("propagate",
          [](const F64Array& map, const U8Array& seeds) {
              const ProbabilityMap pm = to_map(map);
              if (seeds.ndim() != 2) throw DimensionMismatch("expected an HxW seed array");
              SeedMask s(static_cast<int>(seeds.shape(1)), static_cast<int>(seeds.shape(0)));
              if (!s.same_shape(pm)) throw DimensionMismatch("seed mask and map sizes differ");
              std::copy(seeds.data(), seeds.data() + seeds.size(), s.values().begin());
              return from_grid(propagate(pm, s));
          },
          py::arg("map"), py::arg("seeds"), "Geodesic path cost from the nearest seed (inf when unreachable).");

    m.def("confusion", [](const U8Array& pred, const U8Array& truth) {
        const auto c = confusion(to_mask(pred), to_mask(truth));
        py::dict d;
        d["tp"] = c.tp;
        d["fp"] = c.fp;
        d["fn"] = c.fn;
        d["tn"] = c.tn;
        return d;
    });
    m.def("evaluate",
          [](const std::vector<U8Array>& preds, const std::vector<U8Array>& truths) {
              if (preds.size() != truths.size()) throw DimensionMismatch("one ground-truth mask per prediction");
              std::vector<ConfusionCounts> counts;
              for (std::size_t i = 0; i < preds.size(); ++i) counts.push_back(confusion(to_mask(preds[i]), to_mask(truths[i])));
              return metrics_dict(aggregate_pixel_level(counts));
          },
          py::arg("predictions"), py::arg("truths"), "Pixel-level metrics over all pairs.");
    m.def("average_precision",
          [](const std::vector<bool>& face, const std::vector<double>& fraction) {
              if (face.size() != fraction.size()) throw std::invalid_argument("face and fraction lengths differ");
              std::vector<ApSample> s;
              for (std::size_t i = 0; i < face.size(); ++i) s.push_back({face[i], fraction[i]});
              return average_precision(s);
          },
          py::arg("face"), py::arg("fraction"));
    m.def("rank_table",
          [](const std::vector<std::vector<double>>& scores, bool higher_is_better) {
              const auto t = rank_table(scores, higher_is_better);
              py::dict d;
              d["dataset_ranks"] = t.dataset_ranks;
              d["average_rank"] = t.average_rank;
              d["final_rank"] = t.final_rank;
              return d;
          },
          py::arg("scores"), py::arg("higher_is_better") = true);

    m.def("run_cli",
          [](std::vector<std::string> args) {
              args.insert(args.begin(), "skinbench");
              std::ostringstream out, err;
              const int code = cli::run(args, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Runs a command-line invocation; returns (exit_code, stdout, stderr).");
}
