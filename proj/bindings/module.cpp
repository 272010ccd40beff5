// Python bindings for the core operations: domain types, power-of-two
// shift-add arithmetic, the analytical cost oracle, polynomial surrogates,
// Pareto extraction, and the architecture search space.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qadse/coexplore.hpp"
#include "qadse/explorer.hpp"
#include "qadse/manifest.hpp"
#include "qadse/model.hpp"
#include "qadse/oracle.hpp"
#include "qadse/quant.hpp"
#include "qadse/space.hpp"
#include "qadse/surrogate.hpp"

namespace py = pybind11;
using namespace qadse;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantization-aware DNN accelerator design-space exploration";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ArithmeticError>(m, "ArithmeticOverflow", PyExc_OverflowError);

    py::enum_<PeType>(m, "PeType")
        .value("FP32", PeType::FP32)
        .value("INT16", PeType::INT16)
        .value("LightPE2", PeType::LightPE2)
        .value("LightPE1", PeType::LightPE1);

    py::class_<LayerShape>(m, "LayerShape")
        .def(py::init([](int a, int c, int f, int k, int s, int p, int rs, int ds) {
                 LayerShape l{a, c, f, k, s, p, rs, ds};
                 l.validate();
                 return l;
             }),
             py::arg("a"), py::arg("c"), py::arg("f"), py::arg("k"), py::arg("s") = 1,
             py::arg("p") = 0, py::arg("rs") = 0, py::arg("ds") = 0)
        .def_readonly("a", &LayerShape::a)
        .def_readonly("c", &LayerShape::c)
        .def_readonly("f", &LayerShape::f)
        .def_readonly("k", &LayerShape::k)
        .def_readonly("s", &LayerShape::s)
        .def_readonly("p", &LayerShape::p)
        .def_readonly("rs", &LayerShape::rs)
        .def_readonly("ds", &LayerShape::ds);

    py::class_<NetworkConfig>(m, "NetworkConfig")
        .def(py::init([](std::string name, std::vector<LayerShape> layers) {
                 NetworkConfig net{std::move(name), std::move(layers)};
                 net.validate();
                 return net;
             }),
             py::arg("name"), py::arg("layers"))
        .def_readonly("name", &NetworkConfig::name)
        .def_readonly("layers", &NetworkConfig::layers);

    py::class_<AcceleratorConfig>(m, "AcceleratorConfig")
        .def(py::init([](PeType pe, int rows, int cols, std::int64_t sp_if,
                         std::int64_t sp_fw, std::int64_t sp_ps, std::int64_t glb,
                         std::int64_t bw) {
                 AcceleratorConfig cfg{pe, rows, cols, sp_if, sp_fw, sp_ps, glb, bw};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("pe_type"), py::arg("pe_rows"), py::arg("pe_cols"),
             py::arg("sp_if"), py::arg("sp_fw"), py::arg("sp_ps"), py::arg("glb"),
             py::arg("bw"))
        .def_readonly("pe_type", &AcceleratorConfig::pe_type)
        .def_readonly("pe_rows", &AcceleratorConfig::pe_rows)
        .def_readonly("pe_cols", &AcceleratorConfig::pe_cols)
        .def_property_readonly("num_pe", &AcceleratorConfig::num_pe);

    m.def("output_dim", &output_dim, py::arg("layer"));
    m.def("load_network", &load_network, py::arg("text"));
    m.def("parse_accelerator_config", &parse_accelerator_config, py::arg("text"));

    // quantization
    py::class_<Pow2Weight>(m, "Pow2Weight")
        .def(py::init([](int sign, std::vector<int> m_, int k) {
                 Pow2Weight pw;
                 pw.sign = sign;
                 pw.k = k;
                 if (!m_.empty()) pw.m[0] = m_[0];
                 if (m_.size() > 1) pw.m[1] = m_[1];
                 pw.validate();
                 return pw;
             }),
             py::arg("sign"), py::arg("m"), py::arg("k"))
        .def_readonly("sign", &Pow2Weight::sign)
        .def_readonly("k", &Pow2Weight::k)
        .def_property_readonly(
            "m", [](const Pow2Weight& pw) {
                return std::vector<int>(pw.m.begin(), pw.m.begin() + pw.k);
            })
        .def("__eq__", [](const Pow2Weight& a, const Pow2Weight& b) { return a == b; });

    m.def("encode_weight_pow2", &encode_weight_pow2, py::arg("w"), py::arg("k"));
    m.def("decode_weight", &decode_weight, py::arg("pw"));
    m.def("pack_code", &pack_code, py::arg("pw"), py::arg("pe"));
    m.def("unpack_code", &unpack_code, py::arg("code"), py::arg("pe"));
    m.def("shift_add_mac", &shift_add_mac, py::arg("x"), py::arg("pw"),
          py::arg("acc") = 0);
    m.def("reference_mac", &reference_mac, py::arg("x"), py::arg("w"), py::arg("acc"),
          py::arg("pe"));
    m.def(
        "quantize_tensor",
        [](const std::vector<double>& w, PeType pe) {
            const QuantizedTensor q = quantize_tensor(w, pe);
            py::dict out;
            out["values"] = q.values;
            out["mean_abs_err"] = q.stats.mean_abs_err;
            out["max_abs_err"] = q.stats.max_abs_err;
            out["count"] = q.stats.count;
            return out;
        },
        py::arg("weights"), py::arg("pe"));

    // oracle
    py::class_<OracleParams>(m, "OracleParams")
        .def_static("defaults", &OracleParams::defaults)
        .def_static("from_json", &load_oracle_params, py::arg("text"))
        .def("clock_hz",
             [](const OracleParams& p, PeType pe) { return p.of(pe).clock_hz; });

    m.def("layer_macs", &layer_macs, py::arg("layer"));
    m.def("layer_cycles", &layer_cycles, py::arg("config"), py::arg("layer"),
          py::arg("params"));
    m.def("network_latency_s", &network_latency_s, py::arg("config"), py::arg("net"),
          py::arg("params"));
    m.def("oracle_power_mw", &oracle_power_mw, py::arg("config"), py::arg("params"));
    m.def("oracle_area_mm2", &oracle_area_mm2, py::arg("config"), py::arg("params"));

    // surrogate
    py::class_<PolySurrogate>(m, "PolySurrogate")
        .def("predict",
             [](const PolySurrogate& model, const std::vector<double>& x) {
                 return model.predict(x);
             })
        .def_property_readonly("terms",
                               [](const PolySurrogate& m_) { return m_.basis.size(); })
        .def_property_readonly("rank_deficient",
                               [](const PolySurrogate& m_) { return m_.rank_deficient; })
        .def_static("from_json", &load_surrogate, py::arg("text"))
        .def("to_json", [](const PolySurrogate& m_) { return serialize(m_); });

    m.def("basis_size", [](int d, int K) { return build_basis(d, K).size(); },
          py::arg("d"), py::arg("K"));
    m.def(
        "fit_polynomial",
        [](const std::vector<std::vector<double>>& X, const std::vector<double>& y,
           int K) {
            if (X.empty()) throw ValidationError("empty feature matrix");
            return fit(X, y, build_basis(static_cast<int>(X[0].size()), K));
        },
        py::arg("X"), py::arg("y"), py::arg("K"));
    m.def("mape",
          [](const std::vector<double>& p, const std::vector<double>& t) {
              return mape(p, t);
          });
    m.def("rmspe",
          [](const std::vector<double>& p, const std::vector<double>& t) {
              return rmspe(p, t);
          });
    m.def(
        "select_degree",
        [](const std::vector<std::vector<double>>& X, const std::vector<double>& y,
           const std::vector<int>& k_range, int folds, std::uint64_t seed) {
            const auto [k, report] = select_degree(X, y, k_range, folds, seed);
            py::dict out;
            out["chosen_K"] = k;
            out["heldout_mape"] = report.heldout_mape;
            out["heldout_rmspe"] = report.heldout_rmspe;
            return out;
        },
        py::arg("X"), py::arg("y"), py::arg("k_range"), py::arg("folds") = 5,
        py::arg("seed") = 0);

    // explorer
    m.def(
        "pareto_front",
        [](const std::vector<std::vector<double>>& points,
           const std::vector<bool>& maximize) {
            return pareto_front_indices(points, maximize);
        },
        py::arg("points"), py::arg("maximize"));
    m.def(
        "evaluate_oracle",
        [](const AcceleratorConfig& cfg, const NetworkConfig& net,
           const OracleParams& params) {
            const DesignPoint p =
                evaluate_point(cfg, 0, net, CostSource::from_oracle(params));
            py::dict out;
            out["power_mw"] = p.power_mw;
            out["latency_s"] = p.latency_s;
            out["area_mm2"] = p.area_mm2;
            out["energy_mj"] = p.energy_mj;
            out["perf_per_area"] = p.perf_per_area;
            return out;
        },
        py::arg("config"), py::arg("net"), py::arg("params"));

    // architecture search space
    py::class_<ArchChoice>(m, "ArchChoice")
        .def_readonly("index", &ArchChoice::index)
        .def_readonly("reps", &ArchChoice::reps)
        .def_readonly("channels", &ArchChoice::channels);

    m.def("arch_space_size", [] { return ArchSpace::default_space().size(); });
    m.def(
        "sample_archs",
        [](std::uint64_t n, std::uint64_t seed) {
            return sample_archs(ArchSpace::default_space(), n, seed);
        },
        py::arg("n"), py::arg("seed"));
    m.def(
        "arch_from_index",
        [](std::uint64_t index) {
            return arch_from_index(ArchSpace::default_space(), index);
        },
        py::arg("index"));
    m.def(
        "expand_arch",
        [](const ArchChoice& choice, int input_a) { return expand(choice, input_a); },
        py::arg("choice"), py::arg("input_a") = 32);
}
