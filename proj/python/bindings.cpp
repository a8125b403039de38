#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "btensor/classify.hpp"
#include "btensor/decompose.hpp"
#include "btensor/error.hpp"
#include "btensor/io.hpp"
#include "btensor/oracle.hpp"
#include "btensor/tensor.hpp"

namespace py = pybind11;
using namespace btensor;

namespace {

// Reports travel as plain dicts with the same layout the CLI prints.
py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

Tensor tensor_from_list(int order, int dim, const std::vector<std::pair<std::vector<int>, double>>& entries) {
    std::vector<std::pair<MultiIndex, double>> list;
    list.reserve(entries.size());
    for (const auto& [idx, val] : entries) list.emplace_back(MultiIndex(idx), val);
    return make_tensor(order, dim, list);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "B-tensor classification, decomposition and positive definiteness certificates";

    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    py::class_<Tensor>(m, "Tensor")
        .def(py::init<int, int, std::vector<double>>(), py::arg("order"), py::arg("dim"),
             py::arg("entries"))
        .def_property_readonly("order", &Tensor::order)
        .def_property_readonly("dim", &Tensor::dim)
        .def_property_readonly("entries", [](const Tensor& t) {
            return std::vector<double>(t.entries().begin(), t.entries().end());
        })
        .def("at", [](const Tensor& t, std::vector<int> idx) { return t.at(MultiIndex(std::move(idx))); })
        .def("__eq__", [](const Tensor& a, const Tensor& b) { return a == b; })
        .def("__repr__", [](const Tensor& t) {
            return "<btensor.Tensor order=" + std::to_string(t.order()) +
                   " dim=" + std::to_string(t.dim()) + ">";
        });

    m.def("make_tensor", &tensor_from_list, py::arg("order"), py::arg("dim"), py::arg("entries"),
          "Tensor from a list of (1-based index, value) pairs");
    m.def("unit_tensor", &unit_tensor, py::arg("order"), py::arg("dim"));
    m.def("partially_all_one", [](int order, int dim, std::vector<int> members) {
        return partially_all_one(order, dim, IndexSubset(std::move(members), dim));
    }, py::arg("order"), py::arg("dim"), py::arg("members"));
    m.def("is_symmetric", &is_symmetric);
    m.def("symmetrize", &symmetrize);
    m.def("form_value", [](const Tensor& t, std::vector<double> x) { return form_value(t, x); });
    m.def("apply", [](const Tensor& t, std::vector<double> x) { return btensor::apply(t, x); });
    m.def("linear_combine", &linear_combine, py::arg("t"), py::arg("u"), py::arg("c"));

    m.def("classify", [](const Tensor& t, double margin, bool b0_diagonal) {
        return to_python(to_json(classify_all(t, {margin, b0_diagonal})));
    }, py::arg("t"), py::arg("margin") = 0.0, py::arg("b0_diagonal") = false);

    m.def("decompose", [](const Tensor& t, const std::string& mode) {
        const auto parsed = mode_from_name(mode);
        if (!parsed) throw InvalidArgument("mode must be \"quasi\" or \"double\"");
        return to_python(to_json(decompose(t, {*parsed, true})));
    }, py::arg("t"), py::arg("mode") = "quasi");

    m.def("certify", [](const Tensor& t, bool oracle, std::uint64_t seed, int starts, double margin) {
        CertifyOptions options;
        options.use_oracle = oracle;
        options.oracle.seed = seed;
        options.oracle.starts = starts;
        options.margin = margin;
        return to_python(to_json(pd_certify(t, options)));
    }, py::arg("t"), py::arg("oracle") = false, py::arg("seed") = 0, py::arg("starts") = 0,
       py::arg("margin") = 0.0);

    m.def("sphere_minimize", [](const Tensor& t, std::uint64_t seed, int starts) {
        OracleOptions options;
        options.seed = seed;
        options.starts = starts;
        return to_python(to_json(sphere_minimize(t, options)));
    }, py::arg("t"), py::arg("seed") = 0, py::arg("starts") = 0);

    m.def("lambda_min_estimate", [](const Tensor& t, std::uint64_t seed, int starts) {
        OracleOptions options;
        options.seed = seed;
        options.starts = starts;
        return lambda_min_estimate(t, options);
    }, py::arg("t"), py::arg("seed") = 0, py::arg("starts") = 0);

    m.def("conjecture_search", [](int order, int dim, std::int64_t trials, std::uint64_t seed, double tol) {
        SearchOptions options;
        options.order = order;
        options.dim = dim;
        options.trials = trials;
        options.seed = seed;
        options.tolerance = tol;
        return to_python(to_json(conjecture_search(options)));
    }, py::arg("order"), py::arg("dim"), py::arg("trials"), py::arg("seed") = 0,
       py::arg("tol") = 1e-6);

    m.def("load_tensor", [](const std::string& path) { return load_tensor(path); });
    m.def("save_tensor", [](const std::string& path, const Tensor& t, const std::string& name) {
        save_tensor(path, t, name);
    }, py::arg("path"), py::arg("t"), py::arg("name") = "");

    m.attr("__version__") = std::string(kToolVersion);
}
