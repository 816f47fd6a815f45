#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dalc/bounds.hpp"
#include "dalc/data.hpp"
#include "dalc/estimators.hpp"
#include "dalc/kernels.hpp"
#include "dalc/losses.hpp"
#include "dalc/model.hpp"
#include "dalc/synthetic.hpp"
#include "dalc/validation.hpp"

namespace py = pybind11;
using namespace dalc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<int, py::array::c_style | py::array::forcecast>;

Role parse_role(const std::string& r) {
    if (r == "source")
        return Role::Source;
    if (r == "target")
        return Role::Target;
    throw std::invalid_argument("role must be 'source' or 'target'");
}

Dataset dataset_from_array(const Array& x, std::optional<Labels> y, const std::string& role) {
    if (x.ndim() != 2)
        throw std::invalid_argument("points must be a 2-d array");
    const auto n = static_cast<std::size_t>(x.shape(0)), d = static_cast<std::size_t>(x.shape(1));
    const double* p = x.data();
    std::vector<SparseVector> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back(SparseVector::from_dense(std::span<const double>(p + i * d, d)));
    std::optional<std::vector<int>> labels;
    if (y) {
        if (y->ndim() != 1 || static_cast<std::size_t>(y->shape(0)) != n)
            throw std::invalid_argument("labels must be a 1-d array with one entry per point");
        labels.emplace(y->data(), y->data() + n);
    }
    return Dataset(std::move(pts), d, std::move(labels), parse_role(role));
}

py::array_t<double> to_dense(const Dataset& d) {
    py::array_t<double> out({d.size(), d.dim()});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.dim(); ++j)
            m(i, j) = 0.0;
        const auto& p = d.point(i);
        for (std::size_t k = 0; k < p.nnz(); ++k)
            m(i, p.indices[k]) = p.values[k];
    }
    return out;
}

py::array_t<int> to_array(const std::vector<int>& v) { return py::array_t<int>(v.size(), v.data()); }
py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(v.size(), v.data());
}

py::dict trace_dict(const OptimizerTrace& t) {
    py::dict d;
    d["iterations"] = t.iterations;
    d["converged"] = t.converged;
    d["final_gradient_norm"] = t.final_gradient_norm;
    d["objective_values"] = t.objective_values;
    return d;
}

OptimizerConfig optimizer_config(std::size_t max_iter, double tol, const std::string& method) {
    OptimizerConfig c;
    c.max_iterations = max_iter;
    c.gradient_tolerance = tol;
    c.method = parse_method(method);
    return c;
}

py::dict report_dict(const BoundReport& r) {
    py::dict d;
    d["b_prime"] = r.b_prime;
    d["c_prime"] = r.c_prime;
    d["ideal_plugin"] = r.ideal_plugin;
    d["source_gibbs_bound"] = r.source_gibbs_bound;
    d["disagreement_bound"] = r.disagreement_bound;
    d["joint_error_bound"] = r.joint_error_bound;
    d["target_gibbs_bound"] = r.target_gibbs_bound;
    d["target_vote_bound"] = r.target_vote_bound;
    return d;
}

}  // namespace

PYBIND11_MODULE(_dalc, m) {
    m.doc() = "Domain adaptation of linear classifiers (C++ core)";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<UnsupportedVersionError>(m, "UnsupportedVersionError", PyExc_ValueError);
    py::register_exception<OptimizerError>(m, "OptimizerError", PyExc_RuntimeError);

    m.def("phi", py::vectorize(phi), py::arg("x"));
    m.def("phi_dis", py::vectorize(phi_dis), py::arg("x"));
    m.def("phi_err", py::vectorize(phi_err), py::arg("x"));
    m.def("d_phi", py::vectorize(d_phi), py::arg("x"));
    m.def("d_phi_dis", py::vectorize(d_phi_dis), py::arg("x"));
    m.def("d_phi_err", py::vectorize(d_phi_err), py::arg("x"));

    m.def(
        "kernel_eval",
        [](const std::vector<double>& x, const std::vector<double>& y, const std::string& kernel,
           double gamma) { return kernel_eval(parse_kernel(kernel, gamma), x, y); },
        py::arg("x"), py::arg("y"), py::arg("kernel") = "rbf", py::arg("gamma") = 1.0);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&dataset_from_array), py::arg("points"), py::arg("labels") = py::none(),
             py::arg("role") = "source")
        .def("__len__", &Dataset::size)
        .def_property_readonly("dim", &Dataset::dim)
        .def_property_readonly("labeled", &Dataset::labeled)
        .def_property_readonly("role", [](const Dataset& d) {
            return d.role() == Role::Source ? "source" : "target";
        })
        .def_property_readonly("labels", [](const Dataset& d) -> py::object {
            if (!d.labeled())
                return py::none();
            return to_array(d.labels());
        })
        .def("to_dense", &to_dense)
        .def("with_labels", [](const Dataset& d, const std::vector<int>& y) { return d.with_labels(y); })
        .def("without_labels", &Dataset::without_labels)
        .def("save", [](const Dataset& d, const std::filesystem::path& p) { save_sparse(p, d); })
        .def_static(
            "load",
            [](const std::filesystem::path& p, std::optional<std::size_t> dim, const std::string& role) {
                return load_sparse(p, dim, parse_role(role));
            },
            py::arg("path"), py::arg("dim") = py::none(), py::arg("role") = "source");

    m.def(
        "make_moons",
        [](std::size_t n, double noise, double rotation, std::uint64_t seed) {
            auto t = make_moons({n, noise, rotation, seed});
            return py::make_tuple(t.source, t.target, to_array(t.target_labels));
        },
        py::arg("n") = 300, py::arg("noise") = 0.1, py::arg("rotation") = 0.0, py::arg("seed") = 0,
        "Returns (source, target, target_labels).");
    m.def(
        "make_sparse_shift",
        [](std::size_t dim, std::size_t n_source, std::size_t n_target, std::uint64_t seed) {
            SparseShiftConfig c;
            c.dim = dim;
            c.n_source = n_source;
            c.n_target = n_target;
            c.seed = seed;
            auto t = make_sparse_shift(c);
            return py::make_tuple(t.source, t.target, to_array(t.target_labels));
        },
        py::arg("dim") = 5000, py::arg("n_source") = 500, py::arg("n_target") = 500,
        py::arg("seed") = 0);

    py::class_<DalcModel>(m, "Model")
        .def_property_readonly("form", [](const DalcModel& d) {
            return d.form() == ModelForm::Primal ? "primal" : "dual";
        })
        .def_property_readonly("weights", [](const DalcModel& d) { return to_array(d.weights()); })
        .def_property_readonly("kernel", [](const DalcModel& d) { return d.kernel().name(); })
        .def_property_readonly("gamma", [](const DalcModel& d) { return d.kernel().gamma; })
        .def_property_readonly("B", [](const DalcModel& d) { return d.hyperparams().B; })
        .def_property_readonly("C", [](const DalcModel& d) { return d.hyperparams().C; })
        .def_property_readonly("dim", &DalcModel::dim)
        .def_property_readonly("trace", [](const DalcModel& d) { return trace_dict(d.trace()); })
        .def("kl", &DalcModel::kl)
        .def("decision_function",
             [](const DalcModel& d, const Dataset& x) { return to_array(d.decision_values(x)); })
        .def("predict", [](const DalcModel& d, const Dataset& x) { return to_array(d.predict(x)); })
        .def("to_json", &model_to_json)
        .def_static("from_json", &model_from_json)
        .def("save", [](const DalcModel& d, const std::filesystem::path& p) { save_model(d, p); })
        .def_static("load", [](const std::filesystem::path& p) { return load_model(p); });

    m.def(
        "train",
        [](const Dataset& source, const Dataset& target, const std::string& kernel, double gamma,
           double B, double C, bool primal, std::size_t max_iter, double tol, const std::string& method) {
            const KernelSpec k = parse_kernel(kernel, gamma);
            const OptimizerConfig opt = optimizer_config(max_iter, tol, method);
            TrainOptions o;
            o.primal = primal;
            py::gil_scoped_release release;
            return train(source, target, k, {B, C}, opt, o);
        },
        py::arg("source"), py::arg("target"), py::arg("kernel") = "rbf", py::arg("gamma") = 1.0,
        py::arg("B") = 1.0, py::arg("C") = 1.0, py::arg("primal") = false, py::arg("max_iter") = 1000,
        py::arg("tol") = 1e-6, py::arg("method") = "quasi-newton");

    m.def("disagreement", py::overload_cast<const DalcModel&, const Dataset&>(&empirical_disagreement));
    m.def("joint_error", py::overload_cast<const DalcModel&, const Dataset&>(&empirical_joint_error));
    m.def("gibbs_risk", py::overload_cast<const DalcModel&, const Dataset&>(&empirical_gibbs_risk));
    m.def("vote_risk", py::overload_cast<const DalcModel&, const Dataset&>(&empirical_vote_risk));
    m.def("domain_disagreement",
          py::overload_cast<const DalcModel&, const Dataset&, const Dataset&>(&empirical_domain_disagreement));

    m.def("catoni_factor", &catoni_factor, py::arg("c"));
    m.def("catoni_bound", &catoni_bound, py::arg("mean"), py::arg("kl"), py::arg("m"), py::arg("c"),
          py::arg("delta"), py::arg("kl_multiplier") = 1);
    m.def("ideal_bound", &da_bound_ideal, py::arg("d_t"), py::arg("e_s"), py::arg("beta_q"), py::arg("q"),
          py::arg("eta") = 0.0);
    m.def(
        "generalization_bound",
        [](double d_hat, double e_hat, double kl, std::size_t m_s, std::size_t m_t, double b, double c,
           double delta, double beta_inf, double eta, std::optional<double> gibbs_hat) {
            BoundInputs in;
            in.d_hat = d_hat;
            in.e_hat = e_hat;
            in.kl = kl;
            in.m_s = m_s;
            in.m_t = m_t;
            in.b = b;
            in.c = c;
            in.delta = delta;
            in.beta_inf = beta_inf;
            in.eta = eta;
            in.gibbs_hat = gibbs_hat;
            return report_dict(da_generalization_bound(in));
        },
        py::arg("d_hat"), py::arg("e_hat"), py::arg("kl"), py::arg("m_s"), py::arg("m_t"), py::arg("b") = 1.0,
        py::arg("c") = 1.0, py::arg("delta") = 0.05, py::arg("beta_inf") = 1.0, py::arg("eta") = 0.0,
        py::arg("gibbs_hat") = py::none());

    m.def(
        "beta_q_discrete",
        [](std::vector<double> s, std::vector<double> t, double q, std::size_t n, std::uint64_t seed) {
            const DiscreteShift fam(std::move(s), std::move(t));
            const auto e = beta_q_monte_carlo([&](auto x, int y) { return fam.density_ratio(x, y); },
                                              [&](Rng& r) { return fam.sample_source(r); }, q, n, seed);
            return py::make_tuple(e.beta_q, fam.beta(q));
        },
        py::arg("source_probs"), py::arg("target_probs"), py::arg("q"), py::arg("n") = 100000,
        py::arg("seed") = 0, "Returns (Monte-Carlo estimate, closed form).");
    m.def(
        "beta_q_gaussian",
        [](std::vector<double> shift, double q, std::size_t n, std::uint64_t seed) {
            const GaussianShift fam(std::move(shift));
            const auto e = beta_q_monte_carlo([&](auto x, int y) { return fam.density_ratio(x, y); },
                                              [&](Rng& r) { return fam.sample_source(r); }, q, n, seed);
            return py::make_tuple(e.beta_q, fam.beta(q));
        },
        py::arg("shift"), py::arg("q"), py::arg("n") = 100000, py::arg("seed") = 0);

    m.def(
        "reverse_validation_risk",
        [](const Dataset& source, const Dataset& target, const std::string& kernel, double gamma, double B,
           double C, std::size_t folds, std::uint64_t seed, bool primal, std::size_t max_iter) {
            const KernelSpec k = parse_kernel(kernel, gamma);
            TrainOptions o;
            o.primal = primal;
            const OptimizerConfig opt = optimizer_config(max_iter, 1e-6, "quasi-newton");
            py::gil_scoped_release release;
            return reverse_validation_risk(source, target, k, {B, C}, folds, seed, opt, o);
        },
        py::arg("source"), py::arg("target"), py::arg("kernel") = "rbf", py::arg("gamma") = 1.0,
        py::arg("B") = 1.0, py::arg("C") = 1.0, py::arg("folds") = 5, py::arg("seed") = 0,
        py::arg("primal") = false, py::arg("max_iter") = 1000);
    m.def(
        "grid_search",
        [](const Dataset& source, const Dataset& target, std::vector<double> c_values,
           std::vector<double> b_values, const std::string& kernel, double gamma, std::size_t folds,
           std::uint64_t seed, bool primal, std::size_t threads, std::size_t max_iter) {
            const KernelSpec k = parse_kernel(kernel, gamma);
            TrainOptions o;
            o.primal = primal;
            const OptimizerConfig opt = optimizer_config(max_iter, 1e-6, "quasi-newton");
            const GridSpec grid{std::move(c_values), std::move(b_values)};
            ReverseValidationReport r;
            {
                py::gil_scoped_release release;
                r = grid_search(source, target, k, grid, folds, seed, opt, o, threads);
            }
            py::array_t<double> risk({grid.c_values.size(), grid.b_values.size()});
            std::copy(r.risk.begin(), r.risk.end(), risk.mutable_data());
            py::dict d;
            d["risk"] = risk;
            d["B"] = r.selected().B;
            d["C"] = r.selected().C;
            d["c_index"] = r.selected_c_index;
            d["b_index"] = r.selected_b_index;
            d["folds_skipped"] = r.folds_skipped;
            return d;
        },
        py::arg("source"), py::arg("target"), py::arg("c_values"), py::arg("b_values"),
        py::arg("kernel") = "rbf", py::arg("gamma") = 1.0, py::arg("folds") = 5, py::arg("seed") = 0,
        py::arg("primal") = false, py::arg("threads") = 1, py::arg("max_iter") = 1000,
        "Risk matrix is indexed [c, b]; ties go to the smallest B, then the smallest C.");
}
