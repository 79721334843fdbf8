// Python bindings for the core operations.

#include "ordstat/embedding.hpp"
#include "ordstat/errors.hpp"
#include "ordstat/finite_field.hpp"
#include "ordstat/map_family.hpp"
#include "ordstat/order_stats.hpp"
#include "ordstat/orlicz.hpp"
#include "ordstat/rv_order_stats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ordstat;

namespace {

std::string rational_text(const Rational& r) {
    std::ostringstream s;
    s << r;
    return s.str();
}

MapFamily family_by_name(const std::string& kind, std::size_t n) {
    if (kind == "affine") return affine_family(make_field(static_cast<unsigned>(n)));
    if (kind == "sym") return symmetric_group(n);
    if (kind == "full") return full_function_family(n, WeightedSpace::uniform(n));
    throw InvalidArgument("family must be affine, sym or full");
}

OrliczFunction power(double p) { return OrliczFunction::power(p); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "order statistics, Orlicz norms and l1 embeddings";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    m.def("field_table", [](unsigned q) {
        const auto f = make_field(q);
        std::vector<std::vector<unsigned>> mul(q, std::vector<unsigned>(q));
        for (unsigned a = 0; a < q; ++a)
            for (unsigned b = 0; b < q; ++b) mul[a][b] = f.mul(a, b);
        return mul;
    }, py::arg("q"), "Multiplication table of GF(q).");

    m.def("verify_family", [](const std::string& kind, std::size_t n) {
        const auto fam = family_by_name(kind, n);
        const auto r = verify_conditions(fam);
        py::dict d;
        d["size"] = fam.size();
        d["marginal_ok"] = r.marginal_ok;
        d["best_cg"] = r.best_cg;
        d["best_cg_exact"] = r.best_cg_exact ? py::cast(rational_text(*r.best_cg_exact)) : py::none();
        d["cardinality_bound"] = r.cardinality_bound ? py::cast(*r.cardinality_bound) : py::none();
        return d;
    }, py::arg("kind"), py::arg("n"));

    m.def("expected_sum", [](const std::vector<std::vector<double>>& a, const std::string& kind,
                             std::size_t ell) {
        const auto f = BivariateFunction::from_matrix(a);
        return expected_sum(f, family_by_name(kind, f.domain_size()), ell).value;
    }, py::arg("matrix"), py::arg("family"), py::arg("ell"));

    m.def("check_bounds", [](const std::vector<std::vector<double>>& a, const std::string& kind,
                             std::size_t ell) {
        const auto f = BivariateFunction::from_matrix(a);
        const auto fam = family_by_name(kind, f.domain_size());
        const auto cg = *verify_conditions(fam).best_cg_exact;
        const auto r = check_bounds(f, fam, ell, cg, ExactMode{}, false);
        py::dict d;
        d["expectation"] = r.expectation;
        d["integral"] = r.integral;
        d["c"] = r.lower_constant;
        d["C"] = r.upper_constant;
        d["exact"] = r.exact;
        d["ok"] = r.ok();
        return d;
    }, py::arg("matrix"), py::arg("family"), py::arg("ell"));

    m.def("integral_rearrangement", [](const std::vector<std::vector<double>>& a, double ell) {
        return integral_rearrangement(BivariateFunction::from_matrix(a), ell);
    }, py::arg("matrix"), py::arg("ell"));

    m.def("luxemburg_norm", [](const std::vector<double>& x, double p) {
        return luxemburg_norm(power(p), x);
    }, py::arg("x"), py::arg("p"), "Norm for M(t) = t^p.");

    m.def("conjugate_power", [](double p, const std::vector<double>& at) {
        const auto c = conjugate(power(p));
        std::vector<double> out;
        for (double s : at) out.push_back(c(s));
        return out;
    }, py::arg("p"), py::arg("at"));

    m.def("mstar", [](const std::string& dist, std::size_t ell, double s) {
        const auto d = Distribution::by_name(dist);
        QuantileFunction q = d.name() == "exp" ? QuantileFunction::exponential()
                           : d.name() == "uniform" ? QuantileFunction::uniform()
                           : d.name() == "const" ? QuantileFunction::constant(1.0)
                           : throw InvalidArgument("mstar supports const, uniform and exp");
        return mstar_value(q, ell, s);
    }, py::arg("dist"), py::arg("ell"), py::arg("s"));

    m.def("m_from_rv", [](const std::string& dist, std::size_t ell, double s) {
        return m_from_rv(Distribution::by_name(dist), ell, s);
    }, py::arg("dist"), py::arg("ell"), py::arg("s"));

    m.def("simulate_expected_sum", [](const std::vector<double>& x, const std::string& dist,
                                      std::size_t ell, std::uint64_t trials, std::uint64_t seed,
                                      unsigned threads) {
        const auto e = simulate_expected_sum(x, Distribution::by_name(dist), ell, {trials, seed, threads});
        return py::make_tuple(e.value, e.standard_error());
    }, py::arg("x"), py::arg("dist"), py::arg("ell"), py::arg("trials") = 100'000,
       py::arg("seed") = kDefaultSeed, py::arg("threads") = 1,
       "Returns (mean, standard error).");

    m.def("theorem_ratio", [](const std::vector<double>& x, const std::string& dist, std::size_t ell,
                              std::uint64_t trials, std::uint64_t seed) {
        return theorem_ratio(x, Distribution::by_name(dist), ell, {trials, seed, 1}).ratio;
    }, py::arg("x"), py::arg("dist"), py::arg("ell"), py::arg("trials") = 100'000,
       py::arg("seed") = kDefaultSeed);

    m.def("rademacher_average", [](const std::vector<double>& v) { return rademacher_average(v); },
          py::arg("v"));

    m.def("reference_norm", [](const std::vector<double>& a, const std::vector<double>& x) {
        return reference_norm(a, x, ReferenceMode::automatic(x.size()));
    }, py::arg("a"), py::arg("x"));

    py::class_<EmbeddingSpec>(m, "Embedding")
        .def(py::init([](std::size_t n, std::vector<double> weights, double delta, std::uint64_t seed) {
                 if (weights.empty()) weights = constant_weights(n);
                 return make_embedding(n, std::move(weights), {delta, 16, seed});
             }),
             py::arg("n"), py::arg("weights") = std::vector<double>{},
             py::arg("delta") = kDefaultDelta, py::arg("seed") = kDefaultSeed)
        .def_readonly("n", &EmbeddingSpec::n)
        .def_readonly("weights", &EmbeddingSpec::weights)
        .def_property_readonly("sign_vectors", [](const EmbeddingSpec& s) { return s.signs.rows(); })
        .def_property_readonly("output_dimension", &EmbeddingSpec::output_dimension)
        .def("__call__", [](const EmbeddingSpec& s, const std::vector<double>& x) { return psi(s, x); })
        .def("l1", [](const EmbeddingSpec& s, const std::vector<double>& x) { return psi_l1(s, x); })
        .def("distortion", [](const EmbeddingSpec& s, std::size_t samples, std::uint64_t seed) {
            return distortion_report(s, samples, seed).distortion;
        }, py::arg("samples") = 100, py::arg("seed") = kDefaultSeed);
}
