#include "ordstat/io.hpp"

#include "ordstat/finite_field.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ordstat::io {

namespace {

std::size_t parse_size(const std::string& s, const std::string& what) {
    std::size_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
        throw ParseError("bad " + what + " '" + s + "'");
    return v;
}

Rational rational_of(const json& w) {
    if (w.is_string()) {
        try {
            return parse_rational(w.get<std::string>());
        } catch (const std::exception&) {
            throw ParseError("bad weight '" + w.get<std::string>() + "'");
        }
    }
    throw ParseError("expected a rational string");
}

double double_of(const json& w) {
    if (w.is_number()) return w.get<double>();
    if (w.is_string()) return to_double(rational_of(w));
    throw ParseError("weights must be numbers or \"p/q\" strings");
}

bool all_strings(const json& arr) {
    for (const auto& w : arr)
        if (!w.is_string()) return false;
    return true;
}

json number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return nullptr;
    return x;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
}

MapFamily builtin_family(const std::string& spec, const std::optional<WeightedSpace>& codomain) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ParseError("builtin family must look like kind:size");
    const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    try {
        if (kind == "affine") {
            if (codomain) throw ParseError("the affine family has a uniform codomain");
            return affine_family(make_field(static_cast<unsigned>(parse_size(arg, "field order"))));
        }
        if (kind == "sym") {
            if (codomain) throw ParseError("the symmetric group has a uniform codomain");
            return symmetric_group(parse_size(arg, "degree"));
        }
        if (kind == "product") {
            const auto x = arg.find('x');
            const std::size_t n = parse_size(arg.substr(0, x), "domain size");
            const std::size_t atoms = x == std::string::npos ? n : parse_size(arg.substr(x + 1), "atom count");
            if (codomain && codomain->size() != atoms)
                throw ParseError("weight sidecar length differs from the atom count");
            return full_function_family(n, codomain ? *codomain : WeightedSpace::uniform(atoms));
        }
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    throw ParseError("unknown builtin family '" + kind + "'");
}

WeightedSpace weights_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("weights must be a nonempty array");
    try {
        if (all_strings(j)) {
            std::vector<Rational> w;
            for (const auto& x : j) w.push_back(rational_of(x));
            return WeightedSpace::from_exact(std::move(w));
        }
        std::vector<double> w;
        for (const auto& x : j) w.push_back(double_of(x));
        return WeightedSpace::from_weights(std::move(w));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

MapFamily family_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ParseError("family must be a JSON object");
        const std::size_t n = j.at("n").get<std::size_t>();
        WeightedSpace codomain = j.contains("weights") ? weights_from_json(j.at("weights"))
                                                       : WeightedSpace::uniform(j.at("atoms").get<std::size_t>());
        if (j.contains("atoms") && j.at("atoms").is_number() &&
            j.at("atoms").get<std::size_t>() != codomain.size())
            throw ParseError("atom count differs from the weight list");
        std::vector<std::vector<Element>> maps;
        for (const auto& m : j.at("maps")) {
            std::vector<Element> g;
            for (const auto& v : m) g.push_back(v.get<Element>());
            if (g.size() != n) throw ParseError("every map must list n images");
            for (Element e : g)
                if (e >= codomain.size()) throw ParseError("map image outside the codomain");
            maps.push_back(std::move(g));
        }
        if (maps.empty()) throw ParseError("family has no maps");
        if (!j.contains("map_weights")) return MapFamily::uniform_family(n, std::move(codomain), std::move(maps));
        const json& mw = j.at("map_weights");
        if (!mw.is_array() || mw.size() != maps.size()) throw ParseError("one weight per map is required");
        std::vector<double> w;
        for (const auto& x : mw) w.push_back(double_of(x));
        std::optional<std::vector<Rational>> exact;
        if (all_strings(mw)) {
            exact.emplace();
            for (const auto& x : mw) exact->push_back(rational_of(x));
        }
        return MapFamily::explicit_family(n, std::move(codomain), std::move(maps), std::move(w),
                                          std::move(exact));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed family JSON: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

json family_to_json(const MapFamily& family) {
    json j;
    j["n"] = family.domain_size();
    j["atoms"] = family.codomain().size();
    const auto& cod = family.codomain();
    json w = json::array();
    for (std::size_t k = 0; k < cod.size(); ++k)
        if (cod.exact_weights) w.push_back(to_string((*cod.exact_weights)[k]));
        else w.push_back(cod.weights[k]);
    j["weights"] = w;
    json maps = json::array(), mw = json::array();
    for (std::uint64_t k = 0; k < family.size(); ++k) {
        maps.push_back(family.map_at(k));
        if (family.has_exact_weights()) mw.push_back(to_string(family.exact_weight(k)));
        else mw.push_back(family.weight(k));
    }
    j["maps"] = maps;
    j["map_weights"] = mw;
    return j;
}

OrliczFunction orlicz_from_json(const json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        const json params = j.value("params", json::object());
        if (kind == "power")
            return OrliczFunction::power(params.at("p").get<double>(), params.value("coef", 1.0));
        if (kind == "hinge")
            return OrliczFunction::hinge(params.value("theta", 0.0), params.value("slope", 1.0));
        if (kind == "grid") {
            std::vector<double> s, v;
            for (const auto& pt : j.at("grid")) {
                if (!pt.is_array() || pt.size() != 2) throw ParseError("grid points are [s, v] pairs");
                s.push_back(pt[0].get<double>());
                v.push_back(pt[1].get<double>());
            }
            std::optional<double> cap, tail;
            if (j.contains("cap") && !j.at("cap").is_null()) cap = j.at("cap").get<double>();
            if (j.contains("tail_slope") && !j.at("tail_slope").is_null())
                tail = j.at("tail_slope").get<double>();
            return OrliczFunction::grid(std::move(s), std::move(v), cap, tail);
        }
        throw ParseError("unknown Orlicz kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed Orlicz JSON: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

json orlicz_to_json(const OrliczFunction& m) {
    json j;
    switch (m.kind()) {
        case OrliczFunction::Kind::Power:
            j["kind"] = "power";
            j["params"] = {{"p", m.exponent()}, {"coef", m.coefficient()}};
            return j;
        case OrliczFunction::Kind::Grid:
            if (m.hinge_theta()) {
                j["kind"] = "hinge";
                j["params"] = {{"theta", *m.hinge_theta()}, {"slope", *m.tail_slope()}};
                return j;
            }
            j["kind"] = "grid";
            j["grid"] = json::array();
            for (std::size_t k = 0; k < m.nodes().size(); ++k)
                j["grid"].push_back({m.nodes()[k], m.values()[k]});
            j["cap"] = m.cap() ? json(*m.cap()) : json(nullptr);
            j["tail_slope"] = m.tail_slope() ? json(*m.tail_slope()) : json(nullptr);
            return j;
        case OrliczFunction::Kind::Smooth:
            break;
    }
    throw InvalidArgument("closed-form Orlicz functions cannot be serialized; tabulate first");
}

std::vector<std::vector<double>> parse_matrix_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t' || c == '\r') c = ' ';
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            double v = 0.0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v))
                throw ParseError("bad number '" + tok + "' on line " + std::to_string(lineno));
            row.push_back(v);
        }
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("ragged matrix at line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("matrix is empty");
    return rows;
}

std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
    return parse_matrix_csv(read_file(path));
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, ',')) {
        const auto b = tok.find_first_not_of(' '), e = tok.find_last_not_of(' ');
        if (b == std::string::npos) throw ParseError("empty entry in list '" + text + "'");
        tok = tok.substr(b, e - b + 1);
        double v = 0.0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw ParseError("bad number '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("empty list");
    return out;
}

json condition_report_to_json(const ConditionReport& r) {
    json j;
    j["exact"] = r.exact;
    j["marginal_ok"] = r.marginal_ok;
    j["marginal_deviation"] = r.marginal_deviation;
    j["best_cg"] = number(r.best_cg);
    j["best_cg_exact"] = r.best_cg_exact ? json(to_string(*r.best_cg_exact)) : json(nullptr);
    if (r.witness)
        j["witness"] = {r.witness->i1, r.witness->j1, r.witness->i2, r.witness->j2};
    j["family_size"] = r.family_size;
    j["cardinality_bound"] = r.cardinality_bound ? json(*r.cardinality_bound) : json(nullptr);
    j["cardinality_ok"] = r.cardinality_ok ? json(*r.cardinality_ok) : json(nullptr);
    return j;
}

json bound_report_to_json(const BoundReport& r) {
    return {{"n", r.n},
            {"atoms", r.atoms},
            {"ell", r.ell},
            {"cg", r.cg},
            {"c", r.lower_constant},
            {"C", r.upper_constant},
            {"integral", r.integral},
            {"expectation", r.expectation},
            {"stderr", r.standard_error},
            {"exact", r.exact},
            {"lower_ok", r.lower_ok},
            {"upper_ok", r.upper_ok}};
}

std::string bound_report_csv_header() {
    return "n,N_or_atoms,ell,CG,c,C,integral,expectation,stderr,lower_ok,upper_ok";
}

std::string bound_report_csv_row(const BoundReport& r) {
    std::ostringstream os;
    os << r.n << ',' << r.atoms << ',' << r.ell << ',' << format_double(r.cg) << ','
       << format_double(r.lower_constant) << ',' << format_double(r.upper_constant) << ','
       << format_double(r.integral) << ',' << format_double(r.expectation) << ','
       << format_double(r.standard_error) << ',' << (r.lower_ok ? "true" : "false") << ','
       << (r.upper_ok ? "true" : "false");
    return os.str();
}

json reduction_report_to_json(const ReductionReport& r) {
    return {{"ell", r.ell},
            {"cg", r.cg},
            {"lower_constant", r.lower_constant},
            {"upper_constant", r.upper_constant},
            {"expected_a", r.expected_a},
            {"expected_averaged", r.expected_averaged},
            {"averaged_value", r.averaged_value},
            {"support_mass", r.support_mass},
            {"exact", r.exact},
            {"lower_ok", r.lower_ok},
            {"upper_ok", r.upper_ok}};
}

json embedding_to_json(const EmbeddingSpec& spec) {
    json signs = json::array();
    for (std::size_t j = 0; j < spec.signs.rows(); ++j) {
        json row = json::array();
        for (auto e : spec.signs.row(j)) row.push_back(static_cast<int>(e));
        signs.push_back(row);
    }
    return {{"n", spec.n},
            {"weights", spec.weights},
            {"sign_vectors", signs},
            {"family", spec.family.label()},
            {"normalization", spec.normalization()}};
}

EmbeddingSpec embedding_from_json(const json& j) {
    try {
        EmbeddingSpec spec;
        spec.n = j.at("n").get<std::size_t>();
        spec.weights = j.at("weights").get<std::vector<double>>();
        if (spec.weights.size() != spec.n) throw ParseError("weights must have length n");
        spec.signs.n = spec.n;
        for (const auto& row : j.at("sign_vectors")) {
            if (row.size() != spec.n) throw ParseError("sign vectors must have length n");
            for (const auto& e : row) {
                const int v = e.get<int>();
                if (v != 1 && v != -1) throw ParseError("sign entries must be +1 or -1");
                spec.signs.signs.push_back(static_cast<std::int8_t>(v));
            }
        }
        if (spec.signs.rows() == 0) throw ParseError("at least one sign vector is required");
        const std::string fam = j.value("family", "affine:" + std::to_string(spec.n));
        spec.family = builtin_family(fam);
        if (spec.family.domain_size() != spec.n) throw ParseError("family dimension differs from n");
        return spec;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed embedding JSON: ") + e.what());
    }
}

std::string distortion_csv_header() { return "n,N,samples,min_ratio,max_ratio,distortion,seed"; }

std::string distortion_csv_row(const DistortionReport& r) {
    std::ostringstream os;
    os << r.n << ',' << r.sign_vectors << ',' << r.samples << ',' << format_double(r.min_ratio)
       << ',' << format_double(r.max_ratio) << ',' << format_double(r.distortion) << ','
       << r.seed;
    return os.str();
}

}  // namespace ordstat::io
