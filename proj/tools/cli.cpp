#include "cli.hpp"

#include "ordstat/embedding.hpp"
#include "ordstat/errors.hpp"
#include "ordstat/io.hpp"
#include "ordstat/order_stats.hpp"
#include "ordstat/orlicz.hpp"
#include "ordstat/rv_order_stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace ordstat::cli {

namespace {

using io::json;
using io::ParseError;

struct RunConfig {
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 1;
    std::uint64_t trials = 100'000;
    std::optional<double> tol;
    std::string format = "json";
    std::string out;
};

struct Usage : Error {
    using Error::Error;
};

std::vector<std::size_t> size_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    for (double v : io::parse_number_list(text)) {
        if (!(v >= 0.0) || v != std::floor(v)) throw Usage(std::string("bad ") + what + " value");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// Keeps the first occurrence of each value.
template <class T>
std::vector<T> dedupe(const std::vector<T>& v, const char* what, std::ostream& err) {
    std::vector<T> out;
    std::set<T> seen;
    for (const T& x : v)
        if (seen.insert(x).second) out.push_back(x);
    if (out.size() != v.size()) err << "warning: duplicate " << what << " values removed\n";
    return out;
}

bool csv(const RunConfig& c) { return c.format == "csv"; }

OrliczFunction orlicz_source(const std::string& file, const std::optional<double>& power,
                             const std::optional<double>& hinge, const std::string& dist,
                             std::size_t ell) {
    const int given = !file.empty() + power.has_value() + hinge.has_value() + !dist.empty();
    if (given != 1) throw Usage("give exactly one of --orlicz, --power, --hinge, --dist");
    if (!file.empty()) return io::orlicz_from_json(io::read_json(file));
    if (power) return OrliczFunction::power(*power);
    if (hinge) return OrliczFunction::hinge(*hinge);
    if (ell == 0) throw Usage("--ell must be >= 1");
    return m_from_quantile(Distribution::by_name(dist).xstar(), ell);
}

MapFamily family_source(const std::string& builtin, const std::string& file,
                        const std::optional<WeightedSpace>& codomain) {
    if (builtin.empty() == file.empty()) throw Usage("give exactly one of --builtin/--family and --family-file");
    if (!builtin.empty()) return io::builtin_family(builtin, codomain);
    return io::family_from_json(io::read_json(file));
}

BivariateFunction load_matrix(const std::string& path, const std::string& weights,
                              std::optional<WeightedSpace>& codomain) {
    const auto rows = io::read_matrix_csv(path);
    if (!weights.empty()) codomain = io::weights_from_json(io::read_json(weights));
    const WeightedSpace space = codomain ? *codomain : WeightedSpace::uniform(rows.front().size());
    if (space.size() != rows.front().size()) throw Usage("weight sidecar length differs from the column count");
    return BivariateFunction::from_rows(rows, space);
}

std::vector<std::size_t> ell_list(const std::string& text, std::size_t n) {
    std::vector<std::size_t> ells;
    if (text.empty() || text == "all") {
        for (std::size_t l = 1; l <= n; ++l) ells.push_back(l);
        return ells;
    }
    ells = size_list(text, "ell");
    for (std::size_t l : ells)
        if (l == 0 || l > n) throw Usage("ell must lie in 1.." + std::to_string(n));
    return ells;
}

Rational family_constant(const MapFamily& family, const std::string& cg) {
    if (!cg.empty()) {
        const Rational r = parse_rational(cg);
        if (r <= 0) throw Usage("--cg must be positive");
        return r;
    }
    if (!family.enumerable()) throw Usage("implicit families need an explicit --cg");
    const ConditionReport rep = verify_conditions(family);
    if (!rep.marginal_ok) throw Error("family marginals do not match the codomain");
    return rep.best_cg_exact ? *rep.best_cg_exact : parse_rational(io::format_double(rep.best_cg));
}

ExpectationMode expectation_mode(const MapFamily& family, const RunConfig& cfg) {
    if (family.enumerable() && family.size() <= 2'000'000) return ExactMode{};
    return MonteCarlo{cfg.trials, cfg.seed, cfg.threads};
}

std::vector<std::vector<double>> ratio_probes(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::vector<std::vector<double>> xs;
    for (std::size_t k = 0; k < count; ++k) {
        CounterRng rng(seed, (std::uint64_t{n} << 32) + k);
        std::vector<double> x(n);
        for (double& v : x) v = std::abs(rng.normal());
        xs.push_back(std::move(x));
    }
    return xs;
}

std::vector<double> weight_preset(const std::string& spec, std::size_t n) {
    if (spec == "const" || spec == "ones") return constant_weights(n);
    if (spec.rfind("power:", 0) == 0) return power_weights(n, std::stod(spec.substr(6)));
    throw Usage("weights must be 'const' or 'power:P'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Order statistics, Orlicz norms and l1 embeddings", "ordstat"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--trials", cfg.trials, "Monte Carlo trials")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--tol", cfg.tol, "tolerance override")->check(CLI::PositiveNumber);
    app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--out", cfg.out, "write the report to PATH");

    std::ostringstream buffer;
    std::function<int()> action;

    // verify-family
    std::string builtin, family_file, cg_text;
    auto* vf = app.add_subcommand("verify-family", "check the marginal and pairwise conditions");
    vf->add_option("--builtin", builtin, "affine:Q, sym:N or product:NxM");
    vf->add_option("--file", family_file, "family JSON");
    vf->add_option("--cg", cg_text, "requested constant, e.g. 3/2");
    vf->callback([&] {
        action = [&] {
            const MapFamily family = family_source(builtin, family_file, std::nullopt);
            const ConditionReport rep = verify_conditions(family);
            const double requested = cg_text.empty() ? rep.best_cg : to_double(parse_rational(cg_text));
            const bool pass = rep.passes(requested) && rep.cardinality_ok.value_or(true);
            if (csv(cfg)) {
                buffer << "family,n,atoms,size,marginal_ok,best_cg,requested_cg,cardinality_bound,pass\n"
                       << family.label() << ',' << family.domain_size() << ','
                       << family.codomain().size() << ',' << rep.family_size << ','
                       << (rep.marginal_ok ? "true" : "false") << ','
                       << (rep.best_cg_exact ? to_string(*rep.best_cg_exact) : io::format_double(rep.best_cg))
                       << ',' << io::format_double(requested) << ','
                       << (rep.cardinality_bound ? io::format_double(*rep.cardinality_bound) : "") << ','
                       << (pass ? "true" : "false") << '\n';
            } else {
                json j = io::condition_report_to_json(rep);
                j["family"] = family.label();
                j["n"] = family.domain_size();
                j["atoms"] = family.codomain().size();
                j["requested_cg"] = requested;
                j["pass"] = pass;
                buffer << j.dump(2) << '\n';
            }
            return pass ? kPass : kFail;
        };
    });

    // check-bounds and reduction share their inputs
    std::string matrix_path, weights_path, ell_text;
    auto add_matrix_inputs = [&](CLI::App* sub) {
        sub->add_option("--matrix", matrix_path, "matrix CSV (rows: domain, columns: atoms)")->required();
        sub->add_option("--weights", weights_path, "atom weight sidecar (JSON array)");
        sub->add_option("--family", builtin, "builtin family");
        sub->add_option("--family-file", family_file, "family JSON");
        sub->add_option("--ell", ell_text, "list of ell values or 'all'");
        sub->add_option("--cg", cg_text, "constant C_G (default: measured)");
    };
    struct Inputs {
        BivariateFunction a;
        MapFamily family;
        std::vector<std::size_t> ells;
        Rational cg;
    };
    auto load_inputs = [&]() {
        std::optional<WeightedSpace> codomain;
        BivariateFunction a = load_matrix(matrix_path, weights_path, codomain);
        MapFamily family = family_source(builtin, family_file, codomain);
        if (family.domain_size() != a.domain_size() || family.codomain().size() != a.atom_count())
            throw Usage("matrix shape does not match the family");
        auto ells = ell_list(ell_text, a.domain_size());
        Rational cg = family_constant(family, cg_text);
        return Inputs{std::move(a), std::move(family), std::move(ells), cg};
    };

    auto* cb = app.add_subcommand("check-bounds", "certify the two-sided order statistic bound");
    add_matrix_inputs(cb);
    cb->callback([&] {
        action = [&] {
            Inputs in = load_inputs();
            const auto mode = expectation_mode(in.family, cfg);
            bool all = true;
            json rows = json::array();
            if (csv(cfg)) buffer << io::bound_report_csv_header() << '\n';
            for (std::size_t ell : in.ells) {
                const BoundReport r = check_bounds(in.a, in.family, ell, in.cg, mode, false,
                                                   cfg.tol.value_or(kBoundTol));
                all = all && r.ok();
                if (csv(cfg)) buffer << io::bound_report_csv_row(r) << '\n';
                else rows.push_back(io::bound_report_to_json(r));
                if (!r.ok()) err << "violation at ell=" << ell << '\n';
            }
            if (!csv(cfg)) buffer << rows.dump(2) << '\n';
            return all ? kPass : kFail;
        };
    });

    auto* rd = app.add_subcommand("reduction", "compare E S(a) with the averaged function");
    add_matrix_inputs(rd);
    rd->callback([&] {
        action = [&] {
            Inputs in = load_inputs();
            bool all = true;
            json rows = json::array();
            if (csv(cfg)) buffer << "ell,CG,expected_a,expected_averaged,lower_ok,upper_ok\n";
            for (std::size_t ell : in.ells) {
                const ReductionReport r = verify_reduction(in.a, in.family, ell, in.cg, false);
                all = all && r.ok();
                if (csv(cfg))
                    buffer << r.ell << ',' << io::format_double(r.cg) << ','
                           << io::format_double(r.expected_a) << ','
                           << io::format_double(r.expected_averaged) << ','
                           << (r.lower_ok ? "true" : "false") << ',' << (r.upper_ok ? "true" : "false")
                           << '\n';
                else rows.push_back(io::reduction_report_to_json(r));
            }
            if (!csv(cfg)) buffer << rows.dump(2) << '\n';
            return all ? kPass : kFail;
        };
    });

    // Orlicz function sources
    std::string orlicz_file, dist_name, x_text, at_text;
    std::optional<double> power, hinge;
    std::size_t m_ell = 1;
    auto add_orlicz_inputs = [&](CLI::App* sub) {
        sub->add_option("--orlicz", orlicz_file, "Orlicz function JSON");
        sub->add_option("--power", power, "M(t) = t^p");
        sub->add_option("--hinge", hinge, "M(t) = (t - theta)_+");
        sub->add_option("--dist", dist_name, "M built from a distribution (const, two-point, uniform, exp)");
        sub->add_option("--ell", m_ell, "ell for --dist")->capture_default_str();
    };

    auto* nm = app.add_subcommand("norm", "Luxemburg norm of a vector");
    add_orlicz_inputs(nm);
    nm->add_option("--x", x_text, "comma separated vector")->required();
    nm->callback([&] {
        action = [&] {
            const OrliczFunction m = orlicz_source(orlicz_file, power, hinge, dist_name, m_ell);
            const auto x = io::parse_number_list(x_text);
            const double v = luxemburg_norm(m, x, cfg.tol.value_or(kLuxemburgTol));
            if (csv(cfg)) buffer << "norm\n" << io::format_double(v) << '\n';
            else buffer << json{{"norm", v}}.dump(2) << '\n';
            return kPass;
        };
    });

    auto* cj = app.add_subcommand("conjugate", "Legendre transform of an Orlicz function");
    add_orlicz_inputs(cj);
    cj->add_option("--at", at_text, "points where M and M* are printed");
    cj->callback([&] {
        action = [&] {
            const OrliczFunction m = orlicz_source(orlicz_file, power, hinge, dist_name, m_ell);
            const OrliczFunction c = conjugate(m);
            std::vector<double> pts;
            if (!at_text.empty()) pts = io::parse_number_list(at_text);
            if (csv(cfg)) {
                buffer << "x,M,Mstar\n";
                for (double x : pts)
                    buffer << io::format_double(x) << ',' << io::format_double(m(x)) << ','
                           << io::format_double(c(x)) << '\n';
            } else {
                json j;
                j["conjugate"] = io::orlicz_to_json(c);
                json vals = json::array();
                for (double x : pts) vals.push_back({{"x", x}, {"M", m(x)}, {"Mstar", c(x)}});
                j["values"] = vals;
                buffer << j.dump(2) << '\n';
            }
            return kPass;
        };
    });

    // Embedding
    std::size_t embed_n = 0, probes = 16, samples = 100;
    double delta = kDefaultDelta;
    std::string weights_spec = "const";
    auto* em = app.add_subcommand("embed", "build Psi_n and optionally apply it");
    em->add_option("--n", embed_n, "dimension (prime power)")->required();
    em->add_option("--weights", weights_spec, "const or power:P")->capture_default_str();
    em->add_option("--delta", delta, "sign sandwich tolerance")->capture_default_str();
    em->add_option("--probes", probes, "random probe vectors")->capture_default_str();
    em->add_option("--x", x_text, "vector to embed");
    em->callback([&] {
        action = [&] {
            EmbeddingOptions opts{delta, probes, cfg.seed};
            const EmbeddingSpec spec = make_embedding(embed_n, weight_preset(weights_spec, embed_n), opts);
            std::vector<double> image;
            if (!x_text.empty()) image = psi(spec, io::parse_number_list(x_text));
            if (csv(cfg)) {
                buffer << "index,value\n";
                for (std::size_t k = 0; k < image.size(); ++k)
                    buffer << k << ',' << io::format_double(image[k]) << '\n';
            } else {
                json j = io::embedding_to_json(spec);
                if (!x_text.empty()) j["psi"] = image;
                buffer << j.dump(2) << '\n';
            }
            return kPass;
        };
    });

    // Sweeps
    auto* sw = app.add_subcommand("sweep", "parameter sweeps, long-format CSV");
    sw->require_subcommand(1);
    std::string dist_list = "const,two-point,uniform,exp", n_text, sweep_ell = "1";
    std::size_t x_count = 20;
    auto* sr = sw->add_subcommand("ratio", "expected order statistic sum over ||x||_M");
    sr->add_option("--dist", dist_list, "comma separated distributions")->capture_default_str();
    sr->add_option("--n", n_text, "comma separated dimensions")->required();
    sr->add_option("--ell", sweep_ell, "comma separated ell values")->capture_default_str();
    sr->add_option("--x-count", x_count, "random x per cell")->capture_default_str();
    sr->callback([&] {
        action = [&] {
            std::vector<std::string> dists;
            std::stringstream ds(dist_list);
            for (std::string d; std::getline(ds, d, ',');) dists.push_back(d);
            dists = dedupe(dists, "distribution", err);
            const auto ns = dedupe(size_list(n_text, "n"), "n", err);
            const auto ells = dedupe(size_list(sweep_ell, "ell"), "ell", err);
            if (x_count == 0) throw Usage("--x-count must be >= 1");
            json rows = json::array();
            if (csv(cfg)) buffer << "dist,n,ell,x_count,trials,ratio_min,ratio_mean,ratio_max,max_stderr,seed\n";
            for (const auto& name : dists) {
                const Distribution d = Distribution::by_name(name);
                for (std::size_t n : ns) {
                    if (n == 0) throw Usage("n must be >= 1");
                    std::vector<std::size_t> cell;
                    for (std::size_t l : ells) {
                        if (l == 0) throw Usage("ell must be >= 1");
                        if (l <= n) cell.push_back(l);
                        else err << "warning: skipping ell=" << l << " > n=" << n << '\n';
                    }
                    if (cell.empty()) continue;
                    const auto xs = ratio_probes(n, x_count, cfg.seed);
                    const auto r = theorem_ratios(xs, d, cell, {cfg.trials, cfg.seed, cfg.threads});
                    for (std::size_t k = 0; k < cell.size(); ++k) {
                        double lo = kInfinity, hi = 0.0, sum = 0.0, se = 0.0;
                        for (const auto& row : r) {
                            lo = std::min(lo, row[k].ratio);
                            hi = std::max(hi, row[k].ratio);
                            sum += row[k].ratio;
                            se = std::max(se, row[k].expectation.standard_error() / row[k].norm);
                        }
                        const double mean = sum / static_cast<double>(r.size());
                        if (csv(cfg))
                            buffer << d.name() << ',' << n << ',' << cell[k] << ',' << x_count << ','
                                   << cfg.trials << ',' << io::format_double(lo) << ','
                                   << io::format_double(mean) << ',' << io::format_double(hi) << ','
                                   << io::format_double(se) << ',' << cfg.seed << '\n';
                        else
                            rows.push_back({{"dist", d.name()}, {"n", n}, {"ell", cell[k]},
                                            {"x_count", x_count}, {"trials", cfg.trials},
                                            {"ratio_min", lo}, {"ratio_mean", mean},
                                            {"ratio_max", hi}, {"max_stderr", se}, {"seed", cfg.seed}});
                    }
                }
            }
            if (!csv(cfg)) buffer << rows.dump(2) << '\n';
            return kPass;
        };
    });

    auto* se = sw->add_subcommand("embed", "distortion of Psi_n against the reference norm");
    se->add_option("--n", n_text, "comma separated prime powers")->required();
    se->add_option("--samples", samples, "sphere samples")->capture_default_str();
    se->add_option("--delta", delta, "sign sandwich tolerance")->capture_default_str();
    se->add_option("--probes", probes, "random probe vectors")->capture_default_str();
    se->add_option("--weights", weights_spec, "const or power:P")->capture_default_str();
    se->callback([&] {
        action = [&] {
            const auto ns = dedupe(size_list(n_text, "n"), "n", err);
            if (samples == 0) throw Usage("--samples must be >= 1");
            json rows = json::array();
            if (csv(cfg)) buffer << io::distortion_csv_header() << '\n';
            for (std::size_t n : ns) {
                EmbeddingOptions opts{delta, probes, cfg.seed};
                const EmbeddingSpec spec = make_embedding(n, weight_preset(weights_spec, n), opts);
                const DistortionReport r = distortion_report(spec, samples, cfg.seed, cfg.threads);
                if (csv(cfg)) buffer << io::distortion_csv_row(r) << '\n';
                else
                    rows.push_back({{"n", r.n}, {"N", r.sign_vectors}, {"samples", r.samples},
                                    {"min_ratio", r.min_ratio}, {"max_ratio", r.max_ratio},
                                    {"distortion", r.distortion}, {"seed", r.seed},
                                    {"dimension", spec.output_dimension()}});
            }
            if (!csv(cfg)) buffer << rows.dump(2) << '\n';
            return kPass;
        };
    });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    if (!action) {
        err << "error: no command given\n";
        return kUsage;
    }

    int code = kPass;
    try {
        code = action();
    } catch (const Usage& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const NotPrimePower& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainTooLarge& e) {
        err << "too large: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFail;
    }

    if (cfg.out.empty()) {
        out << buffer.str();
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) {
            err << "cannot write '" << cfg.out << "'\n";
            return kUsage;
        }
        f << buffer.str();
    }
    return code;
}

}  // namespace ordstat::cli
