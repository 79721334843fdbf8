#include "cli.hpp"

#include "ordstat/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ordstat;
using io::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("family json round trip") {
    const auto fam = affine_family(make_field(3));
    const auto j = io::family_to_json(fam);
    const auto back = io::family_from_json(j);
    REQUIRE(back.size() == fam.size());
    CHECK(back.domain_size() == 3);
    for (std::uint64_t k = 0; k < fam.size(); ++k) {
        CHECK(back.map_at(k) == fam.map_at(k));
        CHECK(back.exact_weight(k) == fam.exact_weight(k));
    }

    const auto hand = io::family_from_json(json::parse(R"({
        "n": 2, "atoms": 2, "weights": ["1/3", "2/3"],
        "maps": [[0, 1], [1, 0]], "map_weights": ["1/2", "1/2"]})"));
    CHECK(hand.has_exact_weights());
    CHECK(hand.codomain().exact_weights->at(0) == Rational(1, 3));
    CHECK_THROWS_AS(io::family_from_json(json::parse(R"({"n": 2, "maps": [[0, 5]]})")), io::ParseError);
    CHECK_THROWS_AS(io::builtin_family("affine:6"), NotPrimePower);
    CHECK_THROWS_AS(io::builtin_family("cube:3"), io::ParseError);
    CHECK(io::builtin_family("product:2x3").codomain().size() == 3);
}

TEST_CASE("orlicz json round trip") {
    const auto p = io::orlicz_from_json(json::parse(R"({"kind": "power", "params": {"p": 2.5}})"));
    CHECK(p(2.0) == doctest::Approx(std::pow(2.0, 2.5)));
    const auto h = io::orlicz_from_json(io::orlicz_to_json(OrliczFunction::hinge(0.5, 2.0)));
    CHECK(h(0.4) == 0.0);
    CHECK(h(1.5) == doctest::Approx(2.0));
    const auto g = io::orlicz_from_json(json::parse(R"({"kind": "grid", "grid": [[0, 0], [1, 1], [2, 3]]})"));
    CHECK(g(1.5) == doctest::Approx(2.0));
    const auto g2 = io::orlicz_from_json(io::orlicz_to_json(g));
    for (double s : {0.0, 0.3, 1.0, 1.7, 2.0}) CHECK(g2(s) == doctest::Approx(g(s)));
    CHECK_THROWS_AS(io::orlicz_from_json(json::parse(R"({"kind": "cosh"})")), io::ParseError);
}

TEST_CASE("embedding json round trip") {
    const auto spec = make_embedding(3, power_weights(3, 1.5), {0.25, 4, 2});
    const auto back = io::embedding_from_json(io::embedding_to_json(spec));
    CHECK(back.n == 3);
    CHECK(back.weights == spec.weights);
    CHECK(back.signs.signs == spec.signs.signs);
    const std::vector<double> x{0.1, -2, 0.7};
    CHECK(psi(back, x) == psi(spec, x));
}

TEST_CASE("matrix csv") {
    const auto m = io::parse_matrix_csv("# header\n1, 2 ,3\n4 5 6\n\n");
    REQUIRE(m.size() == 2);
    CHECK(m[1] == std::vector<double>{4, 5, 6});
    CHECK_THROWS_AS(io::parse_matrix_csv("1,2\n3\n"), io::ParseError);
    CHECK_THROWS_AS(io::parse_matrix_csv("1,x\n"), io::ParseError);
    CHECK(io::parse_number_list("1,2,4") == std::vector<double>{1, 2, 4});
    CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("cli verify-family") {
    auto r = run({"verify-family", "--builtin", "affine:8"});
    CHECK(r.code == cli::kPass);
    auto j = json::parse(r.out);
    CHECK(j["best_cg"] == 1.0);
    CHECK(j["family_size"] == 64);

    r = run({"verify-family", "--builtin", "sym:3"});
    CHECK(r.code == cli::kPass);
    CHECK(json::parse(r.out)["best_cg_exact"] == "3/2");

    r = run({"verify-family", "--builtin", "sym:3", "--cg", "1"});
    CHECK(r.code == cli::kFail);

    CHECK(run({"verify-family", "--builtin", "affine:6"}).code == cli::kUsage);
    CHECK(run({"verify-family"}).code == cli::kUsage);
    CHECK(run({"no-such-command"}).code == cli::kUsage);
    const auto bad = temp_file("ordstat_bad.json", "{ not json");
    CHECK(run({"verify-family", "--file", bad}).code == cli::kUsage);
}

TEST_CASE("cli check-bounds and reduction") {
    const auto id = temp_file("ordstat_id.csv", "1,0\n0,1\n");
    auto r = run({"check-bounds", "--matrix", id, "--family", "sym:2", "--ell", "1"});
    CHECK(r.code == cli::kPass);
    auto j = json::parse(r.out);
    REQUIRE(j.is_array());
    CHECK(j[0]["expectation"] == 0.5);
    CHECK(j[0]["integral"] == 1.0);
    CHECK(j[0]["C"] == 30.0);

    r = run({"--format", "csv", "check-bounds", "--matrix", id, "--family", "sym:2", "--ell", "all"});
    CHECK(r.code == cli::kPass);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);

    CHECK(run({"check-bounds", "--matrix", id, "--family", "sym:2", "--ell", "0"}).code == cli::kUsage);
    CHECK(run({"check-bounds", "--matrix", "/nonexistent.csv", "--family", "sym:2"}).code == cli::kUsage);

    r = run({"reduction", "--matrix", id, "--family", "sym:2"});
    CHECK(r.code == cli::kPass);
    CHECK_FALSE(r.out.empty());
}

TEST_CASE("cli norm and conjugate") {
    auto r = run({"norm", "--power", "2", "--x", "3,4"});
    CHECK(r.code == cli::kPass);
    CHECK(json::parse(r.out)["norm"].get<double>() == doctest::Approx(5.0).epsilon(1e-9));
    r = run({"conjugate", "--power", "1.5", "--at", "1,2"});
    CHECK(r.code == cli::kPass);
    const auto j = json::parse(r.out);
    CHECK(j["conjugate"]["params"]["p"].get<double>() == doctest::Approx(3.0));
    CHECK(j["values"][0]["Mstar"].get<double>() == doctest::Approx(4.0 / 27.0));
    CHECK(run({"norm", "--x", "1"}).code == cli::kUsage);
}

TEST_CASE("cli embed and sweeps") {
    auto r = run({"embed", "--n", "3", "--x", "1,2,3"});
    CHECK(r.code == cli::kPass);
    CHECK(json::parse(r.out)["family"] == "affine:3");
    CHECK(run({"embed", "--n", "6"}).code == cli::kUsage);

    const std::vector<std::string> sweep{"--format", "csv", "--trials", "500", "sweep", "ratio",
                                         "--n", "2,3", "--ell", "1,2", "--x-count", "2",
                                         "--dist", "const,exp"};
    auto one = sweep, three = sweep;
    one.insert(one.begin(), {"--threads", "1"});
    three.insert(three.begin(), {"--threads", "3"});
    const auto a = run(one), b = run(three);
    CHECK(a.code == cli::kPass);
    CHECK(a.out == b.out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 9);

    const auto path = (std::filesystem::temp_directory_path() / "ordstat_sweep.csv").string();
    std::remove(path.c_str());
    r = run({"--format", "csv", "--out", path, "sweep", "embed", "--n", "2,3,3", "--samples", "10"});
    CHECK(r.code == cli::kPass);
    CHECK(r.err.find("duplicate") != std::string::npos);
    const auto text = io::read_file(path);
    CHECK(text.rfind("n,N,samples,min_ratio,max_ratio,distortion,seed", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
