#include "parabolica/cli.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "parabolica/errors.hpp"

using namespace parabolica;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"parabolica"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("parse_complex accepts both notations") {
    CHECK(cli::parse_complex("0.25+0.5i") == Complex{0.25, 0.5});
    CHECK(cli::parse_complex("0.25,0.5") == Complex{0.25, 0.5});
    CHECK(cli::parse_complex("-1.125-0.2165063509i") == Complex{-1.125, -0.2165063509});
    CHECK(cli::parse_complex("-0.75") == Complex{-0.75, 0.0});
    CHECK(cli::parse_complex("2i") == Complex{0.0, 2.0});
    CHECK(cli::parse_complex("-i") == Complex{0.0, -1.0});
    CHECK(cli::parse_complex("1e-3+2e-4i") == Complex{1e-3, 2e-4});
    CHECK(cli::parse_complex("1e-3") == Complex{1e-3, 0.0});
    CHECK_THROWS_AS(cli::parse_complex(""), PreconditionError);
    CHECK_THROWS_AS(cli::parse_complex("abc"), PreconditionError);
    CHECK_THROWS_AS(cli::parse_complex("1+2"), PreconditionError);
}

TEST_CASE("parse_angle") {
    CHECK(cli::parse_angle("1/3") == Angle(1, 3));
    CHECK(cli::parse_angle("2/6") == Angle(1, 3));
    CHECK(cli::parse_angle("0") == Angle(0, 1));
    CHECK(cli::parse_angle("-1/3") == Angle(2, 3));
    CHECK_THROWS_AS(cli::parse_angle("1/0"), PreconditionError);
    CHECK_THROWS_AS(cli::parse_angle("x"), PreconditionError);
}

TEST_CASE("parse_alphas") {
    const auto list = cli::parse_alphas("0.1,0.01");
    REQUIRE(list.size() == 2);
    CHECK(list[1] == 0.01);
    const auto range = cli::parse_alphas("1e-1..1e-4");
    REQUIRE(range.size() == 4);
    CHECK(range[0] == 1e-1);
    CHECK(range[3] == 1e-4);
    CHECK_THROWS_AS(cli::parse_alphas(""), PreconditionError);
    CHECK_THROWS_AS(cli::parse_alphas("-1"), PreconditionError);
}

TEST_CASE("escape subcommand") {
    const Result at0 = run({"escape", "--c", "0"});
    CHECK(at0.code == cli::kExitOk);
    CHECK(contains(at0.out, "non-escaped at cap"));
    const Result at3 = run({"escape", "--c", "3", "--cap", "10"});
    CHECK(at3.code == cli::kExitOk);
    CHECK(at3.out == "escaped at n=1\n");
}

TEST_CASE("locate -3/4") {
    const Result r = run({"locate", "--n", "1", "--p", "1", "--q", "2"});
    CHECK(r.code == cli::kExitOk);
    CHECK(contains(r.out, "c0=-0.75"));
    CHECK(contains(r.out, "tau=1\n"));
    const Result j = run({"--format", "json", "locate", "--n", "1", "--p", "1", "--q", "2"});
    CHECK(j.code == cli::kExitOk);
    CHECK(contains(j.out, "\"tau\": \"1\""));
}

TEST_CASE("tau reports the consistency residual") {
    const Result r = run({"tau", "--n", "1", "--p", "1", "--q", "4"});
    CHECK(r.code == cli::kExitOk);
    CHECK(contains(r.out, "tau=2.82842712"));
    CHECK(contains(r.out, "derivative_residual="));
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::kExitInput);
    CHECK(run({"bogus"}).code == cli::kExitInput);
    CHECK(run({"escape"}).code == cli::kExitInput);
    CHECK(run({"escape", "--c", "nope"}).code == cli::kExitInput);
    CHECK(run({"escape", "--c", "0", "--R", "1"}).code == cli::kExitInput);
    const Result bad_q = run({"locate", "--n", "1", "--p", "2", "--q", "4"});
    CHECK(bad_q.code == cli::kExitInput);
    CHECK(contains(bad_q.err, "locate_satellite"));
    // A point that does not escape within the cap is a numerical failure.
    const Result numeric = run({"primitive-pi", "--count", "1", "--cap", "5"});
    CHECK(numeric.code == cli::kExitNumerical);
    CHECK_FALSE(numeric.err.empty());
}

TEST_CASE("help lists every flag with its default") {
    const Result top = run({"--help"});
    CHECK(top.code == cli::kExitOk);
    for (const char* sub : {"escape", "locate", "tau", "ray", "table1", "ray-pi", "primitive-pi", "thm2", "gates",
                            "demo-classic"}) {
        CHECK(contains(top.out, sub));
    }
    const Result t1 = run({"table1", "--help"});
    CHECK(t1.code == cli::kExitOk);
    CHECK(contains(t1.out, "--samples"));
    CHECK(contains(t1.out, "16384"));
    CHECK(contains(t1.out, "--alphas"));
    const Result t2 = run({"thm2", "--help"});
    CHECK(contains(t2.out, "--seed"));
    CHECK(contains(t2.out, "--a"));
    CHECK(contains(t2.out, "8"));
}

TEST_CASE("table1 csv for two radii") {
    const Result r = run({"table1", "--alphas", "1e-1..1e-2"});
    REQUIRE(r.code == cli::kExitOk);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "site_re,site_im,qn,alpha_abs,N,scaled,residual");
    std::vector<std::string> rows;
    while (std::getline(is, line)) {
        rows.push_back(line);
    }
    REQUIRE(rows.size() == 8);
    CHECK(contains(rows[0], ",4,0.1,10,"));
    CHECK(contains(rows[1], ",4,0.01,109,"));
    CHECK(contains(rows[7], ",3,0.01,180,"));
}

TEST_CASE("identical runs give byte-identical files") {
    const std::string a = "cli_repro_a.json";
    const std::string b = "cli_repro_b.json";
    for (const std::string& path : {a, b}) {
        const Result r = run({"--format", "json", "--no-wall-time", "--output", path.c_str(), "thm2", "--count", "4",
                              "--samples", "16", "--seed", "11"});
        REQUIRE(r.code == cli::kExitOk);
    }
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const std::string ta = slurp(a);
    CHECK_FALSE(ta.empty());
    CHECK(ta == slurp(b));
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST_CASE("ray, gates, primitive-pi and demo-classic run") {
    const Result ray = run({"ray", "--theta", "1/3", "--pot-end", "1e-3"});
    CHECK(ray.code == cli::kExitOk);
    CHECK(ray.out.rfind("theta_num,theta_den,potential,re,im\n", 0) == 0);
    const Result gates = run({"gates", "--n", "1", "--p", "1", "--q", "2", "--alpha", "0.001i"});
    CHECK(gates.code == cli::kExitOk);
    CHECK(contains(gates.out, "min_subset_imag"));
    const Result prim = run({"primitive-pi", "--count", "2"});
    CHECK(prim.code == cli::kExitOk);
    CHECK(contains(prim.out, ",312,"));
    const Result demo = run({"demo-classic", "--count", "2"});
    CHECK(demo.code == cli::kExitOk);
    CHECK(contains(demo.out, "curve,t,N,product"));
}
