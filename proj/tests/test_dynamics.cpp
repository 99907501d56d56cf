#include "parabolica/dynamics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "parabolica/errors.hpp"

using namespace parabolica;

namespace {

// Straight-line reference iteration, independent of the engine's kernels.
std::uint64_t naive_escape(Complex c, double R, std::uint64_t cap) {
    Complex z{};
    for (std::uint64_t n = 1; n <= cap; ++n) {
        z = z * z + c;
        if (std::abs(z) > R) {
            return n;
        }
    }
    return cap;
}

Complex iterate(Complex c, Complex z, int k) {
    for (int i = 0; i < k; ++i) {
        z = z * z + c;
    }
    return z;
}

// Extended-precision iteration keeps rounding out of the difference quotients.
using Wide = std::complex<long double>;

Wide iterate_wide(Wide c, Wide z, int k) {
    for (int i = 0; i < k; ++i) {
        z = z * z + c;
    }
    return z;
}

Complex narrow(Wide w) { return {static_cast<double>(w.real()), static_cast<double>(w.imag())}; }

}  // namespace

TEST_CASE("escape_time: fixed point and immediate escape") {
    const EscapeOutcome at0 = escape_time(0.0, 2.0, 10000);
    CHECK_FALSE(at0.escaped);
    CHECK(at0.n == 10000);

    const EscapeOutcome at3 = escape_time(3.0, 2.0, 10);
    CHECK(at3.escaped);
    CHECK(at3.n == 1);
    CHECK(at3.final_z == Complex{3.0, 0.0});
}

TEST_CASE("escape_time: vertical approach to -3/4") {
    const EscapeOutcome e = escape_time({-0.75, 0.01}, 2.0, 1000000);
    REQUIRE(e.escaped);
    CHECK(std::fabs(static_cast<double>(e.n) * 0.01 - M_PI) < 0.15);
}

TEST_CASE("escape_time: reported index brackets the escape radius") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.5, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Complex c{u(rng), u(rng) * 0.8};
        const EscapeOutcome e = escape_time(c, 2.0, 5000);
        CHECK(e.n == naive_escape(c, 2.0, 5000));
        if (e.escaped) {
            CHECK(std::abs(iterate(c, 0.0, static_cast<int>(e.n) - 1)) <= 2.0);
            CHECK(std::abs(e.final_z) > 2.0);
        }
    }
}

TEST_CASE("escape_time: preconditions") {
    CHECK_THROWS_AS(escape_time(0.0, 1.5, 10), PreconditionError);
    CHECK_THROWS_AS(escape_time(0.0, 2.0, 0), PreconditionError);
}

TEST_CASE("escape_time_batch matches escape_time in order") {
    const std::vector<Complex> two{0.0, 3.0};
    const auto out = escape_time_batch(two, 2.0, 10);
    REQUIRE(out.size() == 2);
    CHECK_FALSE(out[0].escaped);
    CHECK(out[1].escaped);
    CHECK(out[1].n == 1);

    const std::vector<Complex> one{{-0.75, 0.01}};
    CHECK(escape_time_batch(one, 2.0, 1000000).front() == escape_time(one.front(), 2.0, 1000000));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 0.6);
    std::vector<Complex> many(999);
    for (auto& c : many) {
        c = {u(rng), u(rng) * 0.7};
    }
    const auto batch = escape_time_batch(many, 2.0, 3000, 4);
    for (std::size_t i = 0; i < many.size(); ++i) {
        CHECK(batch[i] == escape_time(many[i], 2.0, 3000));
    }
}

TEST_CASE("escape_time_batch: circle around 0.25+0.5i at radius 0.1") {
    std::vector<Complex> cs(4096);
    for (std::size_t j = 0; j < cs.size(); ++j) {
        cs[j] = Complex{0.25, 0.5} + std::polar(0.1, 2.0 * M_PI * static_cast<double>(j) / 4096.0);
    }
    std::uint64_t best = ~0ULL;
    for (const auto& e : escape_time_batch(cs, 2.0, 1000)) {
        if (e.escaped) {
            best = std::min(best, e.n);
        }
    }
    CHECK(best == 10);
}

TEST_CASE("escape_time is deterministic") {
    const Complex c{-0.7436, 0.1318};
    CHECK(escape_time(c, 2.0, 100000) == escape_time(c, 2.0, 100000));
}

TEST_CASE("escape time grows with R by a bounded count") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.2, 0.8);
    for (int i = 0; i < 100; ++i) {
        const Complex c{u(rng), u(rng)};
        const EscapeOutcome small = escape_time(c, 2.0, 20000);
        if (!small.escaped) {
            continue;
        }
        for (double R : {4.0, 100.0, 1e6}) {
            const EscapeOutcome big = escape_time(c, R, 20000);
            REQUIRE(big.escaped);
            CHECK(big.n >= small.n);
            // Past |z| = 2 the log-modulus roughly doubles each step.
            CHECK(static_cast<double>(big.n - small.n) <= 2.0 + std::log2(std::log(R) / std::log(2.0)));
        }
    }
}

TEST_CASE("iterate_jet: closed cases") {
    const OrbitJet a = iterate_jet(0.0, 0.0, 5);
    CHECK(a.z == Complex{});
    CHECK(a.dz_dz0 == Complex{});
    CHECK(is_finite(a.dz_dc));

    const OrbitJet b = iterate_jet(0.0, 1.0, 3);
    CHECK(b.z == Complex{1.0, 0.0});
    CHECK(b.dz_dz0 == Complex{8.0, 0.0});

    const OrbitJet c = iterate_jet(-1.0, 0.0, 2);
    CHECK(c.z == Complex{});
    CHECK(c.dz_dz0 == Complex{});
    CHECK(c.k == 2);
}

TEST_CASE("iterate_jet: dz_dz0 is the product of 2 z_j along the orbit") {
    const Complex c{-0.4, 0.3};
    const Complex z0{0.2, -0.1};
    Complex z = z0;
    Complex prod{1.0, 0.0};
    for (int i = 0; i < 12; ++i) {
        prod *= 2.0 * z;
        z = z * z + c;
    }
    const OrbitJet jet = iterate_jet(c, z0, 12);
    CHECK(std::abs(jet.dz_dz0 - prod) <= 1e-12 * std::abs(prod));
}

TEST_CASE("iterate_jet: partials match central differences") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 1e-7;
    int checked = 0;
    while (checked < 100) {
        const Complex c = 2.0 * Complex{u(rng), u(rng)} / std::sqrt(2.0);
        const Complex z0 = 2.0 * Complex{u(rng), u(rng)} / std::sqrt(2.0);
        const int k = 1 + static_cast<int>((u(rng) + 1.0) * 14.5);
        OrbitJet jet;
        try {
            jet = iterate_jet(c, z0, k);
        } catch (const NumericalError&) {
            continue;
        }
        // Differences are only meaningful while the orbit stays moderate.
        if (std::abs(jet.z) > 1e6 || std::abs(jet.dz_dz0) > 1e8 || std::abs(jet.dz_dz0) < 1e-6 ||
            std::abs(jet.dz_dc) < 1e-6) {
            continue;
        }
        const Wide wc{c}, wz{z0};
        const long double wh = h;
        const Complex fd_z = narrow((iterate_wide(wc, wz + wh, k) - iterate_wide(wc, wz - wh, k)) / (2.0L * wh));
        const Complex fd_c = narrow((iterate_wide(wc + wh, wz, k) - iterate_wide(wc - wh, wz, k)) / (2.0L * wh));
        CHECK(std::abs(fd_z - jet.dz_dz0) / std::abs(jet.dz_dz0) < 1e-6);
        CHECK(std::abs(fd_c - jet.dz_dc) / std::abs(jet.dz_dc) < 1e-6);
        ++checked;
    }
}

TEST_CASE("iterate_jet2: second partials match differences of first partials") {
    const Complex c{-0.3, 0.55};
    const Complex z0{0.1, 0.2};
    const double h = 1e-6;
    const OrbitJet2 j2 = iterate_jet2(c, z0, 9);
    const Complex fd_zz = (iterate_jet(c, z0 + h, 9).dz_dz0 - iterate_jet(c, z0 - h, 9).dz_dz0) / (2.0 * h);
    const Complex fd_zc = (iterate_jet(c + h, z0, 9).dz_dz0 - iterate_jet(c - h, z0, 9).dz_dz0) / (2.0 * h);
    CHECK(std::abs(fd_zz - j2.d2z_dz0dz0) < 1e-6 * std::abs(j2.d2z_dz0dz0));
    CHECK(std::abs(fd_zc - j2.d2z_dz0dc) < 1e-6 * std::abs(j2.d2z_dz0dc));
    const OrbitJet j1 = iterate_jet(c, z0, 9);
    CHECK(j2.z == j1.z);
    CHECK(j2.dz_dz0 == j1.dz_dz0);
    CHECK(j2.dz_dc == j1.dz_dc);
}

TEST_CASE("iterate_jet: divergence is reported") {
    CHECK_THROWS_AS(iterate_jet(10.0, 0.0, 2000), NumericalError);
    try {
        iterate_jet(10.0, 0.0, 2000);
    } catch (const NumericalError& e) {
        CHECK(e.kind() == Failure::Divergence);
    }
    CHECK_THROWS_AS(iterate_jet(0.0, 0.0, 0), PreconditionError);
}
