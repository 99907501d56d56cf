#include "parabolica/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "parabolica/errors.hpp"
#include "parabolica/parallel.hpp"

namespace parabolica {
namespace {

void check_escape_args(double R, std::uint64_t max_iter, std::string_view op) {
    if (!(R >= 2.0) || !(R <= 1e150)) {
        throw PreconditionError(op, "escape radius must lie in [2, 1e150], got " + std::to_string(R));
    }
    if (max_iter < 1) {
        throw PreconditionError(op, "iteration cap must be at least 1");
    }
}

void check_finite(Complex c, std::string_view op) {
    if (!is_finite(c)) {
        throw PreconditionError(op, "non-finite complex input");
    }
}

// One step of z -> z^2 + c written out in reals. Every code path that counts
// iterations uses exactly this sequence of operations.
inline void step(double& x, double& y, double cr, double ci) {
    const double x2 = x * x;
    const double y2 = y * y;
    const double nx = x2 - y2 + cr;
    y = 2.0 * x * y + ci;
    x = nx;
}

inline bool outside(double x, double y, double R2) { return x * x + y * y > R2; }

constexpr int kLanes = 8;
constexpr std::uint64_t kBlock = 8;

}  // namespace

EscapeOutcome escape_time(Complex c, double R, std::uint64_t max_iter) {
    check_escape_args(R, max_iter, "escape_time");
    check_finite(c, "escape_time");
    const double R2 = R * R;
    const double cr = c.real();
    const double ci = c.imag();
    double x = 0.0;
    double y = 0.0;
    for (std::uint64_t n = 1; n <= max_iter; ++n) {
        step(x, y, cr, ci);
        if (outside(x, y, R2)) {
            return {true, n, {x, y}};
        }
    }
    return {false, max_iter, {x, y}};
}

void escape_time_block(std::span<const Complex> cs, double R, std::uint64_t max_iter,
                       std::span<EscapeOutcome> out) {
    const double R2 = R * R;
    for (std::size_t base = 0; base < cs.size(); base += kLanes) {
        const int live = static_cast<int>(std::min<std::size_t>(kLanes, cs.size() - base));
        std::array<double, kLanes> x{}, y{}, sx{}, sy{}, cr{}, ci{};
        std::array<bool, kLanes> done{};
        for (int l = 0; l < kLanes; ++l) {
            if (l < live) {
                cr[l] = cs[base + l].real();
                ci[l] = cs[base + l].imag();
            } else {
                done[l] = true;
            }
        }
        int remaining = live;
        std::uint64_t n = 0;
        while (remaining > 0 && n < max_iter) {
            const std::uint64_t nb = std::min(kBlock, max_iter - n);
            sx = x;
            sy = y;
            for (std::uint64_t s = 0; s < nb; ++s) {
                for (int l = 0; l < kLanes; ++l) {
                    step(x[l], y[l], cr[l], ci[l]);
                }
            }
            bool any = false;
            for (int l = 0; l < kLanes; ++l) {
                // Escaped lanes may have overflowed to inf/NaN inside the block.
                any |= !done[l] && !(x[l] * x[l] + y[l] * y[l] <= R2);
            }
            if (any) {
                // Replay the block one step at a time from the saved state.
                for (int l = 0; l < kLanes; ++l) {
                    if (done[l]) {
                        continue;
                    }
                    double xx = sx[l];
                    double yy = sy[l];
                    for (std::uint64_t s = 1; s <= nb; ++s) {
                        step(xx, yy, cr[l], ci[l]);
                        if (outside(xx, yy, R2)) {
                            out[base + l] = {true, n + s, {xx, yy}};
                            done[l] = true;
                            --remaining;
                            break;
                        }
                    }
                }
            }
            n += nb;
        }
        for (int l = 0; l < live; ++l) {
            if (!done[l]) {
                out[base + l] = {false, max_iter, {x[l], y[l]}};
            }
        }
    }
}

std::vector<EscapeOutcome> escape_time_batch(std::span<const Complex> cs, double R, std::uint64_t max_iter,
                                             std::size_t threads) {
    check_escape_args(R, max_iter, "escape_time_batch");
    for (const Complex& c : cs) {
        check_finite(c, "escape_time_batch");
    }
    std::vector<EscapeOutcome> out(cs.size());
    constexpr std::size_t kChunk = 64;
    const std::size_t chunks = (cs.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, 1, [&](std::size_t chunk) {
        const std::size_t begin = chunk * kChunk;
        const std::size_t len = std::min(kChunk, cs.size() - begin);
        escape_time_block(cs.subspan(begin, len), R, max_iter, std::span(out).subspan(begin, len));
    });
    return out;
}

OrbitJet iterate_jet(Complex c, Complex z0, int k) {
    if (k < 1) {
        throw PreconditionError("iterate_jet", "k must be at least 1");
    }
    check_finite(c, "iterate_jet");
    check_finite(z0, "iterate_jet");
    OrbitJet jet{z0, {1.0, 0.0}, {0.0, 0.0}, 0};
    for (int i = 0; i < k; ++i) {
        const Complex two_z = 2.0 * jet.z;
        jet.dz_dz0 = two_z * jet.dz_dz0;
        jet.dz_dc = two_z * jet.dz_dc + 1.0;
        jet.z = jet.z * jet.z + c;
        jet.k = i + 1;
        if (!(std::abs(jet.z) <= kJetDivergenceBound)) {
            throw NumericalError(Failure::Divergence, "iterate_jet",
                                 "orbit left |z| <= 1e150 at step " + std::to_string(jet.k));
        }
    }
    return jet;
}

OrbitJet2 iterate_jet2(Complex c, Complex z0, int k) {
    if (k < 1) {
        throw PreconditionError("iterate_jet2", "k must be at least 1");
    }
    check_finite(c, "iterate_jet2");
    check_finite(z0, "iterate_jet2");
    OrbitJet2 jet{};
    jet.z = z0;
    for (int i = 0; i < k; ++i) {
        const Complex z = jet.z;
        const Complex dz = jet.dz_dz0;
        const Complex dc = jet.dz_dc;
        jet.d2z_dz0dz0 = 2.0 * (dz * dz + z * jet.d2z_dz0dz0);
        jet.d2z_dz0dc = 2.0 * (dc * dz + z * jet.d2z_dz0dc);
        jet.dz_dz0 = 2.0 * z * dz;
        jet.dz_dc = 2.0 * z * dc + 1.0;
        jet.z = z * z + c;
        jet.k = i + 1;
        if (!(std::abs(jet.z) <= kJetDivergenceBound)) {
            throw NumericalError(Failure::Divergence, "iterate_jet2",
                                 "orbit left |z| <= 1e150 at step " + std::to_string(jet.k));
        }
    }
    return jet;
}

}  // namespace parabolica
