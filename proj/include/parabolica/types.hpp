#pragma once

#include <complex>
#include <cstdint>
#include <numbers>

namespace parabolica {

/// Binary64 complex scalar used for parameters, orbit points and multipliers.
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// |z|^2 without the square root.
inline double norm2(Complex z) { return z.real() * z.real() + z.imag() * z.imag(); }

/// Rational external angle num/den in turns, kept reduced with 0 <= num < den.
class Angle {
public:
    Angle() = default;
    Angle(std::int64_t num, std::int64_t den);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double turns() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// frac(2^doublings * num/den), computed exactly in integers.
    double doubled(std::uint64_t doublings) const;

    /// The conjugate angle -num/den (mod 1).
    Angle conjugate() const { return Angle(-num_, den_); }

    friend bool operator==(const Angle&, const Angle&) = default;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace parabolica
