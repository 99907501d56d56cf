#include "parabolica/types.hpp"

#include <numeric>

#include "parabolica/errors.hpp"

namespace parabolica {

Angle::Angle(std::int64_t num, std::int64_t den) {
    if (den <= 0) {
        throw PreconditionError("Angle", "denominator must be positive");
    }
    num %= den;
    if (num < 0) {
        num += den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

double Angle::doubled(std::uint64_t doublings) const {
    // 2^doublings mod den by square-and-multiply; den is small enough that
    // products fit in unsigned __int128.
    using u128 = unsigned __int128;
    const auto den = static_cast<std::uint64_t>(den_);
    std::uint64_t result = 1 % den;
    std::uint64_t base = 2 % den;
    while (doublings > 0) {
        if (doublings & 1U) {
            result = static_cast<std::uint64_t>(static_cast<u128>(result) * base % den);
        }
        base = static_cast<std::uint64_t>(static_cast<u128>(base) * base % den);
        doublings >>= 1U;
    }
    const auto num = static_cast<std::uint64_t>(static_cast<u128>(result) * static_cast<std::uint64_t>(num_) % den);
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace parabolica
