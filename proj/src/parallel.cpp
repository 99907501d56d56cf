#include "parabolica/parallel.hpp"

#include <cstdlib>
#include <string>

namespace parabolica {

std::size_t default_thread_count() {
    if (const char* env = std::getenv("PARABOLICA_THREADS"); env != nullptr && *env != '\0') {
        try {
            const long value = std::stol(env);
            if (value > 0) {
                return static_cast<std::size_t>(value);
            }
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::size_t resolve_threads(std::size_t requested) {
    return requested == 0 ? default_thread_count() : requested;
}

}  // namespace parabolica
