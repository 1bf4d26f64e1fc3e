#include "bounce/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace bounce {

int thread_count()
{
    if (const char *env = std::getenv("BOUNCE_LAB_THREADS")) {
        int n = 0;
        const char *end = env + std::strlen(env);
        auto [ptr, ec] = std::from_chars(env, end, n);
        if (ec == std::errc() && ptr == end && n > 0) {
            return n;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace bounce
