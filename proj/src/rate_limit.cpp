#include "digest/rate_limit.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace digest {

RateLimiter::RateLimiter(double rps) {
    if (rps <= 0) throw std::invalid_argument("rate limit must be positive");
    interval_ = std::chrono::nanoseconds{std::llround(1e9 / rps)};
}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        slot = next_ > now ? next_ : now;
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

}  // namespace digest
