#pragma once

#include <chrono>
#include <mutex>

namespace digest {

// Paces callers to at most `rps` acquisitions per second (token bucket with a
// burst of one, so n acquisitions always span at least (n-1)/rps seconds).
// Shared gate: safe to call from any number of threads.
class RateLimiter {
public:
    explicit RateLimiter(double rps);

    void acquire();

private:
    std::chrono::nanoseconds interval_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point next_{};
};

}  // namespace digest
