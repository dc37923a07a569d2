#include "digest/retry.hpp"

#include <cmath>

namespace digest {

bool retryable_status(int status) {
    return status == 0 || status == 429 || (status >= 500 && status < 600);
}

Backoff::Backoff(const RetryPolicy& policy)
    : policy_(policy), rng_(policy.seed ? *policy.seed : std::random_device{}()) {}

std::chrono::milliseconds Backoff::delay_after_attempt(int attempt) {
    if (attempt < 1) attempt = 1;
    double base = double(policy_.initial_delay.count());
    for (int i = 1; i < attempt; ++i) base *= policy_.multiplier;
    // uniform in [0, 1) from the top 53 bits; keeps results identical for a fixed seed
    double u;
    {
        std::lock_guard lock(mutex_);
        u = double(rng_() >> 11) * 0x1.0p-53;
    }
    const double factor = 1.0 - policy_.jitter + 2.0 * policy_.jitter * u;
    return std::chrono::milliseconds{std::llround(base * factor)};
}

}  // namespace digest
