#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>

namespace digest {

// Exponential backoff, retried on 429, 5xx and transport failures only.
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_delay{1000};
    double multiplier = 2.0;
    double jitter = 0.2;  // delay scaled by uniform(1 - jitter, 1 + jitter)
    std::optional<std::uint64_t> seed;
};

bool retryable_status(int status);

// Safe for concurrent callers sharing one client.
class Backoff {
public:
    explicit Backoff(const RetryPolicy& policy);

    // Delay to sleep after the given failed attempt (1-based).
    std::chrono::milliseconds delay_after_attempt(int attempt);

private:
    RetryPolicy policy_;
    std::mutex mutex_;
    std::mt19937_64 rng_;
};

}  // namespace digest
