#pragma once

#include <chrono>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "digest/http.hpp"

namespace digest::testing {

// Returns a programmed sequence of responses regardless of URL, recording
// every request with a timestamp.
class ScriptedTransport : public HttpTransport {
public:
    explicit ScriptedTransport(std::vector<HttpResponse> script) : script_(std::move(script)) {}

    HttpResponse get(const std::string& url) override { return next("GET", url, ""); }

    HttpResponse post(const std::string& url, const std::string& body,
                      const HttpHeaders&) override {
        return next("POST", url, body);
    }

    size_t call_count() const {
        std::lock_guard lock(mutex_);
        return calls_.size();
    }

    struct Call {
        std::string method;
        std::string url;
        std::string body;
        std::chrono::steady_clock::time_point at;
    };

    std::vector<Call> calls() const {
        std::lock_guard lock(mutex_);
        return calls_;
    }

    double seconds_between(size_t i, size_t j) const {
        std::lock_guard lock(mutex_);
        return std::chrono::duration<double>(calls_.at(j).at - calls_.at(i).at).count();
    }

private:
    HttpResponse next(const char* method, const std::string& url, const std::string& body) {
        std::lock_guard lock(mutex_);
        calls_.push_back({method, url, body, std::chrono::steady_clock::now()});
        if (calls_.size() > script_.size()) {
            throw std::logic_error("ScriptedTransport: script exhausted at call " +
                                   std::to_string(calls_.size()));
        }
        return script_[calls_.size() - 1];
    }

    std::vector<HttpResponse> script_;
    mutable std::mutex mutex_;
    std::vector<Call> calls_;
};

}  // namespace digest::testing
