#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace digest {

// status == 0 means the request never produced an HTTP status (connect failure,
// timeout, ...); body then carries the transport-level detail.
struct HttpResponse {
    int status = 0;
    std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct RequestLogEntry {
    std::string method;
    std::string url;
    std::chrono::steady_clock::time_point at;
};

// Implementations must be safe for concurrent use.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url) = 0;
    virtual HttpResponse post(const std::string& url, const std::string& body,
                              const HttpHeaders& headers) = 0;
};

// Real network transport (http/https). One connection per call.
class LiveTransport : public HttpTransport {
public:
    explicit LiveTransport(std::chrono::seconds timeout = std::chrono::seconds{30});

    HttpResponse get(const std::string& url) override;
    HttpResponse post(const std::string& url, const std::string& body,
                      const HttpHeaders& headers) override;

private:
    std::chrono::seconds timeout_;
};

// Replays recorded request/response pairs from a directory of JSON files.
// Each file holds one object (or an array of objects) with keys
// "url", "status", "body"; "body" may be a string or an inline JSON value.
// Requests are matched by exact URL; an unmatched URL throws TransportError.
class ReplayTransport : public HttpTransport {
public:
    explicit ReplayTransport(const std::filesystem::path& fixture_dir);

    HttpResponse get(const std::string& url) override;
    HttpResponse post(const std::string& url, const std::string& body,
                      const HttpHeaders& headers) override;

    std::vector<RequestLogEntry> requests() const;
    size_t recorded_count() const { return responses_.size(); }

private:
    HttpResponse lookup(const std::string& method, const std::string& url);

    std::unordered_map<std::string, HttpResponse> responses_;
    mutable std::mutex mutex_;
    std::vector<RequestLogEntry> log_;
};

// Percent-encodes everything outside [A-Za-z0-9-._~*@:/+=]; the kept set
// matches what the OpenAlex query grammar uses literally.
std::string url_encode_component(const std::string& value);

}  // namespace digest
