#include "digest/http.hpp"

#include <algorithm>
#include <fstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "digest/errors.hpp"

namespace digest {

namespace {

// Splits "https://host[:port]/path?query" into origin and path-with-query.
std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError("unsupported URL (no scheme): " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

LiveTransport::LiveTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse LiveTransport::get(const std::string& url) {
    const auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_.count(), 0);
    client.set_read_timeout(timeout_.count(), 0);
    client.set_follow_location(true);
    auto res = client.Get(path);
    if (!res) return HttpResponse{0, httplib::to_string(res.error())};
    return HttpResponse{res->status, res->body};
}

HttpResponse LiveTransport::post(const std::string& url, const std::string& body,
                                 const HttpHeaders& headers) {
    const auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_.count(), 0);
    client.set_read_timeout(timeout_.count(), 0);
    httplib::Headers hl;
    std::string content_type = "application/json";
    for (const auto& [k, v] : headers) {
        if (k == "Content-Type") {
            content_type = v;
        } else {
            hl.emplace(k, v);
        }
    }
    auto res = client.Post(path, hl, body, content_type);
    if (!res) return HttpResponse{0, httplib::to_string(res.error())};
    return HttpResponse{res->status, res->body};
}

ReplayTransport::ReplayTransport(const std::filesystem::path& fixture_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(fixture_dir)) {
        throw TransportError("fixture directory not found: " + fixture_dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(fixture_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    auto add_pair = [this](const nlohmann::json& obj) {
        if (!obj.is_object() || !obj.contains("url") || !obj.contains("status")) return;
        HttpResponse resp;
        resp.status = obj.at("status").get<int>();
        if (obj.contains("body")) {
            const auto& body = obj.at("body");
            resp.body = body.is_string() ? body.get<std::string>() : body.dump();
        }
        responses_[obj.at("url").get<std::string>()] = std::move(resp);
    };

    for (const auto& file : files) {
        std::ifstream in(file);
        nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded()) {
            throw TransportError("unparseable fixture file: " + file.string());
        }
        if (doc.is_array()) {
            for (const auto& obj : doc) add_pair(obj);
        } else {
            add_pair(doc);
        }
    }
}

HttpResponse ReplayTransport::lookup(const std::string& method, const std::string& url) {
    std::lock_guard lock(mutex_);
    log_.push_back({method, url, std::chrono::steady_clock::now()});
    auto it = responses_.find(url);
    if (it == responses_.end()) {
        throw TransportError("no recorded response for " + method + " " + url);
    }
    return it->second;
}

HttpResponse ReplayTransport::get(const std::string& url) { return lookup("GET", url); }

HttpResponse ReplayTransport::post(const std::string& url, const std::string&,
                                   const HttpHeaders&) {
    return lookup("POST", url);
}

std::vector<RequestLogEntry> ReplayTransport::requests() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::string url_encode_component(const std::string& value) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(value.size());
    for (unsigned char c : value) {
        const bool keep = std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' ||
                          c == '*' || c == '@' || c == ':' || c == '/' || c == '+' || c == '=';
        if (keep) {
            out.push_back(char(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
    }
    return out;
}

}  // namespace digest
