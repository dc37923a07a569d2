#pragma once

#include <stdexcept>
#include <string>

namespace digest {

// Base for all pipeline errors; the CLI maps subtypes onto exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Transport / API failures raised by the ingest client.
class AuthError : public Error {
public:
    using Error::Error;
};

class RateLimitExhausted : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class MalformedResponse : public Error {
public:
    using Error::Error;
};

class StorageError : public Error {
public:
    using Error::Error;
};

class OversizedArticle : public Error {
public:
    OversizedArticle(std::string article_id, long estimate, long budget)
        : Error("article '" + article_id + "' alone estimates " + std::to_string(estimate) +
                " tokens, exceeding the per-request budget of " + std::to_string(budget)),
          article_id_(std::move(article_id)) {}

    const std::string& article_id() const { return article_id_; }

private:
    std::string article_id_;
};

class EmptyDocument : public Error {
public:
    using Error::Error;
};

class MissingSectionError : public Error {
public:
    explicit MissingSectionError(const std::string& kind, const std::string& detail = "")
        : Error("missing section: " + kind + (detail.empty() ? "" : " (" + detail + ")")),
          kind_(kind) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

class DuplicateSectionError : public Error {
public:
    explicit DuplicateSectionError(const std::string& kind)
        : Error("duplicate section: " + kind), kind_(kind) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

class RenderError : public Error {
public:
    using Error::Error;
};

}  // namespace digest
