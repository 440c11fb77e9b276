#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wrac {

/// Base class for all errors raised by the pipeline.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input text is not valid UTF-8.
class EncodingError : public Error {
public:
    explicit EncodingError(std::size_t byte_offset)
        : Error("invalid UTF-8 at byte offset " + std::to_string(byte_offset)),
          byte_offset(byte_offset) {}

    std::size_t byte_offset;
};

/// A document parsed to zero units.
class NoUnitsError : public Error {
public:
    explicit NoUnitsError(const std::string& doc_id) : Error("no units: " + doc_id) {}
};

/// Invalid configuration (bad flag values, window <= overlap, unknown method).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent input data (duplicate ids, empty corpus, bad records).
class DataError : public Error {
public:
    using Error::Error;
};

/// A plan was paired with a document it does not belong to.
class IdentityError : public Error {
public:
    using Error::Error;
};

/// Base for defects in a model-produced chunk plan.
class PlanError : public Error {
public:
    PlanError(const std::string& what, std::string raw) : Error(what), raw(std::move(raw)) {}

    /// Raw model output, kept for run logs.
    std::string raw;
};

/// Plan response is not parseable JSON.
class PlanParseError : public PlanError {
public:
    explicit PlanParseError(std::string raw_text)
        : PlanError("unparseable plan response", std::move(raw_text)) {}
};

/// Plan response parsed but does not have the {"chunks": [[...]]} shape.
class PlanShapeError : public PlanError {
public:
    explicit PlanShapeError(std::string raw_text)
        : PlanError("plan response has wrong shape", std::move(raw_text)) {}
};

/// No model response available: transport failed and the replay cache has no entry.
class PlannerUnavailable : public Error {
public:
    using Error::Error;
};

/// HTTP request failed or the endpoint returned a non-success status.
class TransportError : public Error {
public:
    TransportError(const std::string& what, int status) : Error(what), status(status) {}

    int status;  // 0 when the connection itself failed
};

/// Agentic response contains no [HEAD]...[/HEAD] markers.
class AgenticParseError : public Error {
public:
    explicit AgenticParseError(std::string raw_text)
        : Error("agentic response has no [HEAD] markers"), raw(std::move(raw_text)) {}

    std::string raw;
};

}  // namespace wrac
