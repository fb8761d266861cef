#pragma once

#include <stdexcept>
#include <string>

namespace converter {

/// Base class for all converter errors. Carries a stable kind string so
/// callers can branch without dynamic_cast chains.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& m) : Error("ParseError", m) {}
};

class InvariantError : public Error {
public:
    explicit InvariantError(const std::string& m) : Error("InvariantError", m) {}
};

class XmlError : public Error {
public:
    explicit XmlError(const std::string& m) : Error("XmlError", m) {}
};

class SchemaMismatch : public Error {
public:
    explicit SchemaMismatch(const std::string& m) : Error("SchemaMismatch", m) {}
};

class UnknownSchema : public Error {
public:
    explicit UnknownSchema(const std::string& m) : Error("UnknownSchema", m) {}
};

class NetworkError : public Error {
public:
    explicit NetworkError(const std::string& m) : Error("NetworkError", m) {}
};

/// OAI-PMH protocol failure. `code` holds the protocol error code when the
/// server reported one (e.g. "badResumptionToken"), empty otherwise.
class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& m, std::string code = "")
        : Error("ProtocolError", m), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& m) : Error("IoError", m) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& m) : Error("ConfigError", m) {}
};

class UnknownTerm : public Error {
public:
    explicit UnknownTerm(const std::string& m) : Error("UnknownTerm", m) {}
};

class InvalidBase : public Error {
public:
    explicit InvalidBase(const std::string& m) : Error("InvalidBase", m) {}
};

class TooLarge : public Error {
public:
    explicit TooLarge(const std::string& m) : Error("TooLarge", m) {}
};

}  // namespace converter
