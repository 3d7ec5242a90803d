#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slads {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated an operation's precondition (duplicate location, bad params, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ContractError {
public:
    using ContractError::ContractError;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file content. Carries the byte offset where parsing stopped.
class ParseError : public IoError {
public:
    enum class Kind { malformed_header, truncated_payload, unsupported_depth };

    ParseError(Kind kind, std::size_t offset, const std::string& what)
        : IoError(what + " (at byte offset " + std::to_string(offset) + ")"),
          kind_(kind), offset_(offset) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

class ModelFileError : public IoError {
public:
    enum class Kind { bad_magic, version_mismatch, checksum, kind_mismatch, malformed };

    ModelFileError(Kind kind, const std::string& what) : IoError(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Non-finite values or divergence inside a numerical routine.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace slads
