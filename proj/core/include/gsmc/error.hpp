#pragma once

#include <stdexcept>
#include <string>

namespace gsmc {

// Error classes map 1:1 to CLI exit codes (see exit_code below).
enum class ErrorClass {
    schema,     // malformed input file structure (PLY header, missing property)
    data,       // invalid values inside an otherwise well-formed input
    config,     // invalid parameter / option combination
    shape,      // dimension mismatch between pipeline stages
    backend,    // external codec command failure
    container,  // malformed or inconsistent container/bitstream
    integrity,  // verified-lossless data failed its roundtrip check
    io,         // filesystem errors
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string message)
        : std::runtime_error(std::move(message)), cls_(cls) {}

    ErrorClass cls() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

struct SchemaError : Error {
    explicit SchemaError(std::string m) : Error(ErrorClass::schema, std::move(m)) {}
};
struct DataError : Error {
    explicit DataError(std::string m) : Error(ErrorClass::data, std::move(m)) {}
};
struct ConfigError : Error {
    explicit ConfigError(std::string m) : Error(ErrorClass::config, std::move(m)) {}
};
struct ShapeError : Error {
    explicit ShapeError(std::string m) : Error(ErrorClass::shape, std::move(m)) {}
};
struct BackendError : Error {
    explicit BackendError(std::string m) : Error(ErrorClass::backend, std::move(m)) {}
};
struct ContainerError : Error {
    explicit ContainerError(std::string m) : Error(ErrorClass::container, std::move(m)) {}
};
struct IntegrityError : Error {
    explicit IntegrityError(std::string m) : Error(ErrorClass::integrity, std::move(m)) {}
};
struct IoError : Error {
    explicit IoError(std::string m) : Error(ErrorClass::io, std::move(m)) {}
};

inline int exit_code(ErrorClass cls) noexcept {
    switch (cls) {
        case ErrorClass::schema:    return 2;
        case ErrorClass::data:      return 3;
        case ErrorClass::config:    return 4;
        case ErrorClass::shape:     return 5;
        case ErrorClass::backend:   return 6;
        case ErrorClass::container: return 7;
        case ErrorClass::integrity: return 8;
        case ErrorClass::io:        return 9;
    }
    return 1;
}

inline const char* class_name(ErrorClass cls) noexcept {
    switch (cls) {
        case ErrorClass::schema:    return "schema";
        case ErrorClass::data:      return "data";
        case ErrorClass::config:    return "config";
        case ErrorClass::shape:     return "shape";
        case ErrorClass::backend:   return "backend";
        case ErrorClass::container: return "container";
        case ErrorClass::integrity: return "integrity";
        case ErrorClass::io:        return "io";
    }
    return "unknown";
}

} // namespace gsmc
