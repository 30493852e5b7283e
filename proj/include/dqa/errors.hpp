#pragma once

#include <stdexcept>
#include <string>

namespace dqa {

struct RegularityViolation : std::runtime_error {
    explicit RegularityViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientGrid : std::runtime_error {
    explicit InsufficientGrid(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct CapExceeded : std::runtime_error {
    explicit CapExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoSolutionFound : std::runtime_error {
    explicit NoSolutionFound(const std::string& msg) : std::runtime_error(msg) {}
};

struct CertificateViolation : std::runtime_error {
    explicit CertificateViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateSystem : std::runtime_error {
    explicit DegenerateSystem(const std::string& msg) : std::runtime_error(msg) {}
};

struct RankOutOfRange : std::out_of_range {
    explicit RankOutOfRange(const std::string& msg) : std::out_of_range(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ScriptError : std::runtime_error {
    explicit ScriptError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dqa
