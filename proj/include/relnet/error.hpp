#pragma once

#include <stdexcept>
#include <string>

namespace relnet {

/// Malformed input data (bad domain, bad file contents). Carries file/line
/// context when the source is a file.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(std::string message)
        : std::runtime_error(std::move(message)) {}

    ParseError(const std::string& path, std::size_t line, const std::string& message)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + message),
          path_(path),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_ = 0;
};

/// Invalid configuration (hyperparameter out of range, incompatible options).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

/// Iterative solver hit its iteration cap before the residual dropped below
/// tolerance. Carries the last residual for diagnostics.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_residual, int iterations)
        : std::runtime_error(what + " (residual " + std::to_string(last_residual) + " after "
                             + std::to_string(iterations) + " iterations)"),
          last_residual_(last_residual),
          iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

} // namespace relnet
