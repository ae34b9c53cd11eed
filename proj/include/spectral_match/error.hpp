#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spectral_match {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed mesh or matrix file. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DegenerateFaceError : public Error {
public:
    DegenerateFaceError(std::size_t face, const std::string& message)
        : Error(message), face_(face) {}

    std::size_t face() const noexcept { return face_; }

private:
    std::size_t face_;
};

class DisconnectedGraphError : public Error {
public:
    explicit DisconnectedGraphError(std::size_t components)
        : Error("graph is disconnected: " + std::to_string(components) + " components"),
          components_(components) {}

    std::size_t components() const noexcept { return components_; }

private:
    std::size_t components_;
};

/// The iterative eigensolver ran out of iterations. Residuals are the last achieved values.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, std::vector<double> residuals)
        : Error(message), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

/// Wraps an error raised inside one stage of the matching pipeline.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message)
        : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace spectral_match
