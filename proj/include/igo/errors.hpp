#pragma once

#include <stdexcept>
#include <string>

namespace igo {

// Base for every error thrown by the library. `module_name` identifies the
// originating subsystem so the CLI can report it in its one-line diagnostic.
class Error : public std::runtime_error {
public:
    Error(std::string module_name, const std::string& what)
        : std::runtime_error(what), module_(std::move(module_name)) {}

    const std::string& module_name() const noexcept { return module_; }

private:
    std::string module_;
};

struct DivergedTrajectory : Error {
    explicit DivergedTrajectory(const std::string& w) : Error("sde", w) {}
};

struct InvalidCapture : Error {
    explicit InvalidCapture(const std::string& w) : Error("sde", w) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& w) : Error("tensor", w) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error("tensor", w) {}
};

struct StaleTape : Error {
    explicit StaleTape(const std::string& w) : Error("tensor", w) {}
};

struct OddDim : Error {
    explicit OddDim(const std::string& w) : Error("tensor", w) {}
};

struct ZeroVariance : Error {
    explicit ZeroVariance(const std::string& w) : Error("score", w) {}
};

struct DegenerateDiffusion : Error {
    explicit DegenerateDiffusion(const std::string& w) : Error("score", w) {}
};

struct EmptyIterateList : Error {
    explicit EmptyIterateList(const std::string& w) : Error("score", w) {}
};

struct DivergedTraining : Error {
    explicit DivergedTraining(const std::string& w) : Error("score", w) {}
};

struct DivergedSample : Error {
    explicit DivergedSample(const std::string& w) : Error("sampling", w) {}
};

struct StepSizeUnderflow : Error {
    explicit StepSizeUnderflow(const std::string& w) : Error("sampling", w) {}
};

struct ZeroVector : Error {
    explicit ZeroVector(const std::string& w) : Error("downstream", w) {}
};

struct CheckpointError : Error {
    explicit CheckpointError(const std::string& w) : Error("checkpoint", w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("cli", w) {}
};

struct VersionMismatch : Error {
    explicit VersionMismatch(const std::string& w) : Error("cli", w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error("cli", w) {}
};

}  // namespace igo
