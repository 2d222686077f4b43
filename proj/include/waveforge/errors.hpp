#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace waveforge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Non-finite value produced by a fixed-step integrator.
class PropagationError : public Error {
public:
    PropagationError(const std::string& what, long step) : Error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, std::complex<double> last, double residual)
        : Error(what), last_(last), residual_(residual) {}
    std::complex<double> last_iterate() const noexcept { return last_; }
    double residual() const noexcept { return residual_; }

private:
    std::complex<double> last_;
    double residual_;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// Lyapunov operator singular: the matrix has eigenvalues summing to zero.
class NotHurwitzError : public Error {
public:
    using Error::Error;
};

// Steady-state shooting left every bounded region before x = L.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double abscissa) : Error(what), abscissa_(abscissa) {}
    double abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

class SpectrumError : public Error {
public:
    using Error::Error;
};

class ControlDesignError : public Error {
public:
    ControlDesignError(const std::string& stage, const std::string& what)
        : Error(stage + ": " + what), stage_(stage) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace waveforge
