#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace waveforge {

/// Polynomial nonlinearity f(y) = sum_j c_j y^j.
class Nonlinearity {
public:
    Nonlinearity() = default;
    explicit Nonlinearity(std::vector<double> coeffs);

    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    int degree() const noexcept { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
    // Degree of f'' (0 when f'' vanishes identically).
    int second_derivative_degree() const noexcept { return degree() >= 2 ? degree() - 2 : 0; }
    bool is_affine() const noexcept { return degree() <= 1; }

    double value(double y) const;
    double derivative(double y) const;
    double second_derivative(double y) const;
    /// F(y) = int_0^y f(s) ds
    double antiderivative(double y) const;

private:
    std::vector<double> coeffs_;
};

inline double f_eval(const Nonlinearity& f, double y) { return f.value(y); }
inline double f_prime(const Nonlinearity& f, double y) { return f.derivative(y); }
inline double f_second(const Nonlinearity& f, double y) { return f.second_derivative(y); }
inline double F_eval(const Nonlinearity& f, double y) { return f.antiderivative(y); }

/// Piecewise-constant plateaus passed through a first-order lag of time
/// constant tau. Zero before the first breakpoint.
struct ReferenceSignal {
    struct Plateau {
        double time;
        double value;
    };
    std::vector<Plateau> plateaus;
    double tau = 1.0;

    double operator()(double t) const;
};

inline double zr_eval(const ReferenceSignal& sig, double t) { return sig(t); }

/// Initial deviation W(0) = (w1, w2).
struct InitialCondition {
    enum class Kind {
        Zero,          // the steady state itself
        Ramp,          // (2 alpha/5 x, -2/(5L) x) times scale
        Linear,        // (slope1 x, slope2 x)
        RandomModes,   // random conjugate-symmetric modal coefficients of size scale
    };
    Kind kind = Kind::Ramp;
    double scale = 1.0;
    double slope1 = 0.0;
    double slope2 = 0.0;

    static InitialCondition parse(const std::string& text);
    std::string describe() const;
};

struct DelayOptions {
    std::vector<int> k_values{0, 5, 20};
    int n_min = 0;
    int n_max = 10;
    double beta = 0.0;
};

struct ProblemConfig {
    // [problem]
    double L = 1.0;
    double alpha = 1.1;
    Nonlinearity f;
    double z_e = 0.0;
    // [discretization]
    int grid_points = 1001;
    int n_modes = 10;
    int n_tail = 10;
    std::optional<int> n0;  // nullopt: detect from the spectrum
    int substeps = 8;       // RK4 steps per grid interval for all spatial shooting
    double shoot_tol = 1e-12;
    // [control]
    std::vector<std::complex<double>> poles{-0.5, -1.0, -1.5};
    // [simulation]
    double dt = 1e-3;
    double T = 40.0;
    double zeta0 = 0.0;
    double v0 = 0.0;
    InitialCondition ic;
    ReferenceSignal zr;
    int record_every = 1;
    int snapshots = 10;
    int fdm_refine = 1;
    double fdm_cfl = 0.5;
    unsigned long seed = 1;
    // [delay]
    DelayOptions delay;
};

struct ValidationReport {
    struct Check {
        std::string name;
        bool passed;
        std::string detail;
    };
    std::vector<Check> checks;

    bool ok() const;
    std::vector<std::string> failures() const;
};

/// (1/(2L)) log((alpha-1)/(alpha+1)), the common real part of the
/// velocity-damped linear spectrum.
double damping_rate(double L, double alpha);

ValidationReport validate(const ProblemConfig& config);
/// Throws ConfigError listing every failed check.
void require_valid(const ProblemConfig& config);

/// Parses the INI-style configuration text. Missing and malformed keys are
/// collected and reported together in a ConfigError.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

std::vector<std::complex<double>> parse_pole_list(const std::string& text);

}  // namespace waveforge
