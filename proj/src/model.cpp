#include "waveforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "waveforge/errors.hpp"

namespace waveforge {

Nonlinearity::Nonlinearity(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Nonlinearity::value(double y) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * y + *it;
    return acc;
}

double Nonlinearity::derivative(double y) const {
    double acc = 0.0;
    for (std::size_t j = coeffs_.size(); j-- > 1;) acc = acc * y + static_cast<double>(j) * coeffs_[j];
    return acc;
}

double Nonlinearity::second_derivative(double y) const {
    double acc = 0.0;
    for (std::size_t j = coeffs_.size(); j-- > 2;) {
        acc = acc * y + static_cast<double>(j * (j - 1)) * coeffs_[j];
    }
    return acc;
}

double Nonlinearity::antiderivative(double y) const {
    double acc = 0.0;
    for (std::size_t j = coeffs_.size(); j-- > 0;) acc = acc * y + coeffs_[j] / static_cast<double>(j + 1);
    return acc * y;
}

double ReferenceSignal::operator()(double t) const {
    double out = 0.0;
    double previous = 0.0;
    for (const auto& p : plateaus) {
        if (t < p.time) break;
        const double jump = p.value - previous;
        previous = p.value;
        out += tau > 0.0 ? jump * (1.0 - std::exp(-(t - p.time) / tau)) : jump;
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).size() != 0) throw std::invalid_argument("trailing characters in '" + s + "'");
    return v;
}

int to_int(const std::string& s) {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (trim(s.substr(used)).size() != 0) throw std::invalid_argument("trailing characters in '" + s + "'");
    return v;
}

std::complex<double> parse_complex(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) throw std::invalid_argument("empty pole");
    if (s.back() != 'i') return {to_double(s), 0.0};
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split_at = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split_at = i;
            break;
        }
    }
    auto imag_of = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return to_double(t);
    };
    if (split_at == std::string::npos) return {0.0, imag_of(body)};
    return {to_double(body.substr(0, split_at)), imag_of(body.substr(split_at))};
}

bool conjugate_closed(std::vector<std::complex<double>> poles) {
    std::vector<bool> used(poles.size(), false);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (used[i]) continue;
        const auto p = poles[i];
        const double tol = 1e-9 * (1.0 + std::abs(p));
        if (std::abs(p.imag()) <= tol) {
            used[i] = true;
            continue;
        }
        bool matched = false;
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            if (!used[j] && std::abs(poles[j] - std::conj(p)) <= tol) {
                used[i] = used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::vector<std::complex<double>> parse_pole_list(const std::string& text) {
    std::vector<std::complex<double>> out;
    for (const auto& tok : split(text, ',')) out.push_back(parse_complex(tok));
    return out;
}

InitialCondition InitialCondition::parse(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.empty()) throw std::invalid_argument("empty initial condition");
    InitialCondition ic;
    const std::string& kind = parts[0];
    if (kind == "zero" && parts.size() == 1) {
        ic.kind = Kind::Zero;
    } else if (kind == "ramp" && parts.size() <= 2) {
        ic.kind = Kind::Ramp;
        if (parts.size() == 2) ic.scale = to_double(parts[1]);
    } else if (kind == "linear" && parts.size() == 3) {
        ic.kind = Kind::Linear;
        ic.slope1 = to_double(parts[1]);
        ic.slope2 = to_double(parts[2]);
    } else if (kind == "random" && parts.size() <= 2) {
        ic.kind = Kind::RandomModes;
        ic.scale = parts.size() == 2 ? to_double(parts[1]) : 0.01;
    } else {
        throw std::invalid_argument("unknown initial condition '" + text +
                                    "' (expected zero | ramp[:scale] | linear:a:b | random[:amp])");
    }
    return ic;
}

std::string InitialCondition::describe() const {
    switch (kind) {
        case Kind::Zero: return "zero";
        case Kind::Ramp: return "ramp:" + fmt(scale);
        case Kind::Linear: return "linear:" + fmt(slope1) + ":" + fmt(slope2);
        case Kind::RandomModes: return "random:" + fmt(scale);
    }
    return "?";
}

double damping_rate(double L, double alpha) { return std::log((alpha - 1.0) / (alpha + 1.0)) / (2.0 * L); }

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
        if (!c.passed) out.push_back(c.name + ": " + c.detail);
    }
    return out;
}

ValidationReport validate(const ProblemConfig& c) {
    ValidationReport r;
    auto check = [&](std::string name, bool ok, std::string detail) {
        r.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    check("length", c.L > 0.0, "L = " + fmt(c.L));
    check("alpha>1", c.alpha > 1.0, "alpha = " + fmt(c.alpha));
    if (c.alpha > 1.0 && c.L > 0.0) {
        const double rate = damping_rate(c.L, c.alpha);
        check("damping_rate<-1", rate < -1.0, "(1/2L)log((alpha-1)/(alpha+1)) = " + fmt(rate));
    } else {
        check("damping_rate<-1", false, "undefined for alpha <= 1");
    }
    check("grid_points", c.grid_points >= 3 && c.grid_points % 2 == 1,
          "grid_points = " + std::to_string(c.grid_points) + " (must be odd)");
    check("n_modes", c.n_modes >= 1, "n_modes = " + std::to_string(c.n_modes) + ", need at least 1");
    check("n_tail", c.n_tail >= c.n_modes, "n_tail = " + std::to_string(c.n_tail) + " < n_modes");
    if (c.n0) {
        check("n_modes>=n0+1", *c.n0 >= 0 && c.n_modes >= *c.n0 + 1,
              "n0 = " + std::to_string(*c.n0) + ", n_modes = " + std::to_string(c.n_modes));
    }
    check("poles_conjugate_closed", conjugate_closed(c.poles), "pole list is not closed under conjugation");
    const bool stable = std::all_of(c.poles.begin(), c.poles.end(), [](auto p) { return p.real() < 0.0; });
    check("poles_stable", stable, "every pole needs a negative real part");
    check("substeps", c.substeps >= 1, "substeps = " + std::to_string(c.substeps));
    check("dt", c.dt > 0.0, "dt = " + fmt(c.dt));
    check("T", c.T > 0.0, "T = " + fmt(c.T));
    check("record_every", c.record_every >= 1, "record_every = " + std::to_string(c.record_every));
    check("fdm_refine", c.fdm_refine >= 1, "fdm_refine = " + std::to_string(c.fdm_refine));
    check("fdm_cfl", c.fdm_cfl > 0.0 && c.fdm_cfl <= 0.9, "fdm_cfl = " + fmt(c.fdm_cfl) + " (need 0 < cfl <= 0.9)");
    check("zr_tau", c.zr.tau >= 0.0, "zr_tau = " + fmt(c.zr.tau));
    return r;
}

void require_valid(const ProblemConfig& config) {
    const auto report = validate(config);
    if (!report.ok()) throw ConfigError(report.failures());
}

ProblemConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    {
        std::istringstream in(text);
        try {
            pt::read_ini(in, tree);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError({std::string("malformed config: ") + e.what()});
        }
    }

    ProblemConfig c;
    std::vector<std::string> problems;
    std::set<std::string> seen;

    auto fetch = [&](const std::string& key, bool required) -> std::optional<std::string> {
        seen.insert(key);
        const auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) {
            if (required) problems.push_back("missing key " + key);
            return std::nullopt;
        }
        return trim(*v);
    };
    auto read = [&](const std::string& key, bool required, auto&& apply) {
        const auto v = fetch(key, required);
        if (!v) return;
        try {
            apply(*v);
        } catch (const std::exception& e) {
            problems.push_back("invalid value for " + key + " ('" + *v + "'): " + e.what());
        }
    };

    read("problem.L", true, [&](const std::string& v) { c.L = to_double(v); });
    read("problem.alpha", true, [&](const std::string& v) { c.alpha = to_double(v); });
    read("problem.f_coeffs", true, [&](const std::string& v) {
        std::vector<double> coeffs;
        for (const auto& tok : split(v, ',')) coeffs.push_back(to_double(tok));
        if (coeffs.empty()) coeffs.push_back(0.0);
        c.f = Nonlinearity(std::move(coeffs));
    });
    read("problem.z_e", true, [&](const std::string& v) { c.z_e = to_double(v); });

    read("discretization.grid_points", false, [&](const std::string& v) { c.grid_points = to_int(v); });
    read("discretization.n_modes", false, [&](const std::string& v) { c.n_modes = to_int(v); });
    std::optional<int> n_tail;
    read("discretization.n_tail", false, [&](const std::string& v) {
        if (v != "auto") n_tail = to_int(v);
    });
    c.n_tail = n_tail.value_or(c.n_modes);
    read("discretization.n0", false, [&](const std::string& v) {
        if (v != "auto") c.n0 = to_int(v);
    });
    read("discretization.substeps", false, [&](const std::string& v) { c.substeps = to_int(v); });
    read("discretization.shoot_tol", false, [&](const std::string& v) { c.shoot_tol = to_double(v); });

    read("control.poles", false, [&](const std::string& v) { c.poles = parse_pole_list(v); });

    read("simulation.dt", false, [&](const std::string& v) { c.dt = to_double(v); });
    read("simulation.T", false, [&](const std::string& v) { c.T = to_double(v); });
    read("simulation.zeta0", false, [&](const std::string& v) { c.zeta0 = to_double(v); });
    read("simulation.v0", false, [&](const std::string& v) { c.v0 = to_double(v); });
    read("simulation.ic", false, [&](const std::string& v) { c.ic = InitialCondition::parse(v); });
    read("simulation.zr_breakpoints", false, [&](const std::string& v) {
        c.zr.plateaus.clear();
        for (const auto& tok : split(v, ',')) {
            const auto tv = split(tok, ':');
            if (tv.size() != 2) throw std::invalid_argument("expected time:value");
            c.zr.plateaus.push_back({to_double(tv[0]), to_double(tv[1])});
        }
        std::stable_sort(c.zr.plateaus.begin(), c.zr.plateaus.end(),
                         [](const auto& a, const auto& b) { return a.time < b.time; });
    });
    read("simulation.zr_tau", false, [&](const std::string& v) { c.zr.tau = to_double(v); });
    read("simulation.record_every", false, [&](const std::string& v) { c.record_every = to_int(v); });
    read("simulation.snapshots", false, [&](const std::string& v) { c.snapshots = to_int(v); });
    read("simulation.fdm_refine", false, [&](const std::string& v) { c.fdm_refine = to_int(v); });
    read("simulation.fdm_cfl", false, [&](const std::string& v) { c.fdm_cfl = to_double(v); });
    read("simulation.seed", false, [&](const std::string& v) { c.seed = std::stoul(v); });

    read("delay.k", false, [&](const std::string& v) {
        c.delay.k_values.clear();
        for (const auto& tok : split(v, ',')) c.delay.k_values.push_back(to_int(tok));
    });
    read("delay.n_min", false, [&](const std::string& v) { c.delay.n_min = to_int(v); });
    read("delay.n_max", false, [&](const std::string& v) { c.delay.n_max = to_int(v); });
    read("delay.beta", false, [&](const std::string& v) { c.delay.beta = to_double(v); });

    for (const auto& section : tree) {
        if (section.second.empty() && !section.second.data().empty()) {
            problems.push_back("key outside a section: " + section.first);
            continue;
        }
        for (const auto& kv : section.second) {
            const std::string key = section.first + "." + kv.first;
            if (!seen.count(key)) problems.push_back("unknown key " + key);
        }
    }

    if (!problems.empty()) throw ConfigError(std::move(problems));
    return c;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file " + path});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace waveforge
