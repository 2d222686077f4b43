#include "waveforge/io.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace waveforge {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : file_(std::fopen(path.c_str(), "w")), path_(path) {
    if (!file_) throw Error("cannot open " + path + " for writing: " + std::strerror(errno));
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(file_);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) std::fprintf(file_, "%s%s", i ? "," : "", names[i].c_str());
    std::fputc('\n', file_);
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) std::fprintf(file_, "%s%.16e", i ? "," : "", values[i]);
    std::fputc('\n', file_);
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
    std::fputs(label.c_str(), file_);
    for (double v : values) std::fprintf(file_, ",%.16e", v);
    std::fputc('\n', file_);
}

void write_steady_csv(const std::string& path, const SteadyState& ss) {
    CsvWriter w(path);
    w.header({"x", "y_e", "dy_e"});
    for (int i = 0; i < ss.grid.size(); ++i) w.row({ss.grid.x()[i], ss.y[i], ss.dy[i]});
}

void write_modes_csv(const std::string& path, const ModeBasis& basis) {
    CsvWriter w(path);
    w.header({"k", "re_lambda", "im_lambda", "re_trace0", "im_trace0", "re_a", "im_a", "re_b", "im_b",
              "norm_residual", "bc_residual", "dual_bc_residual"});
    for (int k = -basis.n_modes; k <= basis.n_modes; ++k) {
        const Mode& m = basis.mode(k);
        w.row({static_cast<double>(k), m.lambda.real(), m.lambda.imag(), m.trace0.real(), m.trace0.imag(),
               m.a.real(), m.a.imag(), m.b.real(), m.b.imag(), m.norm_residual, m.bc_residual,
               m.dual_bc_residual});
    }
    for (const auto& t : basis.extension) {
        w.row({static_cast<double>(t.k), t.lambda.real(), t.lambda.imag(), t.trace0.real(), t.trace0.imag(),
               t.a.real(), t.a.imag(), t.b.real(), t.b.imag(), 0.0, 0.0, 0.0});
    }
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    CsvWriter w(path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
        w.row(r);
    }
}

void write_tail_csv(const std::string& path, const TailConstants& tail) {
    CsvWriter w(path);
    w.header({"alpha0", "beta0", "last_term", "n_tail"});
    w.row({tail.alpha0, tail.beta0, tail.last_term, static_cast<double>(tail.n_tail)});
}

void write_gains_csv(const std::string& path, const ControllerGains& gains) {
    CsvWriter w(path);
    w.row("K", std::vector<double>(gains.K.data(), gains.K.data() + gains.K.size()));
    for (Eigen::Index i = 0; i < gains.P.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(gains.P.cols()));
        for (Eigen::Index j = 0; j < gains.P.cols(); ++j) r[static_cast<std::size_t>(j)] = gains.P(i, j);
        w.row("P", r);
    }
    for (const auto& p : gains.poles) w.row("pole", {p.real(), p.imag()});
    w.row("placement_residual", {gains.placement_residual});
    w.row("lyapunov_residual", {gains.lyapunov_residual});
    w.row("kalman_rank", {static_cast<double>(gains.kalman.rank), gains.kalman.min_pivot});
}

void write_trace_csv(const std::string& path, const SimulationTrace& trace) {
    CsvWriter w(path);
    w.header({"t", "z", "u", "v", "v_d", "xi", "zeta", "V", "E", "normW", "w1_inf"});
    for (const auto& r : trace.records) w.row({r.t, r.z, r.u, r.v, r.v_d, r.xi, r.zeta, r.V, r.E, r.normW, r.w1_inf});
}

void write_snapshots_csv(const std::string& path, const SimulationTrace& trace) {
    CsvWriter w(path);
    w.header({"t", "x", "y", "y_t"});
    for (const auto& s : trace.snapshots) {
        for (Eigen::Index i = 0; i < s.x.size(); ++i) w.row({s.t, s.x[i], s.y[i], s.y_t[i]});
    }
}

void write_delay_csv(const std::string& path, const std::vector<DelayRootResult>& results,
                     const std::vector<BetaRoot>& beta_roots, double beta) {
    CsvWriter w(path);
    w.header({"k", "h", "gamma", "n", "re_lambda", "im_lambda", "residual", "beta"});
    for (const auto& r : results) {
        for (const auto& root : r.roots) {
            w.row({static_cast<double>(r.k), r.h, r.gamma, static_cast<double>(root.n), root.lambda.real(),
                   root.lambda.imag(), root.residual, 0.0});
        }
    }
    // beta roots follow, one per (k, n) in the same order as the unperturbed ones
    std::size_t i = 0;
    for (const auto& r : results) {
        for (std::size_t j = 0; j < r.roots.size() && i < beta_roots.size(); ++j, ++i) {
            const BetaRoot& b = beta_roots[i];
            w.row({static_cast<double>(r.k), r.h, r.gamma, static_cast<double>(b.n), b.lambda.real(),
                   b.lambda.imag(), b.residual, beta});
        }
    }
}

void write_plot_script(const std::string& path, const std::string& trace_csv, const std::string& snapshots_csv,
                       double z_e) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "# gnuplot -persist " << path << "\n"
        << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << "set multiplot layout 2,2\n"
        << "set xlabel 't'\n"
        << "set title 'regulated output z(t)'\n"
        << "plot '" << trace_csv << "' using 1:2 with lines title 'z', " << fmt_num(z_e)
        << " with lines dashtype 2 title 'z_e'\n"
        << "set title 'control input u(t)'\n"
        << "plot '" << trace_csv << "' using 1:3 with lines title 'u'\n"
        << "set title 'snapshots y(t,x)'\n"
        << "set xlabel 'x'\n"
        << "plot '" << snapshots_csv << "' using 2:3:1 with lines palette title 'y'\n"
        << "set title 'snapshots y_t(t,x)'\n"
        << "plot '" << snapshots_csv << "' using 2:4:1 with lines palette title 'y_t'\n"
        << "unset multiplot\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace waveforge
