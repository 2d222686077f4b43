#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "waveforge/control.hpp"
#include "waveforge/delay.hpp"
#include "waveforge/reduction.hpp"
#include "waveforge/simulate.hpp"
#include "waveforge/spectrum.hpp"
#include "waveforge/steady.hpp"

namespace waveforge {

/// Fixed 17-significant-digit scientific format used for every CSV value.
std::string fmt_num(double v);

/// 64-bit FNV-1a of the bytes of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    /// A row whose first cell is a label.
    void row(const std::string& label, const std::vector<double>& values);

private:
    std::FILE* file_;
    std::string path_;
};

void write_steady_csv(const std::string& path, const SteadyState& ss);
void write_modes_csv(const std::string& path, const ModeBasis& basis);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
void write_tail_csv(const std::string& path, const TailConstants& tail);
void write_gains_csv(const std::string& path, const ControllerGains& gains);
void write_trace_csv(const std::string& path, const SimulationTrace& trace);
void write_snapshots_csv(const std::string& path, const SimulationTrace& trace);
void write_delay_csv(const std::string& path, const std::vector<DelayRootResult>& results,
                     const std::vector<BetaRoot>& beta_roots, double beta);

/// gnuplot script plotting z, u, v and the state snapshots from the CSVs
/// named relative to the script's directory.
void write_plot_script(const std::string& path, const std::string& trace_csv, const std::string& snapshots_csv,
                       double z_e);

std::string read_text_file(const std::string& path);

}  // namespace waveforge
