#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mkt/flows.hpp"
#include "mkt/measure.hpp"
#include "mkt/moment_sequence.hpp"
#include "mkt/sde.hpp"

namespace mkt {

// Moment files: header `n,value`, rows n = 0, 1, ... in order, row 0 equal to 1.
void write_moments_csv(std::ostream& out, const MomentSequence& m);
MomentSequence read_moments_csv(std::istream& in);
MomentSequence read_moments_file(const std::string& path);

// Measure files: header `location,weight`.
void write_measure_csv(std::ostream& out, const AtomicMeasure& m);
AtomicMeasure read_measure_csv(std::istream& in);

/// Header `replica,lambda_1..lambda_N[,w_1..w_N]`.
void write_sample_header(std::ostream& out, std::size_t n, bool weights);
void write_sample_row(std::ostream& out, std::size_t replica, const AtomicMeasure& spectral, bool weights);

/// Rows `t,n,m_n` for n = 0..n_max at every t.
void write_flow_csv(std::ostream& out, const MomentFlow& flow, std::span<const double> t_grid,
                    std::size_t n_max);

/// Rows `rep,t,n,S_n`; the header is written separately.
void write_moment_path_header(std::ostream& out);
void write_moment_path_rows(std::ostream& out, std::size_t rep, const ParticlePath& path, std::size_t n_max);

/// Rows `rep,t,x_1..x_N`.
void write_positions_header(std::ostream& out, std::size_t n);
void write_positions_rows(std::ostream& out, std::size_t rep, const ParticlePath& path);

/// Rows `t,n,mean,stderr`.
void write_estimates_csv(std::ostream& out, const MomentEstimates& e);

/// "start:step:stop" (inclusive of stop up to rounding) or a comma list.
std::vector<double> parse_time_grid(const std::string& text);

}  // namespace mkt
