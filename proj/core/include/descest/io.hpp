#ifndef DESCEST_IO_HPP
#define DESCEST_IO_HPP

#include <string>
#include <vector>

#include "descest/continuous_estimator.hpp"
#include "descest/model.hpp"

namespace descest {
namespace io {

struct DiscreteProblem {
  DescriptorModel model;
  UncertaintyWeights weights;
};

struct ContinuousProblem {
  ContinuousModel model;
  Grid grid;
};

/// Loads the discrete model JSON
///   {"n":int, "N":int, "time_invariant":bool, "F":[[..]], "C":[[..]],
///    "H":[[..]], "S":[[..]], "S_seq":[[[..]]], "R_seq":[[[..]]]}
/// Matrices are row-major nested arrays. With time_invariant, single
/// matrices broadcast over the horizon. Throws ContractViolation on
/// missing files or malformed content.
DiscreteProblem load_discrete_model(const std::string& path);

void write_discrete_model(const std::string& path, const DiscreteProblem& p);

/// Loads the continuous model JSON
///   {"F":[[..]], "t0":., "T":., "K":int, "C":[[[..]]], "H":[[[..]]],
///    "Q0":[[..]], "Q1":[[[..]]], "Q2":[[[..]]], "ell":[[..]]}
/// Time-indexed arrays have K+1 entries; single matrices broadcast.
ContinuousProblem load_continuous_model(const std::string& path);

/// CSV with header "k,y0,y1,...", one row per step.
MeasurementSequence load_measurements_csv(const std::string& path);
std::string measurements_to_csv(const MeasurementSequence& y);

/// CSV with header "t,y0,y1,...", one row per grid node.
std::vector<Vec> load_grid_measurements_csv(const std::string& path);
std::string grid_values_to_csv(const Grid& grid, const std::vector<Vec>& values,
                               const std::string& value_prefix);

/// Writes via a temporary file in the same directory plus rename, so a
/// failed run never leaves a partial output behind.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace io
}  // namespace descest

#endif
