// Controller comparison across road speeds (one table row per speed).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bioref/controllers.hpp"
#include "bioref/metrics.hpp"
#include "bioref/roads.hpp"
#include "bioref/sim.hpp"

namespace bioref {

struct CompareResult {
    std::vector<double> velocities_kmh;
    std::vector<std::string> labels;  // "passive" first
    std::vector<std::string> kinds;   // controller_kind per label
    std::vector<RunSummary> cells;    // row-major: [velocity][label]
    std::vector<std::string> errors;  // same layout; non-empty when the run refused to start

    const RunSummary& at(std::size_t v, std::size_t c) const { return cells[v * labels.size() + c]; }
    const std::string& error_at(std::size_t v, std::size_t c) const {
        return errors[v * labels.size() + c];
    }
    std::size_t label_index(const std::string& label) const;
};

/// Runs passive plus every listed controller at every speed. The road speed
/// is replaced per row; every cell uses the configured seed, so controllers
/// at the same speed see the same road.
/// Faults and refused runs are recorded per cell.
CompareResult run_compare(const SuspensionParams& plant, const BioParams& bio,
                          const std::vector<std::pair<std::string, ControllerConfig>>& ctrls,
                          const RoadSpec& road, const SimConfig& sim,
                          const std::vector<double>& velocities_kmh, int threads = 0);

/// One row per speed: passive RMS, then RMS and reduction per controller,
/// mean evaluation cost per controller and, when both an approximation-free
/// and a fuzzy controller are present, their cost ratio.
void write_compare_csv(std::ostream& os, const CompareResult& r);

}  // namespace bioref
