// JSON experiment configuration.
//
// Top level:
//   plant       SuspensionParams fields (all optional)
//   bio         BioParams fields (all optional)
//   controller  {"type": "passive" | "approx_free" | "fac" | "fac_ppf", ...gains}
//   road        {"type": "random" | "bump" | "sine" | "flat", ...}       required
//   sim         {"dt", "T", ...}                                       required
//   experiment  {"velocities_kmh", "controllers", "masses", "threads"}
//   output      {"dir", "prefix"}
//
// Unknown keys anywhere are errors. Every problem found is reported in one
// ConfigError.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bioref/bio.hpp"
#include "bioref/controllers.hpp"
#include "bioref/plant.hpp"
#include "bioref/roads.hpp"
#include "bioref/sim.hpp"

namespace bioref {

struct ExperimentSpec {
    std::vector<double> velocities_kmh{20.0, 40.0, 60.0, 100.0};
    // label -> controller; compare and sweep always add the passive baseline
    std::vector<std::pair<std::string, ControllerConfig>> controllers;
    std::vector<double> masses;
    int threads = 0;
};

struct OutputSpec {
    std::string dir = "out";
    std::string prefix = "run";
};

struct ExperimentConfig {
    SuspensionParams plant;
    BioParams bio;
    std::optional<ControllerConfig> controller;
    RoadSpec road;
    SimConfig sim;
    std::optional<ExperimentSpec> experiment;
    OutputSpec output;
    nlohmann::json source;  // document as loaded, after overrides
    std::string hash;       // FNV-1a of the canonical dump, hex
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// Applies --seed / --dt style overrides to the document before parsing.
nlohmann::json apply_overrides(nlohmann::json doc, std::optional<std::uint64_t> seed,
                               std::optional<double> dt, bool no_timing);

std::string config_hash(const nlohmann::json& doc);

/// Parses a single controller block (used by experiment.controllers).
ControllerConfig parse_controller(const nlohmann::json& j, const std::string& where,
                                  std::vector<std::string>& issues);

}  // namespace bioref
