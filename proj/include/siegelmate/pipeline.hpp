#pragma once

#include "siegelmate/config.hpp"
#include "siegelmate/render.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace siegelmate {

/// The parameter c of a fixture spec, polished by Newton; none for specs
/// outside the fixture table.
std::optional<cplx> parameter_for_spec(const PcfSpec& spec);

struct CommandOutput {
    nlohmann::json result;
    std::vector<std::pair<std::string, Raster>> rasters;     // file name, image
    std::vector<std::pair<std::string, std::string>> texts;  // file name, contents
};

/// Ray class of the theta-side angle t with the loop and X_1 checks.
CommandOutput run_rayclass(const JobConfig& cfg, const Angle& t);

/// Hubbard tree, drops and the graph T, with a DOT file and a Julia raster.
CommandOutput run_t_graph(const JobConfig& cfg);

/// Candidate G, raster, diameter probe and periodic matching, with an
/// itemised verdict.  A "no" verdict is still a successful run.
CommandOutput run_mate(const JobConfig& cfg);

}  // namespace siegelmate
