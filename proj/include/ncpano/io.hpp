#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "ncpano/layout.hpp"
#include "ncpano/scene.hpp"
#include "ncpano/solvers.hpp"

namespace ncpano::io {

using Json = nlohmann::ordered_json;

// Whole-file read/write. Throw kIo.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Throw kParse on malformed JSON or missing/mistyped fields.
Json parse_json(const std::string& text, const std::string& source);

Json layout_to_json(const Layout& layout, const Json& config = {});
Layout layout_from_json(const Json& j);
Json observation_to_json(const BoundaryObservation& obs,
                         const Json& config = {});
BoundaryObservation observation_from_json(const Json& j);
Json diagnostics_to_json(const LayoutSolution& solution);

Layout read_layout(const std::filesystem::path& path);
void write_layout(const std::filesystem::path& path, const Layout& layout,
                  const Json& config = {});
BoundaryObservation read_observation(const std::filesystem::path& path);
void write_observation(const std::filesystem::path& path,
                       const BoundaryObservation& obs,
                       const Json& config = {});

// Shortest "%.10g" rendering that always reads back as a real ("1.0").
std::string format_number(double value);

// Floor-plan plot: ground truth in green, prediction in blue, each wall
// labelled with its distance to the camera origin, heights in the caption.
// Either layout may be null.
std::string floor_plan_svg(const Layout* gt, const Layout* pred,
                           const std::string& title,
                           const Json& config = {});

}  // namespace ncpano::io
