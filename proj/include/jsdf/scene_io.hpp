#pragma once

#include <string>

#include "jsdf/collision.hpp"

namespace jsdf {

/// Parses and validates a scene JSON document:
/// {version, robot:{joints:[{parent, origin:{rpy|quat, xyz}, axis,
/// limits:[lo,hi]}], links:[{capsules:[{p0,p1,radius}]}]},
/// obstacles:[{type,...}], self_collision:{exclude_pairs:[[i,j]]},
/// clearance, id?}. The optional id defaults to `default_id`.
Scene scene_from_json(const std::string& text,
                      const std::string& default_id = "scene");

Scene load_scene(const std::string& path);

}  // namespace jsdf
