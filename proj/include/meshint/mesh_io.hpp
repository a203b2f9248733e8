#pragma once

#include "meshint/halfedge.hpp"
#include "meshint/integrator.hpp"

#include <string>

namespace meshint {

// Wavefront OBJ / ascii PLY writers. Screen meshes are exported with z = 0.
// Output is deterministic: fixed ordering, fixed "%.9g" formatting.
void save_obj(const ScreenMesh& mesh, const std::string& path);
void save_obj(const IntegratedSurface& surface, const std::string& path);
void save_ply(const ScreenMesh& mesh, const std::string& path);
void save_ply(const IntegratedSurface& surface, const std::string& path);

} // namespace meshint
