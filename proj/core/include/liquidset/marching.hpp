#pragma once

#include "liquidset/mesh.hpp"
#include "liquidset/voxel.hpp"

namespace liquidset {

// Extracts the iso-surface {field == iso} from node samples. Each grid cube is
// split into six tetrahedra around its main diagonal, so neighbouring cubes
// agree on every shared face and the output is edge-manifold. The mesh is
// closed whenever the surface stays off the grid boundary. Triangles are
// oriented with normals pointing toward increasing field values. Samples
// below iso are inside. Returns an empty mesh when iso lies outside the
// sampled range.
TriMesh marching_cubes(const ScalarGrid& grid, double iso);

}  // namespace liquidset
