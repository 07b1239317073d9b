#pragma once

#include <string>

#include "splatsim/core/mesh.hpp"

namespace splatsim {

struct MeshLoadResult {
  TriangleMesh mesh;
  // Faces with repeated indices or zero area, removed during load.
  std::size_t dropped_degenerate_faces = 0;
};

// Loads a Wavefront OBJ or PLY (ascii or binary) mesh, chosen by extension.
// Polygons are fan-triangulated. Out-of-range indices and malformed content
// raise ParseError naming the line or byte offset.
MeshLoadResult load_mesh(const std::string& path);

enum class MeshFormat { obj, ply_ascii, ply_binary };

// Writes vertices at full double precision (OBJ, ascii PLY) or float32
// (binary PLY). The format follows the extension unless given.
void save_mesh(const TriangleMesh& mesh, const std::string& path);
void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format);

}  // namespace splatsim
