#include "crossrt/obj_loader.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crt
{

static std::runtime_error parse_error(const std::string& path, size_t line, const std::string& msg)
{
  return std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

// "3", "3/1", "3//2", "3/1/2" -> vertex index (0-based); negative = relative
static uint32_t face_index(const std::string& token, size_t vertexCount,
                           const std::string& path, size_t line)
{
  const std::string head = token.substr(0, token.find('/'));
  long idx = 0;
  try
  {
    size_t used = 0;
    idx = std::stol(head, &used);
    if (used != head.size())
      throw std::invalid_argument(head);
  }
  catch (const std::exception&)
  {
    throw parse_error(path, line, "malformed face index '" + token + "'");
  }
  if (idx < 0)
    idx += long(vertexCount) + 1;  // -1 refers to the last vertex
  if (idx < 1 || size_t(idx) > vertexCount)
    throw parse_error(path, line, "face index out of range: '" + token + "'");
  return uint32_t(idx - 1);
}

TriangleMesh load_obj(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error(path + ": cannot open");

  TriangleMesh mesh;
  std::string lineText;
  size_t lineNo = 0;
  while (std::getline(in, lineText))
  {
    lineNo++;
    const size_t hash = lineText.find('#');
    if (hash != std::string::npos)
      lineText.erase(hash);
    std::istringstream ls(lineText);
    std::string tag;
    if (!(ls >> tag))
      continue;

    if (tag == "v")
    {
      float3 v;
      if (!(ls >> v.x >> v.y >> v.z))
        throw parse_error(path, lineNo, "malformed vertex");
      mesh.vertices.push_back(v);
    }
    else if (tag == "f")
    {
      std::vector<uint32_t> corners;
      std::string token;
      while (ls >> token)
        corners.push_back(face_index(token, mesh.vertices.size(), path, lineNo));
      if (corners.size() < 3)
        throw parse_error(path, lineNo, "face needs at least 3 vertices");
      for (size_t i = 1; i + 1 < corners.size(); i++)  // fan triangulation
      {
        mesh.indices.push_back(corners[0]);
        mesh.indices.push_back(corners[i]);
        mesh.indices.push_back(corners[i + 1]);
      }
    }
    // vt / vn / usemtl / o / g / s etc. are ignored
  }
  if (mesh.indices.empty())
    throw std::runtime_error(path + ": no faces found");
  return mesh;
}

} // namespace crt
