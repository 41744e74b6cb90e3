#include "crossrt/serial.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace crt
{

// Thin little-endian stream wrappers; the host is little-endian x86/ARM, so
// field-wise writes of fixed-width types produce the wire format directly.
namespace
{

class Writer
{
public:
  explicit Writer(const std::string& path) : m_path(path), m_out(path, std::ios::binary)
  {
    if (!m_out)
      throw std::runtime_error(m_path + ": cannot open for writing");
  }
  void magic(const char m[4]) { m_out.write(m, 4); }
  void u32(uint32_t v) { m_out.write(reinterpret_cast<const char*>(&v), 4); }
  void f32(float v) { m_out.write(reinterpret_cast<const char*>(&v), 4); }
  void u8(uint8_t v) { m_out.write(reinterpret_cast<const char*>(&v), 1); }
  void bytes(const void* p, size_t n) { m_out.write(static_cast<const char*>(p), std::streamsize(n)); }
  void close()
  {
    m_out.close();
    if (!m_out)
      throw std::runtime_error(m_path + ": write failed");
  }

private:
  std::string m_path;
  std::ofstream m_out;
};

class Reader
{
public:
  explicit Reader(const std::string& path) : m_path(path), m_in(path, std::ios::binary)
  {
    if (!m_in)
      throw std::runtime_error(m_path + ": cannot open");
  }
  void expect_magic(const char m[4])
  {
    char got[4] = {};
    m_in.read(got, 4);
    if (!m_in || std::memcmp(got, m, 4) != 0)
      throw std::runtime_error(m_path + ": bad magic (expected " + std::string(m, 4) + ")");
  }
  uint32_t u32()
  {
    uint32_t v = 0;
    read(&v, 4);
    return v;
  }
  float f32()
  {
    float v = 0;
    read(&v, 4);
    return v;
  }
  uint8_t u8()
  {
    uint8_t v = 0;
    read(&v, 1);
    return v;
  }
  void read(void* p, size_t n)
  {
    m_in.read(static_cast<char*>(p), std::streamsize(n));
    if (!m_in)
      throw std::runtime_error(m_path + ": truncated file");
  }
  void expect_eof()
  {
    m_in.peek();
    if (!m_in.eof())
      throw std::runtime_error(m_path + ": trailing bytes");
  }

private:
  std::string m_path;
  std::ifstream m_in;
};

} // namespace

std::string read_magic(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error(path + ": cannot open");
  char m[4] = {};
  in.read(m, 4);
  if (!in)
    throw std::runtime_error(path + ": truncated file");
  return std::string(m, 4);
}

// ---- LBVH ---------------------------------------------------------------

void save_bvh(const LBVHTree& tree, const std::string& path)
{
  Writer w(path);
  w.magic("LBVH");
  w.u32(uint32_t(tree.nodes.size()));
  for (const BVHNode& n : tree.nodes)
  {
    w.f32(n.bounds.boxMin.x); w.f32(n.bounds.boxMin.y); w.f32(n.bounds.boxMin.z);
    w.f32(n.bounds.boxMax.x); w.f32(n.bounds.boxMax.y); w.f32(n.bounds.boxMax.z);
    w.u32(n.left); w.u32(n.right); w.u32(n.firstPrim); w.u32(n.primCount);
  }
  w.close();
}

LBVHTree load_bvh(const std::string& path)
{
  Reader r(path);
  r.expect_magic("LBVH");
  LBVHTree tree;
  tree.nodes.resize(r.u32());
  for (BVHNode& n : tree.nodes)
  {
    n.bounds.boxMin.x = r.f32(); n.bounds.boxMin.y = r.f32(); n.bounds.boxMin.z = r.f32();
    n.bounds.boxMax.x = r.f32(); n.bounds.boxMax.y = r.f32(); n.bounds.boxMax.z = r.f32();
    n.left = r.u32(); n.right = r.u32(); n.firstPrim = r.u32(); n.primCount = r.u32();
  }
  r.expect_eof();
  return tree;
}

// ---- SDF grid -----------------------------------------------------------

void save_sdf_grid(const SdfGrid& grid, const std::string& path)
{
  Writer w(path);
  w.magic("SDFG");
  w.u32(uint32_t(grid.dims.x)); w.u32(uint32_t(grid.dims.y)); w.u32(uint32_t(grid.dims.z));
  w.bytes(grid.values.data(), grid.values.size() * sizeof(float));
  w.close();
}

SdfGrid load_sdf_grid(const std::string& path)
{
  Reader r(path);
  r.expect_magic("SDFG");
  SdfGrid grid;
  grid.dims.x = int(r.u32()); grid.dims.y = int(r.u32()); grid.dims.z = int(r.u32());
  if (grid.dims.x < 2 || grid.dims.y < 2 || grid.dims.z < 2)
    throw std::runtime_error(path + ": invalid grid dims");
  grid.values.resize(size_t(grid.dims.x) * size_t(grid.dims.y) * size_t(grid.dims.z));
  r.read(grid.values.data(), grid.values.size() * sizeof(float));
  r.expect_eof();
  return grid;
}

// ---- SVS ----------------------------------------------------------------

void save_svs(const SdfSVS& svs, const std::string& path)
{
  Writer w(path);
  w.magic("SVS1");
  w.u32(uint32_t(svs.nodes.size()));
  for (const SdfSVSNode& n : svs.nodes)
  {
    w.u32(n.posX); w.u32(n.posY); w.u32(n.posZ); w.u32(n.voxelSize);
    for (int i = 0; i < 8; i++)
      w.u8(n.values[i]);
  }
  w.close();
}

SdfSVS load_svs(const std::string& path)
{
  Reader r(path);
  r.expect_magic("SVS1");
  SdfSVS svs;
  svs.nodes.resize(r.u32());
  for (SdfSVSNode& n : svs.nodes)
  {
    n.posX = r.u32(); n.posY = r.u32(); n.posZ = r.u32(); n.voxelSize = r.u32();
    for (int i = 0; i < 8; i++)
      n.values[i] = r.u8();
  }
  r.expect_eof();
  return svs;
}

// ---- SBS ----------------------------------------------------------------

void save_sbs(const SdfSBS& sbs, const std::string& path)
{
  Writer w(path);
  w.magic("SBS1");
  w.u32(uint32_t(sbs.brickPos.size()));
  w.u32(sbs.brickDim);
  w.u32(sbs.lattice);
  const size_t stride = sbs.brick_stride();
  for (size_t b = 0; b < sbs.brickPos.size(); b++)
  {
    w.u32(sbs.brickPos[b].x); w.u32(sbs.brickPos[b].y); w.u32(sbs.brickPos[b].z);
    w.bytes(sbs.values.data() + b * stride, stride * sizeof(float));
  }
  w.close();
}

SdfSBS load_sbs(const std::string& path)
{
  Reader r(path);
  r.expect_magic("SBS1");
  SdfSBS sbs;
  const uint32_t count = r.u32();
  sbs.brickDim = r.u32();
  sbs.lattice  = r.u32();
  if (sbs.brickDim < 1 || sbs.lattice < sbs.brickDim || sbs.lattice % sbs.brickDim != 0)
    throw std::runtime_error(path + ": invalid brick layout");
  const size_t stride = sbs.brick_stride();
  sbs.brickPos.resize(count);
  sbs.values.resize(count * stride);
  for (uint32_t b = 0; b < count; b++)
  {
    sbs.brickPos[b].x = r.u32(); sbs.brickPos[b].y = r.u32(); sbs.brickPos[b].z = r.u32();
    r.read(sbs.values.data() + size_t(b) * stride, stride * sizeof(float));
  }
  r.expect_eof();
  return sbs;
}

// ---- RF grid ------------------------------------------------------------

void save_rf_grid(const RFGridData& grid, const std::string& path)
{
  Writer w(path);
  w.magic("RFG1");
  w.u32(uint32_t(grid.dims.x)); w.u32(uint32_t(grid.dims.y)); w.u32(uint32_t(grid.dims.z));
  w.f32(grid.threshold);
  w.bytes(grid.cells.data(), grid.cells.size() * sizeof(float4));
  w.close();
}

RFGridData load_rf_grid(const std::string& path)
{
  Reader r(path);
  r.expect_magic("RFG1");
  RFGridData grid;
  grid.dims.x = int(r.u32()); grid.dims.y = int(r.u32()); grid.dims.z = int(r.u32());
  if (grid.dims.x < 1 || grid.dims.y < 1 || grid.dims.z < 1)
    throw std::runtime_error(path + ": invalid grid dims");
  grid.threshold = r.f32();
  grid.cells.resize(size_t(grid.dims.x) * size_t(grid.dims.y) * size_t(grid.dims.z));
  r.read(grid.cells.data(), grid.cells.size() * sizeof(float4));
  r.expect_eof();
  return grid;
}

// ---- rays / hits --------------------------------------------------------

void save_rays(const std::vector<Ray>& rays, const std::string& path)
{
  Writer w(path);
  w.magic("RAYS");
  w.u32(uint32_t(rays.size()));
  w.bytes(rays.data(), rays.size() * sizeof(Ray));
  w.close();
}

std::vector<Ray> load_rays(const std::string& path)
{
  Reader r(path);
  r.expect_magic("RAYS");
  std::vector<Ray> rays(r.u32());
  r.read(rays.data(), rays.size() * sizeof(Ray));
  r.expect_eof();
  return rays;
}

void save_hits(const std::vector<CRT_Hit>& hits, const std::string& path)
{
  Writer w(path);
  w.magic("HITS");
  w.u32(uint32_t(hits.size()));
  for (const CRT_Hit& h : hits)
  {
    w.f32(h.t);
    w.u32(h.primId); w.u32(h.geomId); w.u32(h.instId);
    w.f32(h.coords[0]); w.f32(h.coords[1]);
  }
  w.close();
}

std::vector<CRT_Hit> load_hits(const std::string& path)
{
  Reader r(path);
  r.expect_magic("HITS");
  std::vector<CRT_Hit> hits(r.u32());
  for (CRT_Hit& h : hits)
  {
    h.t = r.f32();
    h.primId = r.u32(); h.geomId = r.u32(); h.instId = r.u32();
    h.coords[0] = r.f32(); h.coords[1] = r.f32();
  }
  r.expect_eof();
  return hits;
}

// ---- images -------------------------------------------------------------

void save_img1(const Image& img, const std::string& path)
{
  Writer w(path);
  w.magic("IMG1");
  w.u32(uint32_t(img.width));
  w.u32(uint32_t(img.height));
  w.bytes(img.pixels.data(), img.pixels.size() * sizeof(float3));
  w.close();
}

Image load_img1(const std::string& path)
{
  Reader r(path);
  r.expect_magic("IMG1");
  Image img;
  img.width = int(r.u32());
  img.height = int(r.u32());
  if (img.width < 1 || img.height < 1)
    throw std::runtime_error(path + ": invalid resolution");
  img.pixels.resize(size_t(img.width) * size_t(img.height));
  r.read(img.pixels.data(), img.pixels.size() * sizeof(float3));
  r.expect_eof();
  return img;
}

void save_ppm(const Image& img, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open for writing");
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> row(size_t(img.width) * 3);
  for (int y = 0; y < img.height; y++)
  {
    for (int x = 0; x < img.width; x++)
      for (int c = 0; c < 3; c++)
      {
        const float lin = std::clamp(img.at(x, y)[c], 0.0f, 1.0f);
        const float enc = std::pow(lin, 1.0f / 2.2f);
        row[size_t(x) * 3 + c] = (unsigned char)(std::lround(enc * 255.0f));
      }
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
  }
  if (!out)
    throw std::runtime_error(path + ": write failed");
}

} // namespace crt
