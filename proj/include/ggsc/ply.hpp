#pragma once

#include "ggsc/gs_core.hpp"

#include <optional>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace ggsc {

namespace ply_detail {

  enum class Scalar { i8, u8, i16, u16, i32, u32, f32, f64 };

  inline std::optional<Scalar> parse_scalar(std::string_view name)
  {
    static const std::pair<std::string_view, Scalar> table[] = {
      {"char", Scalar::i8},    {"int8", Scalar::i8},     {"uchar", Scalar::u8},
      {"uint8", Scalar::u8},   {"short", Scalar::i16},   {"int16", Scalar::i16},
      {"ushort", Scalar::u16}, {"uint16", Scalar::u16},  {"int", Scalar::i32},
      {"int32", Scalar::i32},  {"uint", Scalar::u32},    {"uint32", Scalar::u32},
      {"float", Scalar::f32},  {"float32", Scalar::f32}, {"double", Scalar::f64},
      {"float64", Scalar::f64},
    };
    for (const auto& [n, s] : table)
      if (n == name)
        return s;
    return std::nullopt;
  }

  inline std::size_t scalar_size(Scalar s)
  {
    switch (s) {
    case Scalar::i8:
    case Scalar::u8: return 1;
    case Scalar::i16:
    case Scalar::u16: return 2;
    case Scalar::i32:
    case Scalar::u32:
    case Scalar::f32: return 4;
    case Scalar::f64: return 8;
    }
    return 0;
  }

  template<typename T>
  double load_as(const std::uint8_t* p)
  {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return double(v);
  }

  inline double read_scalar(Scalar s, const std::uint8_t* p)
  {
    switch (s) {
    case Scalar::i8: return load_as<std::int8_t>(p);
    case Scalar::u8: return load_as<std::uint8_t>(p);
    case Scalar::i16: return load_as<std::int16_t>(p);
    case Scalar::u16: return load_as<std::uint16_t>(p);
    case Scalar::i32: return load_as<std::int32_t>(p);
    case Scalar::u32: return load_as<std::uint32_t>(p);
    case Scalar::f32: return load_as<float>(p);
    case Scalar::f64: return load_as<double>(p);
    }
    return 0;
  }

  struct Property {
    std::string name;
    Scalar type;
    std::size_t offset;
  };

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
    std::size_t stride = 0;
  };

  // Names of the fields required for a primitive, in the order they are
  // stored in GaussianCloud (centers, sh, opacity, scale, rotation).
  inline const std::vector<std::string>& required_fields()
  {
    static const std::vector<std::string> names = [] {
      std::vector<std::string> n{"x", "y", "z"};
      for (int i = 0; i < 3; ++i)
        n.push_back("f_dc_" + std::to_string(i));
      for (int i = 0; i < 45; ++i)
        n.push_back("f_rest_" + std::to_string(i));
      n.push_back("opacity");
      for (int i = 0; i < 3; ++i)
        n.push_back("scale_" + std::to_string(i));
      for (int i = 0; i < 4; ++i)
        n.push_back("rot_" + std::to_string(i));
      return n;
    }();
    return names;
  }

}  // namespace ply_detail

//============================================================================
// Read the named scalar properties of every `vertex` of a binary
// little-endian PLY, row-major (one row of fields.size() values per vertex).
// Other elements and unrequested properties are skipped.

inline std::vector<double>
read_ply_vertices(ByteView bytes, std::span<const std::string> fields, std::size_t* count)
{
  using namespace ply_detail;

  static constexpr std::string_view kEnd = "end_header";
  std::string_view all(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  auto endPos = all.find(kEnd);
  if (endPos == std::string_view::npos)
    throw Error("ply: missing end_header");
  auto dataStart = all.find('\n', endPos);
  if (dataStart == std::string_view::npos)
    throw Error("ply: header not terminated");
  ++dataStart;

  std::istringstream header{std::string(all.substr(0, endPos))};
  std::string line;
  std::vector<Element> elements;
  bool sawMagic = false, sawFormat = false;
  while (std::getline(header, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info")
      continue;
    if (!sawMagic) {
      if (keyword != "ply")
        throw Error("ply: bad magic");
      sawMagic = true;
      continue;
    }
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt != "binary_little_endian")
        throw Error("ply: unsupported format '" + fmt + "'");
      sawFormat = true;
    }
    else if (keyword == "element") {
      Element e;
      long long n = -1;
      ls >> e.name >> n;
      if (!ls || n < 0)
        throw Error("ply: malformed element line '" + line + "'");
      e.count = std::size_t(n);
      elements.push_back(std::move(e));
    }
    else if (keyword == "property") {
      if (elements.empty())
        throw Error("ply: property before element");
      std::string type, name;
      ls >> type >> name;
      if (type == "list")
        throw Error(
          "ply: list properties are not supported (element '"
          + elements.back().name + "')");
      auto scalar = parse_scalar(type);
      if (!scalar || name.empty())
        throw Error("ply: malformed property line '" + line + "'");
      auto& e = elements.back();
      e.properties.push_back({name, *scalar, e.stride});
      e.stride += scalar_size(*scalar);
    }
    else {
      throw Error("ply: unexpected header line '" + line + "'");
    }
  }
  if (!sawMagic || !sawFormat)
    throw Error("ply: malformed header");

  std::size_t offset = dataStart;
  const Element* vertex = nullptr;
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      vertex = &e;
      break;
    }
    offset += e.count * e.stride;
  }
  if (!vertex)
    throw Error("ply: no vertex element");

  std::unordered_map<std::string_view, const Property*> byName;
  for (const auto& p : vertex->properties)
    byName.emplace(p.name, &p);

  std::vector<const Property*> props;
  props.reserve(fields.size());
  for (const auto& f : fields) {
    auto it = byName.find(f);
    if (it == byName.end())
      throw Error("ply: missing required field '" + f + "'");
    props.push_back(it->second);
  }

  const auto n = vertex->count;
  if (vertex->stride == 0 || bytes.size() < offset
      || (bytes.size() - offset) / vertex->stride < n)
    throw Error("ply: truncated vertex data");

  std::vector<double> table(n * fields.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto* base = bytes.data() + offset + i * vertex->stride;
    for (std::size_t f = 0; f < props.size(); ++f) {
      double v = read_scalar(props[f]->type, base + props[f]->offset);
      if (!std::isfinite(v))
        throw Error(
          "ply: non-finite value in field '" + fields[f] + "' at vertex "
          + std::to_string(i));
      table[i * fields.size() + f] = v;
    }
  }
  *count = n;
  return table;
}

//============================================================================
// Read a binary little-endian 3DGS PLY.  Only the `vertex` element is
// interpreted; unknown vertex properties (normals etc.) are skipped.

inline GaussianCloud
load_ply(ByteView bytes)
{
  const auto& fields = ply_detail::required_fields();
  std::size_t n = 0;
  auto table = read_ply_vertices(bytes, fields, &n);

  GaussianCloud cloud;
  cloud.resize(n);
  const double* row = table.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : cloud.centers[i])
      c = *row++;
    for (auto& c : cloud.sh[i])
      c = *row++;
    cloud.opacity[i] = *row++;
    for (auto& c : cloud.scale[i])
      c = *row++;
    for (auto& c : cloud.rotation[i])
      c = *row++;
  }
  return cloud;
}

//============================================================================
// Write the layout of the reference 3DGS exporter (normals written as zero).
// Values are narrowed to 32-bit floats.

inline Bytes
save_ply(const GaussianCloud& cloud)
{
  validate(cloud);

  std::string header = "ply\nformat binary_little_endian 1.0\nelement vertex "
                       + std::to_string(cloud.size()) + "\n";
  const auto& fields = ply_detail::required_fields();
  auto addProperty = [&](const std::string& name) {
    header += "property float " + name + "\n";
  };
  for (int i = 0; i < 3; ++i)
    addProperty(fields[i]);
  for (const char* nrm : {"nx", "ny", "nz"})
    addProperty(nrm);
  for (std::size_t i = 3; i < fields.size(); ++i)
    addProperty(fields[i]);
  header += "end_header\n";

  ByteWriter out;
  out.buffer().reserve(header.size() + cloud.size() * 62 * 4);
  out.text(header);
  auto put = [&](double v, std::size_t i) {
    auto f = float(v);
    if (!std::isfinite(f))
      throw Error(
        "ply: value at primitive " + std::to_string(i)
        + " overflows 32-bit float");
    out.f32(f);
  };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (double v : cloud.centers[i])
      put(v, i);
    for (int k = 0; k < 3; ++k)
      out.f32(0.0f);
    for (double v : cloud.sh[i])
      put(v, i);
    put(cloud.opacity[i], i);
    for (double v : cloud.scale[i])
      put(v, i);
    for (double v : cloud.rotation[i])
      put(v, i);
  }
  return out.take();
}

}  // namespace ggsc
