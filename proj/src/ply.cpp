#include "ply.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "error.hpp"

namespace bgs {

namespace {

enum class PropType { F32, F64, U8, I8, U16, I16, U32, I32 };

size_t prop_size(PropType t) {
  switch (t) {
    case PropType::F32: return 4;
    case PropType::F64: return 8;
    case PropType::U8:
    case PropType::I8: return 1;
    case PropType::U16:
    case PropType::I16: return 2;
    case PropType::U32:
    case PropType::I32: return 4;
  }
  return 0;
}

PropType prop_type_from(const std::string& s) {
  if (s == "float" || s == "float32") return PropType::F32;
  if (s == "double" || s == "float64") return PropType::F64;
  if (s == "uchar" || s == "uint8") return PropType::U8;
  if (s == "char" || s == "int8") return PropType::I8;
  if (s == "ushort" || s == "uint16") return PropType::U16;
  if (s == "short" || s == "int16") return PropType::I16;
  if (s == "uint" || s == "uint32") return PropType::U32;
  if (s == "int" || s == "int32") return PropType::I32;
  throw_data("ply: unsupported property type: " + s);
}

struct Property {
  std::string name;
  PropType type;
};

double read_ascii_value(std::istream& in) {
  double v = 0;
  if (!(in >> v)) throw_data("ply: truncated ascii vertex data");
  return v;
}

double read_binary_value(std::istream& in, PropType t) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(prop_size(t)));
  if (!in) throw_data("ply: truncated binary vertex data");
  switch (t) {
    case PropType::F32: {
      float f;
      std::memcpy(&f, buf, 4);
      return f;
    }
    case PropType::F64: {
      double d;
      std::memcpy(&d, buf, 8);
      return d;
    }
    case PropType::U8: return buf[0];
    case PropType::I8: return static_cast<int8_t>(buf[0]);
    case PropType::U16: {
      uint16_t v;
      std::memcpy(&v, buf, 2);
      return v;
    }
    case PropType::I16: {
      int16_t v;
      std::memcpy(&v, buf, 2);
      return v;
    }
    case PropType::U32: {
      uint32_t v;
      std::memcpy(&v, buf, 4);
      return v;
    }
    case PropType::I32: {
      int32_t v;
      std::memcpy(&v, buf, 4);
      return v;
    }
  }
  return 0;
}

std::string float_to_string(float f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(f));
  return buf;
}

}  // namespace

PlyData load_ply(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw_data("cannot open ply file: " + path);

  std::string line;
  if (!std::getline(f, line) || (line != "ply" && line != "ply\r"))
    throw_data("ply: missing magic line");

  bool binary = false;
  bool format_seen = false;
  long vertex_count = -1;
  std::vector<Property> props;
  bool in_vertex_element = false;

  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "end_header") break;
    std::istringstream is(line);
    std::string kw;
    is >> kw;
    if (kw == "comment" || kw == "obj_info") continue;
    if (kw == "format") {
      std::string fmt, ver;
      is >> fmt >> ver;
      if (ver != "1.0") throw_data("ply: unsupported version: " + ver);
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw_data("ply: unsupported format: " + fmt);
      format_seen = true;
    } else if (kw == "element") {
      std::string name;
      long count = -1;
      is >> name >> count;
      if (name != "vertex") throw_data("ply: only the vertex element is supported");
      if (vertex_count >= 0) throw_data("ply: duplicate vertex element");
      if (count < 0) throw_data("ply: malformed element line");
      vertex_count = count;
      in_vertex_element = true;
    } else if (kw == "property") {
      if (!in_vertex_element) throw_data("ply: property before element");
      std::string type, name;
      is >> type;
      if (type == "list") throw_data("ply: list properties are not supported");
      is >> name;
      if (name.empty()) throw_data("ply: malformed property line");
      props.push_back({name, prop_type_from(type)});
    } else if (kw.empty()) {
      continue;
    } else {
      throw_data("ply: unrecognized header line: " + line);
    }
  }
  if (line != "end_header" && line != "end_header\r")
    throw_data("ply: header not terminated");
  if (!format_seen) throw_data("ply: missing format line");
  if (vertex_count < 0) throw_data("ply: missing vertex element");

  int ix = -1, iy = -1, iz = -1, isal = -1, ilab = -1;
  for (size_t i = 0; i < props.size(); ++i) {
    const Property& p = props[i];
    auto expect = [&](PropType t, const char* what) {
      if (p.type != t) throw_data(std::string("ply: ") + what + " has unexpected type");
    };
    if (p.name == "x") { expect(PropType::F32, "x"); ix = static_cast<int>(i); }
    else if (p.name == "y") { expect(PropType::F32, "y"); iy = static_cast<int>(i); }
    else if (p.name == "z") { expect(PropType::F32, "z"); iz = static_cast<int>(i); }
    else if (p.name == "saliency") { expect(PropType::F32, "saliency"); isal = static_cast<int>(i); }
    else if (p.name == "label") { expect(PropType::U8, "label"); ilab = static_cast<int>(i); }
    // anything else (colors included) is read and discarded
  }
  if (ix < 0 || iy < 0 || iz < 0) throw_data("ply: x/y/z properties are required");

  PlyData out;
  out.cloud.points.reserve(static_cast<size_t>(vertex_count));
  if (isal >= 0) out.saliency.emplace();
  if (ilab >= 0) out.labels.emplace();

  std::vector<double> row(props.size());
  for (long v = 0; v < vertex_count; ++v) {
    for (size_t p = 0; p < props.size(); ++p) {
      row[p] = binary ? read_binary_value(f, props[p].type) : read_ascii_value(f);
    }
    out.cloud.points.push_back(
        {row[static_cast<size_t>(ix)], row[static_cast<size_t>(iy)], row[static_cast<size_t>(iz)]});
    if (isal >= 0) out.saliency->push_back(row[static_cast<size_t>(isal)]);
    if (ilab >= 0) {
      double l = row[static_cast<size_t>(ilab)];
      if (l < 0 || l > 2 || l != std::floor(l))
        throw_data("ply: label value outside {0,1,2}");
      out.labels->push_back(static_cast<uint8_t>(l));
    }
  }
  validate_cloud(out.cloud);
  if (out.saliency) validate_saliency(*out.saliency, out.cloud.size());
  return out;
}

void save_ply(const std::string& path, const PlyData& data,
              const PlySaveOptions& options) {
  const int n = data.cloud.size();
  if (data.saliency && static_cast<int>(data.saliency->size()) != n)
    throw_data("save_ply: saliency length mismatch");
  if (data.labels && static_cast<int>(data.labels->size()) != n)
    throw_data("save_ply: label length mismatch");
  if (options.with_colors && !data.saliency)
    throw_data("save_ply: color export requires a saliency map");

  std::ofstream f(path, std::ios::binary);
  if (!f) throw_data("cannot open ply file for writing: " + path);

  f << "ply\n";
  f << "format " << (options.binary ? "binary_little_endian" : "ascii") << " 1.0\n";
  f << "element vertex " << n << "\n";
  f << "property float x\nproperty float y\nproperty float z\n";
  if (data.saliency) f << "property float saliency\n";
  if (data.labels) f << "property uchar label\n";
  if (options.with_colors)
    f << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  f << "end_header\n";

  auto color_of = [](double s) {
    s = std::clamp(s, 0.0, 1.0);
    unsigned char r = static_cast<unsigned char>(std::lround(255.0 * s));
    unsigned char b = static_cast<unsigned char>(std::lround(255.0 * (1.0 - s)));
    return std::array<unsigned char, 3>{r, 0, b};
  };

  for (int i = 0; i < n; ++i) {
    const Vec3& p = data.cloud.points[static_cast<size_t>(i)];
    float xyz[3] = {static_cast<float>(p.x), static_cast<float>(p.y),
                    static_cast<float>(p.z)};
    float sal = data.saliency ? static_cast<float>((*data.saliency)[static_cast<size_t>(i)]) : 0.0f;
    uint8_t lab = data.labels ? (*data.labels)[static_cast<size_t>(i)] : 0;
    if (options.binary) {
      f.write(reinterpret_cast<const char*>(xyz), 12);
      if (data.saliency) f.write(reinterpret_cast<const char*>(&sal), 4);
      if (data.labels) f.write(reinterpret_cast<const char*>(&lab), 1);
      if (options.with_colors) {
        auto c = color_of(sal);
        f.write(reinterpret_cast<const char*>(c.data()), 3);
      }
    } else {
      f << float_to_string(xyz[0]) << ' ' << float_to_string(xyz[1]) << ' '
        << float_to_string(xyz[2]);
      if (data.saliency) f << ' ' << float_to_string(sal);
      if (data.labels) f << ' ' << static_cast<int>(lab);
      if (options.with_colors) {
        auto c = color_of(sal);
        f << ' ' << static_cast<int>(c[0]) << ' ' << static_cast<int>(c[1])
          << ' ' << static_cast<int>(c[2]);
      }
      f << '\n';
    }
  }
  if (!f) throw_data("failed writing ply file: " + path);
}

}  // namespace bgs
