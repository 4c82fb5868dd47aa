// Copyright 2026 The fbe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbe/attractor.hpp"
#include "fbe/basin.hpp"
#include "fbe/errors.hpp"
#include "fbe/ifs.hpp"
#include "fbe/manifold.hpp"
#include "fbe/symbolic.hpp"

namespace fbe {

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline double number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw Error(ErrorCode::Parse, where + ": expected a number");
  return j.get<double>();
}

inline Complex complex_number(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::Parse, where + ": expected [re, im]");
  return {number(j[0], where), number(j[1], where)};
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  // write-then-rename so concurrent readers never see a partial file
  const std::string tmp = path + ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << data;
    if (!out) throw Error(ErrorCode::Io, "short write to " + path);
  }
  std::filesystem::rename(tmp, path);
}

inline IfsSystem parse_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "spec must be a JSON object");
  if (!j.contains("space") || !j["space"].is_string()) throw Error(ErrorCode::Parse, "missing \"space\"");
  const std::string sp = j["space"].get<std::string>();
  Space space;
  if (sp == "R1")
    space = Space::R1;
  else if (sp == "R2")
    space = Space::R2;
  else if (sp == "sphere")
    space = Space::Sphere;
  else
    throw Error(ErrorCode::Parse, "unknown space \"" + sp + "\"");
  if (!j.contains("maps") || !j["maps"].is_array() || j["maps"].empty())
    throw Error(ErrorCode::Parse, "\"maps\" must be a nonempty array");
  std::vector<MapSpec> maps;
  int index = 0;
  for (const auto& m : j["maps"]) {
    const std::string where = "map " + std::to_string(++index);
    if (!m.is_object() || !m.contains("type") || !m["type"].is_string()) throw Error(ErrorCode::Parse, where + ": missing \"type\"");
    const std::string type = m["type"].get<std::string>();
    if (type == "affine") {
      if (!m.contains("matrix") || !m.contains("offset")) throw Error(ErrorCode::Parse, where + ": needs matrix and offset");
      const auto& M = m["matrix"];
      const auto& t = m["offset"];
      const int dim = embed_dim(space);
      if (space == Space::Sphere) throw Error(ErrorCode::Domain, where + ": affine map on the sphere");
      if (!M.is_array() || static_cast<int>(M.size()) != dim || !t.is_array() || static_cast<int>(t.size()) != dim)
        throw Error(ErrorCode::Parse, where + ": matrix/offset shape does not match the space");
      AffineMap f;
      f.dim = dim;
      for (int r = 0; r < dim; ++r) {
        if (!M[r].is_array() || static_cast<int>(M[r].size()) != dim)
          throw Error(ErrorCode::Parse, where + ": matrix row " + std::to_string(r + 1));
        for (int c = 0; c < dim; ++c) f.m[static_cast<std::size_t>(r * dim + c)] = detail::number(M[r][c], where);
        f.t[static_cast<std::size_t>(r)] = detail::number(t[r], where);
      }
      if (dim == 1) f.m = {f.m[0], 0.0, 0.0, 1.0};
      maps.emplace_back(f);
    } else if (type == "moebius") {
      for (const char* k : {"a", "b", "c", "d"})
        if (!m.contains(k)) throw Error(ErrorCode::Parse, where + ": missing coefficient " + k);
      maps.emplace_back(MoebiusMap{detail::complex_number(m["a"], where), detail::complex_number(m["b"], where),
                                   detail::complex_number(m["c"], where), detail::complex_number(m["d"], where)});
    } else {
      throw Error(ErrorCode::Parse, where + ": unknown type \"" + type + "\"");
    }
  }
  std::optional<double> lambda;
  if (j.contains("contractivity")) lambda = detail::number(j["contractivity"], "contractivity");
  return IfsSystem(space, std::move(maps), lambda);
}

inline IfsSystem load_spec(const std::string& path) { return parse_spec(read_file(path)); }

// Attractor cache: "FBE-CLOUD v1 <hash> <epsilon> <count>" then one point per line.
inline std::string format_point(Space s, const Point& p) {
  if (p.infinite) return "inf";
  if (s == Space::R1) return format_double(p.x);
  return format_double(p.x) + " " + format_double(p.y);
}

inline std::string serialize_cloud(const AttractorCloud& c) {
  std::string out = "FBE-CLOUD v1 " + c.ifs_hash + " " + format_double(c.epsilon) + " " +
                    std::to_string(c.points.size()) + "\n";
  for (const Point& p : c.points) out += format_point(c.space, p) + "\n";
  return out;
}

inline void save_cloud(const AttractorCloud& c, const std::string& path) { write_file(path, serialize_cloud(c)); }

inline AttractorCloud parse_cloud(const IfsSystem& ifs, const std::string& text) {
  std::istringstream in(text);
  std::string magic, version, hash, eps;
  std::size_t count = 0;
  if (!(in >> magic >> version >> hash >> eps >> count) || magic != "FBE-CLOUD" || version != "v1")
    throw Error(ErrorCode::Parse, "bad cloud header");
  if (hash != ifs.hash()) throw Error(ErrorCode::StaleCache, "cache was built for IFS " + hash + ", spec is " + ifs.hash());
  AttractorCloud c;
  c.space = ifs.space();
  c.ifs_hash = hash;
  c.epsilon = std::strtod(eps.c_str(), nullptr);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "inf") {
      c.points.push_back(infinity());
      continue;
    }
    std::istringstream ls(line);
    std::string xs, ys;
    ls >> xs >> ys;
    Point p{std::strtod(xs.c_str(), nullptr), ys.empty() ? 0.0 : std::strtod(ys.c_str(), nullptr)};
    c.points.push_back(p);
  }
  if (c.points.size() != count) throw Error(ErrorCode::Parse, "cloud count mismatch");
  if (c.points.empty()) throw Error(ErrorCode::Parse, "empty cloud");
  c.lambda = detail::contraction_factor(ifs, c.points);
  c.contractive = c.lambda < 1.0;
  c.build_index();
  return c;
}

inline AttractorCloud load_cloud(const IfsSystem& ifs, const std::string& path) {
  return parse_cloud(ifs, read_file(path));
}

// Attractor through the FBE_CACHE_DIR cache when that variable is set.
inline AttractorCloud cached_attractor(const IfsSystem& ifs, int depth, double cell) {
  const char* dir = std::getenv("FBE_CACHE_DIR");
  if (!dir || !*dir) return attractor(ifs, depth, cell);
  char name[128];
  std::snprintf(name, sizeof name, "%s-d%d-c%.17g.cloud", ifs.hash().c_str(), depth, cell);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  if (std::filesystem::exists(path)) {
    AttractorCloud c = load_cloud(ifs, path.string());
    c.depth = depth;
    c.cell = cell;
    return c;
  }
  AttractorCloud c = attractor(ifs, depth, cell);
  std::filesystem::create_directories(dir);
  save_cloud(c, path.string());
  return c;
}

// Binary PGM, top row first: 0 for a miss, else 255 - min(16 depth, 254).
inline std::string pgm_bytes(const Raster& r) {
  std::string out = "P5\n" + std::to_string(r.nx()) + " " + std::to_string(r.ny()) + "\n255\n";
  for (int iy = r.ny() - 1; iy >= 0; --iy)
    for (int ix = 0; ix < r.nx(); ++ix) {
      const int d = r.depth(ix, iy);
      out += static_cast<char>(d < 0 ? 0 : 255 - std::min(d * 16, 254));
    }
  return out;
}

inline std::string csv_text(const Raster& r) {
  std::string out = "ix,iy,depth\n";
  for (int iy = 0; iy < r.ny(); ++iy)
    for (int ix = 0; ix < r.nx(); ++ix)
      if (r.hit(ix, iy)) out += std::to_string(ix) + "," + std::to_string(iy) + "," + std::to_string(r.depth(ix, iy)) + "\n";
  return out;
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

// Manifold point text: "<theta>:<x>[,<y>]", theta in address syntax.
inline std::pair<Word, Point> parse_manifold_point(const std::string& text) {
  const std::size_t colon = text.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::Parse, "manifold point needs theta:x");
  const Address theta = parse_address(text.substr(0, colon));
  if (!theta.is_finite()) throw Error(ErrorCode::Parse, "integer part must be finite");
  const std::string coords = text.substr(colon + 1);
  Point p;
  char* end = nullptr;
  p.x = std::strtod(coords.c_str(), &end);
  if (end == coords.c_str()) throw Error(ErrorCode::Parse, "bad coordinate in '" + text + "'");
  if (*end == ',') {
    const char* ys = end + 1;
    p.y = std::strtod(ys, &end);
    if (end == ys) throw Error(ErrorCode::Parse, "bad coordinate in '" + text + "'");
  }
  if (*end != '\0') throw Error(ErrorCode::Parse, "trailing text in '" + text + "'");
  return {theta.preperiod(), p};
}

inline std::string format_manifold_point(Space s, const ManifoldPoint& p) {
  std::string c = format_point(s, p.x);
  std::replace(c.begin(), c.end(), ' ', ',');
  return join_digits(p.theta) + ":" + c;
}

inline std::string distance_json(const ManifoldDistance& d) {
  return "{ \"d_L\": " + format_double(d.d_L) + ", \"d_X\": " + format_double(d.d_X) +
         ", \"common_prefix\": " + json_string(join_digits(d.common_prefix)) +
         ", \"error_bound\": " + format_double(d.error_bound) + " }";
}

// One CSV row per leaf: extent of its projection.
inline std::string leaves_csv(const Manifold& m, int depth) {
  const bool one = m.ifs().space() == Space::R1;
  std::string out = one ? "theta,count,proj_min,proj_max\n" : "theta,count,xmin,ymin,xmax,ymax\n";
  for (const Word& t : enumerate_leaves(m.ifs().size(), depth)) {
    std::vector<Point> pts;
    try {
      pts = m.leaf_projection(t);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyLeaf) throw;
    }
    const Box b = bounding_box(pts);
    out += json_string(join_digits(t)) + "," + std::to_string(pts.size());
    if (one)
      out += "," + format_double(b.x0) + "," + format_double(b.x1) + "\n";
    else
      out += "," + format_double(b.x0) + "," + format_double(b.y0) + "," + format_double(b.x1) + "," +
             format_double(b.y1) + "\n";
  }
  return out;
}

}  // namespace fbe
