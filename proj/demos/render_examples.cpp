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

// Writes PGM renders of the bundled systems into a directory (default
// ./renders): fast basins at a few depths and four finite continuations of
// the triangle system.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "fbe/basin.hpp"
#include "fbe/io.hpp"

using namespace fbe;

namespace {

std::string out_dir;

IfsSystem load(const std::string& name) { return load_spec(std::string(FBE_DATA_DIR) + "/" + name + ".json"); }

void save(const std::string& file, const Raster& r) {
  write_file(out_dir + "/" + file, pgm_bytes(r));
  std::printf("wrote %s/%s (%dx%d)\n", out_dir.c_str(), file.c_str(), r.nx(), r.ny());
}

void basins(const std::string& name, double cell, const Box& region, int nx, int ny, std::vector<int> depths) {
  const IfsSystem ifs = load(name);
  const AttractorCloud c = attractor(ifs, 400, cell);
  for (int d : depths) save(name + "_basin_d" + std::to_string(d) + ".pgm", fast_basin_raster(ifs, c, region, nx, ny, d));
}

// B_{theta|k} framed by its own bounding box, padded by 5%
void continuation(const IfsSystem& ifs, const AttractorCloud& c, const std::string& theta, int k, int px) {
  const ContinuationCloud cont = finite_continuation(ifs, c, parse_address(theta), static_cast<std::size_t>(k));
  Box b = bounding_box(cont.points);
  const double pad = 0.05 * std::max(b.x1 - b.x0, b.y1 - b.y0);
  b = {b.x0 - pad, b.y0 - pad, b.x1 + pad, b.y1 + pad};
  Raster r = make_raster(ifs, b, px, px, 0.5 * (b.x1 - b.x0) / px);
  for (const Point& p : cont.points) r.mark(p, k);
  std::string tag = theta;
  for (char& ch : tag)
    if (ch == '.' || ch == '(' || ch == ')' || ch == '*') ch = '_';
  save("triangle_cont_" + tag + "_k" + std::to_string(k) + ".pgm", r);
}

}  // namespace

int main(int argc, char** argv) {
  out_dir = argc > 1 ? argv[1] : "renders";
  try {
    std::filesystem::create_directories(out_dir);
    basins("sierpinski", 2e-3, Box{-4, -4, 5, 5}, 600, 600, {0, 2, 4});
    basins("interval", 1e-4, Box{-8, 0, 8, 0}, 1024, 1, {0, 3});
    basins("cantor", 1e-5, Box{-3, 0, 3, 0}, 2048, 1, {0, 2});
    basins("koch", 2e-3, Box{-2, -2, 3, 2}, 600, 480, {0, 3});

    const IfsSystem tri = load("triangle");
    const AttractorCloud c = attractor(tri, 400, 2e-3);
    for (const char* theta : {"(1)*", "(2)*", "(3.4)*", "(1.2.3.4)*"}) continuation(tri, c, theta, 4, 600);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "render_examples: %s\n", e.what());
    return 1;
  }
  return 0;
}
