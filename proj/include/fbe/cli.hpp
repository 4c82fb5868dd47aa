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

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbe/attractor.hpp"
#include "fbe/basin.hpp"
#include "fbe/coding.hpp"
#include "fbe/errors.hpp"
#include "fbe/io.hpp"
#include "fbe/manifold.hpp"
#include "fbe/parallel.hpp"
#include "fbe/symbolic.hpp"
#include "fbe/verify.hpp"

namespace fbe::cli {

inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0') throw Error(ErrorCode::Usage, "bad number '" + tok + "' in " + what);
    out.push_back(v);
  }
  return out;
}

// "x0,x1" for R1, "x0,y0,x1,y1" otherwise
inline Box parse_region(const std::string& text, Space s) {
  const auto v = parse_list(text, "--region");
  if (s == Space::R1 && v.size() == 2) return {v[0], 0.0, v[1], 0.0};
  if (v.size() == 4) return {v[0], v[1], v[2], v[3]};
  throw Error(ErrorCode::Usage, "--region expects x0,x1 (R1) or x0,y0,x1,y1");
}

inline std::pair<int, int> parse_grid(const std::string& text) {
  const auto v = parse_list(text, "--grid");
  if (v.size() == 1) return {static_cast<int>(v[0]), static_cast<int>(v[0])};
  if (v.size() == 2) return {static_cast<int>(v[0]), static_cast<int>(v[1])};
  throw Error(ErrorCode::Usage, "--grid expects NX or NX,NY");
}

inline bool is_usage(ErrorCode c) {
  return c == ErrorCode::Usage || c == ErrorCode::Parse || c == ErrorCode::Io || c == ErrorCode::InvalidDigit ||
         c == ErrorCode::NonInvertible;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Attractors, fast basins and branched fractal manifolds of iterated function systems", "fbe"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (output does not depend on it)");
  app.fallthrough();

  std::string ifs_path;
  double cell = 0.0;
  int attr_depth = 400;
  const auto add_ifs = [&](CLI::App* c, bool required = true) {
    auto* o = c->add_option("--ifs", ifs_path, "IFS spec (JSON)");
    if (required) o->required();
    c->add_option("--cell", cell, "dedup cell of the attractor cloud (default by space)");
    c->add_option("--attractor-depth", attr_depth, "Hutchinson iteration cap");
  };

  // attractor
  auto* c_attr = app.add_subcommand("attractor", "approximate the attractor");
  add_ifs(c_attr);
  std::string attr_out;
  std::size_t chaos_n = 0, burn_in = 100;
  std::uint64_t seed = 1;
  c_attr->add_option("--out", attr_out, "write the cloud in cache format");
  c_attr->add_option("--chaos", chaos_n, "use a chaos-game orbit of this length");
  c_attr->add_option("--burn-in", burn_in, "chaos-game points discarded");
  c_attr->add_option("--seed", seed, "chaos-game seed");

  // fastbasin and continuation share raster flags
  std::string region_text, grid_text = "512", pgm_out, csv_out, theta_text;
  int depth = 3;
  std::optional<double> raster_tol;
  const auto add_raster = [&](CLI::App* c) {
    add_ifs(c);
    c->add_option("--region", region_text, "x0,y0,x1,y1 (x0,x1 for R1)")->required();
    c->add_option("--grid", grid_text, "NX[,NY]");
    c->add_option("--tol", raster_tol, "hit inflation (default 3 epsilon)");
    c->add_option("--out", pgm_out, "PGM output");
    c->add_option("--csv", csv_out, "CSV output");
  };
  auto* c_fb = app.add_subcommand("fastbasin", "rasterize the fast basin to a word depth");
  add_raster(c_fb);
  c_fb->add_option("--depth", depth, "maximal word length");
  auto* c_cont = app.add_subcommand("continuation", "rasterize a finite continuation B_{theta|k}");
  add_raster(c_cont);
  c_cont->add_option("--theta", theta_text, "positive address, e.g. (1.2)*")->required();
  c_cont->add_option("--depth,-k", depth, "number of digits of theta used");

  // code
  auto* c_code = app.add_subcommand("code", "address arithmetic and the coding map");
  c_code->require_subcommand(1);
  int n_maps = 2;
  std::string a1, a2;
  int digit = 0;
  std::size_t length = 0;
  auto* k_sigma = c_code->add_subcommand("sigma", "inverse shift sigma_n");
  k_sigma->add_option("n", digit)->required();
  k_sigma->add_option("address", a1)->required();
  auto* k_shift = c_code->add_subcommand("shift", "drop the first digit");
  k_shift->add_option("address", a1)->required();
  auto* k_neg = c_code->add_subcommand("negate", "negate every digit");
  k_neg->add_option("address", a1)->required();
  auto* k_cls = c_code->add_subcommand("classify", "membership in the address spaces");
  k_cls->add_option("address", a1)->required();
  k_cls->add_option("--n", n_maps, "number of maps");
  auto* k_metric = c_code->add_subcommand("metric", "code-space distance");
  k_metric->add_option("a", a1)->required();
  k_metric->add_option("b", a2)->required();
  auto* k_dis = c_code->add_subcommand("disjunctive", "prefix of the disjunctive word");
  k_dis->add_option("--n", n_maps, "number of maps");
  k_dis->add_option("--length", length)->required();
  auto* k_pi = c_code->add_subcommand("pi", "coding map of an eventually positive address");
  k_pi->add_option("address", a1)->required();
  k_pi->add_option("--ifs", ifs_path)->required();

  // manifold
  auto* c_man = app.add_subcommand("manifold", "branched fractal manifold");
  c_man->require_subcommand(1);
  std::string pa, pb;
  double man_tol = 0.0;  // 0: twice the cloud tau
  auto* m_dist = c_man->add_subcommand("dist", "manifold distance of two points theta:x");
  add_ifs(m_dist);
  m_dist->add_option("--a", pa)->required();
  m_dist->add_option("--b", pb)->required();
  auto* m_leaves = c_man->add_subcommand("leaves", "leaf projections as CSV");
  add_ifs(m_leaves);
  m_leaves->add_option("--depth", depth);
  auto* m_branch = c_man->add_subcommand("branch", "branch points as CSV");
  add_ifs(m_branch);
  m_branch->add_option("--depth", depth);
  m_branch->add_option("--tol", man_tol, "attractor-scale tolerance, default 2 tau");
  auto* m_canon = c_man->add_subcommand("canon", "integer and fractional part of an address");
  add_ifs(m_canon);
  m_canon->add_option("address", a1)->required();

  // verify
  auto* c_ver = app.add_subcommand("verify", "run the check suite on one IFS");
  add_ifs(c_ver);
  VerifyOptions vopt;
  std::string json_out;
  c_ver->add_option("--samples", vopt.samples);
  c_ver->add_option("--seed", vopt.seed);
  c_ver->add_option("--json", json_out, "write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads > 0) thread_hint() = threads;
    const auto load = [&] { return load_spec(ifs_path); };
    const auto cloud_of = [&](const IfsSystem& ifs) {
      return cached_attractor(ifs, attr_depth, cell > 0 ? cell : default_cell(ifs.space()));
    };

    if (*c_attr) {
      const IfsSystem ifs = load();
      const AttractorCloud c =
          chaos_n > 0 ? chaos_game(ifs, chaos_n, burn_in, seed) : cloud_of(ifs);
      if (!attr_out.empty()) save_cloud(c, attr_out);
      out << "{ \"points\": " << c.points.size() << ", \"epsilon\": " << format_double(c.epsilon)
          << ", \"ifs_hash\": " << json_string(c.ifs_hash) << ", \"depth\": " << c.depth
          << ", \"cell\": " << format_double(c.cell) << ", \"lambda\": " << format_double(c.lambda)
          << ", \"contractive\": " << (c.contractive ? "true" : "false")
          << ", \"residual\": " << format_double(c.residual) << " }\n";
      return 0;
    }

    if (*c_fb || *c_cont) {
      const IfsSystem ifs = load();
      const AttractorCloud c = cloud_of(ifs);
      const Box region = parse_region(region_text, ifs.space());
      const auto [nx, ny] = parse_grid(grid_text);
      std::optional<Raster> r;
      if (*c_fb) {
        r = fast_basin_raster(ifs, c, region, nx, ny, depth, raster_tol);
      } else {
        r = make_raster(ifs, region, nx, ny, raster_tol.value_or(c.tau()));
        const auto cont = finite_continuation(ifs, c, parse_address(theta_text), static_cast<std::size_t>(depth));
        for (const Point& p : cont.points) r->mark(p, depth);
      }
      if (r->resolution_warning()) err << "warning: raster cells are smaller than the hit tolerance\n";
      if (!pgm_out.empty()) write_file(pgm_out, pgm_bytes(*r));
      if (!csv_out.empty()) write_file(csv_out, csv_text(*r));
      out << "{ \"hits\": " << r->count() << ", \"nx\": " << r->nx() << ", \"ny\": " << r->ny()
          << ", \"tol\": " << format_double(r->tau())
          << ", \"resolution_warning\": " << (r->resolution_warning() ? "true" : "false") << " }\n";
      return 0;
    }

    if (*c_code) {
      if (*k_sigma) {
        const Address a = parse_address(a1);
        if (!is_reduced(a)) throw Error(ErrorCode::Domain, a1 + " has a cancelling pair");
        out << to_string(sigma(digit, a)) << "\n";
      } else if (*k_shift) {
        out << to_string(shift(parse_address(a1))) << "\n";
      } else if (*k_neg) {
        out << to_string(negate(parse_address(a1))) << "\n";
      } else if (*k_metric) {
        out << format_double(metric(parse_address(a1), parse_address(a2))) << "\n";
      } else if (*k_dis) {
        out << join_digits(disjunctive_prefix(n_maps, length)) << "\n";
      } else if (*k_cls) {
        const AddressClass c = validate(parse_address(a1), n_maps);
        const auto b = [](bool v) { return v ? "true" : "false"; };
        out << "{ \"finite\": " << b(c.finite) << ", \"reduced\": " << b(c.reduced) << ", \"I0\": " << b(c.in_I0)
            << ", \"I\": " << b(c.in_I) << ", \"I+\": " << b(c.in_Iplus) << ", \"I-\": " << b(c.in_Iminus)
            << ", \"Ihat\": " << b(c.in_Ihat) << ", \"Ihat*\": " << b(c.in_Ihat_star) << ", \"J+\": " << b(c.in_Jplus)
            << ", \"J-\": " << b(c.in_Jminus) << " }\n";
      } else if (*k_pi) {
        const IfsSystem ifs = load();
        out << format_point(ifs.space(), coding_map(ifs, parse_address(a1))) << "\n";
      }
      return 0;
    }

    if (*c_man) {
      const IfsSystem ifs = load();
      const Manifold m(ifs, cloud_of(ifs));
      if (*m_dist) {
        auto [ta, xa] = parse_manifold_point(pa);
        auto [tb, xb] = parse_manifold_point(pb);
        const ManifoldPoint a = m.make_point(std::move(ta), xa), b = m.make_point(std::move(tb), xb);
        out << distance_json(m.distance(a, b)) << "\n";
      } else if (*m_leaves) {
        out << leaves_csv(m, depth);
      } else if (*m_branch) {
        out << "theta,x,proj,incident\n";
        for (const BranchPoint& bp : m.branch_points(depth, man_tol > 0.0 ? man_tol : 2.0 * m.tau())) {
          std::string x = format_point(ifs.space(), bp.point.x), p = format_point(ifs.space(), bp.point.proj);
          std::replace(x.begin(), x.end(), ' ', ';');
          std::replace(p.begin(), p.end(), ' ', ';');
          out << json_string(join_digits(bp.point.theta)) << "," << x << "," << p << "," << bp.incident_leaves << "\n";
        }
      } else if (*m_canon) {
        const ManifoldPoint p = m.canonicalize(parse_address(a1), m.tau());
        out << "{ \"theta\": " << json_string(join_digits(p.theta)) << ", \"x\": "
            << json_string(format_point(ifs.space(), p.x)) << ", \"proj\": "
            << json_string(format_point(ifs.space(), p.proj)) << " }\n";
      }
      return 0;
    }

    if (*c_ver) {
      const IfsSystem ifs = load();
      vopt.cell = cell;
      vopt.depth = attr_depth;
      const VerifyReport rep = verify_suite(ifs, vopt);
      out << rep.text();
      if (!json_out.empty()) write_file(json_out, rep.json() + "\n");
      return rep.passed() ? 0 : 1;
    }
  } catch (const Error& e) {
    err << "fbe: " << e.what() << "\n";
    return is_usage(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "fbe: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fbe::cli
