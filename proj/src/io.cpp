#include "ncpano/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ncpano/error.hpp"

namespace ncpano::io {

namespace {

template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorCode::kParse, where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse,
         where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "cannot read " + path.string());
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kParse, source + ": " + e.what());
  }
}

Json layout_to_json(const Layout& layout, const Json& config) {
  Json j;
  Json verts = Json::array();
  for (const Vec2& v : layout.vertices) verts.push_back({v.x(), v.y()});
  j["vertices"] = verts;
  j["h_c"] = layout.h_c;
  j["h_f"] = layout.h_f;
  if (!config.is_null()) j["config"] = config;
  return j;
}

Layout layout_from_json(const Json& j) {
  const std::string where = "layout";
  Layout l;
  const auto verts = field<std::vector<std::vector<double>>>(j, "vertices", where);
  for (const auto& v : verts) {
    if (v.size() != 2) fail(ErrorCode::kParse, where + ": vertex is not [x, y]");
    l.vertices.emplace_back(v[0], v[1]);
  }
  l.h_c = field<double>(j, "h_c", where);
  l.h_f = field<double>(j, "h_f", where);
  return l;
}

Json observation_to_json(const BoundaryObservation& obs, const Json& config) {
  Json j;
  j["camera"] = {{"radius", obs.camera.radius},
                 {"width", obs.camera.width},
                 {"height", obs.camera.height}};
  j["theta_ceiling"] = obs.theta_ceiling;
  j["theta_floor"] = obs.theta_floor;
  j["corner_prob"] = obs.corner_prob;
  if (!config.is_null()) j["config"] = config;
  return j;
}

BoundaryObservation observation_from_json(const Json& j) {
  const std::string where = "observation";
  BoundaryObservation obs;
  const Json cam = field<Json>(j, "camera", where);
  obs.camera.radius = field<double>(cam, "radius", where + ".camera");
  obs.camera.width = field<int>(cam, "width", where + ".camera");
  obs.camera.height = field<int>(cam, "height", where + ".camera");
  obs.theta_ceiling = field<std::vector<double>>(j, "theta_ceiling", where);
  obs.theta_floor = field<std::vector<double>>(j, "theta_floor", where);
  obs.corner_prob = field<std::vector<double>>(j, "corner_prob", where);
  const auto n = static_cast<std::size_t>(std::max(0, obs.camera.width));
  if (obs.theta_ceiling.size() != n || obs.theta_floor.size() != n ||
      obs.corner_prob.size() != n) {
    fail(ErrorCode::kParse,
         where + ": per-column arrays must have camera.width = " +
             std::to_string(n) + " entries");
  }
  return obs;
}

Json diagnostics_to_json(const LayoutSolution& solution) {
  const auto diag_json = [](const Diagnostics& d) {
    Json j;
    j["singular_values"] = vector_json(d.singular_values);
    j["null_dimension"] = d.null_dimension;
    Json lambda;
    lambda["lambda"] = d.lambda.lambda;
    lambda["lambda_v"] = d.lambda.lambda_v;
    lambda["lambda_w"] = d.lambda.lambda_w;
    lambda["consistent"] = d.lambda.consistent;
    lambda["fallback"] = d.lambda_fallback;
    Json cands = Json::array();
    for (const auto& c : d.lambda.candidates) {
      cands.push_back({{"lambda_v", c.lambda_v},
                       {"lambda_w", c.lambda_w},
                       {"h_c", c.h_c},
                       {"h_f", c.h_f}});
    }
    lambda["candidates"] = cands;
    lambda["chosen"] = d.lambda.chosen;
    j["lambda"] = lambda;
    j["max_residual"] = d.max_residual;
    j["rms_residual"] = d.rms_residual;
    j["warnings"] = d.warnings;
    return j;
  };
  Json j;
  j["mode"] = std::string(to_string(solution.mode));
  j["h_c"] = solution.h_c;
  j["h_f"] = solution.h_f;
  Json walls = Json::array();
  for (std::size_t i = 0; i < solution.walls.size(); ++i) {
    const Wall& w = solution.walls[i];
    walls.push_back({{"direction", {w.frame.e1.x(), w.frame.e1.y()}},
                     {"d", w.d},
                     {"observed", i < solution.observed.size()
                                      ? static_cast<bool>(solution.observed[i])
                                      : true}});
  }
  j["walls"] = walls;
  if (solution.mode == Mode::kManhattan) {
    j["manhattan_direction"] = {solution.manhattan_direction.x(),
                                solution.manhattan_direction.y()};
  }
  j["joint"] = diag_json(solution.diagnostics);
  Json per_wall = Json::array();
  for (const auto& d : solution.per_wall) per_wall.push_back(diag_json(d));
  j["per_wall"] = per_wall;
  return j;
}

Layout read_layout(const std::filesystem::path& path) {
  return layout_from_json(parse_json(read_text(path), path.string()));
}

void write_layout(const std::filesystem::path& path, const Layout& layout,
                  const Json& config) {
  write_text(path, layout_to_json(layout, config).dump(2) + "\n");
}

BoundaryObservation read_observation(const std::filesystem::path& path) {
  return observation_from_json(parse_json(read_text(path), path.string()));
}

void write_observation(const std::filesystem::path& path,
                       const BoundaryObservation& obs, const Json& config) {
  write_text(path, observation_to_json(obs, config).dump(2) + "\n");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  std::string s = buf;
  if (s == "-0") s = "0";
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string floor_plan_svg(const Layout* gt, const Layout* pred,
                           const std::string& title, const Json& config) {
  double lo_x = -1.0, lo_y = -1.0, hi_x = 1.0, hi_y = 1.0;
  for (const Layout* l : {gt, pred}) {
    if (l == nullptr) continue;
    for (const Vec2& v : l->vertices) {
      lo_x = std::min(lo_x, v.x());
      lo_y = std::min(lo_y, v.y());
      hi_x = std::max(hi_x, v.x());
      hi_y = std::max(hi_y, v.y());
    }
  }
  constexpr double kSize = 640.0;
  constexpr double kMargin = 48.0;
  const double scale = kSize / std::max(hi_x - lo_x, hi_y - lo_y);
  const auto px = [&](const Vec2& p) {
    return std::make_pair(kMargin + (p.x() - lo_x) * scale,
                          kMargin + (hi_y - p.y()) * scale);
  };
  const double w = 2 * kMargin + (hi_x - lo_x) * scale;
  const double h = 2 * kMargin + (hi_y - lo_y) * scale + 40.0;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(w, 1)
    << "\" height=\"" << fixed(h, 1) << "\" viewBox=\"0 0 " << fixed(w, 1)
    << ' ' << fixed(h, 1) << "\">\n";
  if (!config.is_null()) {
    s << "<metadata>" << escape_xml(config.dump()) << "</metadata>\n";
  }
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << fixed(kMargin, 1) << "\" y=\"24\" font-family=\"sans-serif\" "
       "font-size=\"14\">"
    << escape_xml(title) << "</text>\n";

  const auto draw = [&](const Layout& l, const char* color, double label_dy) {
    s << "<polygon fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"";
    for (const Vec2& v : l.vertices) {
      const auto [x, y] = px(v);
      s << fixed(x, 2) << ',' << fixed(y, 2) << ' ';
    }
    s << "\"/>\n";
    for (std::size_t i = 0; i < l.wall_count(); ++i) {
      const Vec2 mid = 0.5 * (l.edge_start(i) + l.edge_end(i));
      const auto [x, y] = px(mid);
      const Wall wall = l.wall(i);
      s << "<text x=\"" << fixed(x, 1) << "\" y=\"" << fixed(y + label_dy, 1)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
        << "\" text-anchor=\"middle\">d=" << fixed(wall.d, 3) << " m</text>\n";
    }
  };
  double caption_y = h - 12.0;
  if (gt != nullptr) {
    draw(*gt, "green", -4.0);
    s << "<text x=\"" << fixed(kMargin, 1) << "\" y=\"" << fixed(caption_y, 1)
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"green\">"
      << "ground truth: h_c=" << fixed(gt->h_c, 3) << " m, h_f="
      << fixed(gt->h_f, 3) << " m</text>\n";
    caption_y -= 16.0;
  }
  if (pred != nullptr) {
    draw(*pred, "blue", 12.0);
    s << "<text x=\"" << fixed(kMargin, 1) << "\" y=\"" << fixed(caption_y, 1)
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"blue\">"
      << "reconstruction: h_c=" << fixed(pred->h_c, 3) << " m, h_f="
      << fixed(pred->h_f, 3) << " m</text>\n";
  }
  const auto [ox, oy] = px(Vec2::Zero());
  s << "<circle cx=\"" << fixed(ox, 2) << "\" cy=\"" << fixed(oy, 2)
    << "\" r=\"3\" fill=\"black\"/>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace ncpano::io
