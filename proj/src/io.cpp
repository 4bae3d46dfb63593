#include "reiflab/io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace reiflab {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

Json opt_cell(const std::optional<Cell>& c)
{
  if (!c)
    return nullptr;
  return Json::array({c->i, c->j});
}

Json numbers(const std::vector<double>& v)
{
  Json a = Json::array();
  for (double x : v)
    a.push_back(x);
  return a;
}

std::string fmt(double v)
{
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6g", v);
  return buf.data();
}

std::string xml_escape(const std::string& text)
{
  std::string out;
  for (char c : text) {
    switch (c) {
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '&':
      out += "&amp;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

} // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes)
{
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t k = 0;
  for (; k + 2 < bytes.size(); k += 3) {
    const std::uint32_t v = (std::uint32_t(bytes[k]) << 16) | (std::uint32_t(bytes[k + 1]) << 8) | bytes[k + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (const std::size_t rest = bytes.size() - k; rest > 0) {
    std::uint32_t v = std::uint32_t(bytes[k]) << 16;
    if (rest == 2)
      v |= std::uint32_t(bytes[k + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text)
{
  std::array<int, 256> table{};
  table.fill(-1);
  for (int k = 0; k < 64; ++k)
    table[static_cast<unsigned char>(kAlphabet[k])] = k;
  if (text.size() % 4 != 0)
    throw Error("invalid base64 length");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t k = 0; k < text.size(); k += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (std::size_t t = 0; t < 4; ++t) {
      const char c = text[k + t];
      int x = 0;
      if (c == '=' && k + 4 == text.size() && t >= 2) {
        ++pad;
      } else {
        if (pad > 0)
          throw Error("invalid base64 padding");
        x = table[static_cast<unsigned char>(c)];
        if (x < 0)
          throw Error("invalid base64 character");
      }
      v = (v << 6) | static_cast<std::uint32_t>(x);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2)
      out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1)
      out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

Json to_json(const Vec2& p)
{
  return Json::array({p.x(), p.y()});
}

Vec2 vec2_from_json(const Json& j)
{
  if (!j.is_array() || j.size() != 2)
    throw Error("expected a point [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const Domain& d)
{
  const OccupancyGrid& g = d.occupancy();
  std::vector<std::uint8_t> bytes((g.cell_count() + 7) / 8, 0);
  std::size_t bit = 0;
  for (int j = 0; j < g.height(); ++j)
    for (int i = 0; i < g.width(); ++i, ++bit)
      if (g.get(i, j))
        bytes[bit >> 3] |= static_cast<std::uint8_t>(1U << (bit & 7));
  Json boundary = Json::array();
  const PointSet& b = d.boundary();
  for (Eigen::Index k = 0; k < b.cols(); ++k)
    boundary.push_back(Json::array({b(0, k), b(1, k)}));
  Json j;
  j["label"] = d.label();
  j["bbox"] = Json::array({to_json(d.bbox().lo), to_json(d.bbox().hi)});
  j["resolution"] = d.resolution();
  j["occupancy"] = {{"width", g.width()}, {"height", g.height()}, {"bits", base64_encode(bytes)}};
  j["boundary"] = std::move(boundary);
  return j;
}

Domain domain_from_json(const Json& j)
{
  try {
    const Box box{vec2_from_json(j.at("bbox").at(0)), vec2_from_json(j.at("bbox").at(1))};
    const double res = j.at("resolution").get<double>();
    const Json& occ = j.at("occupancy");
    const int w = occ.at("width").get<int>(), h = occ.at("height").get<int>();
    if (w <= 0 || h <= 0)
      throw Error("invalid occupancy dimensions");
    const std::vector<std::uint8_t> bytes = base64_decode(occ.at("bits").get<std::string>());
    OccupancyGrid g(w, h);
    if (bytes.size() != (g.cell_count() + 7) / 8)
      throw Error("occupancy size does not match dimensions");
    std::size_t bit = 0;
    for (int jj = 0; jj < h; ++jj)
      for (int i = 0; i < w; ++i, ++bit)
        if ((bytes[bit >> 3] >> (bit & 7)) & 1U)
          g.set(i, jj, true);
    const Json& bj = j.at("boundary");
    PointSet b(2, static_cast<Eigen::Index>(bj.size()));
    for (std::size_t k = 0; k < bj.size(); ++k)
      b.col(static_cast<Eigen::Index>(k)) = vec2_from_json(bj[k]);
    return Domain(j.value("label", std::string()), box, res, std::move(g), std::move(b));
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed domain file: ") + e.what());
  }
}

void write_text(const std::string& path, const std::string& text)
{
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot write " + path);
  f << text;
  if (!f)
    throw Error("cannot write " + path);
}

std::string read_text(const std::string& path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void save_domain(const Domain& d, const std::string& path)
{
  write_text(path, to_json(d).dump() + "\n");
}

Domain load_domain(const std::string& path)
{
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw Error("malformed domain file " + path + ": " + e.what());
  }
  return domain_from_json(j);
}

Json to_json(const Hyperplane& h)
{
  return {{"base", Json::array({h.base(0), h.base(1)})}, {"normal", Json::array({h.normal(0), h.normal(1)})}};
}

Json to_json(const FlatnessSample& s)
{
  return {{"x", to_json(s.x)}, {"r", s.r}, {"plane", to_json(s.plane)}, {"epsilon", s.epsilon},
          {"orientation", s.orientation}};
}

Json to_json(const SeparationResult& s)
{
  Json j = {{"status", to_string(s.status)},
            {"sample", to_json(s.sample)},
            {"slab_epsilon", s.slab_epsilon},
            {"plus_cells", s.plus_cells},
            {"plus_inside", s.plus_inside},
            {"minus_cells", s.minus_cells},
            {"minus_inside", s.minus_inside},
            {"witness", opt_cell(s.witness)}};
  j["witness_point"] = s.witness ? to_json(s.witness_point) : Json(nullptr);
  return j;
}

Json to_json(const FlatnessReport& r, bool include_entries)
{
  Json per_scale = Json::array();
  for (const ScaleSummary& s : r.per_scale)
    per_scale.push_back({{"r", s.r}, {"sup_epsilon", s.sup_epsilon}, {"separation_failures", s.separation_failures}});
  Json j = {{"r0", r.r0},
            {"resolution", r.resolution},
            {"scale_grid", numbers(r.scales)},
            {"sup_epsilon", r.sup_epsilon},
            {"worst", {{"x", to_json(r.worst_x)}, {"r", r.worst_r}}},
            {"margin", r.margin()},
            {"separation_ok", r.separation_ok},
            {"separation_all_scales", r.separation_all_scales},
            {"subsampled", r.subsampled},
            {"boundary_count", r.boundary_count},
            {"evaluated_points", r.evaluated_points},
            {"per_scale", std::move(per_scale)}};
  if (r.slab_epsilon >= 0)
    j["slab_epsilon"] = r.slab_epsilon;
  if (include_entries) {
    Json samples = Json::array();
    for (const ProfileEntry& e : r.entries) {
      Json s = to_json(e.sample);
      s["separation"] = to_string(e.separation);
      s["witness"] = opt_cell(e.witness);
      samples.push_back(std::move(s));
    }
    j["samples"] = std::move(samples);
  }
  return j;
}

Json to_json(const Certificate& c)
{
  Json j = {{"certified", c.certified},
            {"eps", c.eps},
            {"r0", c.r0},
            {"r_min", c.r_min},
            {"sup_epsilon", c.sup_epsilon},
            {"margin", c.margin},
            {"flat", c.flat},
            {"separation_r0", c.separation_r0},
            {"separation_all_scales", c.separation_all},
            {"reason", c.reason}};
  Json failures = Json::array();
  for (const ProfileEntry& e : c.report.entries) {
    if (e.separation == SeparationStatus::Separated && e.sample.epsilon + c.margin <= c.eps)
      continue;
    Json s = to_json(e.sample);
    s["separation"] = to_string(e.separation);
    s["witness"] = opt_cell(e.witness);
    failures.push_back(std::move(s));
    if (failures.size() >= 100)
      break;
  }
  j["violations"] = std::move(failures);
  j["report"] = to_json(c.report, false);
  return j;
}

Json to_json(const AngleCheck& a)
{
  return {{"cosine", a.cosine}, {"bound", a.bound}, {"margin", a.margin}, {"pass", a.pass},
          {"fine", to_json(a.fine)}, {"coarse", to_json(a.coarse)}};
}

Json to_json(const PropagationReport& p)
{
  Json scales = Json::array();
  for (const PropagationScale& s : p.scales)
    scales.push_back({{"r", s.r}, {"pass", s.pass}, {"failures", s.failures}, {"evaluated", s.evaluated},
                      {"witness_x", s.witness_x ? to_json(*s.witness_x) : Json(nullptr)}});
  return {{"eps", p.eps}, {"r0", p.r0}, {"admissible_step", p.admissible_step}, {"pass", p.pass},
          {"scales", std::move(scales)}};
}

Json to_json(const Polyline& p)
{
  Json v = Json::array();
  for (const Vec2& x : p.vertices())
    v.push_back(to_json(x));
  return {{"vertices", std::move(v)}, {"length", p.length()}};
}

Polyline polyline_from_json(const Json& j)
{
  const Json& v = j.is_object() ? j.at("vertices") : j;
  std::vector<Vec2> out;
  for (const Json& p : v)
    out.push_back(vec2_from_json(p));
  if (out.empty())
    throw Error("empty polyline");
  return Polyline(std::move(out));
}

Json to_json(const CigarReport& c)
{
  return {{"curve", to_json(c.curve)},
          {"x", to_json(c.x)},
          {"y", to_json(c.y)},
          {"length_ratio", c.length_ratio},
          {"worst_delta", c.worst_delta},
          {"worst_delta_with_slack", c.worst_delta_slack},
          {"worst_z", to_json(c.worst_z)},
          {"n_samples", c.n_samples},
          {"escaped", c.escaped},
          {"slack", c.slack},
          {"margin", c.margin},
          {"delta", c.delta},
          {"pass", c.pass}};
}

Json to_json(const JonesConstant& j)
{
  Json pairs = Json::array();
  for (const JonesPair& p : j.pairs)
    pairs.push_back({{"x", to_json(p.x)},
                     {"y", to_json(p.y)},
                     {"distance", p.distance},
                     {"length_ratio", p.length_ratio},
                     {"worst_delta", p.worst_delta},
                     {"worst_delta_with_slack", p.worst_delta_slack},
                     {"margin", p.margin},
                     {"delta", p.delta_value},
                     {"segment", p.segment},
                     {"escaped", p.escaped},
                     {"pass", p.pass}});
  const JonesPair& w = j.pairs.at(j.worst);
  return {{"seed", j.seed},
          {"R0", j.R0},
          {"delta_star", j.delta_star},
          {"max_length_ratio", j.max_length_ratio},
          {"worst_delta", j.min_worst_delta},
          {"worst_pair", {{"x", to_json(w.x)}, {"y", to_json(w.y)}}},
          {"pairs", std::move(pairs)}};
}

Json to_json(const DistanceReport& r)
{
  return {{"mode", to_string(r.mode)}, {"value", r.value},
          {"witness_pair", Json::array({to_json(r.from), to_json(r.to)})}, {"clipped", r.clipped}};
}

Json to_json(const RadiiReport& r)
{
  return {{"rad", r.rad},
          {"big_rad", r.big_rad},
          {"diam", r.diam},
          {"centers", {{"rad", to_json(r.rad_center)}, {"big_rad", to_json(r.big_rad_center)}}},
          {"diam_pair", Json::array({to_json(r.diam_a), to_json(r.diam_b)})}};
}

Json to_json(const RadiusCheck& c)
{
  return {{"rad", c.rad}, {"bound", c.bound}, {"margin", c.margin}, {"status", to_string(c.status)}};
}

Json to_json(const BoundaryVsSetsCheck& c)
{
  return {{"status", to_string(c.status)},
          {"reason", c.reason},
          {"boundaries", c.boundaries},
          {"sets", c.sets},
          {"complements", c.complements},
          {"rhs", c.rhs},
          {"margin", c.margin},
          {"ratio", c.ratio},
          {"hypothesis", c.hypothesis},
          {"x_certified", c.x_certified},
          {"y_certified", c.y_certified}};
}

Json to_json(const MeasureBoundsCheck& c)
{
  auto branch = [](const MeasureBranch& b) {
    return Json{{"distance", b.distance}, {"rhs", b.rhs}, {"hypothesis", b.hypothesis},
                {"status", to_string(b.status)}};
  };
  return {{"status", to_string(c.status)},
          {"reason", c.reason},
          {"symmetric_difference", c.symmetric_difference},
          {"margin", c.margin},
          {"sets", branch(c.sets)},
          {"complements", branch(c.complements)},
          {"x_certified", c.x_certified},
          {"y_certified", c.y_certified}};
}

Json to_json(const UnitBallVolume& u)
{
  return {{"n", u.n}, {"omega", u.omega}, {"omega_previous", u.previous}, {"lower", u.lower},
          {"inequality", u.inequality}};
}

Json to_json(const ComponentReport& r)
{
  Json comps = Json::array();
  for (std::size_t k = 0; k < r.n; ++k)
    comps.push_back({{"label", r.components[k].label()}, {"area", r.areas[k]},
                     {"cells", r.components[k].occupancy().count()}});
  Json j = {{"n", r.n}, {"components", std::move(comps)}, {"clipped", r.clipped}};
  if (r.n >= 2) {
    j["min_pairwise_separation"] = r.min_pairwise_separation;
    j["separation_witness"] = Json::array({to_json(r.separation_witness.first), to_json(r.separation_witness.second)});
  } else {
    j["min_pairwise_separation"] = nullptr;
  }
  return j;
}

Json to_json(const CountCheck& c)
{
  return {{"status", to_string(c.status)}, {"reason", c.reason}, {"n", c.n}, {"bound", c.bound}};
}

Json to_json(const SeparationBoundCheck& c)
{
  Json j = {{"status", to_string(c.status)}, {"reason", c.reason}, {"bound", c.bound}, {"margin", c.margin}};
  if (c.status == CheckStatus::Vacuous) {
    j["separation"] = nullptr;
  } else {
    j["separation"] = c.separation;
    j["witness"] = Json::array({to_json(c.witness.first), to_json(c.witness.second)});
  }
  return j;
}

std::string to_csv(const FlatnessReport& r)
{
  std::ostringstream s;
  s.precision(17);
  s << "x,y,r,epsilon,normal_x,normal_y,orientation,separation\n";
  for (const ProfileEntry& e : r.entries)
    s << e.sample.x.x() << ',' << e.sample.x.y() << ',' << e.sample.r << ',' << e.sample.epsilon << ','
      << e.sample.plane.normal(0) << ',' << e.sample.plane.normal(1) << ',' << e.sample.orientation << ','
      << to_string(e.separation) << '\n';
  return s.str();
}

std::string to_csv(const JonesConstant& j)
{
  std::ostringstream s;
  s.precision(17);
  s << "x0,x1,y0,y1,distance,length_ratio,worst_delta,worst_delta_with_slack,margin,delta,segment,escaped,pass\n";
  for (const JonesPair& p : j.pairs)
    s << p.x.x() << ',' << p.x.y() << ',' << p.y.x() << ',' << p.y.y() << ',' << p.distance << ','
      << p.length_ratio << ',' << p.worst_delta << ',' << p.worst_delta_slack << ',' << p.margin << ','
      << p.delta_value << ',' << (p.segment ? 1 : 0) << ',' << (p.escaped ? 1 : 0) << ',' << (p.pass ? 1 : 0)
      << '\n';
  return s.str();
}

std::string render_svg(const Domain& d, const std::vector<Overlay>& overlays)
{
  const Box& b = d.bbox();
  const double h = d.resolution();
  // World y grows upwards; flip it so the picture is not mirrored.
  auto X = [&](double x) { return fmt(x - b.lo.x()); };
  auto Y = [&](double y) { return fmt(b.hi.y() - y); };
  const double stroke = std::max(b.width(), b.height()) / 800;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt(b.width()) << ' ' << fmt(b.height())
    << "\" width=\"800\" height=\"" << fmt(800 * b.height() / b.width()) << "\">\n";
  s << "<title>" << xml_escape(d.label()) << "</title>\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << fmt(b.width()) << "\" height=\"" << fmt(b.height())
    << "\" fill=\"#ffffff\"/>\n";

  s << "<path class=\"domain\" fill=\"#c6dbef\" stroke=\"none\" d=\"";
  for (int j = 0; j < d.height(); ++j) {
    int i = 0;
    while (i < d.width()) {
      if (!d.inside(i, j)) {
        ++i;
        continue;
      }
      const int start = i;
      while (i < d.width() && d.inside(i, j))
        ++i;
      const double x0 = b.lo.x() + start * h, y1 = b.lo.y() + (j + 1) * h;
      s << 'M' << X(x0) << ' ' << Y(y1) << 'h' << fmt((i - start) * h) << 'v' << fmt(h) << 'h'
        << fmt(-(i - start) * h) << 'z';
    }
  }
  s << "\"/>\n";

  s << "<path class=\"boundary\" fill=\"none\" stroke=\"#08306b\" stroke-width=\"" << fmt(stroke) << "\" d=\"";
  const PointSet& bd = d.boundary();
  for (Eigen::Index k = 0; k < bd.cols(); ++k) {
    const double px = bd(0, k), py = bd(1, k);
    const double fx = (px - b.lo.x()) / h;
    const bool vertical_edge = std::abs(fx - std::round(fx)) < 0.25;
    if (vertical_edge)
      s << 'M' << X(px) << ' ' << Y(py + h / 2) << 'v' << fmt(h);
    else
      s << 'M' << X(px - h / 2) << ' ' << Y(py) << 'h' << fmt(h);
  }
  s << "\"/>\n";

  for (const Overlay& o : overlays) {
    if (const auto* p = std::get_if<Polyline>(&o)) {
      s << "<path class=\"curve\" fill=\"none\" stroke=\"#cb181d\" stroke-width=\"" << fmt(2 * stroke) << "\" d=\"";
      for (std::size_t k = 0; k < p->size(); ++k)
        s << (k == 0 ? 'M' : 'L') << X(p->vertices()[k].x()) << ' ' << Y(p->vertices()[k].y());
      s << "\"/>\n";
    } else {
      const Hyperplane& hp = std::get<Hyperplane>(o);
      const Vec2 base(hp.base(0), hp.base(1));
      const Vec2 dir(-hp.normal(1), hp.normal(0));
      const double reach = b.width() + b.height();
      const Vec2 a = base - reach * dir, c = base + reach * dir;
      s << "<line class=\"plane\" stroke=\"#238b45\" stroke-dasharray=\"" << fmt(4 * stroke) << "\" stroke-width=\""
        << fmt(stroke) << "\" x1=\"" << X(a.x()) << "\" y1=\"" << Y(a.y()) << "\" x2=\"" << X(c.x()) << "\" y2=\""
        << Y(c.y()) << "\"/>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

} // namespace reiflab
