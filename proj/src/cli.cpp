#include "reiflab/cli.hpp"
#include "reiflab/io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace reiflab::cli {

namespace {

std::vector<double> parse_numbers(const std::string& text, const char* what)
{
  std::vector<double> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(std::string("invalid ") + what + ": " + text);
    }
  }
  return out;
}

Vec2 parse_vec2(const std::string& text, const char* what)
{
  const auto v = parse_numbers(text, what);
  if (v.size() != 2)
    throw Error(std::string(what) + " must be x,y");
  return {v[0], v[1]};
}

std::vector<Vec2> parse_points(const std::string& text, const char* what)
{
  std::vector<Vec2> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ';'))
    out.push_back(parse_vec2(item, what));
  return out;
}

int combine(std::initializer_list<CheckStatus> statuses)
{
  bool inapplicable = false;
  for (CheckStatus s : statuses) {
    if (s == CheckStatus::Fail)
      return kBoundFailed;
    inapplicable = inapplicable || s == CheckStatus::Inapplicable;
  }
  return inapplicable ? kInapplicable : kPass;
}

struct GenArgs
{
  std::string kind;
  double R = 1, a = 1, b = 1, t = 0.1, L = 0.001, wavelength = 2, theta = 3, half_width = 1;
  double w = 0.05, len = 1, offset = 0;
  int modes = 8, depth = 4;
  std::uint64_t seed = 0;
  std::string center = "0,0", normal = "0,1", centers = "0,0;5,0", bbox, label;
  double res = 0;
};

DomainSpec make_spec(const GenArgs& g)
{
  const Vec2 c = parse_vec2(g.center, "center");
  if (g.kind == "halfspace") {
    Vec2 n = parse_vec2(g.normal, "normal");
    if (!(n.norm() > 0))
      throw Error("normal must be nonzero");
    return HalfspaceSpec{n.normalized(), g.offset};
  }
  if (g.kind == "ball")
    return BallSpec{c, g.R};
  if (g.kind == "rectangle")
    return RectangleSpec{g.a, g.b, c};
  if (g.kind == "annulus")
    return AnnulusSpec{g.R, g.t, c};
  if (g.kind == "lipschitz_graph")
    return LipschitzGraphSpec{g.L, g.seed, g.wavelength, g.modes};
  if (g.kind == "koch_flat")
    return KochFlatSpec{g.theta, g.depth, g.half_width};
  if (g.kind == "disk_with_tentacle")
    return TentacleSpec{g.w, g.len, g.R};
  if (g.kind == "disk_with_slit")
    return SlitSpec{g.w, g.len, g.R};
  if (g.kind == "disks")
    return DisksSpec{parse_points(g.centers, "centers"), g.R};
  throw Error("unknown domain kind: " + g.kind);
}

Box default_box(const DomainSpec& spec)
{
  if (const auto s = support(spec)) {
    const double pad = 0.1 * std::max(s->width(), s->height());
    return {s->lo - Vec2(pad, pad), s->hi + Vec2(pad, pad)};
  }
  return {Vec2(-1.5, -1.5), Vec2(1.5, 1.5)};
}

class Output
{
public:
  Output(std::ostream& out) : out_(out) {}

  void emit(const Json& j, const std::string& path) const
  {
    const std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-")
      out_ << text;
    else
      write_text(path, text);
  }

private:
  std::ostream& out_;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Reifenberg flatness certification and Jones curves on raster domains.\n"
               "Grids should satisfy res <= r0 / 200 so that discretization noise stays below the\n"
               "thresholds being certified; fine thresholds such as eps = 1/600 need r_min >= 1800 res."};
  app.require_subcommand(1);
  int jobs = 0;
  std::string csv;
  app.add_option("--jobs", jobs, "worker threads (REIFLAB_JOBS overrides)");
  app.add_option("--csv", csv, "also write a flat CSV table (flatness, jones)");
  const Output output(out);
  int code = kPass;
  FlatnessOptions fopts;

  // gen
  GenArgs g;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "rasterize a domain spec");
  gen->add_option("kind", g.kind,
                  "halfspace|ball|rectangle|annulus|lipschitz_graph|koch_flat|disk_with_tentacle|disk_with_slit|disks")
      ->required();
  gen->add_option("--res", g.res, "cell side length")->required();
  gen->add_option("--bbox", g.bbox, "x0,y0,x1,y1 (default: support plus 10%, or [-1.5,1.5]^2)");
  gen->add_option("--R", g.R, "radius");
  gen->add_option("--center", g.center, "x,y");
  gen->add_option("--a", g.a, "rectangle side along x");
  gen->add_option("--b", g.b, "rectangle side along y");
  gen->add_option("--t", g.t, "annulus thickness");
  gen->add_option("--L", g.L, "Lipschitz constant");
  gen->add_option("--seed", g.seed, "profile seed");
  gen->add_option("--wavelength", g.wavelength, "longest profile wavelength");
  gen->add_option("--modes", g.modes, "profile modes");
  gen->add_option("--theta", g.theta, "Koch bump angle in degrees");
  gen->add_option("--depth", g.depth, "Koch depth");
  gen->add_option("--half-width", g.half_width, "Koch base half width");
  gen->add_option("--w", g.w, "tentacle or slit width");
  gen->add_option("--len", g.len, "tentacle length or slit depth");
  gen->add_option("--normal", g.normal, "halfspace normal x,y");
  gen->add_option("--offset", g.offset, "halfspace offset");
  gen->add_option("--centers", g.centers, "disk centers x,y;x,y;...");
  gen->add_option("--label", g.label, "domain label");
  gen->add_option("-o,--output", gen_out, "domain file (default stdout)");

  // flatness
  std::string dom, dom2, report_out;
  double r0 = 0, eps = 0;
  int scales = 1;
  auto* flat = app.add_subcommand("flatness", "multi-scale flatness profile");
  flat->add_option("domain", dom)->required();
  flat->add_option("--r0", r0)->required();
  flat->add_option("--scales", scales, "dyadic scales below r0");
  flat->add_option("--max-points", fopts.max_points, "stratified subsample size (>= 500)");
  flat->add_option("-o,--output", report_out);

  auto* cert = app.add_subcommand("certify", "certify (eps, r0) flatness");
  cert->add_option("domain", dom)->required();
  cert->add_option("--eps", eps)->required();
  cert->add_option("--r0", r0)->required();
  cert->add_option("--scales", scales, "dyadic scales below r0 (default 1)");
  cert->add_option("--max-points", fopts.max_points, "stratified subsample size (>= 500)");
  cert->add_option("-o,--output", report_out);

  std::size_t pairs = 100;
  std::uint64_t seed = 0;
  double R0 = 0;
  std::optional<double> certify_eps;
  std::string curve_out;
  auto* jones = app.add_subcommand("jones", "Jones curves for seeded pairs and their verification");
  jones->add_option("domain", dom)->required();
  jones->add_option("--r0", r0)->required();
  jones->add_option("--R0", R0, "pair distance bound (default r0 / 7)");
  jones->add_option("--pairs", pairs);
  jones->add_option("--seed", seed);
  jones->add_option("--eps", certify_eps, "certify at (eps, r0) first");
  jones->add_option("--curve", curve_out, "write the worst pair's curve");
  jones->add_option("-o,--output", report_out);

  std::string mode = "sets";
  auto* dist = app.add_subcommand("dist", "Hausdorff distance between two domains");
  dist->add_option("X", dom)->required();
  dist->add_option("Y", dom2)->required();
  dist->add_option("--mode", mode, "sets|complements|boundaries");
  dist->add_option("-o,--output", report_out);

  auto* symdiff = app.add_subcommand("symdiff", "measure of the symmetric difference");
  symdiff->add_option("X", dom)->required();
  symdiff->add_option("Y", dom2)->required();
  symdiff->add_option("-o,--output", report_out);

  auto* rad = app.add_subcommand("radii", "inner radius, outer radius and diameter");
  rad->add_option("domain", dom)->required();
  rad->add_option("-o,--output", report_out);

  std::optional<double> comp_r0;
  auto* comp = app.add_subcommand("components", "connected components");
  comp->add_option("domain", dom)->required();
  comp->add_option("--r0", comp_r0, "also check the count and separation bounds");
  comp->add_option("--eps", certify_eps, "certify at (eps, r0) first");
  comp->add_option("-o,--output", report_out);

  auto* check = app.add_subcommand("check", "inequality checks");
  check->require_subcommand(1);
  bool no_certify = false;
  auto* l51 = check->add_subcommand("lemma51", "boundary distance vs set and complement distances");
  auto* l52 = check->add_subcommand("lemma52", "distances vs symmetric-difference measure");
  for (auto* c : {l51, l52}) {
    c->add_option("X", dom)->required();
    c->add_option("Y", dom2)->required();
    c->add_option("--eps", eps)->required();
    c->add_option("--r0", r0)->required();
    c->add_option("--scales", scales);
    c->add_flag("--no-certify", no_certify, "skip certifying the inputs");
    c->add_option("-o,--output", report_out);
  }
  std::string point;
  double r = 0, M = 2;
  auto* angle = check->add_subcommand("angle", "normals at r and M r");
  angle->add_option("domain", dom)->required();
  angle->add_option("--x", point, "boundary point x,y")->required();
  angle->add_option("--r", r)->required();
  angle->add_option("--M", M);
  angle->add_option("--eps", eps)->required();
  angle->add_option("-o,--output", report_out);
  auto* radius = check->add_subcommand("radius", "rad >= r0 / 4");
  radius->add_option("domain", dom)->required();
  radius->add_option("--r0", r0)->required();
  radius->add_option("-o,--output", report_out);
  auto* count = check->add_subcommand("count", "component count bound");
  auto* sep = check->add_subcommand("separation", "component separation bound");
  for (auto* c : {count, sep}) {
    c->add_option("domain", dom)->required();
    c->add_option("--r0", r0)->required();
    c->add_option("--eps", certify_eps, "certify at (eps, r0) first");
    c->add_option("-o,--output", report_out);
  }
  auto* prop = check->add_subcommand("propagation", "separation at every dyadic scale");
  prop->add_option("domain", dom)->required();
  prop->add_option("--r0", r0)->required();
  prop->add_option("--eps", eps)->required();
  prop->add_option("-o,--output", report_out);
  int dim = 0;
  auto* omega = check->add_subcommand("omega", "unit ball volumes and omega_N >= omega_{N-1} / 2^(N-1)");
  omega->add_option("--N", dim, "dimension (default: 1..20)");
  omega->add_option("-o,--output", report_out);

  std::string curve_in;
  std::vector<std::string> planes;
  auto* render = app.add_subcommand("render", "SVG rendering");
  render->add_option("domain", dom)->required();
  render->add_option("curve", curve_in, "curve JSON overlay");
  render->add_option("--plane", planes, "line overlay x,y,nx,ny");
  render->add_option("-o,--output", report_out);

  std::vector<const char*> argv;
  for (const std::string& a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kUsage;
  }

  fopts.jobs = jobs;
  if (fopts.max_points < 500) {
    err << "--max-points must be at least 500\n";
    return kUsage;
  }
  CheckOptions copts;
  copts.flatness = fopts;

  try {
    if (*gen) {
      const DomainSpec spec = make_spec(g);
      Box box = default_box(spec);
      if (!g.bbox.empty()) {
        const auto v = parse_numbers(g.bbox, "bbox");
        if (v.size() != 4)
          throw Error("bbox must be x0,y0,x1,y1");
        box = {Vec2(v[0], v[1]), Vec2(v[2], v[3])};
      }
      const Domain d = rasterize(spec, g.res, box, g.label);
      if (gen_out.empty() || gen_out == "-")
        out << to_json(d).dump() << "\n";
      else
        save_domain(d, gen_out);
    } else if (*flat) {
      const FlatnessReport rep = flatness_profile(load_domain(dom), r0, scales, fopts);
      output.emit(to_json(rep), report_out);
      if (!csv.empty())
        write_text(csv, to_csv(rep));
    } else if (*cert) {
      const Certificate c = certify(load_domain(dom), eps, r0, scales, fopts);
      output.emit(to_json(c), report_out);
      if (!csv.empty())
        write_text(csv, to_csv(c.report));
      code = c.certified ? kPass : kBoundFailed;
    } else if (*jones) {
      const Domain d = load_domain(dom);
      if (certify_eps) {
        const Certificate c = certify(d, *certify_eps, r0, kDefaultCertifyScales, fopts);
        if (!c.certified) {
          output.emit({{"status", "inapplicable"}, {"reason", "hypothesis not met: " + c.reason}}, report_out);
          return kInapplicable;
        }
      }
      if (R0 <= 0)
        R0 = r0 / 7;
      const JonesConstant jc = empirical_jones_constant(d, R0, pairs, seed, r0, fopts);
      bool pass = true;
      for (const JonesPair& p : jc.pairs)
        pass = pass && p.pass;
      Json j = to_json(jc);
      j["pass"] = pass;
      output.emit(j, report_out);
      if (!csv.empty())
        write_text(csv, to_csv(jc));
      if (!curve_out.empty()) {
        const JonesPair& w = jc.pairs.at(jc.worst);
        write_text(curve_out, to_json(jones_curve(d, w.x, w.y, r0, fopts)).dump(2) + "\n");
      }
      code = pass ? kPass : kBoundFailed;
    } else if (*dist) {
      output.emit(to_json(domain_distance(load_domain(dom), load_domain(dom2), parse_distance_mode(mode))),
                  report_out);
    } else if (*symdiff) {
      output.emit({{"measure", symmetric_difference_measure(load_domain(dom), load_domain(dom2))}}, report_out);
    } else if (*rad) {
      output.emit(to_json(radii(load_domain(dom))), report_out);
    } else if (*comp) {
      const Domain d = load_domain(dom);
      const ComponentReport rep = components(d);
      Json j = to_json(rep);
      if (comp_r0) {
        CountCheck cc = check_count_bound(rep, *comp_r0);
        SeparationBoundCheck sc = check_separation_bound(rep, d.resolution(), *comp_r0);
        if (certify_eps) {
          const Certificate c = certify(d, *certify_eps, *comp_r0, kDefaultCertifyScales, fopts);
          if (!c.certified) {
            cc.status = CheckStatus::Inapplicable;
            cc.reason = "hypothesis not met: " + c.reason;
            if (sc.status != CheckStatus::Vacuous) {
              sc.status = CheckStatus::Inapplicable;
              sc.reason = cc.reason;
            }
          }
        }
        j["count_check"] = to_json(cc);
        j["separation_check"] = to_json(sc);
        code = combine({cc.status, sc.status});
      }
      output.emit(j, report_out);
    } else if (*l51) {
      copts.certify = !no_certify;
      copts.n_scales = scales;
      const BoundaryVsSetsCheck c = check_boundary_vs_sets(load_domain(dom), load_domain(dom2), eps, r0, copts);
      output.emit(to_json(c), report_out);
      code = exit_code(c.status);
    } else if (*l52) {
      copts.certify = !no_certify;
      copts.n_scales = scales;
      const MeasureBoundsCheck c = check_measure_bounds(load_domain(dom), load_domain(dom2), eps, r0, copts);
      output.emit(to_json(c), report_out);
      code = exit_code(c.status);
    } else if (*angle) {
      const AngleCheck a = normal_angle_check(load_domain(dom), parse_vec2(point, "x"), r, M, eps, fopts);
      output.emit(to_json(a), report_out);
      code = a.pass ? kPass : kBoundFailed;
    } else if (*radius) {
      const RadiusCheck c = check_inner_radius_bound(load_domain(dom), r0);
      output.emit(to_json(c), report_out);
      code = exit_code(c.status);
    } else if (*count) {
      const CountCheck c = check_count_bound(load_domain(dom), r0, certify_eps, copts);
      output.emit(to_json(c), report_out);
      code = exit_code(c.status);
    } else if (*sep) {
      const SeparationBoundCheck c = check_separation_bound(load_domain(dom), r0, certify_eps, copts);
      output.emit(to_json(c), report_out);
      code = exit_code(c.status);
    } else if (*prop) {
      const PropagationReport p = separation_propagation_check(load_domain(dom), r0, eps, fopts);
      output.emit(to_json(p), report_out);
      code = p.pass ? kPass : kBoundFailed;
    } else if (*omega) {
      Json rows = Json::array();
      bool pass = true;
      const int lo = dim > 0 ? dim : 1, hi = dim > 0 ? dim : 20;
      for (int n = lo; n <= hi; ++n) {
        const UnitBallVolume u = unit_ball_volume(n);
        pass = pass && u.inequality;
        rows.push_back(to_json(u));
      }
      output.emit({{"pass", pass}, {"volumes", std::move(rows)}}, report_out);
      code = pass ? kPass : kBoundFailed;
    } else if (*render) {
      std::vector<Overlay> overlays;
      if (!curve_in.empty())
        overlays.emplace_back(polyline_from_json(Json::parse(read_text(curve_in))));
      for (const std::string& p : planes) {
        const auto v = parse_numbers(p, "plane");
        if (v.size() != 4)
          throw Error("plane must be x,y,nx,ny");
        const Vec2 n = Vec2(v[2], v[3]).normalized();
        overlays.emplace_back(Hyperplane(Point(Vec2(v[0], v[1])), Point(n)));
      }
      const std::string svg = render_svg(load_domain(dom), overlays);
      if (report_out.empty() || report_out == "-")
        out << svg;
      else
        write_text(report_out, svg);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return code;
}

int run(int argc, const char* const* argv)
{
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace reiflab::cli
