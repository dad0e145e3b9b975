#include "twoaxis/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace twoaxis::cli {

namespace {

std::string num(double v)
{
  if (!std::isfinite(v)) { return "null"; }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) { return ""; }
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(std::string_view text)
{
  const std::string s = trim(text);
  if (s.empty()) { throw std::invalid_argument("empty number"); }
  std::size_t used = 0;
  double v         = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception &) {
    throw std::invalid_argument("not a number: " + s);
  }
  if (used != s.size()) { throw std::invalid_argument("not a number: " + s); }
  return v;
}

/// A real, or a multiple/fraction of pi such as "pi/2", "3*pi/4", "π".
double parse_angle_expr(std::string_view text)
{
  std::string s = trim(text);
  for (auto pos = s.find("π"); pos != std::string::npos; pos = s.find("π")) { s.replace(pos, std::string("π").size(), "pi"); }
  const auto p = s.find("pi");
  if (p == std::string::npos) { return parse_real(s); }
  double factor      = 1;
  std::string before = s.substr(0, p);
  if (!before.empty() && before.back() == '*') { before.pop_back(); }
  if (!before.empty()) { factor = before == "-" ? -1 : parse_real(before); }
  double v                = factor * std::numbers::pi;
  const std::string after = s.substr(p + 2);
  if (!after.empty()) {
    if (after.front() != '/') { throw std::invalid_argument("not an angle: " + s); }
    v /= parse_real(after.substr(1));
  }
  return v;
}

double angle_in(const std::string & text, bool degrees)
{
  const double v = parse_angle_expr(text);
  return degrees ? v * std::numbers::pi / 180 : v;
}

}  // namespace

std::vector<double> parse_reals(std::string_view text)
{
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) { break; }
    start = comma + 1;
  }
  return out;
}

Quatd parse_target(std::string_view spec, const AxisConfig & cfg, bool degrees)
{
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) { throw std::invalid_argument("target needs a kind prefix"); }
  const std::string kind(spec.substr(0, colon));
  const std::string_view body = spec.substr(colon + 1);
  const double unit           = degrees ? std::numbers::pi / 180 : 1.0;

  if (kind == "quat") {
    const auto v = parse_reals(body);
    if (v.size() != 4) { throw std::invalid_argument("quat needs 4 values"); }
    Quatd q = make_quat(v[0], v[1], v[2], v[3]);
    if (!(q.norm() > 1e-12)) { throw std::invalid_argument("zero quaternion"); }
    q.normalize();
    return q;
  }
  if (kind == "axis-angle") {
    const auto c2 = body.rfind(':');
    if (c2 == std::string_view::npos) { throw std::invalid_argument("axis-angle needs axis:angle"); }
    const auto axis = parse_reals(body.substr(0, c2));
    if (axis.size() != 3) { throw std::invalid_argument("axis needs 3 values"); }
    const Vec3d a(axis[0], axis[1], axis[2]);
    const double angle = parse_angle_expr(body.substr(c2 + 1)) * unit;
    if (!(a.norm() > 0)) {
      if (angle == 0) { return Quatd(Quatd::Identity()); }
      throw std::invalid_argument("undefined rotation axis");
    }
    return quat_exp<double>((angle / 2) * a.normalized());
  }
  if (kind == "matrix") {
    const auto v = parse_reals(body);
    if (v.size() != 9) { throw std::invalid_argument("matrix needs 9 values"); }
    Eigen::Matrix3d m;
    m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    if ((m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-8 || std::abs(m.determinant() - 1) > 1e-8) {
      throw std::invalid_argument("matrix is not a rotation");
    }
    Quatd q(Eigen::Quaterniond(m).normalized());
    return q;
  }
  if (kind == "euler") {
    Quatd q(Quatd::Identity());
    std::size_t start = 0;
    const Vec3d z     = cfg.Z.normalized();
    while (start < body.size()) {
      auto comma           = body.find(',', start);
      const auto item      = trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      const auto sep       = item.find(':');
      if (sep == std::string::npos || sep != 1) { throw std::invalid_argument("euler factor must be L:angle"); }
      const char letter    = item[0];
      const double angle   = parse_angle_expr(item.substr(2)) * unit;
      Vec3d axis;
      if (letter == 'X') {
        axis = cfg.X;
      } else if (letter == 'Y') {
        axis = cfg.Y;
      } else if (letter == 'Z') {
        axis = z;
      } else {
        throw std::invalid_argument("euler axis must be X, Y or Z");
      }
      q = quat_mul(q, quat_exp<double>((angle / 2) * axis));
      if (comma == std::string_view::npos) { break; }
      start = comma + 1;
    }
    return q.normalized();
  }
  throw std::invalid_argument("unknown target kind: " + kind);
}

std::string plan_to_json(const AxisConfig & cfg, const Quatd & target, const Plan & plan)
{
  std::ostringstream os;
  os << "{\n  \"alpha\": " << num(cfg.alpha) << ",\n  \"kappa\": " << num(cfg.kappa) << ",\n";
  os << "  \"target\": {\"quat\": [" << num(target.x()) << ", " << num(target.y()) << ", " << num(target.z()) << ", "
     << num(target.w()) << "]},\n";
  os << "  \"segments\": [";
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const auto & s = plan.segments[i];
    const Vec3d v  = cfg.vector(s.control);
    const Vec3d n  = v.normalized();
    os << (i ? ",\n" : "\n") << "    {\"a\": " << num(s.control.a) << ", \"b\": " << num(s.control.b)
       << ", \"duration\": " << num(s.duration) << ", \"axis_unit\": [" << num(n.x()) << ", " << num(n.y()) << ", "
       << num(n.z()) << "], \"rotation_angle\": " << num(s.duration * v.norm())
       << ", \"cost\": " << num(s.duration * control_cost(cfg, s.control)) << "}";
  }
  os << (plan.segments.empty() ? "],\n" : "\n  ],\n");
  os << "  \"total_cost\": " << num(plan.total_cost) << ",\n  \"residual\": " << num(plan.residual) << ",\n";
  os << "  \"pattern_id\": \"" << plan.pattern_id << "\",\n  \"symmetry_index\": " << plan.symmetry_index << ",\n";
  os << "  \"window\": [" << plan.window[0] << ", " << plan.window[1] << "]\n}\n";
  return os.str();
}

PlanFile plan_from_json(std::string_view text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception & e) {
    throw std::invalid_argument(std::string("invalid plan JSON: ") + e.what());
  }
  try {
    PlanFile f;
    f.alpha      = j.at("alpha").get<double>();
    f.kappa      = j.at("kappa").get<double>();
    const auto q = j.at("target").at("quat").get<std::vector<double>>();
    if (q.size() != 4) { throw std::invalid_argument("target quat needs 4 values"); }
    f.target = make_quat(q[0], q[1], q[2], q[3]);
    if (!(f.target.norm() > 0)) { throw std::invalid_argument("zero target quaternion"); }
    f.target.normalize();
    for (const auto & s : j.at("segments")) {
      Segment seg;
      seg.control.a   = s.at("a").get<double>();
      seg.control.b   = s.at("b").get<double>();
      seg.control.tag = ControlTag::General;
      seg.duration    = s.at("duration").get<double>();
      f.plan.segments.push_back(seg);
    }
    f.plan.total_cost     = j.value("total_cost", 0.0);
    f.plan.residual       = j.value("residual", 0.0);
    f.plan.pattern_id     = j.value("pattern_id", std::string("custom"));
    f.plan.symmetry_index = j.value("symmetry_index", 0);
    if (j.contains("window")) {
      const auto w  = j.at("window").get<std::vector<int>>();
      if (w.size() == 2) { f.plan.window = {w[0], w[1]}; }
    }
    return f;
  } catch (const nlohmann::json::exception & e) {
    throw std::invalid_argument(std::string("invalid plan JSON: ") + e.what());
  }
}

std::string oracle_to_json(const AxisConfig & cfg, const OracleResult & res)
{
  std::ostringstream os;
  os << "{\n  \"method\": \"" << res.method << "\",\n  \"cost_upper\": " << num(res.cost_upper)
     << ",\n  \"residual\": " << num(res.residual) << ",\n";
  os << "  \"settings\": {\"delta\": " << num(res.settings.delta) << ", \"quant\": " << num(res.settings.quant)
     << ", \"max_segments\": " << res.settings.max_segments << ", \"restarts\": " << res.settings.restarts << "},\n";
  os << "  \"expansions\": " << res.expansions << ",\n  \"plan_found\": [";
  for (std::size_t i = 0; i < res.plan_found.size(); ++i) {
    const auto & s = res.plan_found[i];
    os << (i ? ",\n" : "\n") << "    {\"a\": " << num(s.control.a) << ", \"b\": " << num(s.control.b)
       << ", \"duration\": " << num(s.duration) << ", \"cost\": " << num(s.duration * control_cost(cfg, s.control)) << "}";
  }
  os << (res.plan_found.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

std::string check_to_json(const CheckReport & report, double residual, bool residual_pass)
{
  auto state = [](const AdjointState & st) {
    return "{\"s\": " + num(st.s) + ", \"q\": " + num(st.q) + ", \"z\": " + num(st.z) + "}";
  };
  std::ostringstream os;
  os << "{\n  \"pass\": " << ((report.pass && residual_pass) ? "true" : "false") << ",\n";
  os << "  \"pmp_pass\": " << (report.pass ? "true" : "false") << ",\n";
  os << "  \"residual\": " << num(residual) << ",\n  \"residual_pass\": " << (residual_pass ? "true" : "false") << ",\n";
  os << "  \"reason\": \"" << report.reason << "\",\n  \"segment\": " << report.segment << ",\n";
  os << "  \"violation\": " << num(report.violation) << ",\n";
  os << "  \"initial_costate\": " << (report.initial_costate ? state(*report.initial_costate) : "null") << ",\n";
  os << "  \"switches\": [";
  for (std::size_t i = 0; i < report.switches.size(); ++i) {
    const auto & sw = report.switches[i];
    os << (i ? ",\n" : "\n") << "    {\"time\": " << num(sw.time) << ", \"from\": \"" << to_string(sw.from_control.tag)
       << "\", \"to\": \"" << to_string(sw.to_control.tag) << "\", \"costate\": " << state(sw.costate_at_switch) << "}";
  }
  os << (report.switches.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

std::string patterns_table(const AxisConfig & cfg)
{
  std::vector<std::array<std::string, 4>> rows{{"pattern", "word", "constraints", "orbit"}};
  for (const auto & p : catalog(cfg)) {
    rows.push_back({std::string(to_string(p.id)), p.word(), p.constraint(), std::string(to_string(p.orbit))});
  }
  // Column widths count code points so the UTF-8 symbols line up.
  auto width = [](const std::string & s) {
    std::size_t n = 0;
    for (unsigned char ch : s) { n += (ch & 0xc0) != 0x80; }
    return n;
  };
  std::array<std::size_t, 4> w{};
  for (const auto & r : rows) {
    for (std::size_t i = 0; i < 4; ++i) { w[i] = std::max(w[i], width(r[i])); }
  }
  std::ostringstream os;
  for (const auto & r : rows) {
    for (std::size_t i = 0; i < 4; ++i) {
      os << r[i];
      if (i < 3) { os << std::string(w[i] - width(r[i]) + 2, ' '); }
    }
    os << '\n';
  }
  return os.str();
}

namespace {

struct Common
{
  std::string alpha{"pi/2"};
  std::string kappa{"1"};
  std::string target;
  std::string frame;
  bool degrees{false};
};

/// Builds the configuration, reducing alpha > pi/2 by Y -> -Y. Returns the frame fix-up.
AxisConfig config_from(const Common & c, std::ostream & err, std::optional<Quatd> & fixup)
{
  double alpha       = angle_in(c.alpha, c.degrees);
  const double kappa = parse_real(c.kappa);
  fixup.reset();
  if (alpha > std::numbers::pi / 2 + 1e-12 && alpha < std::numbers::pi) {
    alpha = std::numbers::pi - alpha;
    fixup = make_quat(1.0, 0.0, 0.0, 0.0);  // lift of R(pi X)
    err << "notice: alpha > pi/2 reduced to " << num(alpha)
        << " by replacing Y with -Y; target conjugated by R(pi X), plan controls refer to the reduced frame\n";
  }
  return make_config(alpha, kappa);
}

Quatd target_from(const Common & c, const AxisConfig & cfg, const std::optional<Quatd> & fixup)
{
  Quatd g = parse_target(c.target, cfg, c.degrees);
  if (!c.frame.empty()) {
    const auto v = parse_reals(c.frame);
    if (v.size() != 4) { throw std::invalid_argument("frame needs 4 values"); }
    Quatd f = make_quat(v[0], v[1], v[2], v[3]);
    if (!(f.norm() > 0)) { throw std::invalid_argument("zero frame quaternion"); }
    f.normalize();
    g = quat_mul(quat_mul(quat_conj(f), g), f);
  }
  if (fixup) { g = quat_mul(quat_mul(*fixup, g), quat_conj(*fixup)); }
  return g.normalized();
}

void add_config_options(CLI::App * sub, Common & c)
{
  sub->add_option("--alpha", c.alpha, "angle between the axes (rad, or pi/N forms)")->required();
  sub->add_option("--kappa", c.kappa, "cost of Y relative to X, in [0, 1]")->required();
  sub->add_flag("--degrees", c.degrees, "read input angles in degrees");
}

bool emit(const std::string & text, const std::string & path, std::ostream & out, std::ostream & err)
{
  if (path.empty()) {
    out << text;
    return true;
  }
  std::ofstream f(path);
  if (!f) {
    err << "error: cannot write " << path << '\n';
    return false;
  }
  f << text;
  return true;
}

double example_closed_form(double t)
{
  // (cos + sin)^2 - 1 = 1 - (cos - sin)^2 = sin t, for half angles; atan forms stay accurate near t = pi.
  const double r  = std::sqrt(std::max(0.0, std::sin(t)));
  const double t1 = std::atan(r);
  const double t2 = std::atan2(r, std::cos(t / 2) - std::sin(t / 2));
  return std::min(2 * (t1 + t2), std::numbers::pi + t);
}

}  // namespace

int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Minimum-cost two-axis rotation decompositions", "twoaxis"};
  app.require_subcommand(1);

  Common plan_c, sweep_c, pat_c, orc_c;
  std::string json_out, plan_path, axis_text{"0,0,1"}, t_min{"0"}, t_max{"pi"}, method{"descent"};
  int steps = 64, max_segments = 4, restarts = 6;
  double delta = 0.01, quant = 0.02;

  auto * plan_cmd = app.add_subcommand("plan", "minimum-cost decomposition of a target");
  add_config_options(plan_cmd, plan_c);
  plan_cmd->add_option("--target", plan_c.target, "quat:a,b,c,d | axis-angle:x,y,z:t | matrix:m00,...,m22 | euler:X:t,...")
    ->required();
  plan_cmd->add_option("--frame", plan_c.frame, "quaternion a,b,c,d taking the canonical frame to the target's frame");
  plan_cmd->add_option("--json-out", json_out, "write the plan here instead of stdout");

  auto * verify_cmd = app.add_subcommand("verify", "certify a plan file");
  verify_cmd->add_option("--plan", plan_path, "plan JSON")->required();

  auto * sweep_cmd = app.add_subcommand("sweep", "cost of R(t axis) over a range of t, as CSV");
  add_config_options(sweep_cmd, sweep_c);
  sweep_cmd->add_option("--axis", axis_text, "rotation axis x,y,z");
  sweep_cmd->add_option("--t-min", t_min);
  sweep_cmd->add_option("--t-max", t_max);
  sweep_cmd->add_option("--steps", steps)->check(CLI::PositiveNumber);

  auto * pat_cmd = app.add_subcommand("patterns", "print the pattern catalog of a configuration");
  add_config_options(pat_cmd, pat_c);

  auto * orc_cmd = app.add_subcommand("oracle", "catalog-free upper bound on the optimal cost");
  add_config_options(orc_cmd, orc_c);
  orc_cmd->add_option("--target", orc_c.target)->required();
  orc_cmd->add_option("--frame", orc_c.frame);
  orc_cmd->add_option("--method", method, "descent or graph")->check(CLI::IsMember({"descent", "graph"}));
  orc_cmd->add_option("--delta", delta, "graph search time step");
  orc_cmd->add_option("--quant", quant, "graph search cell size");
  orc_cmd->add_option("--max-segments", max_segments, "word descent length cap");
  orc_cmd->add_option("--restarts", restarts, "word descent starts per word");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError & e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    std::optional<Quatd> fixup;
    if (*plan_cmd) {
      const AxisConfig cfg = config_from(plan_c, err, fixup);
      const Quatd target   = target_from(plan_c, cfg, fixup);
      PlanResult res;
      try {
        res = plan_with_report(cfg, target);
      } catch (const std::runtime_error & e) {
        err << "error: " << e.what() << '\n';
        return kIncomplete;
      }
      for (const auto & t : res.ties) { err << "note: equal-cost alternative " << t << '\n'; }
      return emit(plan_to_json(cfg, target, res.plan), json_out, out, err) ? kOk : kBadInput;
    }
    if (*verify_cmd) {
      std::ifstream f(plan_path);
      if (!f) {
        err << "error: cannot read " << plan_path << '\n';
        return kBadInput;
      }
      std::stringstream buf;
      buf << f.rdbuf();
      PlanFile pf              = plan_from_json(buf.str());
      const AxisConfig cfg     = make_config(pf.alpha, pf.kappa);
      for (auto & seg : pf.plan.segments) { seg.control = cfg.classify(seg.control.a, seg.control.b); }
      const double residual    = quat_distance(segments_quat(cfg, pf.plan.segments), pf.target);
      const bool residual_pass = residual <= 1e-8;
      const CheckReport rep    = check_plan(cfg, pf.plan);
      out << check_to_json(rep, residual, residual_pass);
      return (rep.pass && residual_pass) ? kOk : kVerifyFailed;
    }
    if (*sweep_cmd) {
      const AxisConfig cfg = config_from(sweep_c, err, fixup);
      const auto a         = parse_reals(axis_text);
      if (a.size() != 3) { throw std::invalid_argument("axis needs 3 values"); }
      Vec3d axis(a[0], a[1], a[2]);
      if (!(axis.norm() > 0)) { throw std::invalid_argument("zero rotation axis"); }
      if (fixup) { axis = su2_to_so3(*fixup) * axis; }
      const double lo = angle_in(t_min, sweep_c.degrees), hi = angle_in(t_max, sweep_c.degrees);
      std::vector<double> grid;
      for (int i = 0; i < steps; ++i) { grid.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1)); }
      const Vec3d n = axis.normalized();
      const bool closed =
        cfg.c == 0 && cfg.kappa == 1 && std::abs(n.x()) < 1e-12 && std::abs(n.y()) < 1e-12 && n.z() > 0;
      out << "t,planner_cost,pattern_id,closed_form_cost\n";
      for (const auto & pt : plan_cost_curve(cfg, axis, grid)) {
        out << num(pt.t) << ',' << num(pt.cost) << ',' << pt.pattern_id << ',';
        if (closed && pt.t >= 0 && pt.t <= std::numbers::pi) { out << num(example_closed_form(pt.t)); }
        out << '\n';
      }
      return kOk;
    }
    if (*pat_cmd) {
      const AxisConfig cfg = config_from(pat_c, err, fixup);
      out << "regime: " << to_string(cfg.regime) << '\n' << patterns_table(cfg);
      return kOk;
    }
    if (*orc_cmd) {
      const AxisConfig cfg = config_from(orc_c, err, fixup);
      const Quatd target   = target_from(orc_c, cfg, fixup);
      const OracleResult r = method == "graph" ? graph_search(cfg, target, delta, quant) : word_descent(cfg, target, max_segments, restarts);
      out << oracle_to_json(cfg, r);
      return kOk;
    }
  } catch (const OracleBudgetExhausted & e) {
    err << "error: " << e.what() << '\n';
    return kIncomplete;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  std::vector<const char *> argv{"twoaxis"};
  for (const auto & a : args) { argv.push_back(a.c_str()); }
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace twoaxis::cli
