#include "moorfd/mooring.hpp"

#include "moorfd/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace moorfd::mooring {

namespace {

// Relative tolerance ~1e-10 on the bracketed root.
constexpr int kToleranceBits = 34;
constexpr std::uintmax_t kMaxIter = 200;

struct Spans {
  double x;
  double z;
};

// Fairlead spans of a line with fairlead tensions (h > 0, v >= 0).
Spans spans(double h, double v, double length, double w, double ea) {
  const double va = v - w * length;  // vertical tension at the anchor
  if (va >= 0.0) {
    const double x = h / w * (std::asinh(v / h) - std::asinh(va / h)) + h * length / ea;
    const double z = h / w * (std::hypot(1.0, v / h) - std::hypot(1.0, va / h)) +
                     (v * length - 0.5 * w * length * length) / ea;
    return {x, z};
  }
  const double lb = length - v / w;
  const double x = lb + h / w * std::asinh(v / h) + h * length / ea;
  const double z = h / w * (std::hypot(1.0, v / h) - 1.0) + v * v / (2.0 * ea * w);
  return {x, z};
}

double solve_root(const auto& f, double lo, double hi, const char* what) {
  std::uintmax_t iter = kMaxIter;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(kToleranceBits), iter);
  if (iter >= kMaxIter) throw NumericalError(std::string(what) + ": root finding did not converge");
  return 0.5 * (a + b);
}

// Vertical fairlead tension that reproduces the vertical span for given h.
double vertical_for(double h, double z, double length, double w, double ea) {
  auto f = [&](double v) { return spans(h, v, length, w, ea).z - z; };
  double hi = std::max(w * length, 1.0);
  int grow = 0;
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (++grow > 200) throw NumericalError("catenary: vertical tension unbounded");
  }
  if (f(0.0) >= 0.0) return 0.0;
  return solve_root(f, 0.0, hi, "catenary vertical tension");
}

}  // namespace

void MooringLineParams::validate() const {
  if (!(length_unstretched > 0.0) || !(weight_submerged > 0.0) || !(ea > 0.0) ||
      !(water_depth > 0.0)) {
    throw ConfigError("mooring line needs positive length, weight, EA and depth");
  }
}

std::string to_string(FaultKind k) {
  return k == FaultKind::FairleadRelease ? "fairlead_release" : "anchor_slip";
}

FaultKind parse_fault_kind(const std::string& s) {
  if (s == "fairlead_release") return FaultKind::FairleadRelease;
  if (s == "anchor_slip") return FaultKind::AnchorSlip;
  throw ConfigError("unknown fault kind '" + s + "' (fairlead_release|anchor_slip)");
}

CatenarySolution solve_catenary_span(double x, double z, double length, double w,
                                     double ea) {
  if (!(z > 0.0)) throw NumericalError("catenary: fairlead must be above the anchor");
  if (!(x >= 0.0) || !(length > 0.0) || !(w > 0.0) || !(ea > 0.0)) {
    throw NumericalError("catenary: invalid span or line properties");
  }
  CatenarySolution sol;
  // Slack limit: the suspended part hangs vertically with zero horizontal
  // tension, z = s + w s^2 / (2 EA).
  const double s_hang = (std::sqrt(1.0 + 2.0 * w * z / ea) - 1.0) * ea / w;
  if (s_hang < length && x <= length - s_hang) {
    sol.v = w * s_hang;
    sol.tension = sol.v;
    sol.seabed_length = length - s_hang;
    return sol;
  }

  auto fx = [&](double h) {
    return spans(h, vertical_for(h, z, length, w, ea), length, w, ea).x - x;
  };
  double lo = 1e-9 * w * length;
  double hi = std::max(w * length, 1.0);
  int grow = 0;
  while (fx(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200) {
      std::ostringstream os;
      os << "catenary: no solution for span x=" << x << " z=" << z
         << " length=" << length << " (line taut beyond EA range)";
      throw NumericalError(os.str());
    }
  }
  if (fx(lo) > 0.0) {
    std::ostringstream os;
    os << "catenary: span x=" << x << " z=" << z << " not bracketed";
    throw NumericalError(os.str());
  }
  sol.h = solve_root(fx, lo, hi, "catenary horizontal tension");
  sol.v = vertical_for(sol.h, z, length, w, ea);
  sol.tension = std::hypot(sol.h, sol.v);
  sol.seabed_length = std::max(0.0, length - sol.v / w);
  return sol;
}

CatenarySolution solve_catenary(const MooringLineParams& line,
                                const Eigen::Vector3d& fairlead_earth,
                                double length_override) {
  const Eigen::Vector3d d = fairlead_earth - line.anchor;
  const double length = length_override > 0.0 ? length_override : line.length_unstretched;
  return solve_catenary_span(std::hypot(d.x(), d.y()), d.z(), length,
                             line.weight_submerged, line.ea);
}

Eigen::Matrix3d rotation(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Vector3d fairlead_position(const MooringLineParams& line, const Vector6d& pose) {
  return pose.head<3>() + rotation(pose(3), pose(4), pose(5)) * line.fairlead_body;
}

MooringLoads mooring_loads(const Vector6d& pose,
                           const std::vector<MooringLineParams>& lines,
                           const std::vector<LineState>& states) {
  if (lines.size() != states.size()) {
    throw ValidationError("mooring lines and line states differ in count");
  }
  MooringLoads out;
  out.tensions.assign(lines.size(), 0.0);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (states[i].mode == LineMode::FairleadReleased) continue;
    const Eigen::Vector3d p = fairlead_position(lines[i], pose);
    const double length = states[i].mode == LineMode::AnchorSlipped
                              ? states[i].effective_length
                              : lines[i].length_unstretched;
    CatenarySolution sol;
    try {
      sol = solve_catenary(lines[i], p, length);
    } catch (const NumericalError& e) {
      throw NumericalError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    Eigen::Vector2d dir = (p - lines[i].anchor).head<2>();
    const double n = dir.norm();
    dir = n > 0.0 ? Eigen::Vector2d(dir / n) : Eigen::Vector2d::Zero();
    const Eigen::Vector3d f(-sol.h * dir.x(), -sol.h * dir.y(), -sol.v);
    out.force.head<3>() += f;
    out.force.tail<3>() += (p - pose.head<3>()).cross(f);
    out.tensions[i] = sol.tension;
  }
  return out;
}

Vector6d mooring_force(const Vector6d& pose,
                       const std::vector<MooringLineParams>& lines,
                       const std::vector<LineState>& states) {
  return mooring_loads(pose, lines, states).force;
}

Matrix6d linearize_mooring_stiffness(const std::vector<MooringLineParams>& lines,
                                     const std::vector<LineState>& states,
                                     const Vector6d& pose, double delta) {
  if (!(delta > 0.0)) throw ConfigError("stiffness perturbation must be positive");
  auto attempt = [&](double d) {
    Matrix6d k;
    for (int j = 0; j < 6; ++j) {
      Vector6d p = pose, m = pose;
      p(j) += d;
      m(j) -= d;
      k.col(j) = -(mooring_force(p, lines, states) - mooring_force(m, lines, states)) /
                 (2.0 * d);
    }
    return k;
  };
  try {
    return attempt(delta);
  } catch (const NumericalError&) {
    return attempt(0.5 * delta);
  }
}

std::vector<LineState> healthy_states(const std::vector<MooringLineParams>& lines) {
  std::vector<LineState> s(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    s[i].effective_length = lines[i].length_unstretched;
  }
  return s;
}

std::vector<LineState> apply_mooring_fault(std::vector<LineState> states,
                                           const FaultEvent& event, double t_now) {
  if (event.line_index < 1 || event.line_index > static_cast<int>(states.size())) {
    throw ConfigError("fault line index " + std::to_string(event.line_index) +
                      " out of range");
  }
  if (t_now < event.time) return states;
  auto& s = states[static_cast<std::size_t>(event.line_index - 1)];
  if (event.kind == FaultKind::FairleadRelease) {
    s.mode = LineMode::FairleadReleased;
    s.last_tension_fairlead = 0.0;
  } else {
    if (!(event.theta_x > 0.0)) throw ConfigError("anchor slip needs theta_x > 0");
    if (s.mode != LineMode::FairleadReleased) s.mode = LineMode::AnchorSlipped;
    s.effective_length = event.theta_x;
  }
  return states;
}

double submerged_weight(double mass_per_length, double diameter, double rho_water,
                        double g) {
  const double displaced = rho_water * std::numbers::pi / 4.0 * diameter * diameter;
  return (mass_per_length - displaced) * g;
}

std::vector<MooringLineParams> make_lines(const MooringLayout& layout, double rho_water,
                                          double g) {
  if (layout.angles_deg.empty()) throw ConfigError("mooring layout has no lines");
  std::vector<MooringLineParams> lines;
  for (double deg : layout.angles_deg) {
    const double ang = std::numbers::pi + deg * std::numbers::pi / 180.0;
    MooringLineParams l;
    l.anchor = {layout.anchor_radius * std::cos(ang), layout.anchor_radius * std::sin(ang),
                -layout.anchor_depth};
    l.fairlead_body = {layout.fairlead_radius * std::cos(ang),
                       layout.fairlead_radius * std::sin(ang), layout.fairlead_height};
    l.length_unstretched = layout.length;
    l.weight_submerged = submerged_weight(layout.mass_per_length, layout.diameter, rho_water, g);
    l.ea = layout.ea;
    l.water_depth = layout.anchor_depth;
    l.validate();
    lines.push_back(l);
  }
  return lines;
}

std::vector<MooringLineParams> default_lines() { return make_lines(MooringLayout{}); }

}  // namespace moorfd::mooring
