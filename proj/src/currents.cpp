#include "calnet/currents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "calnet/kernels.hpp"

namespace calnet {

long GroupElement::norm() const { return std::max({std::labs(n), std::labs(m), std::labs(n - m)}); }

template <class T>
Vec2<T> GroupElement::embed() const {
  const auto g = hex_generators<T>();
  return T(n) * g[0] + T(m) * g[1];
}

template Vec2<double> GroupElement::embed<double>() const;
template Vec2<QSqrt3> GroupElement::embed<QSqrt3>() const;

std::string to_string(const GroupElement& g) { return "(" + std::to_string(g.n) + "," + std::to_string(g.m) + ")"; }

bool is_generator(const GroupElement& g) {
  for (const auto& h : {GroupElement::g1(), GroupElement::g2(), GroupElement::g3()})
    if (g == h || g == -h) return true;
  return false;
}

template <class T>
void LatticeCurrent<T>::add(const Vec2<T>& a, const Vec2<T>& b, GroupElement mult) {
  pieces.push_back({{a, b}, unit(b - a), mult});
}

template <class T>
InducedCurrent<T> induce_current(const Network& net, const ToleranceConfig& tol) {
  check_minimal(net, tol).throw_if_failed();
  const double theta = canonical_rotation(net, tol);
  InducedCurrent<T> out;
  const auto gens = hex_generators<T>();
  const GroupElement mults[3] = {GroupElement::g1(), GroupElement::g2(), GroupElement::g3()};

  std::vector<Segment<T>> segs;
  if constexpr (is_exact_v<T>) {
    if (std::abs(theta) > tol.eps_angle) throw NotAlignable("exact mode needs a network already aligned with g1, g2, g3");
    if (!net.has_exact()) throw InvalidInput("exact mode needs exact vertex coordinates");
    for (std::size_t e = 0; e < net.edges.size(); ++e)
      segs.push_back({*net.vertices[net.edges[e].from].exact, *net.vertices[net.edges[e].to].exact});
  } else {
    out.rotation = theta;
    const Network work = theta == 0 ? net : rotated(net, theta);
    for (const auto& edge : work.edges) segs.push_back({work.vertices[edge.from].p, work.vertices[edge.to].p});
  }

  for (std::size_t e = 0; e < segs.size(); ++e) {
    const Segment<T>& s = segs[e];
    const Vec2<T> u = unit(s.direction());
    bool placed = false;
    for (int i = 0; i < 3 && !placed; ++i) {
      const T c = dot(u, gens[i]);
      if constexpr (is_exact_v<T>) {
        if (c == QSqrt3(1)) {
          out.current.pieces.push_back({s, u, mults[i]});
          out.forward.push_back(true);
          placed = true;
        } else if (c == QSqrt3(-1)) {
          out.current.pieces.push_back({{s.b, s.a}, -u, mults[i]});
          out.forward.push_back(false);
          placed = true;
        }
      } else {
        if (c > 0.9) {
          out.current.pieces.push_back({s, u, mults[i]});
          out.forward.push_back(true);
          placed = true;
        } else if (c < -0.9) {
          out.current.pieces.push_back({{s.b, s.a}, -u, mults[i]});
          out.forward.push_back(false);
          placed = true;
        }
      }
    }
    if (!placed) throw NotAlignable("edge " + std::to_string(e) + " is not parallel to g1, g2 or g3");
  }
  return out;
}

namespace {

template <class T>
bool same_point(const Vec2<T>& a, const Vec2<T>& b, double eps) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return norm(a - b) <= eps;
  }
}

template <class T>
bool point_less(const Vec2<T>& a, const Vec2<T>& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

}  // namespace

template <class T>
BoundaryMeasure<T> boundary(const LatticeCurrent<T>& current, double eps) {
  BoundaryMeasure<T> out;
  auto deposit = [&](const Vec2<T>& p, const GroupElement& g) {
    for (auto& atom : out.atoms) {
      if (same_point(atom.p, p, eps)) {
        atom.coefficient += g;
        return;
      }
    }
    out.atoms.push_back({p, g});
  };
  for (const auto& piece : current.pieces) {
    deposit(piece.seg.b, piece.mult);
    deposit(piece.seg.a, -piece.mult);
  }
  std::erase_if(out.atoms, [](const BoundaryAtom<T>& a) { return a.coefficient.is_zero(); });
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const BoundaryAtom<T>& l, const BoundaryAtom<T>& r) { return point_less(l.p, r.p); });
  return out;
}

template <class T>
T mass(const LatticeCurrent<T>& current) {
  T total(0);
  for (const auto& piece : current.pieces) total += length(piece.seg.direction()) * T(piece.mult.norm());
  return total;
}

template <class T>
bool sum_boundary_check(const BoundaryMeasure<T>& measure) {
  GroupElement sum;
  for (const auto& a : measure.atoms) sum += a.coefficient;
  return sum.is_zero();
}

template <class T>
bool same_boundary(const BoundaryMeasure<T>& a, const BoundaryMeasure<T>& b, double eps) {
  if (a.atoms.size() != b.atoms.size()) return false;
  std::vector<bool> used(b.atoms.size(), false);
  for (const auto& atom : a.atoms) {
    bool matched = false;
    for (std::size_t j = 0; j < b.atoms.size() && !matched; ++j) {
      if (used[j] || !same_point(atom.p, b.atoms[j].p, eps) || atom.coefficient != b.atoms[j].coefficient) continue;
      used[j] = matched = true;
    }
    if (!matched) return false;
  }
  return true;
}

LatticeCurrent<double> canonicalize(const LatticeCurrent<double>& current, double eps) {
  struct Line {
    Vector2 u;
    double offset;
    std::vector<std::size_t> pieces;
  };
  std::vector<Line> lines;
  for (std::size_t k = 0; k < current.pieces.size(); ++k) {
    const auto& piece = current.pieces[k];
    Vector2 u = piece.seg.direction() / norm(piece.seg.direction());
    if (u.x < -eps || (std::abs(u.x) <= eps && u.y < 0)) u = -u;
    const double offset = cross(u, piece.seg.a);
    bool found = false;
    for (auto& line : lines) {
      if (std::abs(cross(line.u, u)) <= eps && std::abs(line.offset - offset) <= eps) {
        line.pieces.push_back(k);
        found = true;
        break;
      }
    }
    if (!found) lines.push_back({u, offset, {k}});
  }

  LatticeCurrent<double> out;
  for (const auto& line : lines) {
    std::vector<double> cuts;
    for (std::size_t k : line.pieces) {
      cuts.push_back(dot(line.u, current.pieces[k].seg.a));
      cuts.push_back(dot(line.u, current.pieces[k].seg.b));
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> breaks;
    for (double c : cuts)
      if (breaks.empty() || c - breaks.back() > eps) breaks.push_back(c);
    const Vector2 n = perp(line.u);
    auto at = [&](double t) { return t * line.u + line.offset * n; };
    GroupElement run_mult;
    double run_start = 0;
    bool open = false;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
      GroupElement sum;
      for (std::size_t k : line.pieces) {
        const auto& piece = current.pieces[k];
        const double ta = dot(line.u, piece.seg.a), tb = dot(line.u, piece.seg.b);
        if (mid > std::min(ta, tb) && mid < std::max(ta, tb)) sum += ta < tb ? piece.mult : -piece.mult;
      }
      if (open && sum == run_mult) continue;
      if (open && !run_mult.is_zero()) out.add(at(run_start), at(breaks[i]), run_mult);
      run_mult = sum;
      run_start = breaks[i];
      open = true;
    }
    if (open && !run_mult.is_zero()) out.add(at(run_start), at(breaks.back()), run_mult);
  }
  return out;
}

template <class T>
void CalibrationReport<T>::throw_if_failed() const {
  if (!passed) throw CalibrationFailure(failures.empty() ? "calibration failed" : failures.front());
}

template <class T>
CalibrationReport<T> verify_identity_calibration(const LatticeCurrent<T>& current, std::size_t samples,
                                                 const ToleranceConfig& tol) {
  CalibrationReport<T> report;
  const auto scan = kernels::comass_scan(samples);
  report.comass_max = scan.max_value;
  report.comass_samples = scan.evaluated;
  report.comass_at_hexagon_directions = 1;
  for (int k = 0; k < 6; ++k)
    report.comass_at_hexagon_directions =
        std::min(report.comass_at_hexagon_directions, kernels::identity_comass(k * std::numbers::pi / 3));
  if (report.comass_max > 1 + tol.eps_field)
    report.failures.push_back("comass " + std::to_string(report.comass_max) + " exceeds 1 at angle " +
                              std::to_string(scan.argmax));
  if (report.comass_at_hexagon_directions < 1 - tol.eps_field)
    report.failures.push_back("comass does not reach 1 along the hexagon directions");

  for (std::size_t k = 0; k < current.pieces.size(); ++k) {
    const auto& piece = current.pieces[k];
    const Vec2<T> theta = piece.mult.template embed<T>();
    const T r = abs_of(dot(piece.tau, theta) - hex_norm(theta));
    if (k == 0 || report.equality_residual < r) {
      report.equality_residual = r;
      report.worst_piece = k;
    }
    if (!near_zero(r, tol.eps_field)) {
      const Point2 a = to_double(piece.seg.a), b = to_double(piece.seg.b);
      report.failures.push_back("calibration equality fails on piece " + std::to_string(k) + " from (" +
                                std::to_string(a.x) + ", " + std::to_string(a.y) + ") to (" + std::to_string(b.x) +
                                ", " + std::to_string(b.y) + "): residual " + to_text(r));
    }
  }
  report.passed = report.failures.empty();
  return report;
}

#define CALNET_INSTANTIATE(T)                                                                            \
  template struct LatticeCurrent<T>;                                                                     \
  template struct CalibrationReport<T>;                                                                  \
  template InducedCurrent<T> induce_current<T>(const Network&, const ToleranceConfig&);                  \
  template BoundaryMeasure<T> boundary(const LatticeCurrent<T>&, double);                                \
  template T mass(const LatticeCurrent<T>&);                                                             \
  template bool sum_boundary_check(const BoundaryMeasure<T>&);                                           \
  template bool same_boundary(const BoundaryMeasure<T>&, const BoundaryMeasure<T>&, double);             \
  template CalibrationReport<T> verify_identity_calibration(const LatticeCurrent<T>&, std::size_t,       \
                                                            const ToleranceConfig&);

CALNET_INSTANTIATE(double)
CALNET_INSTANTIATE(QSqrt3)

#undef CALNET_INSTANTIATE

}  // namespace calnet
