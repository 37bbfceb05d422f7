#include "calnet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "calnet/errors.hpp"

namespace calnet::svg {

namespace {

constexpr const char* kRegionFill[3] = {"#f4a6a6", "#a6c8f4", "#b8e6a6"};
constexpr const char* kFieldStroke[3] = {"#7a1f1f", "#1f3f7a", "#2f6a1f"};

struct Box {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  void add(const Point2& p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  double span() const { return std::max({x1 - x0, y1 - y0, 1e-9}); }
};

class Canvas {
 public:
  Canvas(const Box& box, double width, double x_offset = 0)
      : box_(box), scale_(width / box.span()), dx_(x_offset) {}

  double scale() const { return scale_; }
  double height() const { return (box_.y1 - box_.y0) * scale_ + 2 * kMargin; }
  double width() const { return (box_.x1 - box_.x0) * scale_ + 2 * kMargin; }

  std::string pt(const Point2& p) const {
    std::ostringstream s;
    s.precision(6);
    s << dx_ + kMargin + (p.x - box_.x0) * scale_ << ',' << kMargin + (box_.y1 - p.y) * scale_;
    return s.str();
  }

  std::pair<std::string, std::string> xy(const Point2& p) const {
    const std::string s = pt(p);
    const auto comma = s.find(',');
    return {s.substr(0, comma), s.substr(comma + 1)};
  }

  std::string ring_path(const Ring<double>& r) const {
    std::string d;
    for (std::size_t k = 0; k < r.size(); ++k) d += (k == 0 ? "M" : " L") + pt(r[k]);
    return d + " Z";
  }

  static constexpr double kMargin = 20;

 private:
  Box box_;
  double scale_;
  double dx_;
};

std::string header(double w, double h) {
  std::ostringstream s;
  s.precision(6);
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- " << kVersion << " -->\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << ' ' << h << "\">\n"
    << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"5\" markerHeight=\"5\" "
       "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"context-stroke\"/></marker></defs>\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return s.str();
}

void draw_network(std::ostream& out, const Canvas& c, const Network& net) {
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto pts = net.polyline(e);
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (const auto& p : pts) out << c.pt(p) << ' ';
    out << "\"/>\n";
  }
  for (const auto& v : net.vertices) {
    const auto [x, y] = c.xy(v.p);
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\""
        << (v.kind == VertexKind::junction ? "black" : "white") << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << y << "\" dx=\"5\" dy=\"-5\" font-size=\"10\" font-family=\"sans-serif\">"
        << v.id << "</text>\n";
  }
}

void draw_partition(std::ostream& out, const Canvas& c, const PartitionSpec<double>& spec,
                    const FieldAssignment<double>* fields) {
  for (int i = 0; i < 3; ++i)
    for (const auto& poly : spec.regions[i]) {
      std::string d = c.ring_path(poly.outer);
      for (const auto& h : poly.holes) d += ' ' + c.ring_path(h);
      out << "<path d=\"" << d << "\" fill=\"" << kRegionFill[i] << "\" fill-rule=\"evenodd\" stroke=\"" << kRegionFill[i] << "\" stroke-width=\"0.6\"/>\n";
    }
  std::string d = c.ring_path(spec.omega.outer);
  for (const auto& h : spec.omega.holes) d += ' ' + c.ring_path(h);
  out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"#555\" stroke-width=\"1\"/>\n";
  for (const auto& itf : spec.interfaces) {
    const auto [x1, y1] = c.xy(itf.seg.a);
    const auto [x2, y2] = c.xy(itf.seg.b);
    out << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
        << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  if (!fields) return;
  for (const auto& cell : fields->cells) {
    if (cell.ring.empty()) continue;
    Point2 m{0, 0};
    for (const auto& p : cell.ring) m = m + p;
    m = m * (1.0 / static_cast<double>(cell.ring.size()));
    double reach = std::numeric_limits<double>::infinity();
    for (const auto& p : cell.ring) reach = std::min(reach, norm(p - m));
    const double len = std::max(0.35 * reach, 1e-9);
    out << "<g stroke-width=\"1\">";
    for (int k = 0; k < 3; ++k) {
      if (norm(cell.psi[k]) < 1e-12) continue;
      out << "<polyline fill=\"none\" stroke=\"" << kFieldStroke[k] << "\" marker-end=\"url(#arrow)\" points=\""
          << c.pt(m) << ' ' << c.pt(m + cell.psi[k] * len) << "\"/>";
    }
    out << "</g>\n";
  }
}

Box box_of(const Polygon<double>& omega) {
  Box b;
  for (const auto& p : omega.outer) b.add(p);
  return b;
}

}  // namespace

std::string network_svg(const Network& net) {
  Box b;
  for (std::size_t e = 0; e < net.edges.size(); ++e)
    for (const auto& p : net.polyline(e)) b.add(p);
  for (const auto& v : net.vertices) b.add(v.p);
  Canvas c(b, 480);
  std::ostringstream out;
  out << header(c.width(), c.height());
  draw_network(out, c, net);
  out << "</svg>\n";
  return out.str();
}

std::string partition_svg(const PartitionSpec<double>& spec, const FieldAssignment<double>* fields) {
  Canvas c(box_of(spec.omega), 640);
  std::ostringstream out;
  out << header(c.width(), c.height());
  draw_partition(out, c, spec, fields);
  out << "</svg>\n";
  return out.str();
}

std::string counterexample_svg(const CounterexampleResult& result) {
  const Box b = box_of(result.E.omega);
  Canvas left(b, 480);
  Canvas right(b, 480, left.width());
  std::ostringstream out;
  out << header(2 * left.width(), left.height() + 20);
  draw_partition(out, left, result.E, nullptr);
  draw_partition(out, right, result.F, nullptr);
  out.precision(8);
  out << "<text x=\"20\" y=\"" << left.height() + 10 << "\" font-size=\"12\" font-family=\"sans-serif\">P(E) = "
      << result.P_E << "</text>\n";
  out << "<text x=\"" << left.width() + 20 << "\" y=\"" << left.height() + 10
      << "\" font-size=\"12\" font-family=\"sans-serif\">P(F) = " << result.P_F << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path + "'");
  f << content;
}

}  // namespace calnet::svg
