#pragma once

// Static SVG sketch of a frame and (optionally) its ellipsoid, for n <= 3.

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "etf/ellipsoid.hpp"
#include "etf/frame.hpp"

namespace etfkit {

namespace svg_detail {

struct Point2 {
  double x;
  double y;
};

// Quadratic form M with surface {x : xᵀ M x = 1}.
inline etf::Matrix surface_form(const etf::Ellipsoid& e) {
  if (e.is_axes()) {
    const auto& ax = e.as_axes();
    return ax.basis * ax.coeffs.asDiagonal() * ax.basis.transpose();
  }
  const etf::Matrix t_inv = e.as_operator().shape.matrix().inverse();
  return t_inv * t_inv;
}

inline etf::Vector embed3(const etf::Vector& v) {
  etf::Vector out = etf::Vector::Zero(3);
  out.head(v.size()) = v;
  return out;
}

}  // namespace svg_detail

inline std::string render_svg(const etf::Frame& frame, const std::optional<etf::Ellipsoid>& surface) {
  using svg_detail::Point2;
  const std::size_t n = frame.dim;
  const bool three_d = n == 3;
  const double az = 0.6;
  const double el = 0.35;
  auto project = [&](const etf::Vector& v) -> Point2 {
    const etf::Vector p = svg_detail::embed3(v);
    if (!three_d) return {p[0], p[1]};
    const double xr = p[0] * std::cos(az) - p[1] * std::sin(az);
    const double yr = p[0] * std::sin(az) + p[1] * std::cos(az);
    return {xr, p[2] * std::cos(el) - yr * std::sin(el)};
  };

  double extent = 1.0;
  for (const etf::Vector& v : frame.vectors) extent = std::max(extent, v.norm());
  const double clip = 1.3 * extent;

  std::vector<std::vector<Point2>> curves;
  if (surface && n >= 2) {
    const etf::Matrix form = svg_detail::surface_form(*surface);
    std::vector<std::pair<etf::Vector, etf::Vector>> planes;
    const etf::Matrix id = etf::Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    planes.emplace_back(id.col(0), id.col(1));
    if (three_d) {
      planes.emplace_back(id.col(1), id.col(2));
      planes.emplace_back(id.col(0), id.col(2));
      planes.emplace_back((id.col(0) + id.col(1)).normalized(), id.col(2));
      planes.emplace_back((id.col(0) - id.col(1)).normalized(), id.col(2));
    }
    for (const auto& [u, w] : planes) {
      std::vector<Point2> run;
      for (int s = 0; s <= 720; ++s) {
        const double phi = 2.0 * std::numbers::pi * s / 720.0;
        const etf::Vector d = std::cos(phi) * u + std::sin(phi) * w;
        const double q = d.dot(form * d);
        if (q <= 1.0 / (clip * clip)) {
          if (run.size() > 1) curves.push_back(run);
          run.clear();
          continue;
        }
        run.push_back(project(d / std::sqrt(q)));
      }
      if (run.size() > 1) curves.push_back(run);
    }
  }

  const double size = 480.0;
  const double half = size / 2.0;
  const double scale = (half - 20.0) / clip;
  auto sx = [&](double x) { return half + scale * x; };
  auto sy = [&](double y) { return half - scale * y; };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t axis = 0; axis < std::max<std::size_t>(n, 2); ++axis) {
    etf::Vector e = etf::Vector::Zero(3);
    e[static_cast<Eigen::Index>(axis)] = clip;
    const Point2 a = project(e.head(std::max<Eigen::Index>(static_cast<Eigen::Index>(n), 2)));
    const Point2 b = project(-e.head(std::max<Eigen::Index>(static_cast<Eigen::Index>(n), 2)));
    os << "<line x1=\"" << sx(a.x) << "\" y1=\"" << sy(a.y) << "\" x2=\"" << sx(b.x) << "\" y2=\"" << sy(b.y)
       << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
  }
  for (const auto& c : curves) {
    os << "<polyline fill=\"none\" stroke=\"#3366cc\" stroke-width=\"1.2\" points=\"";
    for (const Point2& p : c) os << sx(p.x) << ',' << sy(p.y) << ' ';
    os << "\"/>\n";
  }
  if (surface && n == 1) {
    const double a = surface->is_axes() ? surface->as_axes().coeffs[0] : 0.0;
    if (a > 0.0) {
      for (double s : {-1.0, 1.0}) {
        os << "<circle cx=\"" << sx(s / std::sqrt(a)) << "\" cy=\"" << sy(0) << "\" r=\"4\" fill=\"#3366cc\"/>\n";
      }
    }
  }
  for (const etf::Vector& v : frame.vectors) {
    const Point2 p = project(n == 1 ? etf::Vector(etf::Vector::Constant(2, 0.0) + v[0] * etf::Vector::Unit(2, 0)) : v);
    os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(p.x) << "\" y2=\"" << sy(p.y)
       << "\" stroke=\"#cc3333\" stroke-width=\"1.5\"/>\n";
    os << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"3\" fill=\"#cc3333\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace etfkit
