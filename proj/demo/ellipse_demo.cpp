// Builds tight frames of length 3 on the ellipse 1.5 x^2 + 0.5 y^2 = 1 by both
// routes and prints the vectors with their frame bounds.

#include <iomanip>
#include <iostream>

#include "etf/etf.hpp"

int main() {
  const etf::Vector axes = (etf::Vector(2) << 1.5, 0.5).finished();
  const etf::Ellipsoid ellipse = etf::Ellipsoid::from_axes(axes);
  const std::size_t length = 3;

  const etf::Frame rotated = etf::tight_frame_on_ellipsoid(axes, length);
  const etf::EtfResult peeled = etf::etf_synthesize(ellipse, length);

  std::cout << std::setprecision(12);
  for (const auto* f : {&rotated, &peeled.frame}) {
    const etf::FrameReport rep = etf::frame_bounds(*f);
    std::cout << f->label << ": frame bound " << rep.frame_bound.value_or(0.0)
              << ", max membership residual " << etf::max_membership(ellipse, *f) << '\n';
    for (const etf::Vector& v : f->vectors) std::cout << "  (" << v[0] << ", " << v[1] << ")\n";
  }
  std::cout << "expected bound k / sum(a) = " << static_cast<double>(length) / axes.sum() << '\n';
  return 0;
}
