#include "crslip/geometry.hpp"

#include <cmath>
#include <string>

#include "crslip/errors.hpp"

namespace crslip {

DomainKind parse_domain_kind(std::string_view name) {
  if (name == "disk2d") return DomainKind::disk2d;
  if (name == "ball3d") return DomainKind::ball3d;
  throw ConfigError("unknown case '" + std::string(name) + "' (expected disk2d or ball3d)");
}

std::string_view to_string(DomainKind kind) {
  return kind == DomainKind::disk2d ? "disk2d" : "ball3d";
}

BallDomain::BallDomain(DomainKind kind, double radius) : kind_(kind), radius_(radius) {
  if (!(radius > 0.0)) throw Error("ball radius must be positive");
}

int BallDomain::dim() const { return kind_ == DomainKind::disk2d ? 2 : 3; }

double BallDomain::signed_distance(const Point& x) const { return x.norm() - radius_; }

Point BallDomain::project_to_boundary(const Point& x) const {
  const double r = x.norm();
  if (r < 1e-12) throw DegeneratePoint("projection onto the sphere is undefined at the centre");
  return (radius_ / r) * x;
}

Point BallDomain::outward_normal(const Point& x) const {
  if (std::abs(signed_distance(x)) > 1e-10) {
    throw NotOnBoundary("outward_normal requires a boundary point");
  }
  return x / x.norm();
}

std::shared_ptr<const SmoothDomain> make_domain(DomainKind kind) {
  return std::make_shared<BallDomain>(kind);
}

}  // namespace crslip
