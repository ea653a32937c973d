#pragma once

#include <memory>
#include <string_view>

#include <Eigen/Core>

namespace crslip {

/// Points and vectors are stored in three components for both N = 2 and
/// N = 3. In the planar case the third component is always zero.
using Point = Eigen::Vector3d;

enum class DomainKind { disk2d, ball3d };

DomainKind parse_domain_kind(std::string_view name);
std::string_view to_string(DomainKind kind);

/// A bounded smooth domain described through its signed distance d, the
/// closest-point projection pi onto the boundary and the outward normal n.
/// d < 0 inside, d = 0 on the boundary, d > 0 outside.
class SmoothDomain {
 public:
  virtual ~SmoothDomain() = default;

  virtual int dim() const = 0;
  virtual double signed_distance(const Point& x) const = 0;
  virtual Point project_to_boundary(const Point& x) const = 0;
  /// Requires |signed_distance(x)| <= 1e-10.
  virtual Point outward_normal(const Point& x) const = 0;
};

/// Ball of radius R centred at the origin; the unit disk (N = 2) and unit
/// ball (N = 3) are the R = 1 instances.
class BallDomain final : public SmoothDomain {
 public:
  BallDomain(DomainKind kind, double radius = 1.0);

  DomainKind kind() const { return kind_; }
  double radius() const { return radius_; }

  int dim() const override;
  double signed_distance(const Point& x) const override;
  Point project_to_boundary(const Point& x) const override;
  Point outward_normal(const Point& x) const override;

 private:
  DomainKind kind_;
  double radius_;
};

std::shared_ptr<const SmoothDomain> make_domain(DomainKind kind);

}  // namespace crslip
