#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "eigenbox/box_spectrum.hpp"

namespace eigenbox {

/// Planar convex polygon given by a counter-clockwise vertex list.
/// Construction validates strict convexity (cross products > 1e-12 times
/// the squared scale) and reverses clockwise input automatically.
class ConvexPolygon {
 public:
  struct Edge {
    Eigen::Vector2d outward_normal;  // unit length
    double offset;                   // interior: outward_normal . x <= offset
  };

  explicit ConvexPolygon(std::vector<Eigen::Vector2d> vertices);

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int size() const { return static_cast<int>(vertices_.size()); }

  /// Largest absolute vertex coordinate; used to scale tolerances.
  double scale() const { return scale_; }

  /// Signed slack of the tightest edge inequality at p (positive inside).
  double edge_slack(const Eigen::Vector2d& p) const;
  bool contains(const Eigen::Vector2d& p, double slack = 0.0) const {
    return edge_slack(p) >= -slack;
  }

  void bounding_box(Eigen::Vector2d& lo, Eigen::Vector2d& hi) const;
  ConvexPolygon transformed(const Eigen::Matrix2d& rot,
                            const Eigen::Vector2d& shift) const;

 private:
  std::vector<Eigen::Vector2d> vertices_;
  std::vector<Edge> edges_;
  double scale_ = 0.0;
};

/// Ellipse {x : (x - center)^T shape (x - center) <= 1} with shape
/// symmetric positive definite.
struct Ellipsoid {
  Eigen::Vector2d center;
  Eigen::Matrix2d shape;

  /// Semi-axis lengths (ascending) and the matching orthonormal axes.
  void principal_axes(Eigen::Vector2d& semi_axes, Eigen::Matrix2d& axes) const;
  double mahalanobis(const Eigen::Vector2d& p) const {
    Eigen::Vector2d d = p - center;
    return d.dot(shape * d);
  }
};

struct InradiusResult {
  double radius;
  Eigen::Vector2d center;
};

/// Rotated orthotope sandwich: in the rotated frame centered at `center`,
/// the box with half-widths a_i / sqrt(n) is contained in the polygon and
/// the box with half-widths a_i * n contains it (n = 2). Both containments
/// are certified numerically at construction.
struct SandwichResult {
  Eigen::Matrix2d rotation;  // columns = box axes, det +1
  Eigen::Vector2d center;
  Orthotope box;  // half-widths a_1 <= a_2
  double inner_factor;  // 1/sqrt(2)
  double outer_factor;  // 2
  double certification_slack;  // absolute slack used by the certificates
};

/// Interior grid nodes (i*h, j*h) of a polygon, with strict-interior slack.
struct GridMask {
  double h = 0.0;
  std::vector<std::pair<std::int64_t, std::int64_t>> nodes;  // lexicographic
};

/// Shoelace area of a CCW vertex loop (any simple polygon).
double polygon_area(const std::vector<Eigen::Vector2d>& vertices);
double polygon_area(const ConvexPolygon& poly);

/// Chebyshev center: the largest inscribed ball, solved by enumerating
/// edge triples of the 3-variable LP  max r  s.t.  n_e . x + r <= d_e.
/// Exact to ~1e-9 absolute in the radius at polygon scale.
InradiusResult inradius(const ConvexPolygon& poly);

/// Minimum-volume enclosing ellipse of a planar point set, by Khachiyan
/// ascent with Wolfe-Atwood away steps. Stops once every input point has
/// Mahalanobis value <= 1 + tolerance. Collinear input throws
/// std::invalid_argument (dimension deficiency).
Ellipsoid mvee(const std::vector<Eigen::Vector2d>& points, double tolerance);

/// MVEE-based constructive sandwich: with E the enclosing ellipse
/// (semi-axes b_i along axes u_i), a_i := b_i / n realizes
/// box(a/sqrt(n)) <= polygon <= box(a*n) in the rotated frame.
/// Certification tests the four inner-box corners against the edge
/// inequalities and all polygon vertices against the outer box, retrying
/// with tighter MVEE tolerance before giving up (std::runtime_error).
SandwichResult orthotope_sandwich(const ConvexPolygon& poly);

/// Grid nodes strictly interior to the polygon (slack > 1e-12 * scale).
/// Requires h <= min bounding-box extent / 8.
GridMask rasterize(const ConvexPolygon& poly, double h);

/// Interior nodes of an arbitrary simple polygon (crossing-number test);
/// used by the no-claims nonconvex sweep path.
GridMask rasterize_simple(const std::vector<Eigen::Vector2d>& vertices,
                          double h);

/// Parse {"vertices": [[x, y], ...]} (JSON text); CCW enforced on load.
ConvexPolygon polygon_from_json(const std::string& json_text);
ConvexPolygon polygon_from_json_file(const std::string& path);

/// Regular m-gon inscribed in the circle of given radius, centered at the
/// origin, first vertex on the positive x-axis.
ConvexPolygon regular_polygon(int m, double circumradius);

}  // namespace eigenbox
