#include "eigenbox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace eigenbox {

namespace {
constexpr double kConvexityTol = 1e-12;
}

ConvexPolygon::ConvexPolygon(std::vector<Eigen::Vector2d> vertices)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw std::invalid_argument("ConvexPolygon: need at least 3 vertices");
  }
  for (const auto& v : vertices_) {
    scale_ = std::max({scale_, std::fabs(v.x()), std::fabs(v.y())});
  }
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
    throw std::invalid_argument("ConvexPolygon: degenerate vertex scale");
  }

  if (polygon_area(vertices_) < 0.0) {
    std::reverse(vertices_.begin(), vertices_.end());
  }

  const std::size_t m = vertices_.size();
  const double cross_tol = kConvexityTol * scale_ * scale_;
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& a = vertices_[i];
    const Eigen::Vector2d& b = vertices_[(i + 1) % m];
    const Eigen::Vector2d& c = vertices_[(i + 2) % m];
    const Eigen::Vector2d e1 = b - a;
    const Eigen::Vector2d e2 = c - b;
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    if (!(cross > cross_tol)) {
      throw std::invalid_argument(
          "ConvexPolygon: vertices are not strictly convex CCW");
    }
    if (e1.norm() <= kConvexityTol * scale_) {
      throw std::invalid_argument("ConvexPolygon: repeated vertex");
    }
  }

  edges_.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& a = vertices_[i];
    const Eigen::Vector2d& b = vertices_[(i + 1) % m];
    const Eigen::Vector2d t = (b - a).normalized();
    const Eigen::Vector2d outward(t.y(), -t.x());  // right of CCW travel
    edges_.push_back({outward, outward.dot(a)});
  }
}

double ConvexPolygon::edge_slack(const Eigen::Vector2d& p) const {
  double slack = std::numeric_limits<double>::infinity();
  for (const Edge& e : edges_) {
    slack = std::min(slack, e.offset - e.outward_normal.dot(p));
  }
  return slack;
}

void ConvexPolygon::bounding_box(Eigen::Vector2d& lo,
                                 Eigen::Vector2d& hi) const {
  lo = hi = vertices_.front();
  for (const auto& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

ConvexPolygon ConvexPolygon::transformed(const Eigen::Matrix2d& rot,
                                         const Eigen::Vector2d& shift) const {
  std::vector<Eigen::Vector2d> vs;
  vs.reserve(vertices_.size());
  for (const auto& v : vertices_) vs.push_back(rot * v + shift);
  return ConvexPolygon(std::move(vs));
}

void Ellipsoid::principal_axes(Eigen::Vector2d& semi_axes,
                               Eigen::Matrix2d& axes) const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(shape);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw std::runtime_error("Ellipsoid: shape matrix is not SPD");
  }
  // shape eigenvalue q gives semi-axis 1/sqrt(q); ascending q = descending
  // axis, so flip to ascending semi-axes.
  semi_axes = Eigen::Vector2d(1.0 / std::sqrt(es.eigenvalues()(1)),
                              1.0 / std::sqrt(es.eigenvalues()(0)));
  axes.col(0) = es.eigenvectors().col(1);
  axes.col(1) = es.eigenvectors().col(0);
  if (axes.determinant() < 0.0) axes.col(1) = -axes.col(1);
}

double polygon_area(const std::vector<Eigen::Vector2d>& vertices) {
  const std::size_t m = vertices.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& a = vertices[i];
    const Eigen::Vector2d& b = vertices[(i + 1) % m];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

double polygon_area(const ConvexPolygon& poly) {
  return polygon_area(poly.vertices());
}

InradiusResult inradius(const ConvexPolygon& poly) {
  const auto& edges = poly.edges();
  const int m = static_cast<int>(edges.size());
  const double feas_tol = 1e-9 * std::max(1.0, poly.scale());

  // max r s.t. n_e . x + r <= d_e; the optimum activates three edges, so
  // enumerate triples (m <= ~128 keeps this trivial and pivot-free).
  double best_r = -std::numeric_limits<double>::infinity();
  Eigen::Vector2d best_c = Eigen::Vector2d::Zero();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = j + 1; k < m; ++k) {
        Eigen::Matrix3d A;
        Eigen::Vector3d b;
        const int idx[3] = {i, j, k};
        for (int row = 0; row < 3; ++row) {
          const auto& e = edges[idx[row]];
          A(row, 0) = e.outward_normal.x();
          A(row, 1) = e.outward_normal.y();
          A(row, 2) = 1.0;
          b(row) = e.offset;
        }
        Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
        if (!lu.isInvertible()) continue;
        const Eigen::Vector3d sol = lu.solve(b);
        const double r = sol(2);
        if (!(r > best_r)) continue;
        const Eigen::Vector2d c(sol(0), sol(1));
        bool feasible = true;
        for (const auto& e : edges) {
          if (e.outward_normal.dot(c) + r > e.offset + feas_tol) {
            feasible = false;
            break;
          }
        }
        if (feasible) {
          best_r = r;
          best_c = c;
        }
      }
    }
  }
  if (!(best_r > 0.0)) {
    throw std::runtime_error("inradius: LP failed (degenerate polygon)");
  }
  return {best_r, best_c};
}

namespace {

Ellipsoid ellipse_from_weights(const std::vector<Eigen::Vector2d>& points,
                               const Eigen::VectorXd& u) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (int i = 0; i < u.size(); ++i) c += u(i) * points[i];
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  for (int i = 0; i < u.size(); ++i) {
    second += u(i) * points[i] * points[i].transpose();
  }
  const Eigen::Matrix2d cov = second - c * c.transpose();
  Eigen::Matrix2d shape = cov.inverse() / 2.0;
  shape = 0.5 * (shape + shape.transpose().eval());
  return {c, shape};
}

}  // namespace

Ellipsoid mvee(const std::vector<Eigen::Vector2d>& points, double tolerance) {
  if (points.size() < 3) {
    throw std::invalid_argument("mvee: need at least 3 points");
  }
  if (!(tolerance >= 1e-10 && tolerance <= 1e-4)) {
    throw std::invalid_argument("mvee: tolerance must lie in [1e-10, 1e-4]");
  }
  const int m = static_cast<int>(points.size());
  const int d = 2;

  Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / m);
  Eigen::MatrixXd q(d + 1, m);
  for (int i = 0; i < m; ++i) {
    q(0, i) = points[i].x();
    q(1, i) = points[i].y();
    q(2, i) = 1.0;
  }

  double kappa_tol = tolerance / 4.0;
  const int max_rounds = 8;
  for (int round = 0; round < max_rounds; ++round) {
    for (long iter = 0; iter < 400000; ++iter) {
      Eigen::Matrix3d x = Eigen::Matrix3d::Zero();
      for (int i = 0; i < m; ++i) {
        x += u(i) * q.col(i) * q.col(i).transpose();
      }
      Eigen::FullPivLU<Eigen::Matrix3d> lu(x);
      if (!lu.isInvertible()) {
        throw std::invalid_argument(
            "mvee: points are affinely dependent (dimension deficiency)");
      }
      const Eigen::Matrix3d xinv = lu.inverse();

      int j_up = 0, j_down = -1;
      double kappa_up = -1.0, kappa_down = std::numeric_limits<double>::max();
      for (int i = 0; i < m; ++i) {
        const double kappa = q.col(i).dot(xinv * q.col(i));
        if (kappa > kappa_up) {
          kappa_up = kappa;
          j_up = i;
        }
        if (u(i) > 0.0 && kappa < kappa_down) {
          kappa_down = kappa;
          j_down = i;
        }
      }
      if (kappa_up <= (d + 1) * (1.0 + kappa_tol)) break;

      // Frank-Wolfe toward the worst point, or an away step from the
      // least-binding support point, whichever error dominates.
      if (kappa_up - (d + 1) >= (d + 1) - kappa_down || j_down < 0) {
        const double beta =
            (kappa_up - (d + 1)) / ((d + 1) * (kappa_up - 1.0));
        u *= (1.0 - beta);
        u(j_up) += beta;
      } else {
        double beta = (kappa_down - (d + 1)) / ((d + 1) * (kappa_down - 1.0));
        beta = std::max(beta, -u(j_down) / (1.0 - u(j_down)));
        u *= (1.0 - beta);
        u(j_down) += beta;
        u(j_down) = std::max(u(j_down), 0.0);
      }
    }

    Ellipsoid e = ellipse_from_weights(points, u);
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, e.mahalanobis(p));
    if (worst <= 1.0 + tolerance) return e;
    kappa_tol /= 4.0;
  }
  throw std::runtime_error("mvee: ascent did not reach requested tolerance");
}

SandwichResult orthotope_sandwich(const ConvexPolygon& poly) {
  const double n = 2.0;
  const double sqrt_n = std::numbers::sqrt2;

  // John's theorem for a general convex body: shrinking the MVEE by the
  // factor n about its center lands inside the body. The box of half-widths
  // b_i / (n sqrt(n)) is the one inscribed in that shrunk ellipse, and the
  // MVEE's own bounding box (half-widths b_i) encloses the body, so
  // a_i = b_i / n gives box(a/sqrt(n)) <= poly <= box(a*n) verbatim.
  const double tolerances[] = {1e-7, 1e-9, 1e-10};
  std::string failure;
  for (double tol : tolerances) {
    const Ellipsoid e = mvee(poly.vertices(), tol);
    Eigen::Vector2d semi_axes;
    Eigen::Matrix2d axes;
    e.principal_axes(semi_axes, axes);

    const double slack =
        std::max(10.0 * tol, 1e-9) * std::max(poly.scale(), semi_axes(1));

    std::vector<double> a = {semi_axes(0) / n, semi_axes(1) / n};
    const Orthotope box = Orthotope::from_half_widths(a);

    bool ok = true;
    // Inner certificate: the four corners of box(a/sqrt(n)) satisfy every
    // edge inequality.
    for (int sx = -1; sx <= 1 && ok; sx += 2) {
      for (int sy = -1; sy <= 1 && ok; sy += 2) {
        const Eigen::Vector2d corner_local(sx * a[0] / sqrt_n,
                                           sy * a[1] / sqrt_n);
        const Eigen::Vector2d corner = e.center + axes * corner_local;
        if (!poly.contains(corner, slack)) ok = false;
      }
    }
    // Outer certificate: every polygon vertex lies inside box(a*n) in the
    // rotated frame.
    for (const auto& v : poly.vertices()) {
      if (!ok) break;
      const Eigen::Vector2d local = axes.transpose() * (v - e.center);
      if (std::fabs(local.x()) > a[0] * n + slack ||
          std::fabs(local.y()) > a[1] * n + slack) {
        ok = false;
      }
    }
    if (ok) {
      return {axes, e.center, box, 1.0 / sqrt_n, n, slack};
    }
    failure = "containment certificate failed at MVEE tolerance " +
              std::to_string(tol);
  }
  throw std::runtime_error("orthotope_sandwich: " + failure);
}

namespace {

GridMask rasterize_with(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
                        double h,
                        const std::function<bool(const Eigen::Vector2d&)>&
                            interior) {
  GridMask mask;
  mask.h = h;
  const auto lo_index = [&](double x) {
    return static_cast<std::int64_t>(std::ceil(x / h - 1e-9));
  };
  const auto hi_index = [&](double x) {
    return static_cast<std::int64_t>(std::floor(x / h + 1e-9));
  };
  for (std::int64_t i = lo_index(lo.x()); i <= hi_index(hi.x()); ++i) {
    for (std::int64_t j = lo_index(lo.y()); j <= hi_index(hi.y()); ++j) {
      if (interior(Eigen::Vector2d(i * h, j * h))) {
        mask.nodes.emplace_back(i, j);
      }
    }
  }
  return mask;
}

}  // namespace

GridMask rasterize(const ConvexPolygon& poly, double h) {
  Eigen::Vector2d lo, hi;
  poly.bounding_box(lo, hi);
  const double min_extent = std::min(hi.x() - lo.x(), hi.y() - lo.y());
  if (!(h > 0.0) || h > min_extent / 8.0) {
    throw std::invalid_argument(
        "rasterize: mesh width must satisfy h <= min bounding-box extent / 8");
  }
  const double slack = 1e-12 * std::max(1.0, poly.scale());
  GridMask mask = rasterize_with(lo, hi, h, [&](const Eigen::Vector2d& p) {
    return poly.edge_slack(p) > slack;
  });
  if (mask.nodes.empty()) {
    throw std::runtime_error("rasterize: mesh too coarse (empty mask)");
  }
  return mask;
}

GridMask rasterize_simple(const std::vector<Eigen::Vector2d>& vertices,
                          double h) {
  Eigen::Vector2d lo = vertices.front(), hi = vertices.front();
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const std::size_t m = vertices.size();
  // Crossing-number interior test; points within ~1e-12 of an edge are
  // treated as boundary and dropped.
  auto interior = [&](const Eigen::Vector2d& p) {
    int crossings = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Vector2d& a = vertices[i];
      const Eigen::Vector2d& b = vertices[(i + 1) % m];
      const Eigen::Vector2d e = b - a;
      const double cross = e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x());
      const double seg_len = e.norm();
      const double t = e.dot(p - a) / (seg_len * seg_len);
      if (t >= -1e-12 && t <= 1.0 + 1e-12 &&
          std::fabs(cross) <= 1e-12 * seg_len * std::max(1.0, p.norm())) {
        return false;  // on the boundary
      }
      if ((a.y() <= p.y()) != (b.y() <= p.y())) {
        const double x_int = a.x() + (p.y() - a.y()) / e.y() * e.x();
        if (x_int > p.x()) ++crossings;
      }
    }
    return (crossings & 1) == 1;
  };
  GridMask mask = rasterize_with(lo, hi, h, interior);
  if (mask.nodes.empty()) {
    throw std::runtime_error("rasterize_simple: mesh too coarse (empty mask)");
  }
  return mask;
}

ConvexPolygon polygon_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("polygon JSON parse error: ") +
                                err.what());
  }
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
    throw std::invalid_argument(
        "polygon JSON must contain a \"vertices\" array");
  }
  std::vector<Eigen::Vector2d> vs;
  for (const auto& item : doc["vertices"]) {
    if (!item.is_array() || item.size() != 2) {
      throw std::invalid_argument(
          "polygon JSON vertices must be [x, y] pairs");
    }
    vs.emplace_back(item[0].get<double>(), item[1].get<double>());
  }
  return ConvexPolygon(std::move(vs));
}

ConvexPolygon polygon_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open polygon file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return polygon_from_json(ss.str());
}

ConvexPolygon regular_polygon(int m, double circumradius) {
  if (m < 3) throw std::invalid_argument("regular_polygon: need m >= 3");
  std::vector<Eigen::Vector2d> vs;
  vs.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / m;
    vs.emplace_back(circumradius * std::cos(theta),
                    circumradius * std::sin(theta));
  }
  return ConvexPolygon(std::move(vs));
}

}  // namespace eigenbox
