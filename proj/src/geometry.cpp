#include "archetype/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace arch {

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double point_dist(Vec2 a, Vec2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double segment_dist(Vec2 p, Vec2 a, Vec2 b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len_sq = vx * vx + vy * vy;
    if (len_sq == 0.0) return point_dist(p, a);
    double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len_sq;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

double dist_sq_nd(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void validate_pointset(const PointSet& s, const char* what) {
    if (s.empty()) throw std::invalid_argument(std::string(what) + ": empty point set");
    const std::size_t d = s.front().size();
    for (const auto& p : s) {
        if (p.size() != d) {
            throw std::invalid_argument(std::string(what) + ": ragged point dimensions");
        }
        for (double x : p) {
            if (!std::isfinite(x)) {
                throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
            }
        }
    }
}

// Perfect matching restricted to edges with weight ≤ limit (Kuhn's algorithm).
bool matching_exists(const std::vector<std::vector<double>>& w, double limit) {
    const std::size_t k = w.size();
    std::vector<int> match_b(k, -1);
    std::vector<char> seen;
    std::function<bool(std::size_t)> try_row = [&](std::size_t i) -> bool {
        for (std::size_t j = 0; j < k; ++j) {
            if (w[i][j] <= limit && !seen[j]) {
                seen[j] = 1;
                if (match_b[j] < 0 || try_row(std::size_t(match_b[j]))) {
                    match_b[j] = int(i);
                    return true;
                }
            }
        }
        return false;
    };
    for (std::size_t i = 0; i < k; ++i) {
        seen.assign(k, 0);
        if (!try_row(i)) return false;
    }
    return true;
}

}  // namespace

std::vector<std::size_t> convex_hull_indices(const std::vector<Vec2>& pts) {
    if (pts.empty()) throw std::invalid_argument("convex_hull: empty point set");
    for (const Vec2& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw std::invalid_argument("convex_hull: non-finite coordinate");
        }
    }
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
        return a < b;
    });
    // Drop exact duplicates so they cannot masquerade as hull vertices.
    idx.erase(std::unique(idx.begin(), idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              return pts[a].x == pts[b].x && pts[a].y == pts[b].y;
                          }),
              idx.end());

    const std::size_t n = idx.size();
    if (n <= 2) return idx;

    std::vector<std::size_t> hull(2 * n);
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (h >= 2 && cross(pts[hull[h - 2]], pts[hull[h - 1]], pts[idx[i]]) <= 0.0) --h;
        hull[h++] = idx[i];
    }
    for (std::size_t i = n - 1, lower = h + 1; i-- > 0;) {  // upper chain
        while (h >= lower && cross(pts[hull[h - 2]], pts[hull[h - 1]], pts[idx[i]]) <= 0.0) --h;
        hull[h++] = idx[i];
    }
    hull.resize(h - 1);
    return hull;
}

Polygon2D convex_hull_2d(const std::vector<Vec2>& pts) {
    Polygon2D poly;
    for (std::size_t i : convex_hull_indices(pts)) poly.vertices.push_back(pts[i]);
    return poly;
}

Polygon2D convex_hull_2d(const PointSet& pts) {
    validate_pointset(pts, "convex_hull_2d");
    if (pts.front().size() != 2) {
        throw std::invalid_argument("convex_hull_2d: points must be planar");
    }
    std::vector<Vec2> v(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) v[i] = {pts[i][0], pts[i][1]};
    return convex_hull_2d(v);
}

double d2_infty(const PointSet& a, const PointSet& b) {
    validate_pointset(a, "d2_infty");
    validate_pointset(b, "d2_infty");
    if (a.size() != b.size()) {
        throw std::invalid_argument("d2_infty: point sets have different cardinality");
    }
    if (a.front().size() != b.front().size()) {
        throw std::invalid_argument("d2_infty: point sets have different dimension");
    }
    const std::size_t k = a.size();
    std::vector<std::vector<double>> w(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) w[i][j] = std::sqrt(dist_sq_nd(a[i], b[j]));

    if (k <= 8) {
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        double best = std::numeric_limits<double>::infinity();
        do {
            double worst = 0.0;
            for (std::size_t j = 0; j < k && worst < best; ++j) {
                worst = std::max(worst, w[perm[j]][j]);
            }
            best = std::min(best, worst);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    if (k > 64) {
        throw std::invalid_argument("d2_infty: cardinality above the supported cap of 64");
    }
    // Bottleneck assignment: smallest pairwise distance that still admits a
    // perfect matching when larger edges are forbidden.
    std::vector<double> values;
    values.reserve(k * k);
    for (const auto& row : w) values.insert(values.end(), row.begin(), row.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::size_t lo = 0, hi = values.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (matching_exists(w, values[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return values[lo];
}

double hausdorff(const PointSet& a, const PointSet& b) {
    validate_pointset(a, "hausdorff");
    validate_pointset(b, "hausdorff");
    if (a.front().size() != b.front().size()) {
        throw std::invalid_argument("hausdorff: point sets have different dimension");
    }
    const auto directed = [](const PointSet& s, const PointSet& t) {
        double worst = 0.0;
        for (const auto& p : s) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : t) best = std::min(best, dist_sq_nd(p, q));
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

bool contains(const Polygon2D& poly, Vec2 x) {
    const auto& v = poly.vertices;
    if (v.empty()) throw std::invalid_argument("contains: empty polygon");
    const double tol = 1e-10;
    if (v.size() == 1) return point_dist(x, v[0]) <= tol;
    if (v.size() == 2) return segment_dist(x, v[0], v[1]) <= tol;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i], b = v[(i + 1) % v.size()];
        const double len = point_dist(a, b);
        // Signed distance to the edge line; negative means outside for CCW order.
        if (cross(a, b, x) < -tol * std::max(len, 1.0)) return false;
    }
    return true;
}

double dist_to_hull(Vec2 x, const Polygon2D& poly) {
    const auto& v = poly.vertices;
    if (v.empty()) throw std::invalid_argument("dist_to_hull: empty polygon");
    if (v.size() >= 3 && contains(poly, x)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    if (v.size() == 1) return point_dist(x, v[0]);
    for (std::size_t i = 0; i < v.size(); ++i) {
        best = std::min(best, segment_dist(x, v[i], v[(i + 1) % v.size()]));
    }
    return best;
}

std::vector<double> interior_angles(const Polygon2D& poly) {
    const auto& v = poly.vertices;
    if (v.size() < 3) {
        throw std::invalid_argument("interior_angles: polygon needs at least 3 vertices");
    }
    std::vector<double> angles(v.size());
    const std::size_t m = v.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 prev = v[(i + m - 1) % m], cur = v[i], next = v[(i + 1) % m];
        const double ax = prev.x - cur.x, ay = prev.y - cur.y;
        const double bx = next.x - cur.x, by = next.y - cur.y;
        // atan2 of the wedge keeps the angle stable near degenerate vertices.
        const double ang = std::atan2(std::abs(ax * by - ay * bx), ax * bx + ay * by);
        angles[i] = ang * 180.0 / 3.14159265358979323846;
    }
    return angles;
}

double polygon_area(const Polygon2D& poly) {
    const auto& v = poly.vertices;
    if (v.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i], b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

PointSet columns_as_points(const Matrix& m) {
    PointSet s(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) s[j] = m.col(j);
    return s;
}

std::vector<Vec2> columns_as_vec2(const Matrix& m) {
    if (m.rows() != 2) throw std::invalid_argument("columns_as_vec2: matrix is not 2×N");
    std::vector<Vec2> v(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) v[j] = {m(0, j), m(1, j)};
    return v;
}

}  // namespace arch
