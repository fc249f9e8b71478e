#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bamg::detail {
namespace {

using ld = long double;

struct Pt {
  ld x, y;
};

ld orient(const Pt& p, const Pt& q, const Pt& r) {
  return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
}

// > 0 iff d lies strictly inside the circumcircle of CCW triangle (a, b, c).
ld incircle(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
  const ld adx = a.x - d.x, ady = a.y - d.y;
  const ld bdx = b.x - d.x, bdy = b.y - d.y;
  const ld cdx = c.x - d.x, cdy = c.y - d.y;
  const ld ad = adx * adx + ady * ady;
  const ld bd = bdx * bdx + bdy * bdy;
  const ld cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

struct Tri {
  int a, b, c;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(
    const std::vector<std::array<double, 2>>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw DelaunayDegenerate("need at least 3 points");

  std::vector<Pt> p(n + 3);
  ld minx = pts[0][0], maxx = pts[0][0], miny = pts[0][1], maxy = pts[0][1];
  for (int i = 0; i < n; ++i) {
    p[i] = {static_cast<ld>(pts[i][0]), static_cast<ld>(pts[i][1])};
    minx = std::min(minx, p[i].x);
    maxx = std::max(maxx, p[i].x);
    miny = std::min(miny, p[i].y);
    maxy = std::max(maxy, p[i].y);
  }
  const ld cx = (minx + maxx) / 2, cy = (miny + maxy) / 2;
  const ld big = 50 * std::max<ld>({maxx - minx, maxy - miny, ld(1)});
  p[n] = {cx - big, cy - big * ld(0.7)};
  p[n + 1] = {cx + big, cy - big * ld(0.7)};
  p[n + 2] = {cx, cy + big};

  std::vector<Tri> tris;
  tris.push_back({n, n + 1, n + 2});
  if (orient(p[n], p[n + 1], p[n + 2]) <= 0) std::swap(tris[0].b, tris[0].c);

  std::vector<char> bad;
  std::vector<std::array<int, 2>> cavity;  // directed boundary edges
  for (int k = 0; k < n; ++k) {
    bad.assign(tris.size(), 0);
    bool any = false;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (incircle(p[tris[t].a], p[tris[t].b], p[tris[t].c], p[k]) > 0) {
        bad[t] = 1;
        any = true;
      }
    }
    if (!any)
      throw DelaunayDegenerate("point " + std::to_string(k) +
                               " on a circumcircle boundary or duplicated");
    // Directed edges of the bad set: an edge shared by two bad triangles
    // appears once per direction; cavity boundary edges appear once total.
    std::vector<std::array<int, 3>> edges;  // (u, v, dummy) directed
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!bad[t]) continue;
      const Tri& tr = tris[t];
      edges.push_back({tr.a, tr.b, 0});
      edges.push_back({tr.b, tr.c, 0});
      edges.push_back({tr.c, tr.a, 0});
    }
    cavity.clear();
    for (const auto& e : edges) {
      int cnt = 0;
      for (const auto& f : edges)
        if ((f[0] == e[0] && f[1] == e[1]) || (f[0] == e[1] && f[1] == e[0])) ++cnt;
      if (cnt == 1) cavity.push_back({e[0], e[1]});
      if (cnt > 2) throw DelaunayDegenerate("inconsistent cavity (cocircular tie)");
    }
    std::vector<Tri> kept;
    kept.reserve(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t)
      if (!bad[t]) kept.push_back(tris[t]);
    for (const auto& e : cavity) {
      if (orient(p[e[0]], p[e[1]], p[k]) <= 0)
        throw DelaunayDegenerate("new point collinear with cavity edge");
      kept.push_back({e[0], e[1], k});
    }
    tris.swap(kept);
  }

  std::vector<std::array<int, 3>> out;
  std::vector<char> used(n, 0);
  for (const Tri& t : tris) {
    if (t.a >= n || t.b >= n || t.c >= n) continue;
    out.push_back({t.a, t.b, t.c});
    used[t.a] = used[t.b] = used[t.c] = 1;
  }
  if (out.empty()) throw DelaunayDegenerate("no triangles left (collinear input)");
  for (int i = 0; i < n; ++i)
    if (!used[i])
      throw DelaunayDegenerate("point " + std::to_string(i) + " not in any triangle");
  return out;
}

std::vector<std::pair<int, int>> delaunay_edges(const std::vector<std::array<double, 2>>& pts) {
  auto tris = delaunay_triangulate(pts);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(tris.size() * 3);
  for (const auto& t : tris) {
    edges.emplace_back(std::min(t[0], t[1]), std::max(t[0], t[1]));
    edges.emplace_back(std::min(t[1], t[2]), std::max(t[1], t[2]));
    edges.emplace_back(std::min(t[2], t[0]), std::max(t[2], t[0]));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace bamg::detail
