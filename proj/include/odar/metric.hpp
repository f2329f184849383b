#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rational.hpp"

namespace odar {

struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// A position on the real line.
struct LineCoord {
    Rational x;
    bool operator==(const LineCoord& o) const { return x == o.x; }
};

// A vertex of a finite metric.
struct Vertex {
    int id = 0;
    bool operator==(const Vertex& o) const { return id == o.id; }
};

// A position partway along a traversal between two vertices of a finite
// metric. Stored canonically with u < v and 0 < offset < d(u,v), offset
// measured from u.
struct EdgeInterior {
    int u = 0, v = 0;
    Rational offset;
    bool operator==(const EdgeInterior& o) const {
        return u == o.u && v == o.v && offset == o.offset;
    }
};

using Point = std::variant<LineCoord, Vertex, EdgeInterior>;

inline Point line_point(const Rational& x) { return LineCoord{x}; }
inline Point vertex(int id) { return Vertex{id}; }

inline bool is_line_point(const Point& p) { return std::holds_alternative<LineCoord>(p); }

inline std::string point_to_string(const Point& p) {
    if (auto* lc = std::get_if<LineCoord>(&p)) return to_string(lc->x);
    if (auto* v = std::get_if<Vertex>(&p)) return "v" + std::to_string(v->id);
    const auto& e = std::get<EdgeInterior>(p);
    return "e" + std::to_string(e.u) + "-" + std::to_string(e.v) + "@" + to_string(e.offset);
}

// The metric space (M, d) with origin O: either the real line with
// d(a,b) = |a-b| and O = 0, or a finite metric given by a distance matrix
// with O = vertex 0. Mid-edge positions in the finite case use geodesic
// interpolation, which reduces to the matrix on vertices.
class MetricSpace {
  public:
    enum class Kind { RealLine, FiniteMetric };

    static MetricSpace real_line() { return MetricSpace(Kind::RealLine, {}); }

    // Validates the metric axioms up front; a bad matrix is a data error.
    static MetricSpace finite(std::vector<std::vector<Rational>> dist) {
        const size_t n = dist.size();
        if (n == 0) throw StructuralError("finite metric needs at least one vertex");
        for (size_t i = 0; i < n; ++i) {
            if (dist[i].size() != n) throw StructuralError("distance matrix is not square");
            if (dist[i][i] != 0) throw StructuralError("distance matrix has nonzero diagonal");
            for (size_t j = 0; j < n; ++j) {
                if (i != j && dist[i][j] <= 0)
                    throw StructuralError("off-diagonal distances must be positive");
                if (dist[i][j] != dist[j][i]) throw StructuralError("distance matrix not symmetric");
            }
        }
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                for (size_t k = 0; k < n; ++k)
                    if (dist[i][j] > dist[i][k] + dist[k][j])
                        throw StructuralError("triangle inequality violated at (" +
                                              std::to_string(i) + "," + std::to_string(j) + "," +
                                              std::to_string(k) + ")");
        return MetricSpace(Kind::FiniteMetric, std::move(dist));
    }

    Kind kind() const { return kind_; }
    bool is_line() const { return kind_ == Kind::RealLine; }
    int vertex_count() const { return (int)dist_.size(); }

    Point origin() const {
        return is_line() ? Point(LineCoord{Rational(0)}) : Point(Vertex{0});
    }

    const Rational& vdist(int u, int v) const { return dist_[u][v]; }

    bool valid_point(const Point& p) const {
        if (is_line()) return is_line_point(p);
        if (auto* v = std::get_if<Vertex>(&p)) return v->id >= 0 && v->id < vertex_count();
        if (auto* e = std::get_if<EdgeInterior>(&p)) {
            if (e->u < 0 || e->v < 0 || e->u >= vertex_count() || e->v >= vertex_count() ||
                e->u >= e->v)
                return false;
            return e->offset > 0 && e->offset < vdist(e->u, e->v);
        }
        return false;
    }

    Rational distance(const Point& p, const Point& q) const {
        check_point(p);
        check_point(q);
        if (is_line())
            return rat_abs(std::get<LineCoord>(p).x - std::get<LineCoord>(q).x);
        return finite_distance(p, q);
    }

    // Position after moving at unit speed for `elapsed` along the shortest
    // route from `from` toward `toward`. Ties between shortest routes go
    // through the lower-indexed intermediate vertex. In a finite metric
    // `toward` must be a vertex.
    Point advance(const Point& from, const Point& toward, const Rational& elapsed) const {
        Rational total = distance(from, toward);
        if (elapsed < 0 || elapsed > total)
            throw ContractError("advance: elapsed out of [0, distance] range");
        if (elapsed == 0) return from;
        if (elapsed == total) return toward;
        if (is_line()) {
            const Rational& a = std::get<LineCoord>(from).x;
            const Rational& b = std::get<LineCoord>(toward).x;
            return LineCoord{b > a ? Rational(a + elapsed) : Rational(a - elapsed)};
        }
        if (!std::holds_alternative<Vertex>(toward))
            throw ContractError("advance: target must be a vertex in a finite metric");
        int w = std::get<Vertex>(toward).id;
        if (auto* s = std::get_if<Vertex>(&from))
            return edge_pos(s->id, w, elapsed);
        const auto& e = std::get<EdgeInterior>(from);
        // leave the current edge through u or through v, whichever gives the
        // shorter route (lower vertex id on ties)
        Rational via_u = e.offset + vdist(e.u, w);
        Rational via_v = (vdist(e.u, e.v) - e.offset) + vdist(e.v, w);
        bool through_u = via_u < via_v || (via_u == via_v && e.u < e.v);
        if (through_u) {
            if (elapsed < e.offset)
                return make_edge(e.u, e.v, e.offset - elapsed);
            return edge_pos(e.u, w, elapsed - e.offset);
        }
        Rational rest = vdist(e.u, e.v) - e.offset;
        if (elapsed < rest)
            return make_edge(e.u, e.v, e.offset + elapsed);
        return edge_pos(e.v, w, elapsed - rest);
    }

    bool operator==(const MetricSpace& o) const { return kind_ == o.kind_ && dist_ == o.dist_; }

    nlohmann::ordered_json to_json() const;
    static MetricSpace from_json(const nlohmann::json& j);

  private:
    MetricSpace(Kind k, std::vector<std::vector<Rational>> d) : kind_(k), dist_(std::move(d)) {}

    void check_point(const Point& p) const {
        if (!valid_point(p))
            throw StructuralError("point " + point_to_string(p) + " invalid in this space");
    }

    // position `off` along the direct edge from a to w (off may hit either end)
    Point edge_pos(int a, int w, const Rational& off) const {
        if (off == 0) return Vertex{a};
        if (off == vdist(a, w)) return Vertex{w};
        return make_edge(a, w, off);
    }

    // canonical storage has u < v; flip the offset when needed
    Point make_edge(int u, int v, Rational offset_from_u) const {
        if (u < v) return EdgeInterior{u, v, std::move(offset_from_u)};
        return EdgeInterior{v, u, vdist(u, v) - offset_from_u};
    }

    Rational finite_distance(const Point& p, const Point& q) const {
        if (p == q) return Rational(0);
        auto* pv = std::get_if<Vertex>(&p);
        auto* qv = std::get_if<Vertex>(&q);
        if (pv && qv) return vdist(pv->id, qv->id);
        if (pv) return interior_to_vertex(std::get<EdgeInterior>(q), pv->id);
        if (qv) return interior_to_vertex(std::get<EdgeInterior>(p), qv->id);
        const auto& a = std::get<EdgeInterior>(p);
        const auto& b = std::get<EdgeInterior>(q);
        // minimum over the four endpoint routings; same-edge pairs may also
        // go directly along the edge
        Rational best = exit_cost(a, a.u) + vdist(a.u, b.u) + exit_cost(b, b.u);
        best = rat_min(best, exit_cost(a, a.u) + vdist(a.u, b.v) + exit_cost(b, b.v));
        best = rat_min(best, exit_cost(a, a.v) + vdist(a.v, b.u) + exit_cost(b, b.u));
        best = rat_min(best, exit_cost(a, a.v) + vdist(a.v, b.v) + exit_cost(b, b.v));
        if (a.u == b.u && a.v == b.v) best = rat_min(best, rat_abs(a.offset - b.offset));
        return best;
    }

    Rational interior_to_vertex(const EdgeInterior& e, int w) const {
        return rat_min(e.offset + vdist(e.u, w), (vdist(e.u, e.v) - e.offset) + vdist(e.v, w));
    }

    Rational exit_cost(const EdgeInterior& e, int end) const {
        return end == e.u ? e.offset : vdist(e.u, e.v) - e.offset;
    }

    Kind kind_;
    std::vector<std::vector<Rational>> dist_;
};

// --- JSON: {"space":"line"} or {"space":"finite","dist":[[...]]}, rationals
// --- encoded as "p/q" strings or plain integers.

inline nlohmann::ordered_json rational_to_json(const Rational& r) {
    if (denominator(r) == 1 && numerator(r) >= INT64_MIN && numerator(r) <= INT64_MAX)
        return (std::int64_t)numerator(r);
    return to_string(r);
}

inline Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return parse_rational_or_throw(j.get<std::string>());
    throw StructuralError("expected rational as integer or \"p/q\" string");
}

inline nlohmann::ordered_json MetricSpace::to_json() const {
    nlohmann::ordered_json j;
    if (is_line()) {
        j["space"] = "line";
        return j;
    }
    j["space"] = "finite";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : dist_) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& d : row) r.push_back(rational_to_json(d));
        rows.push_back(std::move(r));
    }
    j["dist"] = std::move(rows);
    return j;
}

inline MetricSpace MetricSpace::from_json(const nlohmann::json& j) {
    std::string kind = j.at("space").get<std::string>();
    if (kind == "line") return real_line();
    if (kind != "finite") throw StructuralError("unknown space kind '" + kind + "'");
    std::vector<std::vector<Rational>> dist;
    for (const auto& row : j.at("dist")) {
        std::vector<Rational> r;
        for (const auto& cell : row) r.push_back(rational_from_json(cell));
        dist.push_back(std::move(r));
    }
    return finite(std::move(dist));
}

}  // namespace odar
