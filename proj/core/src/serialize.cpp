#include "retroscatter/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "retroscatter/error.hpp"

namespace retroscatter
{
namespace
{
using nlohmann::json;

json parse(std::string const& text)
{
    try
    {
        return json::parse(text);
    }
    catch (json::exception const& e)
    {
        fail(ErrorCode::parse_error, e.what());
    }
}

// Run a reader, mapping JSON type and key errors to ParseError.
template<class F>
auto reading(F&& f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch (json::exception const& e)
    {
        fail(ErrorCode::parse_error, e.what());
    }
}

json vec(Vec2 p)
{
    return json::array({p.x, p.y});
}

Vec2 vec_from(json const& j)
{
    if (!j.is_array() || j.size() != 2)
    {
        fail(ErrorCode::parse_error, "point must be a two-element array");
    }
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json arc_json(BoundaryArc const& arc)
{
    switch (arc.kind())
    {
        case BoundaryArc::Kind::segment: {
            auto const& s = arc.segment();
            return {{"kind", "segment"}, {"a", vec(s.a)}, {"b", vec(s.b)}};
        }
        case BoundaryArc::Kind::circle: {
            auto const& c = arc.circle();
            return {{"kind", "circle"},
                    {"center", vec(c.center)},
                    {"radius", c.radius},
                    {"angle_begin", c.angle_begin},
                    {"angle_end", c.angle_end}};
        }
        case BoundaryArc::Kind::parabola: {
            auto const& p = arc.parabola();
            return {{"kind", "parabola"},
                    {"focus", vec(p.focus)},
                    {"axis", vec(p.axis)},
                    {"semi_latus", p.semi_latus},
                    {"w_begin", p.w_begin},
                    {"w_end", p.w_end}};
        }
    }
    return {};
}

BoundaryArc arc_from(json const& j)
{
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "segment")
    {
        return Segment{vec_from(j.at("a")), vec_from(j.at("b"))};
    }
    if (kind == "circle")
    {
        return CircleArc{vec_from(j.at("center")), j.at("radius").get<double>(),
                         j.at("angle_begin").get<double>(), j.at("angle_end").get<double>()};
    }
    if (kind == "parabola")
    {
        return ParabolaArc{vec_from(j.at("focus")), vec_from(j.at("axis")),
                           j.at("semi_latus").get<double>(), j.at("w_begin").get<double>(),
                           j.at("w_end").get<double>()};
    }
    fail(ErrorCode::parse_error, "unknown arc kind '" + kind + "'");
}

CavityConstruction::Kind construction_kind(std::string const& s)
{
    using K = CavityConstruction::Kind;
    for (K k : {K::custom, K::half_disc, K::reflector, K::reflector_cavity, K::channel})
    {
        if (s == to_string(k))
        {
            return k;
        }
    }
    fail(ErrorCode::parse_error, "unknown construction kind '" + s + "'");
}

Provenance::Kind provenance_kind(std::string const& s)
{
    using K = Provenance::Kind;
    for (K k : {K::analytic, K::empirical, K::transport_solution, K::mixture})
    {
        if (s == to_string(k))
        {
            return k;
        }
    }
    fail(ErrorCode::parse_error, "unknown provenance kind '" + s + "'");
}

}  // namespace

std::string to_json(Involution const& sigma)
{
    return json(sigma.one_based()).dump();
}

Involution involution_from_json(std::string const& text)
{
    json j = parse(text);
    return reading([&] {
        if (j.is_object())
        {
            return Involution(j.at("sigma").get<std::vector<int>>());
        }
        return Involution(j.get<std::vector<int>>());
    });
}

std::string to_json(MeasureGrid const& g)
{
    json rows = json::array();
    for (int i = 0; i < g.m_bins; ++i)
    {
        rows.push_back(std::vector<double>(g.masses.begin() + std::size_t(i) * g.m_bins,
                                           g.masses.begin() + std::size_t(i + 1) * g.m_bins));
    }
    json parts = json::array();
    for (auto const& [w, table] : g.provenance.graph_parts)
    {
        parts.push_back({{"weight", w}, {"graph", table}});
    }
    json j{{"m_bins", g.m_bins},
           {"masses", rows},
           {"provenance",
            {{"kind", to_string(g.provenance.kind)},
             {"samples", g.provenance.samples},
             {"seed", g.provenance.seed},
             {"note", g.provenance.note},
             {"graph", g.provenance.graph},
             {"graph_parts", parts}}}};
    if (!g.std_errors.empty())
    {
        j["std_errors"] = g.std_errors;
    }
    return j.dump();
}

MeasureGrid grid_from_json(std::string const& text)
{
    json j = parse(text);
    return reading([&] {
        int m = j.at("m_bins").get<int>();
        if (m < 1)
        {
            fail(ErrorCode::parse_error, "m_bins must be positive");
        }
        MeasureGrid g(m);
        auto const& rows = j.at("masses");
        if (!rows.is_array() || static_cast<int>(rows.size()) != m)
        {
            fail(ErrorCode::grid_mismatch, "masses must have m_bins rows");
        }
        for (int i = 0; i < m; ++i)
        {
            auto row = rows.at(i).get<std::vector<double>>();
            if (static_cast<int>(row.size()) != m)
            {
                fail(ErrorCode::grid_mismatch, "masses must have m_bins columns");
            }
            std::copy(row.begin(), row.end(), g.masses.begin() + std::size_t(i) * m);
        }
        if (j.contains("provenance"))
        {
            auto const& p = j.at("provenance");
            g.provenance.kind = provenance_kind(p.value("kind", std::string("analytic")));
            g.provenance.samples = p.value("samples", std::uint64_t(0));
            g.provenance.seed = p.value("seed", std::uint64_t(0));
            g.provenance.note = p.value("note", std::string());
            g.provenance.graph = p.value("graph", std::vector<int>());
            for (auto const& part : p.value("graph_parts", json::array()))
            {
                g.provenance.graph_parts.emplace_back(part.at("weight").get<double>(),
                                                      part.at("graph").get<std::vector<int>>());
            }
        }
        if (j.contains("std_errors"))
        {
            g.std_errors = j.at("std_errors").get<std::vector<double>>();
            if (g.std_errors.size() != g.masses.size())
            {
                fail(ErrorCode::grid_mismatch, "std_errors must have m_bins^2 entries");
            }
        }
        return g;
    });
}

std::string to_json(BoundaryArc const& arc)
{
    return arc_json(arc).dump();
}

BoundaryArc arc_from_json(std::string const& text)
{
    json j = parse(text);
    return reading([&] { return arc_from(j); });
}

std::string to_json(Cavity const& cavity)
{
    json arcs = json::array();
    for (auto const& a : cavity.boundary())
    {
        arcs.push_back(arc_json(a));
    }
    auto const& c = cavity.construction();
    json construction{{"kind", to_string(c.kind)},
                      {"base_kind", to_string(c.base_kind)},
                      {"sigma", c.sigma},
                      {"r", c.r},
                      {"delta", c.delta},
                      {"channel_n", c.channel_n},
                      {"channel_depth", c.channel_depth}};
    return json{{"entry_index", cavity.entry_index()},
                {"arcs", arcs},
                {"construction", construction}}
        .dump();
}

Cavity cavity_from_json(std::string const& text)
{
    json j = parse(text);
    return reading([&] {
        std::vector<BoundaryArc> arcs;
        for (auto const& a : j.at("arcs"))
        {
            arcs.push_back(arc_from(a));
        }
        CavityConstruction c;
        if (j.contains("construction"))
        {
            auto const& cj = j.at("construction");
            c.kind = construction_kind(cj.value("kind", std::string("custom")));
            c.base_kind = construction_kind(cj.value("base_kind", std::string("custom")));
            c.sigma = cj.value("sigma", std::vector<int>());
            c.r = cj.value("r", 0.0);
            c.delta = cj.value("delta", 0.0);
            c.channel_n = cj.value("channel_n", 0);
            c.channel_depth = cj.value("channel_depth", 0.0);
        }
        return Cavity(std::move(arcs), j.at("entry_index").get<std::size_t>(), c);
    });
}

std::string to_json(Reflector const& r)
{
    json arcs = json::array();
    for (auto const& a : r.boundary)
    {
        arcs.push_back(arc_json(a));
    }
    return json{{"phi1", r.phi1},
                {"phi2", r.phi2},
                {"delta", r.delta},
                {"scale", r.scale},
                {"placement",
                 {{"rotation", r.placement.rotation()},
                  {"translation", vec(r.placement.translation())},
                  {"mirror", r.placement.mirror()}}},
                {"center", vec(r.center)},
                {"focal_points", {vec(r.focal_points[0]), vec(r.focal_points[1])}},
                {"axis", vec(r.axis)},
                {"base_index", r.base_index},
                {"boundary", arcs}}
        .dump();
}

std::string to_json(ConvexPolygon const& k)
{
    json v = json::array();
    for (Vec2 p : k.vertices)
    {
        v.push_back(vec(p));
    }
    return json{{"vertices", v}}.dump();
}

ConvexPolygon polygon_from_json(std::string const& text)
{
    json j = parse(text);
    return reading([&] {
        json const& v = j.is_object() ? j.at("vertices") : j;
        ConvexPolygon k;
        for (auto const& p : v)
        {
            k.vertices.push_back(vec_from(p));
        }
        k.validate();
        return k;
    });
}

std::string to_json(EnsembleSummary const& s)
{
    return json{{"total", s.total},
                {"ok", s.ok},
                {"max_bounces", s.max_bounces},
                {"singular", s.singular},
                {"excluded_fraction", s.excluded_fraction()},
                {"mean_bounces", s.mean_bounces}}
        .dump();
}

std::string to_json(PolygonBody const& body)
{
    json per_side = json::array();
    std::vector<std::size_t> per_rank(static_cast<std::size_t>(std::max(body.ranks, 0)) + 1, 0);
    for (auto const& side : body.sides)
    {
        per_side.push_back(side.size());
        for (auto const& c : side)
        {
            if (c.rank >= 0 && static_cast<std::size_t>(c.rank) < per_rank.size())
            {
                ++per_rank[c.rank];
            }
        }
    }
    json k0 = json::array();
    for (Vec2 p : body.k0.vertices)
    {
        k0.push_back(vec(p));
    }
    return json{{"k0", k0},
                {"perimeter", body.k0.perimeter()},
                {"epsilon", body.epsilon},
                {"kappa0", body.kappa0},
                {"kappa_sum", body.kappa_sum()},
                {"carved_length", body.carved_length},
                {"strip_depth", body.strip_depth},
                {"ranks", body.ranks},
                {"channel_form", {{"a", body.form.a}, {"b", body.form.b}, {"c", body.form.c}}},
                {"carvings", body.carving_count()},
                {"carvings_per_side", per_side},
                {"carvings_per_rank", per_rank}}
        .dump();
}

std::string read_text_file(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        fail(ErrorCode::invalid_argument, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(std::string const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        fail(ErrorCode::invalid_argument, "cannot write '" + path + "'");
    }
    out << text;
    if (!out)
    {
        fail(ErrorCode::invalid_argument, "failed writing '" + path + "'");
    }
}

}  // namespace retroscatter
