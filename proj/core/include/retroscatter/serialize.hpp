#pragma once

#include <string>

#include "retroscatter/billiard.hpp"
#include "retroscatter/cavity.hpp"
#include "retroscatter/geom.hpp"
#include "retroscatter/measure.hpp"

namespace retroscatter
{

//! JSON text for the value types. Readers throw ParseError on malformed
//! input and the type's own errors on invalid content.

//! Integer array [sigma(1), ..., sigma(m)].
std::string to_json(Involution const& sigma);
Involution involution_from_json(std::string const& text);

//! {"m_bins", "masses" (rows), "provenance", "std_errors"?}.
std::string to_json(MeasureGrid const& g);
MeasureGrid grid_from_json(std::string const& text);

//! {"kind": "segment" | "circle" | "parabola", ...}.
std::string to_json(BoundaryArc const& arc);
BoundaryArc arc_from_json(std::string const& text);

//! {"entry_index", "arcs", "construction"}.
std::string to_json(Cavity const& cavity);
Cavity cavity_from_json(std::string const& text);

std::string to_json(Reflector const& r);

//! {"vertices": [[x, y], ...]} or a bare vertex array.
std::string to_json(ConvexPolygon const& k);
ConvexPolygon polygon_from_json(std::string const& text);

std::string to_json(EnsembleSummary const& s);

//! Summary of a body: epsilon, kappa0, strip depth, channel form and the
//! carving counts per side and rank (not the carvings themselves).
std::string to_json(PolygonBody const& body);

std::string read_text_file(std::string const& path);
void write_text_file(std::string const& path, std::string const& text);

}  // namespace retroscatter
