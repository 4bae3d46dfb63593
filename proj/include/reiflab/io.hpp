#pragma once

// JSON serialization of domains and reports, CSV tables and SVG rendering.

#include "reiflab/components.hpp"
#include "reiflab/jones.hpp"
#include "reiflab/metrics.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace reiflab {

using Json = nlohmann::ordered_json;

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

Json to_json(const Domain& d);
Domain domain_from_json(const Json& j);

void save_domain(const Domain& d, const std::string& path);
Domain load_domain(const std::string& path);

Json to_json(const Vec2& p);
Vec2 vec2_from_json(const Json& j);
Json to_json(const Hyperplane& h);
Json to_json(const FlatnessSample& s);
Json to_json(const SeparationResult& s);
Json to_json(const FlatnessReport& r, bool include_entries = true);
Json to_json(const Certificate& c);
Json to_json(const AngleCheck& a);
Json to_json(const PropagationReport& p);
Json to_json(const Polyline& p);
Polyline polyline_from_json(const Json& j);
Json to_json(const CigarReport& c);
Json to_json(const JonesConstant& j);
Json to_json(const DistanceReport& r);
Json to_json(const RadiiReport& r);
Json to_json(const RadiusCheck& c);
Json to_json(const BoundaryVsSetsCheck& c);
Json to_json(const MeasureBoundsCheck& c);
Json to_json(const UnitBallVolume& u);
Json to_json(const ComponentReport& r);
Json to_json(const CountCheck& c);
Json to_json(const SeparationBoundCheck& c);

/// Flat tables: a header row then one row per item.
std::string to_csv(const FlatnessReport& r);
std::string to_csv(const JonesConstant& j);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

using Overlay = std::variant<Polyline, Hyperplane>;

/// Occupancy as filled runs, boundary as cell-edge segments, overlays on
/// top. Output bytes depend only on the inputs.
std::string render_svg(const Domain& d, const std::vector<Overlay>& overlays = {});

} // namespace reiflab
