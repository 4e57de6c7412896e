#pragma once

#include "inpr/shift.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace inpr {

/// Parses `source_id,x1[,x2,...],y` with a header row. Rows are grouped by
/// source_id (ascending) and keep their file order within a group.
/// Throws ParseError (with line number) on ragged or non-numeric rows and
/// InputError when no row has source_id 0.
MultiSourceData read_multisource_csv(std::istream& in);
MultiSourceData ingest_csv(const std::filesystem::path& path);

/// Inverse of read_multisource_csv; values in %.17g so the round trip is exact.
void write_multisource_csv(std::ostream& out, const MultiSourceData& data);

/// Curve rows `x1[,...],estimate[,lower,upper]`.
struct CurveTable {
    PointMatrix xs;
    Vector estimate;
    std::optional<Vector> lower;
    std::optional<Vector> upper;
};
void write_curve_csv(std::ostream& out, const CurveTable& curve);

/// Reads `x1[,...],value` (header required); used for curves supplied to the region test.
CurveTable read_curve_csv(std::istream& in);

/// %.17g rendering shared by every CSV writer.
std::string format_double(double v);

}  // namespace inpr
