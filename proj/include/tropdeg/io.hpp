#pragma once

// JSON schemas for lattices, period matrices, families, graphs and curve
// data; deterministic report emission (sorted keys, 12 significant digits).

#include "tropdeg/bounds.hpp"
#include "tropdeg/degeneration.hpp"
#include "tropdeg/error.hpp"
#include "tropdeg/graph.hpp"
#include "tropdeg/lattice.hpp"
#include "tropdeg/theta.hpp"

#include <json.hpp>

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace tropdeg {

using Json = nlohmann::json;

/// ParseError carrying the location of malformed input.
class JsonParseError : public Error {
public:
  JsonParseError(const std::string& message, std::size_t byte, std::size_t line, std::size_t column)
      : Error(ErrorCode::ParseError, message), byte_(byte), line_(line), column_(column) {}

  std::size_t byte() const noexcept { return byte_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t byte_, line_, column_;
};

Json parse_json_text(std::string_view text);
/// InvalidArgument if the file cannot be read.
Json read_json_file(const std::filesystem::path& path);

/// ParseError unless `j` is an object whose keys are all in `allowed` and
/// which contains every key of `required`.
void check_object(const Json& j, std::initializer_list<std::string_view> allowed,
                  std::initializer_list<std::string_view> required, std::string_view context);

// Values -------------------------------------------------------------------

/// A number, or [num, den] with integer entries.
Rational parse_rational(const Json& j, std::string_view context);
/// {"num": .., "den": ..}; integers beyond 64 bits are written as strings.
Json rational_to_json(const Rational& q);
/// A number or {"re": .., "im": ..}.
Complex parse_complex(const Json& j, std::string_view context);
Json complex_to_json(Complex z);

// Schemas ------------------------------------------------------------------

/// {"rank": r, "gram": [[..]]}. Exact mode when no entry is a non-integer
/// float, i.e. all entries are integers or [num, den] pairs.
GramLattice parse_gram(const Json& j);
Json gram_to_json(const GramLattice& lattice);

/// {"g": g, "tau": [[{"re","im"}, ..], ..]}
PeriodMatrix parse_period_matrix(const Json& j);
Json period_matrix_to_json(const PeriodMatrix& tau);

/// {"g1", "g2", "m", "B", "S1", "S2", "S3"}; each S entry is a list of
/// complex coefficients in s = t^{1/m}, lowest degree first.
PeriodFamily parse_family(const Json& j);
Json family_to_json(const PeriodFamily& family);

/// {"vertices": [{"id", "q"}], "edges": [{"u", "v", "length"}]}
PolarizedGraph parse_graph(const Json& j);
Json graph_to_json(const PolarizedGraph& graph);

/// {"g", "d_K", "omega_sq", "h_fal", "finite_places": [..], "infinite_places": [..]}.
/// A finite place is {"norm", "invariants": {"delta","epsilon","phi"}} or
/// {"norm", "graph": <graph>} or {"norm", "graph_file": path relative to base}.
CurveArithmeticData parse_curve(const Json& j, const std::filesystem::path& base = {});
Json curve_to_json(const CurveArithmeticData& data);

// Reports ------------------------------------------------------------------

Json vector_to_json(const Eigen::VectorXd& v);
Json matrix_to_json(const Eigen::MatrixXd& m);
Json int_vectors_to_json(const std::vector<IntVector>& vs);
Json bound_report_to_json(const BoundReport& report);
Json graph_invariants_to_json(const GraphInvariants& inv);
Json identity_report_to_json(const IdentityReport& report);
Json fit_to_json(const AsymptoticFit& fit);

/// Pretty-printed with sorted keys, doubles as %.12g, non-finite as null.
std::string dump_report(const Json& j);

/// One header row plus one row per element of an array of flat objects;
/// the header order is given explicitly.
std::string to_csv(const Json& rows, const std::vector<std::string>& columns);
/// Flattens any report into "key,value" rows with dotted paths.
std::string to_key_value_csv(const Json& j);

std::string fit_to_csv(const AsymptoticFit& fit);

}  // namespace tropdeg
