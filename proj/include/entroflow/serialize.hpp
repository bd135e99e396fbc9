#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "entroflow/calculus.hpp"
#include "entroflow/entropyflow.hpp"
#include "entroflow/groupsem.hpp"
#include "entroflow/qms.hpp"
#include "entroflow/statespace.hpp"
#include "entroflow/subalg.hpp"

namespace entroflow {

using Json = nlohmann::ordered_json;

// File formats
//
// Matrix     {"re": [[..]], "im": [[..]]}        rows of real / imaginary parts; "im" optional
// Density    {"dim": d, "re": .., "im": ..}
// Generator  {"dim": d, "variant": "gkls", "H": Matrix, "jumps": [Matrix, ..]}
//            {"dim": d, "variant": "schur", "symbol": [[..]]}
//            {"dim": d, "variant": "raw", "raw": Matrix}   d^2 x d^2 Heisenberg L on column-major vec
// Calculus   {"dim": d, "projections": [[0/1, ..], ..], "phi"?: Density}
// Subalgebra {"dim": d, "unitary"?: Matrix, "blocks": [[1-based indices], ..]}
// Ball spec  {"ball": {"kind": "free_group"|"free_coxeter", "generators": k, "radius": R},
//             "weights"?: "uniform" | {"gibbs": mu} | [w, ..]}
// Words are arrays of signed 1-based generator indices ([-1] is a^{-1}).
//
// Floating values are written with 17 significant digits; +inf as the string "inf".

/// Deterministic JSON text: object keys in insertion order, doubles as %.17g.
std::string dump_json(const Json& j, int indent = 2);
Json parse_json_text(const std::string& text, const std::string& origin);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Non-finite doubles become "inf", "-inf" or "nan".
Json number_to_json(double x);
Json extended_to_json(const ExtendedReal& x);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& what);

Json density_to_json(const Density& rho);
Density density_from_json(const Json& j);

Json generator_spec_to_json(const GeneratorSpec& spec, Eigen::Index dim);
Json generator_to_json(const Generator& gen);
GeneratorSpec generator_spec_from_json(const Json& j);

Json calculus_to_json(const DiffCalculus& calc);
DiffCalculus calculus_from_json(const Json& j);

Json subalgebra_to_json(const SubalgebraSpec& spec);
SubalgebraSpec subalgebra_from_json(const Json& j);

Json word_to_json(const Word& w);
Json ball_to_json(const GroupBall& ball);
Json semigroup_to_json(const BallSemigroup& sg);

struct BallInput {
  GroupKind kind = GroupKind::free_group;
  int generators = 1;
  int radius = 0;
  Json weights = "uniform";
};
bool is_ball_spec(const Json& j);
BallInput ball_input_from_json(const Json& j);
std::vector<double> resolve_weights(const GroupBall& ball, const Json& weights);
GroupKind group_kind_from_string(const std::string& s);
std::string group_kind_name(GroupKind kind);

Json trajectory_to_json(const TrajectoryRecord& rec);
/// Header t,D,I,alpha then one row per time; RFC-4180 line endings and quoting.
std::string trajectory_to_csv(const TrajectoryRecord& rec);
/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

Json mlsi_report_to_json(const MlsiReport& rep);

}  // namespace entroflow
