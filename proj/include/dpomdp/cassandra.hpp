#pragma once

#include "dpomdp/model.hpp"

#include <filesystem>
#include <iosfwd>

namespace dpomdp {

/// Reads a Cassandra `.POMDP` file.
///
/// Supported: `discount`, `values`, `states`/`actions`/`observations` (counts or
/// name lists), `start` (vector, `uniform`, a single state, `include`/`exclude`
/// lists), and `T:`/`O:`/`R:` entries in single-value, row and matrix forms with
/// `*` wildcards and the `uniform`/`identity` keywords. Later entries override
/// earlier ones. Anything else is rejected with a ParseError carrying the line.
///
/// Rewards R(s,u,s',z) are reduced to expected per-stage costs
/// g_u(s) = sum_{s',z} P(s'|s,u) P(z|s',u) R(s,u,s',z), negated for
/// `values: reward`. Probability rows off by at most 1e-6 are rescaled; larger
/// deviations raise a ValidationError naming the row.
PomdpModel parse_pomdp(std::istream& source);

PomdpModel parse_pomdp_file(const std::filesystem::path& path);

/// Writes `model` as a `values: cost` Cassandra file that parses back to
/// bit-identical tables.
void write_pomdp(const PomdpModel& model, std::ostream& out);

}  // namespace dpomdp
