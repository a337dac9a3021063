#pragma once

#include <iosfwd>

namespace aqx {

/// Command-line front end: `aqx <rank|project|envelope|fhom|ehom|twoscale|
/// relaxcheck|verify> [flags]`. Returns the process exit status: 0 success,
/// 1 configuration error, 2 constant-rank violation, 3 numerical failure,
/// 4 when `verify` finishes with a failing criterion.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aqx
