#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sjp {

// Command-line entry point, separated from main() so tests can drive it.
// The first line written to `out` is always `verdict: <TOKEN>`.
// Exit codes: 0 stable/found/efficient, 1 unstable/not-found, 2 usage or
// parse or model error, 3 budget exceeded, 4 oracle disagreement.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

} // namespace sjp
