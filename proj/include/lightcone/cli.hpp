#pragma once

#include <iosfwd>

namespace lightcone {

// Subcommands frame|volume|vary|nullspace|verify. Returns 0 on success, 2 when
// a check fails, 1 on usage or configuration errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lightcone
