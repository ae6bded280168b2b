#pragma once

// Batch command-line interface: tables, verifications, proofs, certificates.
// Deterministic byte-stable output for a fixed configuration.

#include <iosfwd>
#include <string>
#include <vector>

namespace u21::cli {

/// Exit codes: 0 all checks pass / contradiction certificate; 1 verification
/// failure; 2 inconclusive; 3 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace u21::cli
