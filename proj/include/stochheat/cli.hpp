#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stochheat::cli {

enum ExitCode : int { Ok = 0, ConfigFailure = 2, NumericalFailure = 3, AssertionFailed = 4 };

/// Full command line without the program name, e.g. {"llt", "--config", "c.json"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Writes `contents` to path.tmp and renames it over `path`.
void write_atomic(const std::string& path, const std::string& contents);

} // namespace stochheat::cli
