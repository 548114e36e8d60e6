#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dggan::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // bad input data, numeric failure, I/O
inline constexpr int kExitUsage = 2;    // bad flags or flag values

/// Runs one command. `args` excludes the program name, e.g.
/// {"train", "--edges", "g.tsv", "--dim", "8"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Flat `key=value` lines; blank lines and lines starting with '#' are
/// skipped. Whitespace around keys and values is trimmed. Duplicate keys and
/// lines without '=' throw ArgumentError.
std::vector<ConfigEntry> parse_config(std::istream& in, std::string_view source_name = "<stream>");

/// "7", "1,2,5", "1..10" or mixes such as "1..3,8". Duplicates are an error.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
/// Comma-separated integers with the same range syntax as seeds.
std::vector<std::size_t> parse_size_list(std::string_view text);
/// Comma-separated reals.
std::vector<double> parse_real_list(std::string_view text);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace dggan::cli
