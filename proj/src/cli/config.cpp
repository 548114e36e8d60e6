#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <set>
#include <string>

#include "dggan/cli.hpp"
#include "dggan/error.hpp"

namespace dggan::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> items;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    items.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::uint64_t parse_u64(std::string_view token, std::string_view what) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    throw ArgumentError("invalid " + std::string(what) + " '" + std::string(token) + "'");
  }
  return value;
}

constexpr std::uint64_t kMaxRange = 1'000'000;

std::vector<std::uint64_t> parse_ranges(std::string_view text, std::string_view what) {
  std::vector<std::uint64_t> out;
  std::set<std::uint64_t> seen;
  for (const auto item : split_commas(trim(text))) {
    const auto dots = item.find("..");
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    if (dots == std::string_view::npos) {
      lo = hi = parse_u64(item, what);
    } else {
      lo = parse_u64(trim(item.substr(0, dots)), what);
      hi = parse_u64(trim(item.substr(dots + 2)), what);
      if (hi < lo || hi - lo >= kMaxRange) {
        throw ArgumentError("invalid " + std::string(what) + " range '" + std::string(item) + "'");
      }
    }
    for (std::uint64_t v = lo;; ++v) {
      if (!seen.insert(v).second) {
        throw ArgumentError("duplicate " + std::string(what) + " " + std::to_string(v));
      }
      out.push_back(v);
      if (v == hi) break;
    }
  }
  return out;
}

}  // namespace

std::vector<ConfigEntry> parse_config(std::istream& in, std::string_view source_name) {
  std::vector<ConfigEntry> entries;
  std::set<std::string, std::less<>> keys;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    const auto where = std::string(source_name) + ":" + std::to_string(number);
    if (eq == std::string_view::npos) throw ArgumentError(where + ": expected key=value");
    ConfigEntry e{std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))),
                  number};
    if (e.key.empty()) throw ArgumentError(where + ": empty key");
    if (!keys.insert(e.key).second) throw ArgumentError(where + ": duplicate key '" + e.key + "'");
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  return parse_ranges(text, "seed");
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  const auto values = parse_ranges(text, "integer");
  return {values.begin(), values.end()};
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto item : split_commas(trim(text))) {
    double value = 0.0;
    const auto* end = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(item.data(), end, value);
    if (item.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
      throw ArgumentError("invalid number '" + std::string(item) + "'");
    }
    out.push_back(value);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw Error("read failed: " + path.string());
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

}  // namespace dggan::cli
