#include "lpsim/manifest.hpp"

#include <fstream>
#include <sstream>

#include "lpsim/error.hpp"

namespace lpsim {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open for checksum: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

void Manifest::add_input(const std::filesystem::path& path) {
  inputs.emplace_back(path.string(), file_checksum(path));
}

void Manifest::add_output(const std::filesystem::path& path) {
  outputs.emplace_back(path.string(), file_checksum(path));
}

void Manifest::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path.string());
  f << "command " << command << "\n";
  f << "seed " << seed << "\n";
  f << "config_hash " << config_hash << "\n";
  for (const auto& [k, v] : config_entries) f << "config " << k << " = " << v << "\n";
  for (const auto& [p, c] : inputs) f << "input " << c << " " << p << "\n";
  for (const auto& [p, c] : outputs) f << "output " << c << " " << p << "\n";
  for (const auto& [stage, sec] : timings_sec) f << "timing " << stage << " " << sec << "\n";
  if (!f) throw Error("write failed: " + path.string());
}

}  // namespace lpsim
