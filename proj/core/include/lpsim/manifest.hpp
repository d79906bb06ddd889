#ifndef LPSIM_MANIFEST_HPP
#define LPSIM_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lpsim {

// FNV-1a over a byte string, hex encoded. Used for config and file checksums.
std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);
std::string file_checksum(const std::filesystem::path& path);

// Reproducibility record written next to every subcommand's outputs.
// Inputs and outputs carry checksums; timings are informational and are the
// one field excluded from byte-identity comparisons between reruns.
struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> config_entries;
  std::vector<std::pair<std::string, std::string>> inputs;    // path, checksum
  std::vector<std::pair<std::string, std::string>> outputs;   // path, checksum
  std::vector<std::pair<std::string, double>> timings_sec;    // stage, seconds

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;
};

}  // namespace lpsim

#endif
