// manifest.hpp
//
// Run provenance: every CLI command writes one manifest.json capturing the
// command, resolved parameters, seeds, input file digests, tool version, and
// the list of output files. Execution-only knobs (--jobs) are excluded, so
// a run's output tree is byte-identical across worker counts and re-runs.

#ifndef QADSE_MANIFEST_HPP
#define QADSE_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qadse {

inline constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::string& path); // throws on read failure
std::string to_hex(std::uint64_t v);

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters; // resolved, output-affecting only
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs; // (path, digest)
    std::vector<std::string> outputs;                        // relative to out dir

    void add_input(const std::string& path); // digests the file
    std::string to_json() const;
};

} // namespace qadse

#endif
