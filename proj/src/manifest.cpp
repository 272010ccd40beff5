#include "qadse/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qadse/common.hpp"

namespace qadse {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read input file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64(buf.str());
}

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void RunManifest::add_input(const std::string& path) {
    inputs.emplace_back(path, to_hex(fnv1a64_file(path)));
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["tool"] = "qadse";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : parameters) j["parameters"][k] = v;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : inputs) {
        nlohmann::ordered_json e;
        e["path"] = path;
        e["fnv1a64"] = digest;
        j["inputs"].push_back(e);
    }
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

} // namespace qadse
