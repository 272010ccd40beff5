#include "qadse/space.hpp"

#include <json.hpp>

namespace qadse {

using ordered_json = nlohmann::ordered_json;

std::uint64_t ConfigSpaceSpec::cartesian_size() const {
    return static_cast<std::uint64_t>(pe_types.size()) * pe_rows.size() *
           pe_cols.size() * sp_if.size() * sp_fw.size() * sp_ps.size() *
           glb.size() * bw.size();
}

void ConfigSpaceSpec::validate() const {
    auto nonempty = [](std::size_t n, const char* field) {
        if (n == 0)
            throw ValidationError(std::string("space knob \"") + field + "\" is empty");
    };
    nonempty(pe_types.size(), "pe_type");
    nonempty(pe_rows.size(), "pe_rows");
    nonempty(pe_cols.size(), "pe_cols");
    nonempty(sp_if.size(), "sp_if");
    nonempty(sp_fw.size(), "sp_fw");
    nonempty(sp_ps.size(), "sp_ps");
    nonempty(glb.size(), "glb");
    nonempty(bw.size(), "bw");
}

namespace {

template <typename T>
std::vector<T> int_list(const ordered_json& j, const char* field) {
    if (!j.contains(field))
        throw ValidationError(std::string("missing space knob \"") + field + "\"");
    const auto& arr = j.at(field);
    if (!arr.is_array())
        throw ValidationError(std::string("space knob \"") + field + "\" must be an array");
    std::vector<T> out;
    for (const auto& v : arr) {
        if (!v.is_number_integer())
            throw ValidationError(std::string("space knob \"") + field +
                                  "\" must contain integers");
        out.push_back(static_cast<T>(v.get<std::int64_t>()));
    }
    return out;
}

} // namespace

ConfigSpaceSpec parse_space(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("malformed JSON in space spec");
    if (!j.is_object()) throw ValidationError("space spec must be a JSON object");

    ConfigSpaceSpec spec;
    if (!j.contains("pe_type") || !j.at("pe_type").is_array())
        throw ValidationError("missing or non-array space knob \"pe_type\"");
    for (const auto& v : j.at("pe_type")) {
        if (!v.is_string())
            throw ValidationError("space knob \"pe_type\" must contain strings");
        spec.pe_types.push_back(pe_type_from_string(v.get<std::string>()));
    }
    spec.pe_rows = int_list<int>(j, "pe_rows");
    spec.pe_cols = int_list<int>(j, "pe_cols");
    spec.sp_if = int_list<std::int64_t>(j, "sp_if");
    spec.sp_fw = int_list<std::int64_t>(j, "sp_fw");
    spec.sp_ps = int_list<std::int64_t>(j, "sp_ps");
    spec.glb = int_list<std::int64_t>(j, "glb");
    spec.bw = int_list<std::int64_t>(j, "bw");
    spec.validate();
    return spec;
}

std::string serialize(const ConfigSpaceSpec& spec) {
    ordered_json j;
    j["pe_type"] = ordered_json::array();
    for (PeType pe : spec.pe_types) j["pe_type"].push_back(to_string(pe));
    j["pe_rows"] = spec.pe_rows;
    j["pe_cols"] = spec.pe_cols;
    j["sp_if"] = spec.sp_if;
    j["sp_fw"] = spec.sp_fw;
    j["sp_ps"] = spec.sp_ps;
    j["glb"] = spec.glb;
    j["bw"] = spec.bw;
    return j.dump(2) + "\n";
}

EnumerationResult enumerate_space(const ConfigSpaceSpec& spec) {
    spec.validate();
    EnumerationResult result;
    std::uint64_t id = 0;
    for (PeType pe : spec.pe_types)
        for (int rows : spec.pe_rows)
            for (int cols : spec.pe_cols)
                for (std::int64_t sp_if : spec.sp_if)
                    for (std::int64_t sp_fw : spec.sp_fw)
                        for (std::int64_t sp_ps : spec.sp_ps)
                            for (std::int64_t glb : spec.glb)
                                for (std::int64_t bw : spec.bw) {
                                    AcceleratorConfig cfg{pe, rows, cols, sp_if,
                                                          sp_fw, sp_ps, glb, bw};
                                    try {
                                        cfg.validate();
                                        result.configs.push_back({id, cfg});
                                    } catch (const ValidationError&) {
                                        ++result.skipped;
                                    }
                                    ++id;
                                }
    return result;
}

} // namespace qadse
