#include "qadse/model.hpp"

#include <json.hpp>

namespace qadse {

using ordered_json = nlohmann::ordered_json;

const char* to_string(PeType pe) {
    switch (pe) {
        case PeType::FP32: return "FP32";
        case PeType::INT16: return "INT16";
        case PeType::LightPE2: return "LightPE2";
        case PeType::LightPE1: return "LightPE1";
    }
    return "?";
}

PeType pe_type_from_string(std::string_view s) {
    for (PeType pe : kAllPeTypes) {
        if (s == to_string(pe)) return pe;
    }
    throw ValidationError("unknown pe_type \"" + std::string(s) +
                          "\" (expected FP32, INT16, LightPE2 or LightPE1)");
}

int activation_bits(PeType pe) {
    switch (pe) {
        case PeType::FP32: return 32;
        case PeType::INT16: return 16;
        default: return 8;
    }
}

int weight_bits(PeType pe) {
    switch (pe) {
        case PeType::FP32: return 32;
        case PeType::INT16: return 16;
        case PeType::LightPE2: return 8;
        case PeType::LightPE1: return 4;
    }
    return 0;
}

double activation_bytes(PeType pe) { return activation_bits(pe) / 8.0; }
double weight_bytes(PeType pe) { return weight_bits(pe) / 8.0; }
double psum_bytes(PeType pe) { return pe == PeType::FP32 ? 4.0 : 2.0; }

void AcceleratorConfig::validate() const {
    auto positive = [](std::int64_t v, const char* field) {
        if (v <= 0)
            throw ValidationError(std::string(field) + " must be positive, got " +
                                  std::to_string(v));
    };
    positive(pe_rows, "pe_rows");
    positive(pe_cols, "pe_cols");
    positive(sp_if, "sp_if");
    positive(sp_fw, "sp_fw");
    positive(sp_ps, "sp_ps");
    positive(glb, "glb");
    positive(bw, "bw");
    if (sp_if + sp_fw + sp_ps > glb)
        throw ValidationError(
            "scratchpad sizes exceed glb: sp_if + sp_fw + sp_ps = " +
            std::to_string(sp_if + sp_fw + sp_ps) + " > glb = " + std::to_string(glb));
}

namespace {

std::int64_t require_int(const ordered_json& j, const char* field) {
    if (!j.contains(field))
        throw ValidationError(std::string("missing field \"") + field + "\"");
    const auto& v = j.at(field);
    if (!v.is_number_integer())
        throw ValidationError(std::string("field \"") + field + "\" must be an integer");
    return v.get<std::int64_t>();
}

ordered_json parse_document(const std::string& text, const char* what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw ValidationError(std::string("malformed JSON in ") + what);
    return j;
}

} // namespace

AcceleratorConfig parse_accelerator_config(const std::string& text) {
    const ordered_json j = parse_document(text, "accelerator config");
    if (!j.is_object()) throw ValidationError("accelerator config must be a JSON object");
    if (!j.contains("pe_type")) throw ValidationError("missing field \"pe_type\"");
    if (!j.at("pe_type").is_string())
        throw ValidationError("field \"pe_type\" must be a string");

    AcceleratorConfig cfg;
    cfg.pe_type = pe_type_from_string(j.at("pe_type").get<std::string>());
    cfg.pe_rows = static_cast<int>(require_int(j, "pe_rows"));
    cfg.pe_cols = static_cast<int>(require_int(j, "pe_cols"));
    cfg.sp_if = require_int(j, "sp_if");
    cfg.sp_fw = require_int(j, "sp_fw");
    cfg.sp_ps = require_int(j, "sp_ps");
    cfg.glb = require_int(j, "glb");
    cfg.bw = require_int(j, "bw");
    cfg.validate();
    return cfg;
}

std::string serialize(const AcceleratorConfig& cfg) {
    ordered_json j;
    j["pe_type"] = to_string(cfg.pe_type);
    j["pe_rows"] = cfg.pe_rows;
    j["pe_cols"] = cfg.pe_cols;
    j["sp_if"] = cfg.sp_if;
    j["sp_fw"] = cfg.sp_fw;
    j["sp_ps"] = cfg.sp_ps;
    j["glb"] = cfg.glb;
    j["bw"] = cfg.bw;
    return j.dump(2) + "\n";
}

void LayerShape::validate(int index) const {
    const std::string where =
        index >= 0 ? " (layer " + std::to_string(index) + ")" : "";
    auto fail = [&](const std::string& msg) { throw ValidationError(msg + where); };
    if (a <= 0) fail("a must be positive");
    if (c <= 0) fail("c must be positive");
    if (f <= 0) fail("f must be positive");
    if (k <= 0) fail("k must be positive");
    if (s <= 0) fail("s must be positive");
    if (p < 0) fail("p must be nonnegative");
    if (rs != 0 && rs != 1) fail("rs must be 0 or 1");
    if (ds != 0 && ds != 1) fail("ds must be 0 or 1");
    if (rs == 1 && ds == 1) fail("rs and ds cannot both be 1");
    if (a + 2 * p < k) fail("a + 2p must be >= k");
}

int output_dim(const LayerShape& layer) {
    layer.validate();
    return (layer.a + 2 * layer.p - layer.k) / layer.s + 1;
}

void NetworkConfig::validate() const {
    if (layers.empty()) throw ValidationError("network \"" + name + "\" has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].validate(static_cast<int>(i));
        if (i > 0 && layers[i].c != layers[i - 1].f)
            throw ValidationError(
                "channel mismatch at layer " + std::to_string(i) + ": c = " +
                std::to_string(layers[i].c) + " but previous layer has f = " +
                std::to_string(layers[i - 1].f));
    }
}

NetworkConfig load_network(const std::string& text) {
    const ordered_json j = parse_document(text, "network document");
    if (!j.is_object()) throw ValidationError("network document must be a JSON object");
    if (!j.contains("name") || !j.at("name").is_string())
        throw ValidationError("missing or non-string field \"name\"");
    if (!j.contains("layers") || !j.at("layers").is_array())
        throw ValidationError("missing or non-array field \"layers\"");

    NetworkConfig net;
    net.name = j.at("name").get<std::string>();
    int index = 0;
    for (const auto& lj : j.at("layers")) {
        if (!lj.is_object())
            throw ValidationError("layer " + std::to_string(index) + " must be an object");
        LayerShape layer;
        layer.a = static_cast<int>(require_int(lj, "a"));
        layer.c = static_cast<int>(require_int(lj, "c"));
        layer.f = static_cast<int>(require_int(lj, "f"));
        layer.k = static_cast<int>(require_int(lj, "k"));
        layer.s = static_cast<int>(require_int(lj, "s"));
        layer.p = static_cast<int>(require_int(lj, "p"));
        // rs/ds default to 0 when absent.
        layer.rs = lj.contains("rs") ? static_cast<int>(require_int(lj, "rs")) : 0;
        layer.ds = lj.contains("ds") ? static_cast<int>(require_int(lj, "ds")) : 0;
        for (const auto& [key, _] : lj.items()) {
            static const char* known[] = {"a", "c", "f", "k", "s", "p", "rs", "ds"};
            bool ok = false;
            for (const char* kf : known) ok = ok || key == kf;
            if (!ok)
                throw ValidationError("unknown field \"" + key + "\" in layer " +
                                      std::to_string(index));
        }
        net.layers.push_back(layer);
        ++index;
    }
    net.validate();
    return net;
}

std::string serialize(const NetworkConfig& net) {
    ordered_json j;
    j["name"] = net.name;
    j["layers"] = ordered_json::array();
    for (const LayerShape& l : net.layers) {
        ordered_json lj;
        lj["a"] = l.a;
        lj["c"] = l.c;
        lj["f"] = l.f;
        lj["k"] = l.k;
        lj["s"] = l.s;
        lj["p"] = l.p;
        lj["rs"] = l.rs;
        lj["ds"] = l.ds;
        j["layers"].push_back(lj);
    }
    return j.dump(2) + "\n";
}

} // namespace qadse
