// JSON serialization of reports (nlohmann::ordered_json keeps key order
// stable so fixed inputs produce byte-identical output).
#pragma once

#include <string>

#include <json.hpp>

#include "heightlab/equilab.hpp"
#include "heightlab/heights.hpp"
#include "heightlab/potentials.hpp"
#include "heightlab/roots.hpp"

namespace heightlab {

using Json = nlohmann::ordered_json;

inline Json to_json(const PotentialValue& pv) {
    Json j;
    j["value"] = pv.value;
    j["error"] = pv.error;
    j["tag"] = tag_label(pv.tag);
    j["certified"] = pv.certified;
    if (!pv.note.empty()) j["note"] = pv.note;
    return j;
}

inline Json to_json(const HeightReport& rep) {
    Json j;
    j["t"] = to_string(rep.t);
    j["method"] = rep.method;
    Json places = Json::array();
    for (const auto& [v, pv] : rep.places) {
        Json e;
        e["place"] = v.label();
        e["value"] = pv.value;
        e["error"] = pv.error;
        places.push_back(std::move(e));
    }
    j["places"] = std::move(places);
    j["P"] = rep.prime_bound;
    j["tail"] = rep.tail;
    j["total"] = rep.total.value;
    j["total_error"] = rep.total.error;
    return j;
}

inline Json to_json(const RadiiReport& rep) {
    Json j;
    j["place"] = rep.place.label();
    j["r_in"] = rep.r_in;
    j["r_out"] = rep.r_out;
    j["capacity"] = to_json(rep.capacity);
    j["grid_note"] = rep.grid_note;
    return j;
}

inline Json to_json(const EnergyTrend& tr) {
    Json j;
    j["n"] = tr.levels;
    j["energy"] = tr.energies;
    j["place"] = tr.place;
    j["sign"] = sign_label(tr.sign);
    return j;
}

inline Json to_json(const ParameterSet& s) {
    Json j;
    j["lambda"] = to_string(s.lambda);
    j["sign"] = sign_label(s.sign);
    j["n"] = s.level;
    j["degree"] = upoly::deg(s.defining_poly);
    Json roots = Json::array();
    for (std::size_t i = 0; i < s.roots.size(); ++i) {
        Json r;
        r["re"] = s.roots[i].real();
        r["im"] = s.roots[i].imag();
        r["residual"] = i < s.residuals.size() ? s.residuals[i] : s.residual_bound;
        roots.push_back(std::move(r));
    }
    j["roots"] = std::move(roots);
    j["residual_bound"] = s.residual_bound;
    return j;
}

}  // namespace heightlab
