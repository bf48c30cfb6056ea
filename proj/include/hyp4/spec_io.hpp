#pragma once

#include "hyp4/films.hpp"
#include "hyp4/report.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace hyp4 {

struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace spec_detail {

inline double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw SpecError(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

inline Vec3 vec3(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw SpecError(std::string(what) + " must be an array of 3 numbers");
    for (const auto& v : j)
        if (!v.is_number()) throw SpecError(std::string(what) + " must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace spec_detail

inline Point4 parse_point(const json& j) {
    if (!j.is_array() || j.size() != 4) throw SpecError("point must be an array of 4 numbers");
    for (const auto& v : j)
        if (!v.is_number()) throw SpecError("point must be an array of 4 numbers");
    try {
        return Point4(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }
}

// One generator: {kind: loxodromic|dilation|parabolic|translation, lambda, theta, rotation_plane,
// rotation_axis, translation, orientation}.
inline Isometry4 parse_isometry(const json& j) {
    using namespace spec_detail;
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw SpecError("generator needs a string 'kind'");
    std::string kind = j["kind"];
    double theta = j.contains("theta") ? number(j, "theta") : 0.0;
    int orient = j.contains("orientation") ? static_cast<int>(number(j, "orientation")) : 1;
    try {
        if (kind == "dilation") return Isometry4::dilation(number(j, "lambda"));
        if (kind == "loxodromic") {
            Vec3 e1{1, 0, 0}, e2{0, 1, 0};
            if (j.contains("rotation_plane")) {
                const json& p = j["rotation_plane"];
                if (!p.is_array() || p.size() != 2) throw SpecError("rotation_plane must hold two vectors");
                e1 = vec3(p[0], "rotation_plane[0]");
                e2 = vec3(p[1], "rotation_plane[1]");
            }
            return Isometry4::loxodromic(number(j, "lambda"), theta, e1, e2, orient);
        }
        if (kind == "translation") {
            if (!j.contains("translation")) throw SpecError("translation needs 'translation'");
            return Isometry4::translation(vec3(j["translation"], "translation"));
        }
        if (kind == "parabolic") {
            if (!j.contains("translation")) throw SpecError("parabolic needs 'translation'");
            Vec3 axis = j.contains("rotation_axis") ? vec3(j["rotation_axis"], "rotation_axis") : Vec3{0, 0, 1};
            return Isometry4::parabolic(theta, axis, vec3(j["translation"], "translation"), orient);
        }
    } catch (const SpecError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }
    throw SpecError("unknown kind '" + kind + "'");
}

// A group SPEC is one generator object, or {generators: [...]} for a translation lattice.
inline std::vector<Isometry4> parse_generators(const json& j) {
    if (j.is_object() && j.contains("generators")) {
        if (!j["generators"].is_array() || j["generators"].empty()) throw SpecError("generators must be a non-empty array");
        std::vector<Isometry4> g;
        for (const auto& e : j["generators"]) g.push_back(parse_isometry(e));
        return g;
    }
    return {parse_isometry(j)};
}

inline ElementaryGroup parse_group(const json& j, double nu_max, double x4_max) {
    try {
        return ElementaryGroup::from_ranges(parse_generators(j), nu_max, x4_max);
    } catch (const SpecError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }
}

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("malformed JSON: ") + e.what());
    }
}

// Film: {T: generator, x: point, z: point}.
inline RuledFilm parse_film(const json& j) {
    if (!j.is_object() || !j.contains("T") || !j.contains("x") || !j.contains("z"))
        throw SpecError("film needs T, x and z");
    try {
        return RuledFilm(parse_isometry(j["T"]), parse_point(j["x"]), parse_point(j["z"]));
    } catch (const SpecError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }
}

}  // namespace hyp4
