#include "seamstitch/match_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "seamstitch/error.hpp"

namespace seamstitch {

namespace {

using nlohmann::json;

Dims parse_dims(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing key '") + key + "'");
    const json& d = j.at(key);
    if (!d.is_array() || d.size() != 2 || !d[0].is_number_unsigned() || !d[1].is_number_unsigned()) {
        throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be [W, H] with non-negative integers");
    }
    return {d[0].get<std::uint32_t>(), d[1].get<std::uint32_t>()};
}

double parse_coord(const json& m, const char* key, std::size_t index) {
    if (!m.contains(key) || !m.at(key).is_number()) {
        throw Error(ErrorCode::ParseError,
                    "match " + std::to_string(index) + ": missing or non-numeric '" + key + "'");
    }
    return m.at(key).get<double>();
}

bool inside(double v, std::uint32_t extent) { return std::isfinite(v) && v >= 0.0 && v < double(extent); }

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

void validate_match_set(const MatchSet& ms) {
    for (std::size_t i = 0; i < ms.matches.size(); ++i) {
        const Match& m = ms.matches[i];
        const bool ok = inside(m.xs, ms.source_dims.width) && inside(m.ys, ms.source_dims.height) &&
                        inside(m.xt, ms.target_dims.width) && inside(m.yt, ms.target_dims.height) &&
                        std::isfinite(m.score) && m.score >= 0.0 && m.score <= 1.0;
        if (!ok) throw Error(ErrorCode::BoundsError, "match " + std::to_string(i) + " is out of bounds", i);
    }
}

MatchSet parse_match_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "match file must be a JSON object");

    MatchSet ms;
    ms.source_dims = parse_dims(j, "source_dims");
    ms.target_dims = parse_dims(j, "target_dims");
    if (!j.contains("matches") || !j.at("matches").is_array()) {
        throw Error(ErrorCode::ParseError, "'matches' must be an array");
    }
    const json& arr = j.at("matches");
    ms.matches.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& m = arr[i];
        if (!m.is_object()) throw Error(ErrorCode::ParseError, "match " + std::to_string(i) + " is not an object");
        ms.matches.push_back({parse_coord(m, "xs", i), parse_coord(m, "ys", i), parse_coord(m, "xt", i),
                              parse_coord(m, "yt", i), parse_coord(m, "score", i)});
    }
    validate_match_set(ms);
    return ms;
}

MatchSet load_match_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open match file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_match_json(ss.str());
}

std::string to_match_json(const MatchSet& ms) {
    std::string out;
    out.reserve(64 + ms.matches.size() * 120);
    out += "{\"source_dims\":[" + std::to_string(ms.source_dims.width) + "," +
           std::to_string(ms.source_dims.height) + "],\"target_dims\":[" + std::to_string(ms.target_dims.width) +
           "," + std::to_string(ms.target_dims.height) + "],\"matches\":[";
    for (std::size_t i = 0; i < ms.matches.size(); ++i) {
        const Match& m = ms.matches[i];
        out += i == 0 ? "\n" : ",\n";
        out += "{\"xs\":";
        append_double(out, m.xs);
        out += ",\"ys\":";
        append_double(out, m.ys);
        out += ",\"xt\":";
        append_double(out, m.xt);
        out += ",\"yt\":";
        append_double(out, m.yt);
        out += ",\"score\":";
        append_double(out, m.score);
        out += "}";
    }
    out += "]}\n";
    return out;
}

void save_match_file(const MatchSet& ms, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write match file: " + path.string());
    out << to_match_json(ms);
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace seamstitch
