#include "seamstitch/config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seamstitch/error.hpp"

namespace seamstitch {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::TooFewMatches: return "TooFewMatches";
        case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorCode::SingularProjection: return "SingularProjection";
        case ErrorCode::SingularTransform: return "SingularTransform";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
        case ErrorCode::NoMatchesFound: return "NoMatchesFound";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::BoundsError: return "BoundsError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::LatticeTooSmall: return "LatticeTooSmall";
        case ErrorCode::EmptyOverlap: return "EmptyOverlap";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::OffsetOutOfFrame: return "OffsetOutOfFrame";
        case ErrorCode::NoPairs: return "NoPairs";
        case ErrorCode::NoClusters: return "NoClusters";
        case ErrorCode::ChainTooShort: return "ChainTooShort";
        case ErrorCode::AllSegmentsInvalid: return "AllSegmentsInvalid";
        case ErrorCode::NoAnchors: return "NoAnchors";
        case ErrorCode::CoverageHole: return "CoverageHole";
        case ErrorCode::MaskTooSmall: return "MaskTooSmall";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

std::string_view to_string(MatcherKind kind) { return kind == MatcherKind::File ? "file" : "builtin"; }

namespace {

using nlohmann::json;

// Reads the keys of one object section, rejecting anything not consumed.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw Error(ErrorCode::ConfigError, "section '" + name_ + "' must be an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        bool ok;
        if constexpr (std::is_same_v<T, bool>) {
            ok = it->is_boolean();
        } else if constexpr (std::is_integral_v<T>) {
            ok = it->is_number_unsigned() && it->template get<std::uint64_t>() <= std::numeric_limits<T>::max();
        } else {
            ok = it->is_number();
        }
        if (!ok) throw Error(ErrorCode::ConfigError, "bad value for '" + name_ + "." + key + "'");
        out = it->template get<T>();
    }

    const json& child(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? empty_ : *it;
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) throw Error(ErrorCode::ConfigError, "unknown key '" + name_ + "." + k + "'");
        }
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
    inline static const json empty_ = json::object();
};

template <typename Fn>
void section(Section& parent, const char* key, Fn&& fn) {
    Section s(parent.child(key), key);
    fn(s);
    s.finish();
}

// One table of keys shared by the reader and the writer.
template <typename Visit>
void visit_config(PipelineConfig& c, Visit&& v) {
    v.group("matcher", [&](auto& g) {
        g.field("kind", c.matcher);
        g.field("max_matches", c.builtin.max_matches);
        g.field("max_keypoints", c.builtin.max_keypoints);
        g.field("fast_threshold", c.builtin.fast_threshold);
        g.field("ratio", c.builtin.ratio);
    });
    v.group("ransac", [&](auto& g) {
        g.field("inlier_threshold", c.ransac.inlier_threshold);
        g.field("iterations", c.ransac.iterations);
        g.field("min_matches", c.ransac.min_matches);
        g.field("seed", c.ransac.rng_seed);
    });
    v.group("warp", [&](auto& g) {
        g.field("grid_x", c.warp.grid_x);
        g.field("grid_y", c.warp.grid_y);
        g.field("lambda1", c.warp.lambda1);
        g.field("lambda2", c.warp.lambda2);
        g.field("alpha", c.warp.alpha);
        g.field("beta", c.warp.beta);
        g.field("kappa_min", c.warp.kappa_min);
        g.field("kappa_max", c.warp.kappa_max);
        g.field("omega_cond", c.warp.omega_cond);
        g.field("omega_det", c.warp.omega_det);
        g.field("omega_delta", c.warp.omega_delta);
        g.field("tau_det", c.warp.tau_det);
        g.field("eval_grid", c.warp.eval_grid);
        g.field("cond_max", c.warp.cond_max);
        g.field("rmse_max", c.warp.rmse_max);
        g.field("det_min", c.warp.det_min);
        g.field("delta_max", c.warp.delta_max);
    });
    v.group("field", [&](auto& g) {
        g.field("nx", c.field.nx);
        g.field("ny", c.field.ny);
        g.field("alpha_f", c.field.alpha_f);
        g.field("d_max", c.field.d_max);
        g.field("sigma_l", c.field.sigma_l);
        g.field("rho", c.field.rho);
        g.field("sigma_d", c.field.sigma_d);
        g.field("gamma_p", c.field.gamma_p);
        g.field("gamma_min", c.field.gamma_min);
        g.field("sigma_g", c.field.sigma_g);
        g.field("blur_guarded", c.field.blur_guarded);
    });
    v.group("zone", [&](auto& g) {
        g.field("range_divisor", c.zone.range_divisor);
        g.field("v", c.zone.v);
        g.field("lambda", c.zone.lambda);
        g.field("epsilon", c.zone.epsilon);
        g.field("require_source_right", c.zone.require_source_right);
    });
    v.group("chain", [&](auto& g) { g.field("brightness_tol", c.chain.brightness_tol); });
    v.group("compose", [&](auto& g) {
        g.field("seam_sigma", c.compose.seam_sigma);
        g.field("seam_band", c.compose.seam_band);
    });
    v.group("debug", [&](auto& g) { g.field("dump", c.dump_debug); });
}

struct ReadGroup {
    Section& s;
    template <typename T>
    void field(const char* key, T& out) {
        s.read(key, out);
    }
    void field(const char* key, MatcherKind& out) {
        const json& j = s.child(key);
        if (j.is_object() && j.empty()) return;  // absent
        if (j == "builtin") {
            out = MatcherKind::Builtin;
        } else if (j == "file") {
            out = MatcherKind::File;
        } else {
            throw Error(ErrorCode::ConfigError, "matcher.kind must be \"builtin\" or \"file\"");
        }
    }
};

struct Reader {
    Section& root;
    template <typename Fn>
    void group(const char* name, Fn&& fn) {
        section(root, name, [&](Section& s) {
            ReadGroup g{s};
            fn(g);
        });
    }
};

struct WriteGroup {
    json& j;
    template <typename T>
    void field(const char* key, T& v) {
        j[key] = v;
    }
    void field(const char* key, MatcherKind& v) { j[key] = std::string(to_string(v)); }
};

struct Writer {
    json& root;
    template <typename Fn>
    void group(const char* name, Fn&& fn) {
        json j = json::object();
        WriteGroup g{j};
        fn(g);
        root[name] = j;
    }
};

}  // namespace

void PipelineConfig::validate() const {
    warp.validate();
    field.validate();
    zone.validate();
    if (!(ransac.inlier_threshold > 0.0) || ransac.iterations == 0) {
        throw Error(ErrorCode::ConfigError, "ransac threshold and iterations must be positive");
    }
    if (!(builtin.ratio > 0.0 && builtin.ratio <= 1.0) || builtin.max_matches == 0 || builtin.max_keypoints == 0 ||
        !(builtin.fast_threshold >= 0.0)) {
        throw Error(ErrorCode::ConfigError, "matcher settings out of range");
    }
    if (!(chain.brightness_tol >= 0.0)) throw Error(ErrorCode::ConfigError, "chain.brightness_tol must be >= 0");
    if (!(compose.seam_sigma >= 0.0)) throw Error(ErrorCode::ConfigError, "compose.seam_sigma must be >= 0");
}

PipelineConfig parse_config_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    PipelineConfig cfg;
    Section root(doc, "config");
    Reader r{root};
    visit_config(cfg, r);
    root.finish();
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

std::string config_to_json(const PipelineConfig& cfg) {
    PipelineConfig copy = cfg;
    json doc = json::object();
    Writer w{doc};
    visit_config(copy, w);
    return doc.dump(2) + "\n";
}

}  // namespace seamstitch
