#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "seamstitch/error.hpp"
#include "seamstitch/imaging.hpp"
#include "seamstitch/match_io.hpp"

namespace seamstitch {

namespace {

constexpr int kPatch = 16;
constexpr int kHalf = kPatch / 2;
constexpr int kDescLen = kPatch * kPatch;

// Bresenham circle of radius 3, clockwise from twelve o'clock.
constexpr std::array<std::array<int, 2>, 16> kCircle{{{0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1},
                                                      {2, 2}, {1, 3}, {0, 3}, {-1, 3}, {-2, 2}, {-3, 1},
                                                      {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}}};

struct Keypoint {
    int x = 0;
    int y = 0;
    double score = 0.0;
};

// FAST-9 segment test; returns the summed excess contrast of the winning
// polarity or 0 when the pixel is not a corner.
double fast_score(const ScalarField& g, int x, int y, double t) {
    const double c = g.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y));
    std::array<int, 16> sign{};
    std::array<double, 16> excess{};
    for (std::size_t i = 0; i < 16; ++i) {
        const double v = g.at(static_cast<std::uint32_t>(x + kCircle[i][0]), static_cast<std::uint32_t>(y + kCircle[i][1]));
        if (v > c + t) {
            sign[i] = 1;
            excess[i] = v - c - t;
        } else if (v < c - t) {
            sign[i] = -1;
            excess[i] = c - v - t;
        }
    }
    double best = 0.0;
    for (int polarity : {1, -1}) {
        int run = 0;
        int longest = 0;
        for (int i = 0; i < 32; ++i) {
            run = sign[std::size_t(i % 16)] == polarity ? run + 1 : 0;
            longest = std::max(longest, run);
        }
        if (std::min(longest, 16) < 9) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            if (sign[i] == polarity) s += excess[i];
        }
        best = std::max(best, s);
    }
    return best;
}

std::vector<Keypoint> detect(const ScalarField& g, const MatcherConfig& cfg) {
    const int w = static_cast<int>(g.width);
    const int h = static_cast<int>(g.height);
    ScalarField score(g.width, g.height);
    for (int y = kHalf; y < h - kHalf; ++y) {
        for (int x = kHalf; x < w - kHalf; ++x) {
            score.at(std::uint32_t(x), std::uint32_t(y)) = static_cast<float>(fast_score(g, x, y, cfg.fast_threshold));
        }
    }
    std::vector<Keypoint> kps;
    for (int y = kHalf; y < h - kHalf; ++y) {
        for (int x = kHalf; x < w - kHalf; ++x) {
            const float s = score.at(std::uint32_t(x), std::uint32_t(y));
            if (s <= 0.0f) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const float n = score.at(std::uint32_t(x + dx), std::uint32_t(y + dy));
                    // Ties resolve to the first pixel in raster order.
                    const bool earlier = dy < 0 || (dy == 0 && dx < 0);
                    if (n > s || (earlier && n == s)) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) kps.push_back({x, y, s});
        }
    }
    std::stable_sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) { return a.score > b.score; });
    if (kps.size() > cfg.max_keypoints) kps.resize(cfg.max_keypoints);
    return kps;
}

// Zero-mean, unit-norm patch; empty for flat patches.
std::vector<float> describe(const ScalarField& g, const Keypoint& kp) {
    std::vector<float> d(kDescLen);
    double mean = 0.0;
    for (int dy = -kHalf; dy < kHalf; ++dy) {
        for (int dx = -kHalf; dx < kHalf; ++dx) {
            const float v = g.at(std::uint32_t(kp.x + dx), std::uint32_t(kp.y + dy));
            d[std::size_t((dy + kHalf) * kPatch + dx + kHalf)] = v;
            mean += v;
        }
    }
    mean /= kDescLen;
    double nrm = 0.0;
    for (float& v : d) {
        v = static_cast<float>(v - mean);
        nrm += double(v) * v;
    }
    nrm = std::sqrt(nrm);
    if (nrm < 1e-6) return {};
    for (float& v : d) v = static_cast<float>(v / nrm);
    return d;
}

struct Described {
    std::vector<Keypoint> kps;
    std::vector<std::vector<float>> desc;
};

Described extract(const Image& img, const MatcherConfig& cfg) {
    const ScalarField g = gaussian_blur(to_gray(img), 1.0);
    Described out;
    for (const Keypoint& kp : detect(g, cfg)) {
        auto d = describe(g, kp);
        if (d.empty()) continue;
        out.kps.push_back(kp);
        out.desc.push_back(std::move(d));
    }
    return out;
}

double dot(const std::vector<float>& a, const std::vector<float>& b) {
    double s = 0.0;
    for (int i = 0; i < kDescLen; ++i) s += double(a[std::size_t(i)]) * b[std::size_t(i)];
    return s;
}

}  // namespace

MatchSet detect_and_match_builtin(const Image& source, const Image& target, const MatcherConfig& cfg) {
    if (source.width < 32 || source.height < 32 || target.width < 32 || target.height < 32) {
        throw Error(ErrorCode::ImageTooSmall, "built-in matcher needs images of at least 32x32");
    }
    const Described s = extract(source, cfg);
    const Described t = extract(target, cfg);

    MatchSet ms;
    ms.source_dims = {source.width, source.height};
    ms.target_dims = {target.width, target.height};

    const std::size_t ns = s.kps.size();
    const std::size_t nt = t.kps.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> sim(ns * nt);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nt; ++j) sim[i * nt + j] = dot(s.desc[i], t.desc[j]);
    }
    const auto dist = [](double similarity) { return std::sqrt(std::max(0.0, 2.0 - 2.0 * similarity)); };

    std::vector<std::size_t> best_src_for_tgt(nt, ns);
    for (std::size_t j = 0; j < nt; ++j) {
        double best = -inf;
        for (std::size_t i = 0; i < ns; ++i) {
            if (sim[i * nt + j] > best) {
                best = sim[i * nt + j];
                best_src_for_tgt[j] = i;
            }
        }
    }
    for (std::size_t i = 0; i < ns; ++i) {
        double b1 = -inf, b2 = -inf;
        std::size_t j1 = nt;
        for (std::size_t j = 0; j < nt; ++j) {
            const double v = sim[i * nt + j];
            if (v > b1) {
                b2 = b1;
                b1 = v;
                j1 = j;
            } else if (v > b2) {
                b2 = v;
            }
        }
        if (j1 == nt || best_src_for_tgt[j1] != i) continue;
        if (b2 > -inf && !(dist(b1) < cfg.ratio * dist(b2))) continue;
        const Keypoint& a = s.kps[i];
        const Keypoint& b = t.kps[j1];
        ms.matches.push_back({a.x + 0.5, a.y + 0.5, b.x + 0.5, b.y + 0.5, std::clamp((1.0 + b1) / 2.0, 0.0, 1.0)});
    }
    if (ms.matches.empty()) throw Error(ErrorCode::NoMatchesFound, "no mutual matches survived the ratio test");

    std::stable_sort(ms.matches.begin(), ms.matches.end(), [](const Match& a, const Match& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.ys != b.ys) return a.ys < b.ys;
        return a.xs < b.xs;
    });
    if (ms.matches.size() > cfg.max_matches) ms.matches.resize(cfg.max_matches);
    return ms;
}

}  // namespace seamstitch
