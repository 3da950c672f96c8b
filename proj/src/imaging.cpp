#include "seamstitch/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seamstitch {

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) return {1.0};
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> k(std::size_t(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        k[std::size_t(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

ScalarField gaussian_blur(const ScalarField& field, double sigma) {
    if (!(sigma > 0.0) || field.values.empty()) return field;
    const std::vector<double> k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    const int w = static_cast<int>(field.width);
    const int h = static_cast<int>(field.height);

    std::vector<double> tmp(field.values.size());
    for (int y = 0; y < h; ++y) {
        const float* row = field.values.data() + std::size_t(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) {
                const int xx = std::clamp(x + i, 0, w - 1);
                acc += k[std::size_t(i + r)] * row[xx];
            }
            tmp[std::size_t(y) * w + x] = acc;
        }
    }
    ScalarField out(field.width, field.height);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) {
                const int yy = std::clamp(y + i, 0, h - 1);
                acc += k[std::size_t(i + r)] * tmp[std::size_t(yy) * w + x];
            }
            out.values[std::size_t(y) * w + x] = static_cast<float>(acc);
        }
    }
    return out;
}

double sample_bilinear(const ScalarField& field, double x, double y) {
    const int w = static_cast<int>(field.width);
    const int h = static_cast<int>(field.height);
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const auto v = [&](int xx, int yy) { return static_cast<double>(field.values[std::size_t(yy) * w + xx]); };
    return (1 - fy) * ((1 - fx) * v(x0, y0) + fx * v(x1, y0)) + fy * ((1 - fx) * v(x0, y1) + fx * v(x1, y1));
}

namespace {

double catmull_rom(double t) {
    t = std::abs(t);
    if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

}  // namespace

ScalarField bicubic_resize(const ScalarField& lattice, std::uint32_t width, std::uint32_t height) {
    ScalarField out(width, height);
    const int nx = static_cast<int>(lattice.width);
    const int ny = static_cast<int>(lattice.height);
    const double sx = width > 1 ? double(nx - 1) / double(width - 1) : 0.0;
    const double sy = height > 1 ? double(ny - 1) / double(height - 1) : 0.0;

    // Column weights are shared by every row.
    struct Taps {
        int idx[4];
        double w[4];
    };
    const auto taps_for = [](double g, int n) {
        Taps t{};
        const int base = static_cast<int>(std::floor(g));
        const double f = g - base;
        for (int i = 0; i < 4; ++i) {
            t.idx[i] = std::clamp(base - 1 + i, 0, n - 1);
            t.w[i] = catmull_rom(f - (i - 1));
        }
        return t;
    };
    std::vector<Taps> xt(width);
    for (std::uint32_t x = 0; x < width; ++x) xt[x] = taps_for(x * sx, nx);

    for (std::uint32_t y = 0; y < height; ++y) {
        const Taps yt = taps_for(y * sy, ny);
        for (std::uint32_t x = 0; x < width; ++x) {
            const Taps& tx = xt[x];
            double acc = 0.0;
            for (int j = 0; j < 4; ++j) {
                const float* row = lattice.values.data() + std::size_t(yt.idx[j]) * nx;
                double racc = 0.0;
                for (int i = 0; i < 4; ++i) racc += tx.w[i] * row[tx.idx[i]];
                acc += yt.w[j] * racc;
            }
            out.at(x, y) = static_cast<float>(acc);
        }
    }
    return out;
}

namespace {

// Felzenszwalb-Huttenlocher lower envelope of parabolas, in place.
void distance_1d(std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[std::size_t(q)] == inf) continue;
        while (k >= 0) {
            const int p = v[std::size_t(k)];
            const double s = ((f[std::size_t(q)] + double(q) * q) - (f[std::size_t(p)] + double(p) * p)) / (2.0 * (q - p));
            if (s <= z[std::size_t(k)]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[std::size_t(k)] = q;
        z[std::size_t(k)] = k == 0 ? -inf
                                   : ((f[std::size_t(q)] + double(q) * q) -
                                      (f[std::size_t(v[std::size_t(k - 1)])] + double(v[std::size_t(k - 1)]) * v[std::size_t(k - 1)])) /
                                         (2.0 * (q - v[std::size_t(k - 1)]));
        z[std::size_t(k + 1)] = inf;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), inf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[std::size_t(j + 1)] < q) ++j;
        const int p = v[std::size_t(j)];
        d[std::size_t(q)] = double(q - p) * (q - p) + f[std::size_t(p)];
    }
}

}  // namespace

std::vector<double> squared_distance_transform(const BinaryMask& seeds) {
    const std::size_t w = seeds.width();
    const std::size_t h = seeds.height();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> grid(w * h);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = seeds.bits()[i] ? 0.0 : inf;

    const std::size_t n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    for (std::size_t x = 0; x < w; ++x) {
        f.resize(h);
        d.resize(h);
        for (std::size_t y = 0; y < h; ++y) f[y] = grid[y * w + x];
        distance_1d(f, d, v, z);
        for (std::size_t y = 0; y < h; ++y) grid[y * w + x] = d[y];
    }
    for (std::size_t y = 0; y < h; ++y) {
        f.resize(w);
        d.resize(w);
        for (std::size_t x = 0; x < w; ++x) f[x] = grid[y * w + x];
        distance_1d(f, d, v, z);
        for (std::size_t x = 0; x < w; ++x) grid[y * w + x] = d[x];
    }
    return grid;
}

}  // namespace seamstitch
