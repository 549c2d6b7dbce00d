#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>

namespace strat {

// Counter-based deterministic generator. Every sampling site derives its own
// stream from (seed, tag, indices...) so results are independent of thread
// scheduling and identical across serial/parallel runs.
class Rng {
public:
    // Stream tags, one per sampling site.
    enum Tag : std::uint64_t {
        kShellProbe = 1,
        kBoxSample = 2,
        kComponentSample = 3,
        kEssentialProbe = 4,
        kSeparatingPlane = 5,
        kLevelCandidates = 6,
        kCertifyCloud = 7,
        kDimProbe = 8,
        kGridProbe = 9,
        kPerturb = 10,
        kTest = 99,
    };

    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
        std::uint64_t s = mix(seed ^ 0x9e3779b97f4a7c15ull);
        for (std::uint64_t id : ids) s = mix(s ^ mix(id + 0x632be59bd9b4e019ull));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller (fixed algorithm, platform independent).
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd gaussian_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    // Uniform direction on the unit sphere in R^n.
    Eigen::VectorXd on_sphere(int n) {
        Eigen::VectorXd v = gaussian_vector(n);
        double norm = v.norm();
        while (norm < 1e-12) {
            v = gaussian_vector(n);
            norm = v.norm();
        }
        return v / norm;
    }

    // Uniform in the unit ball of R^n.
    Eigen::VectorXd in_ball(int n) {
        Eigen::VectorXd dir = on_sphere(n);
        double r = std::pow(uniform(), 1.0 / n);
        return r * dir;
    }

private:
    explicit Rng(std::uint64_t s) : state_(s) {}

    // SplitMix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace strat
