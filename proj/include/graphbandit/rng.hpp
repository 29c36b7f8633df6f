#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace gbandit {

// Seeded generator with distributions implemented by hand so that the same
// seed produces the same stream on every platform (the std:: distribution
// classes are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Inverse-CDF sampling from a categorical distribution using a single
    // uniform draw. Falls back to the last positive coordinate if rounding
    // pushes the draw past the cumulative total.
    int categorical(const std::vector<double>& probs) {
        const double u = uniform();
        double cum = 0.0;
        int last_positive = -1;
        for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
            if (probs[i] <= 0.0) continue;
            last_positive = i;
            cum += probs[i];
            if (u < cum) return i;
        }
        if (last_positive < 0) throw std::invalid_argument("categorical: no positive mass");
        return last_positive;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace gbandit
