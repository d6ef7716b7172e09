#pragma once

#include <cstdint>
#include <random>

namespace cecl {

// mt19937 with hand-rolled draws. The standard distributions are not
// bit-portable across library implementations; these are, which keeps
// seeded corpora and fold splits byte-identical everywhere.
class Rng {
public:
    explicit Rng(std::uint32_t seed) : gen_(seed) {}

    std::uint32_t next() { return gen_(); }

    // inclusive bounds
    int uniform(int lo, int hi) {
        return lo + int(next() % std::uint32_t(hi - lo + 1));
    }

    // [0, 1)
    double unit() { return next() * (1.0 / 4294967296.0); }

    bool chance(double p) { return unit() < p; }

private:
    std::mt19937 gen_;
};

} // namespace cecl
