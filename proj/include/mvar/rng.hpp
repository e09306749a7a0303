#pragma once
// Seeded random streams.
//
// Engine: std::mt19937_64. A stream is identified by (seed, stream index) and
// seeded through std::seed_seq over the four 32-bit halves of the pair, so
// substreams for multi-start EM or Monte Carlo chunks are fixed by their
// index and independent of execution order. Normal variates come from
// Boost.Random's ziggurat sampler, whose output is specified by the library
// rather than by the standard library vendor.

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <cstdint>
#include <random>

#include "mvar/model.hpp"

namespace mvar {

inline constexpr const char* kRngName = "mt19937_64/seed_seq(seed,stream)+boost-ziggurat-normal";

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    double uniform() { return uniform_(engine_); }

    double normal() { return normal_(engine_); }

    void fill_normal(Vector& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal_(engine_);
    }

    /// Index drawn with probabilities proportional to weights (sum 1).
    int categorical(const Vector& weights) {
        const double u = uniform();
        double acc = 0.0;
        const int last = static_cast<int>(weights.size()) - 1;
        for (int k = 0; k < last; ++k) {
            acc += weights[k];
            if (u < acc) return k;
        }
        // Trailing zero weights are never selected.
        int k = last;
        while (k > 0 && weights[k] == 0.0) --k;
        return k;
    }

    /// Symmetric Dirichlet(1) draw of dimension g.
    Vector dirichlet_ones(int g) {
        Vector v(g);
        for (int k = 0; k < g; ++k) v[k] = -std::log1p(-uniform());
        return v / v.sum();
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    boost::random::uniform_01<double> uniform_;
    boost::random::normal_distribution<double> normal_;
};

}  // namespace mvar
