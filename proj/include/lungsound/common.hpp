#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lungsound {

// Errors caused by malformed input data (text, files, shapes). The CLI maps
// these to exit code 2; std::logic_error means a broken internal invariant
// and maps to exit code 3.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : data_error {
    using data_error::data_error;
};

struct io_error : data_error {
    using data_error::data_error;
};

// Deterministic random source. All randomized code in the library draws
// through this wrapper so that a seed fixes the exact byte-level outcome:
// mt19937 output is pinned by the standard, and the distribution transforms
// below are spelled out instead of delegating to the implementation-defined
// std::*_distribution classes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_()) * (1.0 / 4294967296.0); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller, one cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Unbiased integer in [0, n) by rejection.
    std::uint32_t below(std::uint32_t n) {
        if (n <= 1) return 0;
        const std::uint32_t limit = std::numeric_limits<std::uint32_t>::max() / n * n;
        std::uint32_t v = gen_();
        while (v >= limit) v = gen_();
        return v % n;
    }

    // Fisher-Yates, driven by below() so the permutation is seed-stable.
    template <typename T>
    void shuffle(std::vector<T>& xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            std::swap(xs[i - 1], xs[below(static_cast<std::uint32_t>(i))]);
        }
    }

private:
    std::mt19937 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lungsound
