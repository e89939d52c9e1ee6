#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "rrlab/hash.hpp"
#include "rrlab/types.hpp"

namespace rrlab {

// Deterministic named substream of a single root seed. All randomness in the
// project flows through these; the normal transform is hand-rolled so the
// sequence does not depend on the standard library's distribution internals.
class RngStream {
public:
    RngStream(uint64_t root_seed, std::string_view name)
        : eng_(fnv1a64(name, fnv1a64(&root_seed, sizeof(root_seed)))) {}

    // [0, 1)
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // [lo, hi)
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(uniform() * static_cast<double>(hi - lo));
    }

    double normal() {
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <typename Derived>
    void fill_normal(Eigen::MatrixBase<Derived>& m, double sigma = 1.0, double mean = 0.0) {
        using S = typename Derived::Scalar;
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                m(r, c) = static_cast<S>(mean + sigma * normal());
    }

    template <typename Derived>
    void fill_uniform(Eigen::MatrixBase<Derived>& m, double lo, double hi) {
        using S = typename Derived::Scalar;
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                m(r, c) = static_cast<S>(lo + (hi - lo) * uniform());
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i)))]);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace rrlab
