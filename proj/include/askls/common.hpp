#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace askls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error taxonomy; the CLI maps each category to a distinct exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Invalid inputs: bad labels, malformed graphs, unbound kernel specs, ...
struct DataError : Error {
    using Error::Error;
};

struct DimensionError : DataError {
    using DataError::DataError;
};

struct NumericalError : Error {
    using Error::Error;
};

struct SingularSystemError : NumericalError {
    SingularSystemError(const std::string& msg, double rcond_estimate)
        : NumericalError(msg), rcond(rcond_estimate) {}
    double rcond;
};

// Collection of samples: feature rows and/or ids. Id-only sets (features
// 0x0) are used for precomputed and graph kernels.
struct SampleSet {
    Matrix features;                // n x d, may be empty
    std::vector<std::int64_t> ids;  // size n

    Index size() const { return static_cast<Index>(ids.size()); }
    bool has_features() const { return features.size() > 0; }

    static SampleSet from_features(Matrix x) {
        SampleSet s;
        s.ids.resize(static_cast<std::size_t>(x.rows()));
        for (std::size_t i = 0; i < s.ids.size(); ++i) s.ids[i] = static_cast<std::int64_t>(i);
        s.features = std::move(x);
        return s;
    }

    static SampleSet from_ids(std::vector<std::int64_t> ids) {
        SampleSet s;
        s.ids = std::move(ids);
        return s;
    }

    SampleSet subset(const std::vector<Index>& rows) const {
        SampleSet s;
        s.ids.reserve(rows.size());
        for (Index r : rows) s.ids.push_back(ids[static_cast<std::size_t>(r)]);
        if (has_features()) {
            s.features.resize(static_cast<Index>(rows.size()), features.cols());
            for (std::size_t i = 0; i < rows.size(); ++i) s.features.row(static_cast<Index>(i)) = features.row(rows[i]);
        }
        return s;
    }
};

// Deterministic RNG (splitmix64). std::shuffle and the std distributions are
// implementation-defined, so splits and folds roll their own primitives to
// keep (input, seed) -> output stable across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, bound), bound >= 1. Lemire's multiply-shift
    // with rejection; unbiased and platform-stable.
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DataError(msg);
}

}  // namespace askls
