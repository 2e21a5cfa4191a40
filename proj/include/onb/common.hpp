#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace onb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch between declared and actual shapes.
struct ShapeError : Error {
    using Error::Error;
};

/// Non-finite values or failed factorizations.
struct NumericError : Error {
    using Error::Error;
};

/// Query outside the supported domain.
struct RangeError : Error {
    using Error::Error;
};

/// Not enough data to satisfy a request (e.g. resampling).
struct CapacityError : Error {
    using Error::Error;
};

/// Training loss became non-finite.
struct DivergenceError : Error {
    using Error::Error;
};

/// Metric undefined for the given data (constant target, zero norm, ...).
struct DegenerateError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// Worker cap used by batch math and dataset builders. 0 = hardware default.
void set_max_threads(int n);
int max_threads();

// Rows are split into fixed-size chunks so that per-chunk partial results can
// be reduced in chunk order, making reductions independent of thread count.
inline constexpr Index kRowChunk = 16384;

inline Index num_chunks(Index n, Index chunk) {
    return n == 0 ? 0 : (n + chunk - 1) / chunk;
}

/// Runs fn(chunk_index, begin, end) over [0, n) split into fixed chunks.
/// Chunks may execute on different threads; fn must only write to
/// chunk-indexed or row-indexed storage.
void parallel_for_chunks(Index n, Index chunk,
                         const std::function<void(Index, Index, Index)>& fn);

inline Vector linspace(double lo, double hi, Index n) {
    return Vector::LinSpaced(n, lo, hi);
}

}  // namespace onb
