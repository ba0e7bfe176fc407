#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace batchps {

using Complex = std::complex<double>;

// Error taxonomy maps onto CLI exit codes: invalid input -> 2, compute -> 1.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binomial coefficient in floating point; log-space product beyond b = 40 to
// stay overflow-safe.
double binomial(int b, int l);

// Stable 64-bit FNV-1a, used for content-addressed artifact names.
std::uint64_t fnv1a64(const std::string& data);

std::string hex64(std::uint64_t v);

}  // namespace batchps
