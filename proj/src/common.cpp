#include <cstdint>
#include <string_view>

#include "lfm/error.hpp"
#include "lfm/random.hpp"

namespace lfm {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Parse: return "parse";
        case ErrorKind::DuplicateEdge: return "duplicate-edge";
        case ErrorKind::InsufficientNormal: return "insufficient-normal";
        case ErrorKind::Range: return "range";
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::NoPairs: return "no-pairs";
        case ErrorKind::DegenerateTraining: return "degenerate-training";
        case ErrorKind::UndefinedMetric: return "undefined-metric";
        case ErrorKind::PoolExhausted: return "pool-exhausted";
        case ErrorKind::Protocol: return "protocol";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t z = master ^ h ^ (index * 0x9E3779B97F4A7C15ULL);
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace lfm
