#include "seqopt/rng.hpp"

namespace seqopt {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) noexcept {
    const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(product >> 64);
    lo = static_cast<std::uint64_t>(product);
}

} // namespace

Philox4x64::Counter Philox4x64::block(Counter c, Key k) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

ReplicationStream::ReplicationStream(std::uint64_t seed, std::uint64_t replication) noexcept
    : key_{seed, replication} {}

std::uint64_t ReplicationStream::next_u64() noexcept {
    if (position_ == 4) {
        buffer_ = Philox4x64::block({block_index_++, 0, 0, 0}, key_);
        position_ = 0;
    }
    return buffer_[static_cast<std::size_t>(position_++)];
}

double ReplicationStream::next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

} // namespace seqopt
