#pragma once

#include <array>
#include <cstdint>

namespace seqopt {

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11). A block is a
/// pure function of (counter, key), so any replication's stream can be
/// produced independently of every other.
struct Philox4x64 {
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static Counter block(Counter counter, Key key) noexcept;
};

/// Stream for one Monte Carlo replication: key = (seed, replication), counter
/// = (block index, 0, 0, 0).
class ReplicationStream {
public:
    ReplicationStream(std::uint64_t seed, std::uint64_t replication) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double next_uniform() noexcept;

private:
    Philox4x64::Key key_;
    std::uint64_t block_index_ = 0;
    Philox4x64::Counter buffer_{};
    int position_ = 4;
};

} // namespace seqopt
