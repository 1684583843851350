#ifndef GFP_RNG_HPP
#define GFP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace gfp {

// Philox4x32-10 counter-based generator. Every draw is a pure function of
// (key, counter), so parallel replicas can consume cells in any order and
// still produce identical streams.
struct Philox {
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    struct Block {
        uint32_t v[4];
    };

    static Block block(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo) {
        uint32_t k0 = static_cast<uint32_t>(key);
        uint32_t k1 = static_cast<uint32_t>(key >> 32);
        uint32_t c0 = static_cast<uint32_t>(ctr_lo);
        uint32_t c1 = static_cast<uint32_t>(ctr_lo >> 32);
        uint32_t c2 = static_cast<uint32_t>(ctr_hi);
        uint32_t c3 = static_cast<uint32_t>(ctr_hi >> 32);
        for (int round = 0; round < 10; ++round) {
            uint64_t p0 = static_cast<uint64_t>(kMul0) * c0;
            uint64_t p1 = static_cast<uint64_t>(kMul1) * c2;
            uint32_t h0 = static_cast<uint32_t>(p0 >> 32), l0 = static_cast<uint32_t>(p0);
            uint32_t h1 = static_cast<uint32_t>(p1 >> 32), l1 = static_cast<uint32_t>(p1);
            uint32_t n0 = h1 ^ c1 ^ k0;
            uint32_t n1 = l1;
            uint32_t n2 = h0 ^ c3 ^ k1;
            uint32_t n3 = l0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return {{c0, c1, c2, c3}};
    }

    static uint64_t to_u64(uint32_t lo, uint32_t hi) {
        return (static_cast<uint64_t>(hi) << 32) | lo;
    }

    // uniform in (0,1); never returns 0 or 1
    static double u01(uint64_t bits) {
        return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // One standard normal per counter, via Box-Muller on the block.
    static double gaussian(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo) {
        Block b = block(key, ctr_hi, ctr_lo);
        double u1 = u01(to_u64(b.v[0], b.v[1]));
        double u2 = u01(to_u64(b.v[2], b.v[3]));
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Two uniforms per counter (for non-Gaussian draws).
    static void uniform2(uint64_t key, uint64_t ctr_hi, uint64_t ctr_lo, double& a, double& b) {
        Block blk = block(key, ctr_hi, ctr_lo);
        a = u01(to_u64(blk.v[0], blk.v[1]));
        b = u01(to_u64(blk.v[2], blk.v[3]));
    }
};

// Mixes a master seed with a replica index into a per-replica key.
inline uint64_t replica_key(uint64_t master_seed, uint64_t replica) {
    uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (replica + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace gfp

#endif
