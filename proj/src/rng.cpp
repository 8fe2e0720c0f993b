#include "trustsiot/rng.hpp"

#include "trustsiot/io_util.hpp"

namespace trustsiot {

std::uint64_t substream_seed(std::uint64_t base_seed, std::string_view name) {
    std::uint64_t h = fnv1a64(name);
    // one splitmix round over the combination avoids correlated streams when
    // base seeds are small consecutive integers
    std::uint64_t z = base_seed ^ (h + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace trustsiot
