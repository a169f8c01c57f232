#include "basketminer/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bm {

std::size_t thread_count() {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* cap = std::getenv("BASKET_MINER_THREADS")) {
        try {
            const auto v = std::stoul(cap);
            if (v >= 1 && v < n) n = v;
        } catch (const std::exception&) {
        }
    }
    return n;
}

}  // namespace bm
