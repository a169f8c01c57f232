#include "basketminer/error.hpp"

namespace bm {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::insufficient_data: return "insufficient_data";
        case Errc::degenerate_series: return "degenerate_series";
        case Errc::degenerate_stock: return "degenerate_stock";
        case Errc::contract_violation: return "contract_violation";
        case Errc::unsupported_size: return "unsupported_size";
        case Errc::embedding_failure: return "embedding_failure";
        case Errc::parse_error: return "parse_error";
        case Errc::io_error: return "io_error";
    }
    return "unknown";
}

}  // namespace bm
