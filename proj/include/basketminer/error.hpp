#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bm {

enum class Errc {
    insufficient_data,
    degenerate_series,
    degenerate_stock,
    contract_violation,
    unsupported_size,
    embedding_failure,
    parse_error,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type used across the library; the code is stable, the
/// message is for humans.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace bm
