#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace bm {

/// Fixed-width histogram with bins aligned on multiples of the width.
class Histogram {
public:
    struct Bin {
        double left;
        double right;
        std::size_t count;
    };

    explicit Histogram(double width = 0.01);

    void add(double x);  // non-finite values are ignored
    template <typename Range>
    void add_all(const Range& xs) {
        for (double x : xs) add(x);
    }

    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] std::size_t total() const noexcept { return total_; }
    /// Contiguous bins from the lowest to the highest occupied one.
    [[nodiscard]] std::vector<Bin> bins() const;

private:
    double width_;
    std::size_t total_ = 0;
    std::map<long long, std::size_t> counts_;
};

/// Shortest round-trip decimal representation; "nan" for NaN.
[[nodiscard]] std::string format_double(double x);

void write_histogram_csv(std::ostream& out, const Histogram& h);
void write_histogram_csv(const std::filesystem::path& path, const Histogram& h);

/// Opens `path` for binary (LF-preserving) writing, creating parent
/// directories; throws Error(io_error) on failure.
[[nodiscard]] std::ofstream open_output(const std::filesystem::path& path);

}  // namespace bm
