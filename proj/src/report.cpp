#include "basketminer/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "basketminer/error.hpp"

namespace bm {

Histogram::Histogram(double width) : width_(width) {
    if (!(width > 0.0)) throw Error(Errc::contract_violation, "histogram bin width must be positive");
}

void Histogram::add(double x) {
    if (!std::isfinite(x)) return;
    ++counts_[static_cast<long long>(std::floor(x / width_))];
    ++total_;
}

std::vector<Histogram::Bin> Histogram::bins() const {
    std::vector<Bin> out;
    if (counts_.empty()) return out;
    const long long lo = counts_.begin()->first;
    const long long hi = counts_.rbegin()->first;
    for (long long b = lo; b <= hi; ++b) {
        const auto it = counts_.find(b);
        out.push_back({static_cast<double>(b) * width_, static_cast<double>(b + 1) * width_,
                       it == counts_.end() ? 0 : it->second});
    }
    return out;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, p) : std::string("nan");
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    out << "bin_left,bin_right,count\n";
    for (const auto& b : h.bins()) out << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << '\n';
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
    auto out = open_output(path);
    write_histogram_csv(out, h);
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    return out;
}

}  // namespace bm
