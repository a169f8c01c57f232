#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "basketminer/error.hpp"
#include "basketminer/pipeline.hpp"

namespace bm {

namespace {

using nlohmann::json;

json hurst_json(const std::optional<HurstEstimate<double>>& h) {
    if (!h) return nullptr;
    return {{"H", h->H}, {"slope", h->slope}, {"n_frequencies", h->n_frequencies_used}};
}

std::optional<HurstEstimate<double>> hurst_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return HurstEstimate<double>{j.at("H").get<double>(), j.at("n_frequencies").get<Index>(), j.at("slope").get<double>()};
}

template <typename Derived>
json vector_json(const Eigen::MatrixBase<Derived>& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vector_from(const json& a) {
    Eigen::VectorXd v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].is_null() ? std::nan("") : a[i].get<double>();
    return v;
}

double number_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

}  // namespace

void write_results_jsonl(std::ostream& out, std::span<const WindowResult> results, bool include_matrices) {
    for (const auto& r : results) {
        json j;
        j["delta"] = r.delta;
        j["window_index"] = r.window_index;
        j["start_day"] = r.start_day;
        j["status"] = r.status == WindowStatus::ok ? "ok" : "skipped";
        j["skip_reason"] = r.skip_reason;
        j["symbols"] = r.symbols;
        j["minimization_days"] = r.minimization_days;
        if (r.status == WindowStatus::ok) {
            j["lambda_min"] = r.lambda_min;
            j["spectral_gap"] = r.weights.spectral_gap;
            j["multiplicity"] = r.weights.multiplicity;
            j["degenerate"] = r.weights.degenerate;
            j["weights"] = vector_json(r.weights.e);
            j["n_min"] = r.n_min;
            j["rho_min"] = r.rho_min;
            j["rho_min_concat"] = r.rho_min_concat;
            j["hurst"] = hurst_json(r.hurst);
            json tests = json::array();
            for (const auto& t : r.tests) {
                tests.push_back({{"days", t.days},
                                 {"dates", t.dates},
                                 {"n", t.n},
                                 {"rho", t.rho},
                                 {"rho_concat", t.rho_concat},
                                 {"ci", t.ci},
                                 {"significant", t.significant},
                                 {"hurst", hurst_json(t.hurst)}});
            }
            j["tests"] = std::move(tests);
            j["missing_tests"] = r.missing_tests;
            if (include_matrices) {
                json rows = json::array();
                for (Index i = 0; i < r.c_hat.rows(); ++i) rows.push_back(vector_json(r.c_hat.row(i)));
                j["c_hat"] = std::move(rows);
            }
        }
        out << j.dump() << '\n';
    }
}

std::vector<WindowResult> read_results_jsonl(std::istream& in) {
    std::vector<WindowResult> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            WindowResult r;
            r.delta = j.at("delta").get<int>();
            r.window_index = j.at("window_index").get<Index>();
            r.start_day = j.at("start_day").get<Index>();
            r.status = j.at("status").get<std::string>() == "ok" ? WindowStatus::ok : WindowStatus::skipped;
            r.skip_reason = j.value("skip_reason", "");
            r.symbols = j.value("symbols", std::vector<int>{});
            r.minimization_days = j.value("minimization_days", std::vector<std::string>{});
            if (r.status == WindowStatus::ok) {
                r.lambda_min = number_from(j.at("lambda_min"));
                r.weights.lambda_min = r.lambda_min;
                r.weights.spectral_gap = number_from(j.at("spectral_gap"));
                r.weights.multiplicity = j.at("multiplicity").get<Index>();
                r.weights.degenerate = j.at("degenerate").get<bool>();
                r.weights.e = vector_from(j.at("weights"));
                r.n_min = j.at("n_min").get<Index>();
                r.rho_min = number_from(j.at("rho_min"));
                r.rho_min_concat = number_from(j.at("rho_min_concat"));
                r.hurst = hurst_from(j.at("hurst"));
                for (const auto& t : j.at("tests")) {
                    TestResult tr;
                    tr.days = t.at("days").get<Index>();
                    tr.dates = t.at("dates").get<std::vector<std::string>>();
                    tr.n = t.at("n").get<Index>();
                    tr.rho = number_from(t.at("rho"));
                    tr.rho_concat = number_from(t.at("rho_concat"));
                    tr.ci = number_from(t.at("ci"));
                    tr.significant = t.at("significant").get<bool>();
                    tr.hurst = hurst_from(t.at("hurst"));
                    r.tests.push_back(std::move(tr));
                }
                r.missing_tests = j.value("missing_tests", std::vector<Index>{});
                if (j.contains("c_hat")) {
                    const auto& rows = j.at("c_hat");
                    const Index n = static_cast<Index>(rows.size());
                    r.c_hat.resize(n, n);
                    for (Index i = 0; i < n; ++i) r.c_hat.row(i) = vector_from(rows[static_cast<std::size_t>(i)]).transpose();
                }
            }
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::parse_error, "results line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace bm
