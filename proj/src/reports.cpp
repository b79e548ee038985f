#include "trimap/reports.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace trimap {

namespace {

using nlohmann::json;

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

json meta(bool with_timestamp) {
    json m;
    m["schema_version"] = 1;
    if (with_timestamp) m["timestamp"] = timestamp_now();
    return m;
}

// 17 significant digits keeps doubles round-trippable through text.
json num(double v) { return json::parse(format_double(v)); }

json num_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    if (std::isfinite(v))
        std::snprintf(buf, sizeof buf, "%.17g", v);
    else
        std::snprintf(buf, sizeof buf, "%s", v > 0 ? "1e999" : (v < 0 ? "-1e999" : "0"));
    return buf;
}

void write_frequency_csv(std::ostream& os, const FrequencyReport& rep) {
    os << "k,analytic,numeric,empirical,abs_error\n";
    auto cell = [&](const std::vector<double>& v, std::size_t i) {
        return i < v.size() ? format_double(v[i]) : std::string();
    };
    for (std::int64_t k = 0; k <= rep.k_max; ++k) {
        auto i = static_cast<std::size_t>(k);
        std::string a = cell(rep.analytic, i), n = cell(rep.numeric, i), e = cell(rep.empirical, i);
        std::string err;
        if (!a.empty() && !n.empty())
            err = format_double(std::abs(rep.analytic[i] - rep.numeric[i]));
        os << k << ',' << a << ',' << n << ',' << e << ',' << err << '\n';
    }
    std::string eo = rep.empirical.empty() ? std::string() : format_double(rep.empirical_overflow);
    os << "overflow," << format_double(rep.analytic_overflow) << ','
       << format_double(rep.numeric_overflow) << ',' << eo << ','
       << format_double(std::abs(rep.analytic_overflow - rep.numeric_overflow)) << '\n';
}

std::string frequency_json(const FrequencyReport& rep, bool with_timestamp) {
    json j;
    j["meta"] = meta(with_timestamp);
    j["k_max"] = rep.k_max;
    j["analytic"] = num_array(rep.analytic);
    j["numeric"] = num_array(rep.numeric);
    j["empirical"] = num_array(rep.empirical);
    j["analytic_overflow"] = num(rep.analytic_overflow);
    j["numeric_overflow"] = num(rep.numeric_overflow);
    j["empirical_overflow"] = num(rep.empirical_overflow);
    j["orbit_length"] = rep.orbit_length;
    j["steps_taken"] = rep.steps_taken;
    j["seed"] = rep.seed_description;
    j["excluded_steps"] = rep.excluded_steps;
    j["terminated"] = rep.terminated;
    j["termination_index"] = rep.termination_index;
    j["degenerate_seed_warning"] = rep.degenerate_seed_warning;
    return j.dump(2);
}

std::string spectral_json(const SpectralReport& rep, bool with_timestamp) {
    json j;
    j["meta"] = meta(with_timestamp);
    j["eigenvalue_estimate"] = num(rep.eigenvalue_estimate);
    j["residual_sup"] = num(rep.residual_sup);
    j["gap_estimate"] = num(rep.gap_estimate);
    j["gap_note"] = "exploratory: the theory asserts only the leading eigenvalue";
    j["iterations"] = rep.iterations;
    j["history"] = num_array(rep.history);
    j["renorm_factors"] = num_array(rep.renorm_factors);
    j["grid"] = {rep.n_x, rep.n_u};
    j["restriction"] = rep.restriction;
    return j.dump(2);
}

std::string nuclear_expansion_json(const NuclearExpansion& e, bool with_timestamp) {
    json j;
    j["meta"] = meta(with_timestamp);
    j["K"] = e.K;
    j["coefficients"] = num_array(e.coefficients);
    j["residual_bound"] = num(e.residual_bound);
    j["converged"] = e.converged;
    j["coefficients_eventually_decreasing"] = e.coefficients_eventually_decreasing;
    return j.dump(2);
}

void write_identity_csv(std::ostream& os, const std::vector<IdentityRow>& rows) {
    os << "suite,inputs,lhs,rhs,abs_diff\n";
    for (const auto& r : rows)
        os << r.suite << ',' << r.inputs << ',' << format_double(r.lhs) << ','
           << format_double(r.rhs) << ',' << format_double(std::abs(r.lhs - r.rhs)) << '\n';
}

} // namespace trimap
