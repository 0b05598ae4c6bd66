#include "cdis/grid.hpp"

#include <json.hpp>

namespace cdis {

ResidualReport summarize_residual(const std::string& name, const FieldGrid<double>& norms,
                                  double tolerance) {
    ResidualReport r;
    r.name = name;
    r.hx = norms.grid().hx();
    r.ht = norms.grid().ht();
    r.tolerance = tolerance;
    double sum = 0.0;
    long count = 0;
    for (int it = 0; it < norms.grid().nt; ++it)
        for (int ix = 0; ix < norms.grid().nx; ++ix) {
            if (norms.masked(ix, it)) continue;
            const double v = norms.at(ix, it);
            r.max_norm = std::max(r.max_norm, v);
            sum += v;
            ++count;
        }
    r.mean_norm = count > 0 ? sum / count : 0.0;
    r.masked_points = norms.masked_count();
    r.verdict = r.max_norm <= tolerance;
    return r;
}

std::string report_to_json_string(const ResidualReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["max_norm"] = r.max_norm;
    j["mean_norm"] = r.mean_norm;
    j["hx"] = r.hx;
    j["ht"] = r.ht;
    j["tolerance"] = r.tolerance;
    j["verdict"] = r.verdict ? "pass" : "fail";
    j["masked_points"] = r.masked_points;
    return j.dump();
}

}  // namespace cdis
