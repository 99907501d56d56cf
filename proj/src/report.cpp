#include "parabolica/report.hpp"

#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace parabolica {
namespace {

using nlohmann::ordered_json;

ordered_json metadata_json(const RunMetadata& meta) {
    ordered_json m;
    m["command"] = meta.command;
    m["R"] = meta.R;
    m["cap"] = meta.cap;
    m["samples"] = meta.samples;
    m["seed"] = meta.seed;
    if (meta.wall_time_s) {
        m["wall_time_s"] = *meta.wall_time_s;
    } else {
        m["wall_time_s"] = nullptr;
    }
    return m;
}

}  // namespace

std::string fmt(const char* format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, value);
    return buf;
}

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
    os << "site_re,site_im,qn,alpha_abs,N,scaled,residual\n";
    for (const ExperimentRecord& r : records) {
        os << fmt("%.15g", r.site_c0.real()) << ',' << fmt("%.15g", r.site_c0.imag()) << ',' << r.qn << ','
           << fmt("%.10g", r.alpha_abs) << ',';
        if (r.ok()) {
            os << r.N << ',' << fmt("%.9f", r.scaled) << ',' << fmt("%.9f", r.residual) << '\n';
        } else {
            os << ",,\n";
        }
    }
}

void write_records_json(std::ostream& os, const std::vector<ExperimentRecord>& records, const RunMetadata& meta) {
    ordered_json doc;
    doc["metadata"] = metadata_json(meta);
    doc["records"] = ordered_json::array();
    for (const ExperimentRecord& r : records) {
        ordered_json j;
        j["site_re"] = r.site_c0.real();
        j["site_im"] = r.site_c0.imag();
        j["qn"] = r.qn;
        j["alpha_abs"] = r.alpha_abs;
        if (r.ok()) {
            j["N"] = r.N;
            j["scaled"] = r.scaled;
            j["residual"] = r.residual;
        } else {
            j["error"] = r.error;
        }
        doc["records"].push_back(std::move(j));
    }
    os << doc.dump(2) << '\n';
}

void write_stability_csv(std::ostream& os, const std::vector<StabilityRecord>& records) {
    os << "t_index,c_re,c_im,N_ray,samples,max_dev,disk_radius\n";
    for (const StabilityRecord& r : records) {
        os << r.t_index << ',' << fmt("%.17g", r.c_on_ray.real()) << ',' << fmt("%.17g", r.c_on_ray.imag()) << ','
           << r.N_ray << ',' << r.samples << ',' << r.max_dev << ',' << fmt("%.10g", r.disk_radius) << '\n';
    }
}

void write_stability_json(std::ostream& os, const std::vector<StabilityRecord>& records, const RunMetadata& meta) {
    ordered_json doc;
    doc["metadata"] = metadata_json(meta);
    doc["records"] = ordered_json::array();
    for (const StabilityRecord& r : records) {
        doc["records"].push_back({{"t_index", r.t_index},
                                  {"c_re", r.c_on_ray.real()},
                                  {"c_im", r.c_on_ray.imag()},
                                  {"N_ray", r.N_ray},
                                  {"samples", r.samples},
                                  {"max_dev", r.max_dev},
                                  {"disk_radius", r.disk_radius}});
    }
    os << doc.dump(2) << '\n';
}

void write_transit_csv(std::ostream& os, const TransitReport& report) {
    os << "alpha_abs,N,predicted,D\n";
    for (const TransitRow& r : report.rows) {
        os << fmt("%.10g", r.alpha_abs) << ',' << r.N << ',' << fmt("%.6f", r.predicted) << ','
           << fmt("%.6f", r.D) << '\n';
    }
    os << "\nmax_D,slope\n" << fmt("%.6f", report.max_D) << ',' << fmt("%.6g", report.slope) << '\n';
}

void write_transit_json(std::ostream& os, const TransitReport& report, const RunMetadata& meta) {
    ordered_json doc;
    doc["metadata"] = metadata_json(meta);
    doc["rows"] = ordered_json::array();
    for (const TransitRow& r : report.rows) {
        doc["rows"].push_back({{"alpha_abs", r.alpha_abs}, {"N", r.N}, {"predicted", r.predicted}, {"D", r.D}});
    }
    doc["max_D"] = report.max_D;
    doc["slope"] = report.slope;
    os << doc.dump(2) << '\n';
}

}  // namespace parabolica
