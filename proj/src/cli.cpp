#include "parabolica/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "parabolica/dynamics.hpp"
#include "parabolica/errors.hpp"
#include "parabolica/experiments.hpp"
#include "parabolica/parabolic.hpp"
#include "parabolica/rays.hpp"
#include "parabolica/report.hpp"

namespace parabolica::cli {
namespace {

using nlohmann::ordered_json;

double parse_real(const std::string& s, const std::string& whole) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
        throw PreconditionError("parse", "not a number: '" + whole + "'");
    }
    return v;
}

std::string complex_text(Complex z) {
    if (z.imag() == 0.0) {
        return fmt("%.15g", z.real());
    }
    return fmt("%.15g", z.real()) + (z.imag() < 0.0 ? "-" : "+") + fmt("%.15g", std::fabs(z.imag())) + "i";
}

struct SiteArgs {
    int n = 1;
    int p = 1;
    int q = 2;
    std::string c0;
    bool primitive = false;

    void attach(CLI::App* app) {
        app->add_option("--n", n, "base period");
        app->add_option("--p", p, "rotation numerator");
        app->add_option("--q", q, "rotation denominator (ignored with --primitive)");
        app->add_option("--c0", c0, "seed for the parameter; required unless closed forms apply");
        app->add_flag("--primitive", primitive, "locate a primitive root (multiplier 1)");
    }

    BifurcationSite locate() const {
        if (primitive) {
            if (c0.empty() && n != 1) {
                throw PreconditionError("locate", "--c0 seed required for primitive roots with n > 1");
            }
            return locate_primitive(n, c0.empty() ? Complex{0.25, 0.0} : parse_complex(c0));
        }
        if (c0.empty()) {
            return locate_satellite(n, p, q);
        }
        const Complex seed = parse_complex(c0);
        return locate_satellite(n, p, q, &seed);
    }
};

struct Common {
    std::size_t threads = 0;
    std::string format = "csv";
    std::string output;
    bool no_wall_time = false;
};

}  // namespace

Complex parse_complex(const std::string& text) {
    std::string s;
    for (char ch : text) {
        if (ch != ' ') {
            s.push_back(ch);
        }
    }
    if (s.empty()) {
        throw PreconditionError("parse", "empty complex number");
    }
    if (const auto comma = s.find(','); comma != std::string::npos) {
        return {parse_real(s.substr(0, comma), text), parse_real(s.substr(comma + 1), text)};
    }
    if (s.back() != 'i' && s.back() != 'j') {
        return {parse_real(s, text), 0.0};
    }
    s.pop_back();
    // Split at the last sign that is not an exponent sign or the leading sign.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    const auto imag_part = [&](const std::string& t) {
        if (t.empty() || t == "+") {
            return 1.0;
        }
        if (t == "-") {
            return -1.0;
        }
        return parse_real(t, text);
    };
    if (split == std::string::npos) {
        return {0.0, imag_part(s)};
    }
    return {parse_real(s.substr(0, split), text), imag_part(s.substr(split))};
}

Angle parse_angle(const std::string& text) {
    static const std::regex re(R"(\s*(-?\d+)\s*(?:/\s*(\d+))?\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) {
        throw PreconditionError("parse", "angle must look like p/q: '" + text + "'");
    }
    const std::int64_t num = std::stoll(m[1].str());
    const std::int64_t den = m[2].matched ? std::stoll(m[2].str()) : 1;
    return Angle(num, den);
}

std::vector<double> parse_alphas(const std::string& text) {
    std::vector<double> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const double hi = parse_real(text.substr(0, dots), text);
        const double lo = parse_real(text.substr(dots + 2), text);
        if (!(hi > 0.0) || !(lo > 0.0)) {
            throw PreconditionError("parse", "alpha range ends must be positive");
        }
        const double top = std::max(hi, lo);
        const double bottom = std::min(hi, lo);
        const int decades = static_cast<int>(std::lround(std::log10(top / bottom)));
        for (int k = 0; k <= decades; ++k) {
            // Compute each radius from its exponent so 1e-3 prints as 0.001.
            out.push_back(std::pow(10.0, std::round(std::log10(top)) - k));
        }
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double v = parse_real(item, text);
        if (!(v > 0.0)) {
            throw PreconditionError("parse", "alphas must be positive");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw PreconditionError("parse", "no alphas given");
    }
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Escape-time experiments at parabolic parameters of the Mandelbrot set", "parabolica"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    Common common;
    app.add_option("--threads", common.threads, "worker threads; 0 uses PARABOLICA_THREADS or all cores");
    app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", common.output, "write results to this file instead of standard output");
    app.add_flag("--no-wall-time", common.no_wall_time, "omit the wall time from JSON metadata");

    std::function<void(std::ostream&)> action;
    const auto started = std::chrono::steady_clock::now();
    const auto meta = [&](std::string command) {
        RunMetadata m;
        m.command = std::move(command);
        if (!common.no_wall_time) {
            m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        }
        return m;
    };

    // escape
    std::string esc_c = "0";
    double esc_R = kDefaultEscapeRadius;
    std::uint64_t esc_cap = kDefaultIterationCap;
    auto* escape = app.add_subcommand("escape", "escape time of the critical orbit at one parameter");
    escape->add_option("--c", esc_c, "parameter, as a+bi or a,b")->required();
    escape->add_option("--R", esc_R, "escape radius")->check(CLI::Range(2.0, 1e150));
    escape->add_option("--cap", esc_cap, "iteration cap")->check(CLI::PositiveNumber);
    escape->callback([&] {
        action = [&](std::ostream& os) {
            const Complex c = parse_complex(esc_c);
            const EscapeOutcome e = escape_time(c, esc_R, esc_cap);
            if (common.format == "json") {
                ordered_json j{{"c_re", c.real()}, {"c_im", c.imag()}, {"escaped", e.escaped}, {"N", e.n}};
                os << j.dump(2) << '\n';
            } else if (e.escaped) {
                os << "escaped at n=" << e.n << '\n';
            } else {
                os << "non-escaped at cap " << esc_cap << '\n';
            }
        };
    });

    // locate / tau
    SiteArgs loc_site;
    auto* locate = app.add_subcommand("locate", "locate a parabolic parameter");
    loc_site.attach(locate);
    SiteArgs tau_site;
    auto* tau = app.add_subcommand("tau", "site report: multiplier derivative, tau and consistency checks");
    tau_site.attach(tau);
    const auto site_report = [&](const SiteArgs& args, bool full) {
        return [&, full](std::ostream& os) {
            const BifurcationSite s = args.locate();
            ordered_json j;
            j["c0"] = complex_text(s.c0);
            j["n"] = s.n;
            j["p"] = s.p;
            j["q"] = s.q;
            j["z0"] = complex_text(s.z0);
            j["lambda"] = complex_text(s.lambda);
            j["dmu_qn"] = complex_text(s.dmu_qn);
            j["tau"] = fmt("%.10g", s.tau);
            if (full) {
                j["qn"] = s.qn();
                j["abs_dmu_qn"] = fmt("%.12g", std::abs(s.dmu_qn));
                if (!s.primitive()) {
                    j["derivative_residual"] = fmt("%.3g", satellite_derivative_residual(s));
                }
                std::string dirs;
                for (const Complex& d : ray_directions(s)) {
                    dirs += (dirs.empty() ? "" : " ") + complex_text(d);
                }
                j["ray_directions"] = dirs;
            }
            if (common.format == "json") {
                os << j.dump(2) << '\n';
                return;
            }
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                os << (first ? "" : ", ") << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump());
                first = false;
            }
            os << '\n';
        };
    };
    locate->callback([&] { action = site_report(loc_site, false); });
    tau->callback([&] { action = site_report(tau_site, true); });

    // ray
    std::string ray_theta = "1/3";
    double pot_start = 10.0;
    double pot_end = 1e-8;
    int ray_steps = 8;
    auto* ray = app.add_subcommand("ray", "trace a parameter ray and export its points");
    ray->add_option("--theta", ray_theta, "external angle p/q in turns");
    ray->add_option("--pot-start", pot_start, "starting potential")->check(CLI::PositiveNumber);
    ray->add_option("--pot-end", pot_end, "final potential")->check(CLI::PositiveNumber);
    ray->add_option("--steps", ray_steps, "points per halving of the potential")->check(CLI::PositiveNumber);
    ray->callback([&] {
        action = [&](std::ostream& os) {
            const RayTrace t = trace_ray(parse_angle(ray_theta), pot_start, pot_end, ray_steps);
            if (common.format == "json") {
                ordered_json j;
                j["theta_num"] = t.theta.num();
                j["theta_den"] = t.theta.den();
                j["landing_re"] = t.landing_estimate.real();
                j["landing_im"] = t.landing_estimate.imag();
                j["points"] = ordered_json::array();
                for (const RayPoint& p : t.points) {
                    j["points"].push_back({{"potential", format_pow2(p.log2_potential)},
                                           {"re", p.c.real()},
                                           {"im", p.c.imag()}});
                }
                os << j.dump(2) << '\n';
            } else {
                write_ray_csv(os, t);
            }
        };
    });

    // table1
    std::string alphas_text = "1e-1..1e-4";
    CircleOptions circle;
    auto* table1 = app.add_subcommand("table1", "circle-minimum escape times at the four reference sites");
    table1->add_option("--alphas", alphas_text, "radii: comma list or decade range like 1e-1..1e-4");
    table1->add_option("--samples", circle.samples, "uniform samples per circle")->check(CLI::Range(1024, 1 << 26));
    table1->add_option("--R", circle.R, "escape radius")->check(CLI::Range(2.0, 1e150));
    table1->add_flag("!--no-refine", circle.refine_gaps, "skip the scan around the ray directions");
    table1->callback([&] {
        action = [&](std::ostream& os) {
            circle.threads = common.threads;
            const auto recs = reference_table(reference_sites(), parse_alphas(alphas_text), circle);
            if (common.format == "json") {
                RunMetadata m = meta("table1");
                m.R = circle.R;
                m.samples = circle.samples;
                write_records_json(os, recs, m);
            } else {
                write_records_csv(os, recs);
            }
            for (const auto& r : recs) {
                if (!r.ok()) {
                    err << "cell |alpha|=" << r.alpha_abs << " at " << complex_text(r.site_c0) << ": " << r.error
                        << '\n';
                }
            }
        };
    });

    // ray-pi
    SiteArgs rp_site;
    std::string rp_theta = "1/3";
    int rp_count = 20;
    int rp_first = 1;
    RunOptions run_opts;
    auto* raypi = app.add_subcommand("ray-pi", "escape times along a landing ray (distances 0.1*2^{-k/2})");
    rp_site.attach(raypi);
    raypi->add_option("--theta", rp_theta, "landing angle p/q");
    raypi->add_option("--count", rp_count, "number of ray points")->check(CLI::NonNegativeNumber);
    raypi->add_option("--first", rp_first, "index k of the first point")->check(CLI::PositiveNumber);
    raypi->add_option("--R", run_opts.R, "escape radius")->check(CLI::Range(2.0, 1e150));
    raypi->add_option("--cap", run_opts.cap, "iteration cap")->check(CLI::PositiveNumber);
    raypi->callback([&] {
        action = [&](std::ostream& os) {
            run_opts.threads = common.threads;
            const auto recs =
                ray_pi_experiment(rp_site.locate(), parse_angle(rp_theta), rp_count, run_opts, rp_first);
            if (common.format == "json") {
                RunMetadata m = meta("ray-pi");
                m.R = run_opts.R;
                m.cap = run_opts.cap;
                write_records_json(os, recs, m);
            } else {
                write_records_csv(os, recs);
            }
        };
    });

    // primitive-pi
    int pp_n = 1;
    std::string pp_c0 = "0.25";
    int pp_count = 3;
    RunOptions pp_opts;
    auto* primpi = app.add_subcommand("primitive-pi", "escape times at c0 + 10^{-2k} along the primitive ray");
    primpi->add_option("--n", pp_n, "period of the component");
    primpi->add_option("--c0", pp_c0, "seed for the root");
    primpi->add_option("--count", pp_count, "number of points")->check(CLI::NonNegativeNumber);
    primpi->add_option("--R", pp_opts.R, "escape radius")->check(CLI::Range(2.0, 1e150));
    primpi->add_option("--cap", pp_opts.cap, "iteration cap")->check(CLI::PositiveNumber);
    primpi->callback([&] {
        action = [&](std::ostream& os) {
            pp_opts.threads = common.threads;
            const auto recs = primitive_pi_experiment(locate_primitive(pp_n, parse_complex(pp_c0)), pp_count, pp_opts);
            if (common.format == "json") {
                RunMetadata m = meta("primitive-pi");
                m.R = pp_opts.R;
                m.cap = pp_opts.cap;
                write_records_json(os, recs, m);
            } else {
                write_records_csv(os, recs);
            }
        };
    });

    // thm2
    SiteArgs t2_site;
    std::string t2_theta = "1/3";
    int t2_count = 20;
    double t2_a = 8.0;
    int t2_samples = 64;
    std::uint64_t t2_seed = 1;
    RunOptions t2_opts;
    auto* thm2 = app.add_subcommand("thm2", "escape-time spread in disks beside the ray");
    t2_site.attach(thm2);
    thm2->add_option("--theta", t2_theta, "landing angle p/q");
    thm2->add_option("--count", t2_count, "number of ray points")->check(CLI::NonNegativeNumber);
    thm2->add_option("--a", t2_a, "disk radius is exterior distance / a")->check(CLI::PositiveNumber);
    thm2->add_option("--samples", t2_samples, "samples per disk")->check(CLI::NonNegativeNumber);
    thm2->add_option("--seed", t2_seed, "PRNG seed");
    thm2->add_option("--cap", t2_opts.cap, "iteration cap")->check(CLI::PositiveNumber);
    thm2->callback([&] {
        action = [&](std::ostream& os) {
            t2_opts.threads = common.threads;
            const auto recs = off_ray_stability(t2_site.locate(), parse_angle(t2_theta), t2_count, t2_a,
                                                  t2_samples, t2_seed, t2_opts);
            if (common.format == "json") {
                RunMetadata m = meta("thm2");
                m.cap = t2_opts.cap;
                m.samples = t2_samples;
                m.seed = t2_seed;
                write_stability_json(os, recs, m);
            } else {
                write_stability_csv(os, recs);
            }
        };
    });

    // gates
    SiteArgs g_site;
    std::string g_alpha = "0,0.001";
    auto* gates = app.add_subcommand("gates", "split fixed points, holomorphic indices and the lifted phase");
    g_site.attach(gates);
    gates->add_option("--alpha", g_alpha, "perturbation c - c0");
    gates->callback([&] {
        action = [&](std::ostream& os) {
            const BifurcationSite s = g_site.locate();
            const Complex alpha = parse_complex(g_alpha);
            const SplitFixedPoints sp = split_fixed_points(s, alpha);
            const WellBehavedReport wb = wellbehaved_diagnostic(sp);
            const Complex lifted = lifted_phase_prediction(s, alpha);
            if (common.format == "json") {
                ordered_json j;
                j["c0"] = complex_text(s.c0);
                j["alpha"] = complex_text(alpha);
                j["points"] = ordered_json::array();
                for (std::size_t i = 0; i < wb.indices.size(); ++i) {
                    const PeriodicOrbit& o = i == 0 ? sp.sigma : sp.varsigma[i - 1];
                    j["points"].push_back({{"kind", i == 0 ? "sigma" : "varsigma"},
                                           {"z", complex_text(o.point)},
                                           {"multiplier", complex_text(o.multiplier)},
                                           {"index", complex_text(wb.indices[i])},
                                           {"jind", complex_text(jind(o.multiplier))}});
                }
                j["min_subset_imag"] = wb.min_subset_imag;
                j["index_sum"] = complex_text(wb.total);
                j["ray_sign"] = wb.ray_sign;
                j["lifted_phase"] = complex_text(lifted);
                j["qn_times_abs_lifted_phase"] = s.qn() * std::abs(lifted);
                os << j.dump(2) << '\n';
                return;
            }
            os << "kind,z_re,z_im,multiplier_re,multiplier_im,index_re,index_im,jind_re,jind_im\n";
            for (std::size_t i = 0; i < wb.indices.size(); ++i) {
                const PeriodicOrbit& o = i == 0 ? sp.sigma : sp.varsigma[i - 1];
                const Complex jv = jind(o.multiplier);
                os << (i == 0 ? "sigma" : "varsigma") << ',' << fmt("%.15g", o.point.real()) << ','
                   << fmt("%.15g", o.point.imag()) << ',' << fmt("%.15g", o.multiplier.real()) << ','
                   << fmt("%.15g", o.multiplier.imag()) << ',' << fmt("%.10g", wb.indices[i].real()) << ','
                   << fmt("%.10g", wb.indices[i].imag()) << ',' << fmt("%.10g", jv.real()) << ','
                   << fmt("%.10g", jv.imag()) << '\n';
            }
            os << "\nmin_subset_imag,index_sum_re,index_sum_im,ray_sign,lifted_re,lifted_im,qn_abs_lifted\n"
               << fmt("%.10g", wb.min_subset_imag) << ',' << fmt("%.10g", wb.total.real()) << ','
               << fmt("%.10g", wb.total.imag()) << ',' << wb.ray_sign << ',' << fmt("%.10g", lifted.real()) << ','
               << fmt("%.10g", lifted.imag()) << ',' << fmt("%.10g", s.qn() * std::abs(lifted)) << '\n';
        };
    });

    // demo-classic
    int demo_count = 5;
    auto* demo = app.add_subcommand("demo-classic",
                                    "vertical line at -3/4, real line at 1/4 and parabola at -5/4");
    demo->add_option("--count", demo_count, "number of decades")->check(CLI::Range(1, 8));
    demo->callback([&] {
        action = [&](std::ostream& os) {
            ordered_json rows = ordered_json::array();
            for (int k = 1; k <= demo_count; ++k) {
                const double t = std::pow(10.0, -k);
                const std::uint64_t nv = escape_time(Complex{-0.75, t}).n;
                const std::uint64_t np = escape_time(Complex{-1.25 - t * t, t}).n;
                rows.push_back({{"curve", "vertical_-3/4"}, {"t", t}, {"N", nv}, {"product", nv * t}});
                rows.push_back({{"curve", "parabola_-5/4"}, {"t", t}, {"N", np}, {"product", np * t}});
                if (k <= 4) {
                    const double s = t * t;
                    const std::uint64_t nr = escape_time(Complex{0.25 + s, 0.0}).n;
                    rows.push_back({{"curve", "real_1/4"}, {"t", s}, {"N", nr}, {"product", nr * t}});
                }
            }
            if (common.format == "json") {
                os << rows.dump(2) << '\n';
                return;
            }
            os << "curve,t,N,product\n";
            for (const auto& r : rows) {
                os << r["curve"].get<std::string>() << ',' << fmt("%.10g", r["t"].get<double>()) << ','
                   << r["N"].get<std::uint64_t>() << ',' << fmt("%.9f", r["product"].get<double>()) << '\n';
            }
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Prints help for the subcommand that asked for it, or the parse error.
        return app.exit(e, out, err) == 0 ? kExitOk : kExitInput;
    }
    if (!action) {
        err << "error: no subcommand\n";
        return kExitInput;
    }
    try {
        if (!common.output.empty()) {
            std::ofstream file(common.output, std::ios::binary);
            if (!file) {
                err << "error: cannot open " << common.output << '\n';
                return kExitInput;
            }
            action(file);
        } else {
            action(out);
        }
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}

}  // namespace parabolica::cli
