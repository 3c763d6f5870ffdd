// Command-line front end: reflector checks, cavity scattering, convergence
// sweeps, transport solves and body assembly.
//
// Exit codes: 0 ok, 2 tolerance or construction failure, 64 usage error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <retroscatter/billiard.hpp>
#include <retroscatter/cavity.hpp>
#include <retroscatter/error.hpp>
#include <retroscatter/measure.hpp>
#include <retroscatter/serialize.hpp>
#include <retroscatter/transport.hpp>

using namespace retroscatter;
using nlohmann::json;

namespace
{
constexpr int exit_ok = 0;
constexpr int exit_tolerance = 2;
constexpr int exit_usage = 64;

// Thrown for invalid input detected before any expensive work
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::degenerate_angles:
        case ErrorCode::angle_out_of_range:
        case ErrorCode::invalid_argument:
        case ErrorCode::invalid_involution:
        case ErrorCode::not_normalized:
        case ErrorCode::parse_error:
        case ErrorCode::out_of_range:
        case ErrorCode::index_out_of_range:
        case ErrorCode::grid_mismatch: return exit_usage;
        default: return exit_tolerance;
    }
}

struct CommonOptions
{
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::uint64_t samples = 100'000;
    std::string out;
    int max_bounces = default_max_bounces;
};

void add_common(CLI::App* cmd, CommonOptions& o, std::uint64_t default_samples)
{
    o.samples = default_samples;
    cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("--samples", o.samples, "Number of particles")->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output directory (default $RETROSCATTER_OUT_DIR or .)");
    cmd->add_option("--max-bounces", o.max_bounces, "Bounce cap per trajectory")
        ->capture_default_str()->check(CLI::Range(2, 100'000'000));
}

std::filesystem::path output_dir(CommonOptions const& o)
{
    std::string dir = o.out;
    if (dir.empty())
    {
        char const* env = std::getenv("RETROSCATTER_OUT_DIR");
        dir = env && *env ? env : ".";
    }
    std::filesystem::create_directories(dir);
    return dir;
}

void write(std::filesystem::path const& dir, std::string const& name, std::string const& text)
{
    write_text_file((dir / name).string(), text);
}

Involution read_sigma(std::vector<int> const& list, std::string const& file)
{
    if (!file.empty())
    {
        return involution_from_json(read_text_file(file));
    }
    if (list.empty())
    {
        throw UsageError("an involution is required (--sigma or --sigma-file)");
    }
    return Involution(list);
}

void print_json(json const& j)
{
    std::printf("%s\n", j.dump(2).c_str());
}

std::string csv_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

//---------------------------------------------------------------------------//
// reflector
//---------------------------------------------------------------------------//

struct ReflectorArgs
{
    double phi1 = 0;
    double phi2 = 0;
    double delta = 1e-2;
    CommonOptions common;
};

int cmd_reflector(ReflectorArgs const& a)
{
    constexpr double derivative_tol = 1e-4;
    // Validates the angles before any tracing
    Reflector r = make_reflector(a.phi1, a.phi2, a.delta);
    TwoBounceDerivatives d = two_bounce_derivatives(a.phi1, a.phi2);
    double c0 = empirical_c0(r);
    ThreeBounceReport sweep = three_bounce_sweep(r, 0.5 * c0, a.common.samples, a.common.seed);

    double dphi_err = std::abs(d.dphi_plus_dphi / d.expected_dphi - 1);
    double dxi_err = std::abs(std::abs(d.dxi_plus_dxi) - 1);
    bool ok = dphi_err <= derivative_tol && dxi_err <= derivative_tol && sweep.three == sweep.traced;
    json report{{"phi1", a.phi1},
                {"phi2", a.phi2},
                {"delta", a.delta},
                {"dphi_plus_dphi", d.dphi_plus_dphi},
                {"expected_dphi", d.expected_dphi},
                {"dxi_plus_dxi", d.dxi_plus_dxi},
                {"dphi_relative_error", dphi_err},
                {"dxi_error", dxi_err},
                {"c0", c0},
                {"window", 0.5 * c0},
                {"traced", sweep.traced},
                {"three_bounce", sweep.three},
                {"max_linear_residual", sweep.max_residual},
                {"ok", ok}};
    auto dir = output_dir(a.common);
    write(dir, "reflector.json", to_json(r));
    write(dir, "reflector_report.json", report.dump(2));
    print_json(report);
    return ok ? exit_ok : exit_tolerance;
}

//---------------------------------------------------------------------------//
// cavity
//---------------------------------------------------------------------------//

struct CavityArgs
{
    std::vector<int> sigma;
    std::string sigma_file;
    double r = 5;
    std::optional<double> delta;
    double p = 1.5;
    int channel = 0;
    int bins = 16;
    CommonOptions common;
};

int cmd_cavity(CavityArgs const& a)
{
    Involution sigma = read_sigma(a.sigma, a.sigma_file);
    double delta = a.delta.value_or(std::pow(a.r, -a.p));
    Cavity cavity = build_cavity(sigma, a.r, delta);
    if (a.channel > 0)
    {
        cavity = extend_with_channel(cavity, a.channel);
    }
    SamplingScheme scheme{a.common.samples, SamplingScheme::Generator::lambda_importance, a.common.seed};
    Ensemble e = scatter_ensemble(cavity, scheme, {a.common.max_bounces, a.common.workers});
    MeasureGrid g = empirical_measure(std::span<ScatterRecord const>(e.records), a.bins, a.common.seed);
    MeasureGrid target = a.bins % sigma.size() == 0 ? nu_sigma(sigma, a.bins)
                                                     : nu_sigma_resampled(sigma, a.bins);

    json report{{"sigma", sigma.one_based()},
                {"r", a.r},
                {"delta", delta},
                {"channel_n", a.channel},
                {"arcs", cavity.boundary().size()},
                {"samples", a.common.samples},
                {"seed", a.common.seed},
                {"m_bins", a.bins},
                {"summary", json::parse(to_json(e.summary))},
                {"distance_to_nu_sigma", grid_distance(g, target)},
                {"statistical_check", check_measure_statistical(g)},
                {"F", functional_F(g)}};
    auto dir = output_dir(a.common);
    write(dir, "records.csv", records_csv(e.records));
    write(dir, "cavity.json", to_json(cavity));
    write(dir, "grid.json", to_json(g));
    write(dir, "summary.json", to_json(e.summary));
    write(dir, "cavity_report.json", report.dump(2));
    print_json(report);
    return exit_ok;
}

//---------------------------------------------------------------------------//
// converge
//---------------------------------------------------------------------------//

struct ConvergeArgs
{
    std::vector<int> sigma;
    std::string sigma_file;
    std::vector<double> r{10, 30, 100};
    double p = 1.5;
    std::vector<int> bins{8};
    CommonOptions common;
};

int cmd_converge(ConvergeArgs const& a)
{
    Involution sigma = read_sigma(a.sigma, a.sigma_file);
    if (!(a.p > 1))
    {
        throw UsageError("--p must exceed 1 so that delta = o(1/r)");
    }
    for (int m : a.bins)
    {
        if (m < 1)
        {
            throw UsageError("every --bins entry must be positive");
        }
    }
    for (double r : a.r)
    {
        if (!(r > 1))
        {
            throw UsageError("every --r entry must exceed 1");
        }
    }

    std::string csv = "r,delta,m_bins,distance,mean_n,frac_n_sigma,status\n";
    json rows = json::array();
    bool failed = false;
    for (double r : a.r)
    {
        double delta = std::pow(r, -a.p);
        try
        {
            Cavity c = build_cavity(sigma, r, delta);
            SamplingScheme scheme{a.common.samples, SamplingScheme::Generator::lambda_importance,
                                  a.common.seed};
            Ensemble e = scatter_ensemble(c, scheme, {a.common.max_bounces, a.common.workers});
            std::uint64_t hit = 0;
            for (auto const& rec : e.records)
            {
                int cell = lower_cell(rec.phi, sigma.size());
                int expected = sigma.fixes(cell) ? 2 : 5;
                hit += rec.status == ScatterStatus::ok && rec.bounces == expected;
            }
            double frac = double(hit) / double(e.records.size());
            for (int m : a.bins)
            {
                MeasureGrid g = empirical_measure(std::span<ScatterRecord const>(e.records), m,
                                                  a.common.seed);
                MeasureGrid target = m % sigma.size() == 0 ? nu_sigma(sigma, m)
                                                           : nu_sigma_resampled(sigma, m);
                double dist = grid_distance(g, target);
                csv += csv_number(r) + "," + csv_number(delta) + "," + std::to_string(m) + ","
                       + csv_number(dist) + "," + csv_number(e.summary.mean_bounces) + ","
                       + csv_number(frac) + ",ok\n";
                rows.push_back({{"r", r}, {"delta", delta}, {"m_bins", m}, {"distance", dist},
                                {"mean_n", e.summary.mean_bounces}, {"frac_n_sigma", frac},
                                {"status", "ok"}});
            }
        }
        catch (Error const& e)
        {
            if (e.code() != ErrorCode::packing_failure)
            {
                throw;
            }
            failed = true;
            std::fprintf(stderr, "r = %g: %s\n", r, e.what());
            csv += csv_number(r) + "," + csv_number(delta) + ",,,,," + to_string(e.code()) + "\n";
            rows.push_back({{"r", r}, {"delta", delta}, {"status", to_string(e.code())}});
        }
    }
    auto dir = output_dir(a.common);
    write(dir, "converge.csv", csv);
    write(dir, "converge.json", rows.dump(2));
    std::printf("%s", csv.c_str());
    return failed ? exit_tolerance : exit_ok;
}

//---------------------------------------------------------------------------//
// transport
//---------------------------------------------------------------------------//

struct TransportArgs
{
    std::vector<int> bins{16, 32, 64, 128};
    std::string sense = "both";
    bool plain = false;
    std::string out;
};

int cmd_transport(TransportArgs const& a)
{
    constexpr double min_target = 0.9878;
    constexpr double min_tol = 5e-3;
    constexpr double max_target = 1.5;
    constexpr double max_tol = 1e-3;
    constexpr int checked_from = 64;
    for (int m : a.bins)
    {
        if (m < 1 || m > 512)
        {
            throw UsageError("--bins entries must lie in [1, 512]");
        }
    }
    std::vector<TransportProblem::Sense> senses;
    if (a.sense == "min" || a.sense == "both")
    {
        senses.push_back(TransportProblem::Sense::min);
    }
    if (a.sense == "max" || a.sense == "both")
    {
        senses.push_back(TransportProblem::Sense::max);
    }

    std::string csv = "sense,m_bins,value,ratio_to_nu_zero,iterations\n";
    json rows = json::array();
    bool ok = true;
    for (auto sense : senses)
    {
        char const* name = sense == TransportProblem::Sense::min ? "min" : "max";
        double ratio = 0;
        for (int m : a.bins)
        {
            TransportSolution s = solve_mk({m, sense, !a.plain});
            ratio = s.value / f_nu_zero;
            csv += std::string(name) + "," + std::to_string(m) + "," + csv_number(s.value) + ","
                   + csv_number(ratio) + "," + std::to_string(s.iterations) + "\n";
            rows.push_back({{"sense", name}, {"m_bins", m}, {"value", s.value},
                            {"ratio_to_nu_zero", ratio}, {"iterations", s.iterations}});
        }
        if (a.bins.back() >= checked_from)
        {
            bool row_ok = sense == TransportProblem::Sense::min
                              ? std::abs(ratio - min_target) <= min_tol
                              : std::abs(ratio - max_target) <= max_tol;
            if (!row_ok)
            {
                std::fprintf(stderr, "%s ratio %.6f outside tolerance\n", name, ratio);
            }
            ok = ok && row_ok;
        }
    }
    CommonOptions c;
    c.out = a.out;
    auto dir = output_dir(c);
    write(dir, "transport.csv", csv);
    write(dir, "transport.json", rows.dump(2));
    std::printf("%s", csv.c_str());
    return ok ? exit_ok : exit_tolerance;
}

//---------------------------------------------------------------------------//
// body
//---------------------------------------------------------------------------//

struct BodyArgs
{
    std::vector<int> sigma;
    std::string sigma_file;
    std::string polygon_file;
    double side = 2;
    double r = 1.25;
    std::optional<double> delta;
    double p = 1.5;
    double epsilon = 0.1;
    int channel = 1;
    int bins = 8;
    CommonOptions common;
};

int cmd_body(BodyArgs const& a)
{
    Involution sigma = read_sigma(a.sigma, a.sigma_file);
    ConvexPolygon k0 = a.polygon_file.empty() ? square(a.side)
                                              : polygon_from_json(read_text_file(a.polygon_file));
    k0.validate();
    if (!(a.epsilon > 0))
    {
        throw UsageError("--epsilon must be positive");
    }
    if (a.channel < 1)
    {
        throw UsageError("--channel must be at least 1");
    }
    double delta = a.delta.value_or(std::pow(a.r, -a.p));
    Cavity omega = extend_with_channel(build_cavity(sigma, a.r, delta), a.channel);
    PolygonBody body = assemble_body(k0, omega, a.epsilon);
    DisjointnessReport rep = check_carvings(body);

    EnsembleOptions opts{a.common.max_bounces, a.common.workers};
    SamplingScheme scheme{a.common.samples, SamplingScheme::Generator::lambda_importance, a.common.seed};
    Ensemble proto = scatter_ensemble(body.prototype, scheme, opts);
    MeasureGrid nu_omega = empirical_measure(std::span<ScatterRecord const>(proto.records), a.bins);
    MeasureGrid predicted = mixture({{body.kappa0, nu_zero(a.bins)}, {1 - body.kappa0, nu_omega}});

    scheme.seed = a.common.seed + 1;
    Ensemble e = scatter_body(body, scheme, opts);
    MeasureGrid nu_body = empirical_measure(std::span<ScatterRecord const>(e.records), a.bins);
    double dist = grid_distance(nu_body, predicted);

    // Monte Carlo allowance: three times the summed cell standard errors of both estimates
    double noise = 0;
    for (std::size_t k = 0; k < nu_body.masses.size(); ++k)
    {
        noise += 0.5 * (nu_body.std_errors[k] + nu_omega.std_errors[k]);
    }
    double bound = 2 * body.kappa0 + 3 * noise;
    double kappa_cap = a.epsilon / k0.perimeter();
    ResistanceReport res = mean_resistance(body, nu_body);
    bool ok = body.kappa0 <= kappa_cap && rep.ok() && dist <= bound;

    json report{{"sigma", sigma.one_based()},
                {"r", a.r},
                {"delta", delta},
                {"body", json::parse(to_json(body))},
                {"kappa0_cap", kappa_cap},
                {"disjoint", rep.disjoint},
                {"inside_k0", rep.inside_k0},
                {"avoids_protected", rep.avoids_protected},
                {"samples", a.common.samples},
                {"distance_to_prediction", dist},
                {"distance_bound", bound},
                {"mean_resistance", res.resistance},
                {"F", res.f_value},
                {"ratio_to_convex_hull", res.ratio_to_reference},
                {"ok", ok}};
    auto dir = output_dir(a.common);
    write(dir, "body_report.json", report.dump(2));
    write(dir, "body_grid.json", to_json(nu_body));
    write(dir, "records.csv", records_csv(e.records));
    print_json(report);
    return ok ? exit_ok : exit_tolerance;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Retroreflecting billiard cavities: scattering, convergence and transport"};
    app.require_subcommand(1);

    ReflectorArgs refl;
    auto* c_refl = app.add_subcommand("reflector", "Derivative and three-bounce checks of one reflector");
    c_refl->add_option("--phi1", refl.phi1, "First angle")->required();
    c_refl->add_option("--phi2", refl.phi2, "Second angle")->required();
    c_refl->add_option("--delta", refl.delta, "Side-line angle")->capture_default_str();
    add_common(c_refl, refl.common, 20'000);

    CavityArgs cav;
    auto* c_cav = app.add_subcommand("cavity", "Build a cavity and scatter an ensemble");
    c_cav->add_option("--sigma", cav.sigma, "One-based involution, comma separated")->delimiter(',');
    c_cav->add_option("--sigma-file", cav.sigma_file, "Involution JSON file");
    c_cav->add_option("--r", cav.r, "Rim radius")->capture_default_str();
    c_cav->add_option("--delta", cav.delta, "Reflector angle (default r^-p)");
    c_cav->add_option("--p", cav.p, "Exponent of the delta rule")->capture_default_str();
    c_cav->add_option("--channel", cav.channel, "Attach a channel of depth 1/n")->capture_default_str();
    c_cav->add_option("--bins", cav.bins, "Histogram resolution")->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common(c_cav, cav.common, 100'000);

    ConvergeArgs conv;
    auto* c_conv = app.add_subcommand("converge", "Distance to nu_sigma along an r ladder");
    c_conv->add_option("--sigma", conv.sigma, "One-based involution, comma separated")->delimiter(',');
    c_conv->add_option("--sigma-file", conv.sigma_file, "Involution JSON file");
    c_conv->add_option("--r", conv.r, "Radius ladder")->delimiter(',')->capture_default_str();
    c_conv->add_option("--p", conv.p, "Exponent of the delta rule")->capture_default_str();
    c_conv->add_option("--bins", conv.bins, "Resolution ladder")->delimiter(',')->capture_default_str();
    add_common(c_conv, conv.common, 1'000'000);

    TransportArgs tr;
    auto* c_tr = app.add_subcommand("transport", "Solve the discrete transport problem");
    c_tr->add_option("--bins", tr.bins, "Resolution ladder")->delimiter(',')->capture_default_str();
    c_tr->add_option("--sense", tr.sense, "min, max or both")
        ->check(CLI::IsMember({"min", "max", "both"}))->capture_default_str();
    c_tr->add_flag("--plain", tr.plain, "Drop the symmetry constraint");
    c_tr->add_option("--out", tr.out, "Output directory (default $RETROSCATTER_OUT_DIR or .)");

    BodyArgs body;
    auto* c_body = app.add_subcommand("body", "Assemble a body from cavity copies and scatter");
    c_body->add_option("--sigma", body.sigma, "One-based involution, comma separated")->delimiter(',');
    c_body->add_option("--sigma-file", body.sigma_file, "Involution JSON file");
    c_body->add_option("--polygon", body.polygon_file, "Convex polygon JSON file (default: square)");
    c_body->add_option("--side", body.side, "Side of the default square")->capture_default_str();
    c_body->add_option("--r", body.r, "Rim radius")->capture_default_str();
    c_body->add_option("--delta", body.delta, "Reflector angle (default r^-p)");
    c_body->add_option("--p", body.p, "Exponent of the delta rule")->capture_default_str();
    c_body->add_option("--epsilon", body.epsilon, "Uncovered perimeter budget")->capture_default_str();
    c_body->add_option("--channel", body.channel, "Channel depth 1/n")->capture_default_str();
    c_body->add_option("--bins", body.bins, "Histogram resolution")->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_common(c_body, body.common, 1'000'000);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (c_refl->parsed())
        {
            return cmd_reflector(refl);
        }
        if (c_cav->parsed())
        {
            return cmd_cavity(cav);
        }
        if (c_conv->parsed())
        {
            return cmd_converge(conv);
        }
        if (c_tr->parsed())
        {
            return cmd_transport(tr);
        }
        if (c_body->parsed())
        {
            return cmd_body(body);
        }
    }
    catch (UsageError const& e)
    {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return exit_usage;
    }
    catch (Error const& e)
    {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_code_for(e.code());
    }
    catch (std::exception const& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_tolerance;
    }
    return exit_usage;
}
