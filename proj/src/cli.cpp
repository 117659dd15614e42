#include "freespec/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <exception>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "freespec/detect.hpp"
#include "freespec/error.hpp"
#include "freespec/gridsim.hpp"
#include "freespec/io.hpp"
#include "freespec/locate.hpp"
#include "freespec/products.hpp"

namespace freespec::cli {

namespace fs = std::filesystem;

const std::map<std::string, std::string>& default_params() {
    static const std::map<std::string, std::string> defaults = {
        {"eta", "1e-05"},
        {"repetitions", "10"},
        {"margin_eps", "0"},  // 0: derived from the density
        {"grid_points", fmt::format("{}", kDefaultGridPoints)},
        {"smoothing_offset", "0"},  // 0: 1e-4 of the grid span
        {"corner_eps", "1e-06"},
        {"delta", "0.15"},
        {"seed", "0"},
        {"polynomial", "p2"},
        {"window_stride", "0"},  // 0: single window
        {"ratio", "1"},          // asd only: c = N / T of both factors
    };
    return defaults;
}

fs::path cache_dir() {
    if (const char* d = std::getenv("FREESPEC_CACHE_DIR"); d && *d) return d;
    if (const char* d = std::getenv("XDG_CACHE_HOME"); d && *d) return fs::path(d) / "freespec";
    if (const char* d = std::getenv("HOME"); d && *d) return fs::path(d) / ".cache" / "freespec";
    return ".freespec-cache";
}

std::string sha256_hex(const std::string& text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Params {
public:
    explicit Params(const std::map<std::string, std::string>& given) : values_(default_params()) {
        for (const auto& [k, v] : given) {
            auto it = values_.find(k);
            if (it == values_.end()) throw UsageError(fmt::format("unknown parameter '{}'", k));
            it->second = v;
        }
    }

    double real(const std::string& key) const {
        const auto& s = values_.at(key);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw UsageError(fmt::format("parameter {} = '{}' is not a number", key, s));
        return v;
    }

    long integer(const std::string& key) const {
        const auto& s = values_.at(key);
        long v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw UsageError(fmt::format("parameter {} = '{}' is not an integer", key, s));
        return v;
    }

    const std::string& text(const std::string& key) const { return values_.at(key); }

private:
    std::map<std::string, std::string> values_;
};

/// Any failure while reading or parsing an input file is a usage error.
MeasurementWindow load_window(const fs::path& path) {
    try {
        return read_window_csv(path);
    } catch (const std::exception& e) {
        throw UsageError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void need_inputs(const RunConfig& config, std::size_t n, const char* what) {
    if (config.input_paths.size() != n)
        throw UsageError(fmt::format("{} expects {} input(s): {}", config.command, n, what));
}

fs::path output_or(const RunConfig& config, const char* fallback) {
    return config.output_path.empty() ? fs::path(fallback) : config.output_path;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

AsdOptions asd_options(const Params& p) {
    AsdOptions o;
    o.smoothing_offset = p.real("smoothing_offset");
    o.corner_eps = p.real("corner_eps");
    if (!(o.corner_eps > 0.0)) throw InvalidArgument("corner_eps must be > 0");
    return o;
}

PolynomialKind polynomial(std::string_view text) {
    try {
        return parse_polynomial(text);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
}

int grid_points(const Params& p) {
    const long g = p.integer("grid_points");
    if (g < 2) throw InvalidArgument("grid_points must be >= 2");
    return int(g);
}

struct CachedDensity {
    std::string csv;
    bool hit = false;
};

/// Density CSV for (kind, c), from the disk cache when present.
CachedDensity cached_density(PolynomialKind kind, double ratio, const Params& p) {
    const MpParams params{ratio, 1.0};
    validate(params);
    const auto options = asd_options(p);
    const int points = grid_points(p);
    const auto key = asd_key(kind, params, params, points, options);
    const fs::path dir = cache_dir();
    const fs::path file = dir / (sha256_hex(key) + ".csv");
    std::error_code ec;
    if (fs::exists(file, ec)) return {read_file(file), true};
    const auto grid = default_grid(kind, params, params, points);
    CachedDensity out{density_to_csv(compute_asd(kind, params, params, grid, options)), false};
    fs::create_directories(dir, ec);
    if (!ec) {
        try {
            write_file_atomic(file, out.csv);
        } catch (const std::exception&) {
            // An unwritable cache only costs a recomputation next time.
        }
    }
    return out;
}

MeasurementWindow prepared(const MeasurementWindow& w, const Params& p, std::uint64_t stream) {
    return preprocess(w, p.real("eta"), std::uint64_t(p.integer("seed")) * 2 + stream);
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
    need_inputs(config, 1, "scenario.json");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(config.input_paths[0]));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(fmt::format("scenario is not valid JSON: {}", e.what()));
    }
    Scenario scenario;
    try {
        scenario = scenario_from_json(j);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto path = output_or(config, "data.csv");
    write_file_atomic(path, window_to_csv(simulate(scenario)));
    out << fmt::format("wrote {}\n", path.string());
    return kOk;
}

int cmd_mp_check(const RunConfig& config, const Params& p, std::ostream& out) {
    need_inputs(config, 1, "data.csv");
    const auto window = load_window(config.input_paths[0]);
    const long reps = p.integer("repetitions");
    const auto values =
        esd_eigenvalues(window, int(reps), p.real("eta"), std::uint64_t(p.integer("seed")));
    const auto hist = histogram(values, 0);
    const MpParams mp{window.ratio(), 1.0};
    const double ks = ks_statistic(values, [&](double x) { return mp_mass(mp, -INFINITY, x); });
    const double l1 = histogram_l1(hist, [&](double lo, double hi) { return mp_mass(mp, lo, hi); });
    const auto path = output_or(config, "histogram.csv");
    write_file_atomic(path, histogram_to_csv(hist));
    out << fmt::format("ks {}\nl1 {}\n", format_double(ks), format_double(l1));
    return kOk;
}

int cmd_asd(const RunConfig& config, const Params& p, std::ostream& out) {
    if (config.input_paths.size() > 1) throw UsageError("asd takes at most one argument: p1 or p2");
    const auto kind = config.input_paths.empty()
                          ? polynomial(p.text("polynomial"))
                          : polynomial(config.input_paths[0].string());
    const auto density = cached_density(kind, p.real("ratio"), p);
    const auto path = output_or(config, "density.csv");
    write_file_atomic(path, density.csv);
    out << fmt::format("cache {}\n", density.hit ? "hit" : "miss");
    return kOk;
}

struct PairInput {
    MeasurementWindow ref;
    MeasurementWindow test;
};

PairInput read_pair(const RunConfig& config) {
    need_inputs(config, 2, "ref.csv test.csv");
    return {load_window(config.input_paths[0]), load_window(config.input_paths[1])};
}

int cmd_detect(const RunConfig& config, const Params& p, std::ostream& out) {
    const auto in = read_pair(config);
    if (in.ref.n_channels() != in.test.n_channels() || in.ref.n_samples() != in.test.n_samples())
        throw InvalidArgument("reference and test windows must have the same shape");
    const auto kind = polynomial(p.text("polynomial"));
    const auto asd = parse_density_csv(cached_density(kind, in.ref.ratio(), p).csv);
    const double margin = p.real("margin_eps") > 0.0 ? p.real("margin_eps") : default_margin(asd, kind);
    const auto s0 = sample_covariance(prepared(in.ref, p, 0));
    const auto s1 = sample_covariance(prepared(in.test, p, 1));
    const auto report = detect(kind, s0, s1, asd, margin);
    const auto path = output_or(config, "report.json");
    write_file_atomic(path, dump(to_json(report)));
    out << fmt::format("verdict {}\n", to_string(report.verdict));
    return kOk;
}

int cmd_locate(const RunConfig& config, const Params& p, std::ostream& out) {
    const auto in = read_pair(config);
    if (in.ref.n_channels() != in.test.n_channels())
        throw InvalidArgument("reference and test windows must have the same channel count");
    const auto kind = polynomial(p.text("polynomial"));
    const auto asd = parse_density_csv(cached_density(kind, in.ref.ratio(), p).csv);
    const double margin = p.real("margin_eps") > 0.0 ? p.real("margin_eps") : default_margin(asd, kind);
    const auto path = output_or(config, "location.json");
    const long stride = p.integer("window_stride");
    if (stride < 0) throw InvalidArgument("window_stride must be >= 0");

    if (stride == 0 && in.test.n_samples() == in.ref.n_samples()) {
        const auto s0 = sample_covariance(prepared(in.ref, p, 0));
        const auto s1 = sample_covariance(prepared(in.test, p, 1));
        Matrix vectors;
        const auto report = detect(kind, s0, s1, asd, margin, &vectors);
        const auto loc = locate(report, vectors);
        write_file_atomic(path, dump(to_json(loc, long(in.test.n_samples()) - 1)));
        out << fmt::format("loc {}\n", loc.loc);
        return kOk;
    }

    SeriesOptions so;
    so.kind = kind;
    so.stride = stride == 0 ? 1 : stride;
    so.eta = p.real("eta");
    so.margin_eps = margin;
    so.seed = std::uint64_t(p.integer("seed")) * 2;
    const auto series = locate_series(in.ref, in.test, asd, so);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : series) arr.push_back(to_json(e));
    write_file_atomic(path, dump(arr));
    auto csv_path = path;
    csv_path.replace_extension(".csv");
    write_file_atomic(csv_path, series_to_csv(series));
    out << fmt::format("windows {}\n", series.size());
    return kOk;
}

int cmd_product(const RunConfig& config, const Params& p, std::ostream& out) {
    const auto in = read_pair(config);
    const auto spectrum =
        product_spectrum(prepared(in.ref, p, 0), prepared(in.test, p, 1), p.real("delta"));
    const auto path = output_or(config, "spectrum.csv");
    write_file_atomic(path, spectrum_to_csv(spectrum));
    out << dump(to_json(spectrum));
    return kOk;
}

int dispatch(const RunConfig& config, std::ostream& out) {
    const Params p(config.params);
    if (p.integer("repetitions") < 1) throw InvalidArgument("repetitions must be >= 1");
    if (p.integer("seed") < 0) throw InvalidArgument("seed must be >= 0");
    if (config.command == "simulate") return cmd_simulate(config, out);
    if (config.command == "mp-check") return cmd_mp_check(config, p, out);
    if (config.command == "asd") return cmd_asd(config, p, out);
    if (config.command == "detect") return cmd_detect(config, p, out);
    if (config.command == "locate") return cmd_locate(config, p, out);
    if (config.command == "product") return cmd_product(config, p, out);
    throw UsageError(fmt::format("unknown command '{}'", config.command));
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(config, out);
    } catch (const NonConvergenceError& e) {
        err << fmt::format("error: {} (residual {:.3g} after {} iterations)\n", e.what(),
                           e.residual(), e.iterations());
        return kNumerical;
    } catch (const ConditioningError& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const HerglotzViolation& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        // Remaining library errors are violated preconditions on the input.
        err << "error: " << e.what() << '\n';
        return kPrecondition;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace freespec::cli
