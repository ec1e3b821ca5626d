#include "srf/harness.hpp"

#include "srf/bb84.hpp"
#include "srf/ekert.hpp"
#include "srf/optimal.hpp"
#include "srf/parallel.hpp"
#include "srf/rep_space.hpp"
#include "srf/schur_oracle.hpp"
#include "srf/separable.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace srf {

namespace {

const std::vector<std::string> kProtocols = {"separable", "planar", "optimal", "bb84", "ekert"};

const std::set<std::string> kKeys = {"protocol", "n",      "trials", "rounds",     "eve",      "seed",
                                     "threshold", "k-sigma", "out",    "format",     "jobs",     "randomized",
                                     "timing",    "transcript", "n-list"};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

[[noreturn]] void bad_value(const std::string& key, const Setting& s, const std::string& why) {
    throw ConfigError(s.origin + ": invalid value '" + s.value + "' for " + key + " (" + why + ")");
}

template <typename T>
T parse_integer(const std::string& key, const Setting& s) {
    T value{};
    const char* end = s.value.data() + s.value.size();
    const auto [ptr, ec] = std::from_chars(s.value.data(), end, value);
    if (ec != std::errc() || ptr != end) bad_value(key, s, "expected an integer");
    return value;
}

template <typename T>
T parse_positive(const std::string& key, const Setting& s) {
    const T value = parse_integer<T>(key, s);
    if (value <= 0) bad_value(key, s, "must be positive");
    return value;
}

double parse_positive_double(const std::string& key, const Setting& s) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s.value, &used);
    } catch (const std::exception&) {
        bad_value(key, s, "expected a number");
    }
    if (used != s.value.size()) bad_value(key, s, "expected a number");
    if (!(value > 0.0) || !std::isfinite(value)) bad_value(key, s, "must be positive");
    return value;
}

bool parse_bool(const std::string& key, const Setting& s) {
    if (s.value == "true" || s.value == "1" || s.value == "yes") return true;
    if (s.value == "false" || s.value == "0" || s.value == "no") return false;
    bad_value(key, s, "expected true or false");
}

bool eve_allowed(const std::string& protocol, EveKind kind) {
    if (kind == EveKind::none) return true;
    if (protocol == "separable" || protocol == "planar") return kind == EveKind::intercept;
    if (protocol == "optimal") return kind == EveKind::measure_reprepare;
    if (protocol == "bb84") return kind == EveKind::measure_reprepare || kind == EveKind::block_diagonal;
    if (protocol == "ekert") return kind == EveKind::multiplicity_basis;
    return false;
}

void apply_defaults(ExperimentConfig& c) {
    if (c.protocol == "separable") {
        c.n = 10000;
        c.trials = 100;
    } else if (c.protocol == "planar") {
        c.n = 4096;
        c.trials = 200;
    } else if (c.protocol == "optimal") {
        c.n = 16;
        c.trials = 1000;
    } else if (c.protocol == "bb84") {
        c.n = 8;
        c.trials = 50;
        c.rounds = 400;
    } else if (c.protocol == "ekert") {
        c.n = 16;
        c.trials = 1000;
        c.rounds = 10000;
    }
}

std::uint64_t derived_seed(std::uint64_t master, std::uint64_t id) {
    Rng stream = make_stream(master, id);
    return stream();
}

ErrorStats stats_of(std::vector<double> errors) { return error_stats(std::move(errors)); }

RunResult run_separable_protocol(const ExperimentConfig& c) {
    struct Trial {
        double error = 0.0;
        double statistic = 0.0;
        bool alarm = false;
    };
    SeparableParams params{c.n, c.k_sigma};
    const auto kernel = [&](std::int64_t, Rng& rng) {
        const Rotation truth = haar_sample(rng);
        const DirectionResult r = run_separable(params, truth, c.eve, rng);
        return Trial{r.error_angle, r.alarm_statistic, r.alarm};
    };
    const std::vector<Trial> trials = map_trials<Trial>(c.trials, c.seed, Jobs{c.jobs}, kernel);
    RunResult out;
    std::vector<double> errors;
    std::int64_t alarms = 0;
    double stat_sum = 0.0;
    for (const Trial& t : trials) {
        errors.push_back(t.error);
        alarms += t.alarm ? 1 : 0;
        stat_sum += t.statistic;
        out.alarm_statistic_max = std::max(out.alarm_statistic_max, t.statistic);
    }
    const ErrorStats s = stats_of(std::move(errors));
    out.rms_error = s.rms;
    out.rms_stderr = s.rms_stderr;
    out.detection_rate = double(alarms) / double(c.trials);
    out.alarm_statistic_mean = stat_sum / double(c.trials);
    return out;
}

RunResult run_planar_protocol(const ExperimentConfig& c) {
    const auto kernel = [&](std::int64_t, Rng& rng) {
        const double angle = kPi * uniform01(rng);
        return run_planar(c.n, angle, c.eve, rng).overall_error;
    };
    const ErrorStats s = stats_of(map_trials<double>(c.trials, c.seed, Jobs{c.jobs}, kernel));
    RunResult out;
    out.rms_error = s.rms;
    out.rms_stderr = s.rms_stderr;
    return out;
}

RunResult run_optimal_protocol(const ExperimentConfig& c) {
    OptimalParams params;
    params.n_spins = c.n;
    params.trials = c.trials;
    params.randomized = c.randomized;
    params.eve = c.eve;
    const OptimalResult r = run_optimal(params, c.seed, Jobs{c.jobs});
    RunResult out;
    out.rms_error = r.stats.rms;
    out.rms_stderr = r.stats.rms_stderr;
    if (c.randomized) {
        out.secret_count = r.bits.sum_count.str();
        out.secret_bits = r.bits.bits;
        out.secret_product_bits = r.bits.product_bits;
    }
    return out;
}

void write_transcript(const std::string& path, const Bb84Result& r) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write transcript to " + path);
    static const char* preps[] = {"orientation", "tau", "tau_tilde"};
    static const char* meas[] = {"orientation", "v", "v_tilde"};
    f << "round,prep,meas,kept,mismatch,sent_j2,sent_m,received_j2,received_m\n";
    for (std::size_t i = 0; i < r.transcript.size(); ++i) {
        const Round& x = r.transcript[i];
        f << i << ',' << preps[int(x.prep)] << ',' << meas[int(x.meas)] << ',' << int(x.kept) << ','
          << int(x.mismatch) << ',' << x.sent.j.twice << ',' << x.sent.m << ',' << x.received.j.twice << ','
          << x.received.m << '\n';
    }
}

RunResult run_bb84_protocol(const ExperimentConfig& c) {
    Bb84Params params;
    params.n_spins = c.n;
    params.rounds = c.rounds;
    params.eve = c.eve;
    params.threshold = c.threshold;
    RunResult out;
    std::vector<double> errors;
    std::int64_t defined = 0;
    std::int64_t detected = 0;
    double mismatch_sum = 0.0;
    for (std::int64_t i = 0; i < c.trials; ++i) {
        params.keep_transcript = i == 0 && !c.transcript.empty();
        const Bb84Result r = run_bb84(params, derived_seed(c.seed, std::uint64_t(i)), Jobs{c.jobs});
        if (params.keep_transcript) write_transcript(c.transcript, r);
        errors.push_back(r.frame_error);
        if (r.detection_defined) {
            ++defined;
            detected += r.detection ? 1 : 0;
        }
        mismatch_sum += r.mismatch_rate;
        out.alarm_statistic_max = std::max(out.alarm_statistic_max, r.mismatch_rate);
    }
    const ErrorStats s = stats_of(std::move(errors));
    out.rms_error = s.rms;
    out.rms_stderr = s.rms_stderr;
    out.detection_rate = defined ? double(detected) / double(defined) : 0.0;
    out.alarm_statistic_mean = mismatch_sum / double(c.trials);
    return out;
}

RunResult run_ekert_protocol(const ExperimentConfig& c) {
    const EkertFrameResult frames = run_ekert_frames(c.n, c.trials, c.seed, Jobs{c.jobs});
    const ChshResult chsh =
        chsh_test(block_shape(c.n), c.rounds, c.eve, derived_seed(c.seed, ~std::uint64_t(0) - 1));
    RunResult out;
    out.rms_error = frames.stats.rms;
    out.rms_stderr = frames.stats.rms_stderr;
    // Alarm when S falls below the midpoint between the classical and quantum bounds.
    const double midpoint = 1.0 + std::sqrt(2.0);
    out.detection_rate = chsh.s_value < midpoint ? 1.0 : 0.0;
    out.alarm_statistic_mean = chsh.s_value;
    out.alarm_statistic_max = chsh.s_value;
    return out;
}

RunResult dispatch(const ExperimentConfig& c) {
    if (c.protocol == "separable") return run_separable_protocol(c);
    if (c.protocol == "planar") return run_planar_protocol(c);
    if (c.protocol == "optimal") return run_optimal_protocol(c);
    if (c.protocol == "bb84") return run_bb84_protocol(c);
    if (c.protocol == "ekert") return run_ekert_protocol(c);
    throw ConfigError("unknown protocol '" + c.protocol + "'");
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_double(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

const char* kRunHeader =
    "protocol,n,trials,rounds,eve,rms_error,rms_stderr,detection_rate,alarm_statistic_mean,"
    "alarm_statistic_max,secret_count,secret_bits,secret_product_bits,master_seed,code_version";

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + path);
    f << text;
}

}  // namespace

Settings parse_config_text(const std::string& text, const std::string& source) {
    Settings settings;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string where = source + ":" + std::to_string(number);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        if (!kKeys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": missing value for '" + key + "'");
        if (settings.count(key)) throw ConfigError(where + ": repeated key '" + key + "'");
        settings[key] = {value, where};
    }
    return settings;
}

Settings read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

ExperimentConfig make_config(const std::string& protocol, const Settings& settings) {
    ExperimentConfig c;
    c.protocol = protocol;
    if (protocol == "sweep") {
        const auto it = settings.find("protocol");
        if (it == settings.end()) throw ConfigError("sweep needs --protocol");
        c.protocol = it->second.value;
    }
    if (std::find(kProtocols.begin(), kProtocols.end(), c.protocol) == kProtocols.end())
        throw ConfigError("unknown protocol '" + c.protocol + "'");
    apply_defaults(c);

    for (const auto& [key, s] : settings) {
        if (key == "protocol") {
            if (protocol != "sweep" && s.value != protocol)
                throw ConfigError(s.origin + ": protocol '" + s.value + "' does not match subcommand " + protocol);
        } else if (key == "n") {
            c.n = parse_positive<int>(key, s);
        } else if (key == "trials") {
            c.trials = parse_positive<std::int64_t>(key, s);
        } else if (key == "rounds") {
            c.rounds = parse_positive<std::int64_t>(key, s);
        } else if (key == "eve") {
            const auto kind = parse_eve(s.value);
            if (!kind) bad_value(key, s, "expected none, intercept, blockdiag, reprepare or multbasis");
            if (!eve_allowed(c.protocol, *kind)) bad_value(key, s, "not available for " + c.protocol);
            c.eve = EveModel::of(*kind);
        } else if (key == "seed") {
            c.seed = parse_integer<std::uint64_t>(key, s);
        } else if (key == "threshold") {
            c.threshold = parse_positive_double(key, s);
        } else if (key == "k-sigma") {
            c.k_sigma = parse_positive_double(key, s);
        } else if (key == "out") {
            c.out = s.value;
        } else if (key == "format") {
            if (s.value != "csv" && s.value != "json") bad_value(key, s, "expected csv or json");
            c.format = s.value;
        } else if (key == "jobs") {
            c.jobs = parse_positive<int>(key, s);
        } else if (key == "randomized") {
            c.randomized = parse_bool(key, s);
        } else if (key == "timing") {
            c.timing = parse_bool(key, s);
        } else if (key == "transcript") {
            c.transcript = s.value;
        } else if (key == "n-list") {
            if (protocol != "sweep") throw ConfigError(s.origin + ": n-list is only used by sweep");
            for (const std::string& item : split(s.value, ',')) {
                const int v = parse_positive<int>(key, Setting{trim(item), s.origin});
                c.n_list.push_back(v);
            }
        } else {
            throw ConfigError(s.origin + ": unknown key '" + key + "'");
        }
    }

    if ((c.protocol == "optimal" || c.protocol == "ekert" || c.protocol == "bb84") && c.n < 3 &&
        protocol != "sweep")
        throw ConfigError("n must be at least 3 for " + c.protocol);
    if (protocol == "sweep") {
        if (c.n_list.size() < 3) throw ConfigError("sweep needs --n-list with at least 3 entries");
        if (c.protocol != "bb84" && c.protocol != "separable" && c.protocol != "planar")
            for (int n : c.n_list)
                if (n < 3) throw ConfigError("n-list entries must be at least 3 for " + c.protocol);
        if (c.protocol == "bb84" && c.n < 3) throw ConfigError("n must be at least 3 for bb84");
    }
    return c;
}

RunResult execute(const ExperimentConfig& config) {
    RunResult r = dispatch(config);
    r.protocol = config.protocol;
    r.n = config.n;
    r.trials = config.trials;
    r.rounds = (config.protocol == "bb84" || config.protocol == "ekert") ? config.rounds : 0;
    r.eve = std::string(to_string(config.eve.kind));
    r.master_seed = config.seed;
    r.code_version = SRF_VERSION;
    return r;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string to_csv(const RunResult& r) {
    std::ostringstream os;
    os << kRunHeader << (r.wall_time ? ",wall_time" : "") << '\n';
    os << r.protocol << ',' << r.n << ',' << r.trials << ',' << r.rounds << ',' << r.eve << ','
       << format_double(r.rms_error) << ',' << format_double(r.rms_stderr) << ',' << format_double(r.detection_rate)
       << ',' << format_double(r.alarm_statistic_mean) << ',' << format_double(r.alarm_statistic_max) << ','
       << r.secret_count << ',' << r.secret_bits << ',' << r.secret_product_bits << ',' << r.master_seed << ','
       << r.code_version;
    if (r.wall_time) os << ',' << format_double(*r.wall_time);
    os << '\n';
    return os.str();
}

std::string to_json(const RunResult& r) {
    std::ostringstream os;
    os << "{\"protocol\":" << json_string(r.protocol) << ",\"n\":" << r.n << ",\"trials\":" << r.trials
       << ",\"rounds\":" << r.rounds << ",\"eve\":" << json_string(r.eve) << ",\"rms_error\":" << json_double(r.rms_error)
       << ",\"rms_stderr\":" << json_double(r.rms_stderr) << ",\"detection_rate\":" << json_double(r.detection_rate)
       << ",\"alarm_statistic_mean\":" << json_double(r.alarm_statistic_mean)
       << ",\"alarm_statistic_max\":" << json_double(r.alarm_statistic_max)
       << ",\"secret_count\":" << json_string(r.secret_count) << ",\"secret_bits\":" << r.secret_bits
       << ",\"secret_product_bits\":" << r.secret_product_bits << ",\"master_seed\":" << r.master_seed
       << ",\"code_version\":" << json_string(r.code_version);
    if (r.wall_time) os << ",\"wall_time\":" << json_double(*r.wall_time);
    os << "}\n";
    return os.str();
}

RunResult run_result_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const auto num = [&](const char* key) {
        const auto& v = j.at(key);
        return v.is_null() ? std::nan("") : v.get<double>();
    };
    RunResult r;
    r.protocol = j.at("protocol").get<std::string>();
    r.n = j.at("n").get<int>();
    r.trials = j.at("trials").get<std::int64_t>();
    r.rounds = j.at("rounds").get<std::int64_t>();
    r.eve = j.at("eve").get<std::string>();
    r.rms_error = num("rms_error");
    r.rms_stderr = num("rms_stderr");
    r.detection_rate = num("detection_rate");
    r.alarm_statistic_mean = num("alarm_statistic_mean");
    r.alarm_statistic_max = num("alarm_statistic_max");
    r.secret_count = j.at("secret_count").get<std::string>();
    r.secret_bits = j.at("secret_bits").get<int>();
    r.secret_product_bits = j.at("secret_product_bits").get<int>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.code_version = j.at("code_version").get<std::string>();
    if (j.contains("wall_time")) r.wall_time = num("wall_time");
    return r;
}

RunResult run_result_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string header, row;
    if (!std::getline(in, header) || !std::getline(in, row)) throw std::invalid_argument("run CSV needs two lines");
    const std::vector<std::string> names = split(header, ',');
    const std::vector<std::string> cells = split(row, ',');
    if (names.size() != cells.size()) throw std::invalid_argument("run CSV header and row differ in length");
    std::map<std::string, std::string> f;
    for (std::size_t i = 0; i < names.size(); ++i) f[names[i]] = cells[i];
    const auto get = [&](const char* key) -> const std::string& {
        const auto it = f.find(key);
        if (it == f.end()) throw std::invalid_argument(std::string("run CSV lacks column ") + key);
        return it->second;
    };
    RunResult r;
    r.protocol = get("protocol");
    r.n = std::stoi(get("n"));
    r.trials = std::stoll(get("trials"));
    r.rounds = std::stoll(get("rounds"));
    r.eve = get("eve");
    r.rms_error = std::stod(get("rms_error"));
    r.rms_stderr = std::stod(get("rms_stderr"));
    r.detection_rate = std::stod(get("detection_rate"));
    r.alarm_statistic_mean = std::stod(get("alarm_statistic_mean"));
    r.alarm_statistic_max = std::stod(get("alarm_statistic_max"));
    r.secret_count = get("secret_count");
    r.secret_bits = std::stoi(get("secret_bits"));
    r.secret_product_bits = std::stoi(get("secret_product_bits"));
    r.master_seed = std::stoull(get("master_seed"));
    r.code_version = get("code_version");
    if (f.count("wall_time")) r.wall_time = std::stod(f["wall_time"]);
    return r;
}

SweepResult run_sweep(const ExperimentConfig& config) {
    SweepResult sweep;
    sweep.protocol = config.protocol;
    std::vector<std::pair<double, double>> points;
    for (int n : config.n_list) {
        ExperimentConfig c = config;
        if (c.protocol == "bb84")
            c.rounds = n;
        else
            c.n = n;
        const RunResult r = dispatch(c);
        sweep.rows.push_back({n, c.trials, r.rms_error, r.rms_stderr, c.seed});
        points.emplace_back(double(n), r.rms_error);
    }
    sweep.fit = scaling_fit(points);
    return sweep;
}

std::string to_csv(const SweepResult& sweep) {
    std::ostringstream os;
    os << "protocol,n,trials,rms_error,rms_stderr,seed,slope\n";
    for (const SweepRow& row : sweep.rows)
        os << sweep.protocol << ',' << row.n << ',' << row.trials << ',' << format_double(row.rms_error) << ','
           << format_double(row.rms_stderr) << ',' << row.seed << ',' << format_double(sweep.fit.slope) << '\n';
    return os.str();
}

std::string to_json(const SweepResult& sweep) {
    std::ostringstream os;
    os << "{\"protocol\":" << json_string(sweep.protocol) << ",\"rows\":[";
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        const SweepRow& row = sweep.rows[i];
        os << (i ? "," : "") << "{\"n\":" << row.n << ",\"trials\":" << row.trials
           << ",\"rms_error\":" << json_double(row.rms_error) << ",\"rms_stderr\":" << json_double(row.rms_stderr)
           << ",\"seed\":" << row.seed << "}";
    }
    os << "],\"slope\":" << json_double(sweep.fit.slope) << ",\"intercept\":" << json_double(sweep.fit.intercept)
       << ",\"r_squared\":" << json_double(sweep.fit.r_squared) << "}\n";
    return os.str();
}

bool run_selftest(std::ostream& out) {
    bool all = true;
    const auto report = [&](const std::string& suite, bool ok, const std::string& detail) {
        out << "selftest " << suite << ": " << (ok ? "pass" : "FAIL") << " (" << detail << ")\n";
        all = all && ok;
    };
    Rng rng = make_stream(20240601, 0);

    {
        // D(a) D(b) = D(ab) and unitarity for a few spins.
        double dev = 0.0;
        for (int twice = 1; twice <= 5; ++twice) {
            const Spin j{twice};
            const Rotation a = haar_sample(rng);
            const Rotation b = haar_sample(rng);
            const CMatrix da = wigner_D(j, a);
            dev = std::max(dev, (da * wigner_D(j, b) - wigner_D(j, compose(a, b))).cwiseAbs().maxCoeff());
            dev = std::max(dev, (da * da.adjoint() - CMatrix::Identity(j.dim(), j.dim())).cwiseAbs().maxCoeff());
            dev = std::max(dev, std::abs(da.trace().real() - character(j, class_angle(a))));
        }
        report("su2", dev < 1e-10, "max deviation " + format_double(dev));
    }
    {
        bool ok = true;
        for (int n = 1; n <= 20 && ok; ++n) {
            std::uint64_t total = 0;
            const ShapePtr shape = block_shape(n);
            for (const Block& b : shape->blocks) total += b.mult * std::uint64_t(b.dim);
            ok = total == (std::uint64_t(1) << n);
        }
        const ShapePtr shape = block_shape(3);
        const BlockVector a = build_A(shape);
        const CMatrix avg = exhaustive_seed_average(a);
        const CMatrix analytic = to_dense(eve_average_analytic(shape, optimal_amplitudes(*shape)));
        const double dev = (avg - analytic).cwiseAbs().maxCoeff();
        report("rep_space", ok && dev < 1e-12, "seed-average deviation " + format_double(dev));
    }
    {
        double dev = 0.0;
        for (int k = 0; k < 5; ++k) dev = std::max(dev, verify_block_action(3, haar_sample(rng)));
        report("schur_oracle", dev < 1e-9, "block action deviation " + format_double(dev));
    }
    {
        double worst = 0.0;
        for (int n = 3; n <= 8; ++n)
            worst = std::max(worst, std::abs(outcome_density(*block_shape(n)).total_mass() - 1.0));
        report("optimal", worst < 1e-9, "density mass deviation " + format_double(worst));
    }
    {
        Bb84Params p;
        p.n_spins = 6;
        p.rounds = 200;
        const Bb84Result r = run_bb84_serial(p, 7);
        report("bb84", r.mismatches == 0, "mismatches without eavesdropper " + std::to_string(r.mismatches));
    }
    {
        double dev = 0.0;
        for (int k = 0; k < 3; ++k)
            dev = std::max(dev, verify_joint_density(3, haar_sample(rng), haar_sample(rng), haar_sample(rng)));
        report("ekert", dev < 1e-9, "joint density deviation " + format_double(dev));
    }
    {
        std::vector<std::pair<double, double>> pts;
        for (double n : {8.0, 16.0, 32.0, 64.0}) pts.emplace_back(n, 1.0 / n);
        const ScalingFit fit = scaling_fit(pts);
        report("scaling", std::abs(fit.slope + 1.0) < 1e-12 && std::abs(fit.r_squared - 1.0) < 1e-12,
               "slope " + format_double(fit.slope));
    }
    return all;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Secret reference-frame transmission simulator", "srfsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SRF_VERSION);

    const std::vector<std::pair<std::string, std::string>> value_flags = {
        {"n", "spins per signal, or qubits for separable/planar"},
        {"trials", "independent trials"},
        {"rounds", "rounds per run (bb84, ekert CHSH)"},
        {"eve", "none, intercept, reprepare, blockdiag or multbasis"},
        {"seed", "master seed"},
        {"threshold", "bb84 mismatch-rate alarm threshold"},
        {"k-sigma", "separable alarm threshold in standard deviations"},
        {"out", "output file (default stdout)"},
        {"format", "csv or json"},
        {"jobs", "worker threads"},
        {"transcript", "bb84 per-round CSV of the first run"},
    };
    std::map<CLI::App*, std::map<std::string, std::string>> values;
    std::map<CLI::App*, std::string> config_paths;
    std::map<CLI::App*, bool> timing_flags;

    const auto add_run_options = [&](CLI::App* sub, bool sweep) {
        auto& v = values[sub];
        for (const auto& [name, help] : value_flags) sub->add_option("--" + name, v[name], help);
        if (sweep) {
            sub->add_option("--protocol", v["protocol"], "protocol to sweep")->required();
            sub->add_option("--n-list", v["n-list"], "comma-separated N values (round counts for bb84)")->required();
        }
        sub->add_option("--config", config_paths[sub], "flat key = value file; flags take precedence");
        sub->add_flag("--timing", timing_flags[sub], "include wall_time in the output");
        sub->add_flag("--randomized{true},--no-randomized{false}", v["randomized"],
                      "apply a secret seed sequence (optimal, on by default)");
    };
    for (const std::string& p : kProtocols) add_run_options(app.add_subcommand(p, "run the " + p + " protocol"), false);
    CLI::App* sweep = app.add_subcommand("sweep", "scaling sweep with a log-log fit");
    add_run_options(sweep, true);
    CLI::App* selftest = app.add_subcommand("selftest", "oracle and invariant checks");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    if (selftest->parsed()) return run_selftest(out) ? 0 : 2;

    CLI::App* sub = app.get_subcommands().front();
    try {
        Settings settings;
        if (!config_paths[sub].empty()) settings = read_config_file(config_paths[sub]);
        for (const auto& [name, value] : values[sub]) {
            if (sub->get_option("--" + name)->count() == 0) continue;
            settings[name] = {value, "--" + name};
        }
        if (timing_flags[sub]) settings["timing"] = {"true", "--timing"};
        const ExperimentConfig config = make_config(sub->get_name(), settings);

        const auto start = std::chrono::steady_clock::now();
        std::string text;
        if (sub == sweep) {
            const SweepResult r = run_sweep(config);
            text = config.format == "json" ? to_json(r) : to_csv(r);
        } else {
            RunResult r = execute(config);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (config.timing) r.wall_time = seconds;
            text = config.format == "json" ? to_json(r) : to_csv(r);
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!config.timing) err << "wall_time " << format_double(seconds) << " s\n";
        write_output(text, config.out, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

int run_command(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_command(args, std::cout, std::cerr);
}

}  // namespace srf
