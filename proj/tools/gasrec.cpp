// Copyright 2026 The Gasrec Authors
// SPDX-License-Identifier: Apache-2.0

// gasrec CLI: wires the subcommands (ingest, analyze, preprocess, train,
// recommend, backtest) to the C API. Values resolve as flag > config file >
// built-in default; all randomness is seeded, so identical invocations
// produce identical outputs.

#include <gasrec.h>

#include <unistd.h>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

// A failure that already knows its process exit code: 1 for usage mistakes,
// 2 for data/model/runtime errors.
struct CliError {
    int exit_code;
    std::string message;
};

std::string fmt_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

// Library status → exit code: argument problems are usage errors.
int exit_code_for(gasrec_status status) {
    return status == GASREC_ERR_ARGUMENT ? 1 : 2;
}

void check(gasrec_status status) {
    if (status != GASREC_OK) {
        throw CliError{exit_code_for(status), gasrec_last_error()};
    }
}

bool g_verbose = false;

void note(const std::string& message) {
    if (g_verbose) {
        std::fprintf(stderr, "gasrec: %s\n", message.c_str());
    }
}

void warn(const std::string& message) {
    std::fprintf(stderr, "gasrec: warning: %s\n", message.c_str());
}

// ---------------------------------------------------------------------------
// Config file: INI-style sections of key = value lines; '#' or ';' comments.
// ---------------------------------------------------------------------------

class ConfigFile {
  public:
    static ConfigFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw CliError{1, "cannot open config file '" + path + "'"};
        }
        ConfigFile config;
        std::string line, section;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto fail = [&](const std::string& what) -> CliError {
                return CliError{1, path + ":" + std::to_string(line_no) + ": " + what};
            };
            std::string text = trim(line);
            if (text.empty() || text[0] == '#' || text[0] == ';') {
                continue;
            }
            if (text.front() == '[') {
                if (text.back() != ']' || text.size() < 3) {
                    throw fail("malformed section header");
                }
                section = text.substr(1, text.size() - 2);
                if (!kKnownKeys.contains(section)) {
                    throw fail("unknown section '" + section + "'");
                }
                continue;
            }
            const auto eq = text.find('=');
            if (eq == std::string::npos) {
                throw fail("expected key = value");
            }
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (section.empty()) {
                throw fail("key outside any section");
            }
            const auto& known = kKnownKeys.at(section);
            bool ok = false;
            for (const char* candidate : known) {
                ok = ok || key == candidate;
            }
            if (!ok) {
                throw fail("unknown key '" + key + "' in section [" + section + "]");
            }
            config.values_[section + "." + key] = value;
        }
        return config;
    }

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

  private:
    static std::string trim(const std::string& text) {
        const auto begin = text.find_first_not_of(" \t\r");
        if (begin == std::string::npos) {
            return "";
        }
        const auto end = text.find_last_not_of(" \t\r");
        return text.substr(begin, end - begin + 1);
    }

    static const std::map<std::string, std::vector<const char*>> kKnownKeys;

    std::map<std::string, std::string> values_;
};

const std::map<std::string, std::vector<const char*>> ConfigFile::kKnownKeys = {
    {"paths", {"trace", "eth_prices", "windows", "model", "out", "report"}},
    {"pipeline",
     {"step_seconds", "lag_steps", "outlier_k", "energy_threshold", "input_window", "horizon",
      "smoothing", "train_split"}},
    {"train",
     {"learning_rate", "beta1", "beta2", "epsilon", "epochs", "batch_size", "seed",
      "split_ratio", "hidden_size", "grad_clip", "slope_from_targets"}},
    {"backtest", {"start", "end", "last", "strategies"}},
};

uint64_t parse_u64(const std::string& text, const std::string& what) {
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw CliError{1, "invalid " + what + " '" + text + "'"};
    }
    return value;
}

double parse_double(const std::string& text, const std::string& what) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw CliError{1, "invalid " + what + " '" + text + "'"};
    }
    return value;
}

bool parse_bool(const std::string& text, const std::string& what) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        return false;
    }
    throw CliError{1, "invalid " + what + " '" + text + "' (expected true/false)"};
}

// Flag > config > fallback resolution for one typed value.
template <typename T, typename Parse>
T resolve(const std::optional<T>& flag, const ConfigFile* config, const char* section,
          const char* key, Parse&& parse, T fallback) {
    if (flag) {
        return *flag;
    }
    if (config) {
        if (auto text = config->get(section, key)) {
            return parse(*text, std::string(section) + "." + key);
        }
    }
    return fallback;
}

std::string resolve_path(const std::optional<std::string>& flag, const ConfigFile* config,
                         const char* key, const char* flag_name) {
    if (flag && !flag->empty()) {
        return *flag;
    }
    if (config) {
        if (auto text = config->get("paths", key)) {
            return *text;
        }
    }
    throw CliError{1, std::string(flag_name) + " is required (flag or [paths] " + key +
                          " in the config file)"};
}

// ---------------------------------------------------------------------------
// RAII handles over the C API
// ---------------------------------------------------------------------------

struct TraceHandle {
    gasrec_trace* ptr{nullptr};
    ~TraceHandle() { gasrec_trace_free(ptr); }
};

struct PricesHandle {
    gasrec_eth_prices* ptr{nullptr};
    ~PricesHandle() { gasrec_eth_prices_free(ptr); }
};

struct ModelHandle {
    gasrec_model* ptr{nullptr};
    ~ModelHandle() { gasrec_model_free(ptr); }
};

// ---------------------------------------------------------------------------
// Strategy parsing (recommend --strategy / backtest sweeps)
// ---------------------------------------------------------------------------

void warn_urgency(double urgency) {
    if (urgency < 0.7 || urgency > 1.3) {
        warn("urgency " + fmt_double(urgency) + " is outside the reasonable range [0.7, 1.3]");
    }
}

gasrec_strategy make_strategy(const std::string& name, const std::optional<std::string>& param) {
    gasrec_strategy strategy{};
    strategy.kind = GASREC_STRATEGY_PROPOSED;
    strategy.urgency = 1.0;
    strategy.scale = 1.0;
    strategy.tier = GASREC_EXPRESS_STANDARD;
    strategy.lookahead_blocks = 30;
    strategy.constant_price_wei = 0;
    if (name == "proposed") {
        strategy.kind = GASREC_STRATEGY_PROPOSED;
        if (param) {
            strategy.urgency = parse_double(*param, "urgency");
        }
        warn_urgency(strategy.urgency);
    } else if (name == "geth") {
        strategy.kind = GASREC_STRATEGY_GETH;
        if (param) {
            strategy.scale = parse_double(*param, "geth scale");
        }
    } else if (name == "express") {
        strategy.kind = GASREC_STRATEGY_EXPRESS;
        const std::string tier = param.value_or("standard");
        if (tier == "safelow") {
            strategy.tier = GASREC_EXPRESS_SAFELOW;
        } else if (tier == "standard") {
            strategy.tier = GASREC_EXPRESS_STANDARD;
        } else if (tier == "fast") {
            strategy.tier = GASREC_EXPRESS_FAST;
        } else if (tier == "fastest") {
            strategy.tier = GASREC_EXPRESS_FASTEST;
        } else {
            throw CliError{1, "unknown express tier '" + tier +
                                  "' (expected safelow|standard|fast|fastest)"};
        }
    } else if (name == "lookahead") {
        strategy.kind = GASREC_STRATEGY_LOOKAHEAD;
        if (param) {
            strategy.lookahead_blocks = static_cast<uint32_t>(
                parse_u64(*param, "look-ahead horizon"));
        }
    } else if (name == "constant") {
        strategy.kind = GASREC_STRATEGY_CONSTANT;
        if (!param) {
            throw CliError{1, "the constant strategy requires --param <price wei>"};
        }
        strategy.constant_price_wei = parse_u64(*param, "constant price");
    } else {
        throw CliError{1, "unknown strategy '" + name +
                              "' (expected proposed|geth|express|lookahead|constant)"};
    }
    return strategy;
}

// Pairs up repeated --strategy/--param flags; a --param belongs to the
// strategy at the same position.
std::vector<gasrec_strategy> make_strategies(const std::vector<std::string>& names,
                                             const std::vector<std::string>& params) {
    if (params.size() > names.size()) {
        throw CliError{1, "more --param values than --strategy values"};
    }
    std::vector<gasrec_strategy> strategies;
    strategies.reserve(names.size());
    for (size_t i = 0; i < names.size(); ++i) {
        std::optional<std::string> param;
        if (i < params.size() && !params[i].empty()) {
            param = params[i];
        }
        strategies.push_back(make_strategy(names[i], param));
    }
    return strategies;
}

// Config-file sweep syntax: strategies = proposed:1.0, geth:0.8, express:fast
std::vector<gasrec_strategy> parse_strategy_list(const std::string& text) {
    std::vector<gasrec_strategy> strategies;
    size_t begin = 0;
    while (begin <= text.size()) {
        size_t end = text.find(',', begin);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string item = text.substr(begin, end - begin);
        const auto not_space = item.find_first_not_of(" \t");
        item = not_space == std::string::npos ? "" : item.substr(not_space);
        while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) {
            item.pop_back();
        }
        if (!item.empty()) {
            const auto colon = item.find(':');
            std::optional<std::string> param;
            std::string name = item;
            if (colon != std::string::npos) {
                name = item.substr(0, colon);
                param = item.substr(colon + 1);
            }
            strategies.push_back(make_strategy(name, param));
        }
        begin = end + 1;
    }
    if (strategies.empty()) {
        throw CliError{1, "empty strategy list"};
    }
    return strategies;
}

std::string strategy_display(const gasrec_strategy& s) {
    switch (s.kind) {
        case GASREC_STRATEGY_PROPOSED:
            return "proposed " + fmt_double(s.urgency);
        case GASREC_STRATEGY_GETH:
            return "geth " + fmt_double(s.scale);
        case GASREC_STRATEGY_EXPRESS:
            switch (s.tier) {
                case GASREC_EXPRESS_SAFELOW:
                    return "express safelow";
                case GASREC_EXPRESS_STANDARD:
                    return "express standard";
                case GASREC_EXPRESS_FAST:
                    return "express fast";
                case GASREC_EXPRESS_FASTEST:
                    return "express fastest";
            }
            return "express";
        case GASREC_STRATEGY_LOOKAHEAD:
            return "lookahead " + std::to_string(s.lookahead_blocks);
        case GASREC_STRATEGY_CONSTANT:
            return "constant " + std::to_string(s.constant_price_wei);
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Shared option state
// ---------------------------------------------------------------------------

struct GlobalOptions {
    std::optional<std::string> config_path;
    std::optional<uint64_t> seed;

    const ConfigFile* config() {
        if (config_path && !loaded_) {
            loaded_config_ = ConfigFile::load(*config_path);
            loaded_ = true;
        }
        return loaded_ ? &loaded_config_ : nullptr;
    }

  private:
    ConfigFile loaded_config_;
    bool loaded_ = false;
};

gasrec_pipeline_config resolve_pipeline(const ConfigFile* config,
                                        const std::optional<uint64_t>& step_seconds,
                                        const std::optional<uint64_t>& lag_steps,
                                        const std::optional<double>& outlier_k,
                                        const std::optional<double>& energy_threshold,
                                        const std::optional<uint64_t>& input_window,
                                        const std::optional<uint64_t>& horizon,
                                        const std::optional<bool>& smoothing,
                                        const std::optional<double>& train_split) {
    gasrec_pipeline_config cfg;
    gasrec_pipeline_config_default(&cfg);
    cfg.step_seconds = static_cast<uint32_t>(resolve<uint64_t>(
        step_seconds, config, "pipeline", "step_seconds", parse_u64, cfg.step_seconds));
    // Unless pinned explicitly, the lag tracks the step size at one day.
    const uint64_t derived_lag = cfg.step_seconds > 0 ? 86400 / cfg.step_seconds : 0;
    cfg.lag_steps = static_cast<uint32_t>(resolve<uint64_t>(
        lag_steps, config, "pipeline", "lag_steps", parse_u64, derived_lag));
    cfg.outlier_k = resolve<double>(outlier_k, config, "pipeline", "outlier_k", parse_double,
                                    cfg.outlier_k);
    cfg.energy_threshold = resolve<double>(energy_threshold, config, "pipeline",
                                           "energy_threshold", parse_double,
                                           cfg.energy_threshold);
    cfg.input_window = static_cast<uint32_t>(resolve<uint64_t>(
        input_window, config, "pipeline", "input_window", parse_u64, cfg.input_window));
    cfg.horizon = static_cast<uint32_t>(
        resolve<uint64_t>(horizon, config, "pipeline", "horizon", parse_u64, cfg.horizon));
    cfg.smoothing =
        resolve<bool>(smoothing, config, "pipeline", "smoothing", parse_bool, cfg.smoothing != 0)
            ? 1
            : 0;
    cfg.train_split = resolve<double>(train_split, config, "pipeline", "train_split",
                                      parse_double, cfg.train_split);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gas price analytics, forecasting and recommendation"};
    app.require_subcommand(1);
    // Global flags (--config, --seed, --verbose) are accepted after the
    // subcommand name too; subcommands inherit this at creation.
    app.fallthrough();
    app.set_version_flag("--version", std::string(gasrec_version()));

    GlobalOptions global;
    app.add_option("--config", global.config_path,
                   "config file (INI sections: paths, pipeline, train, backtest)");
    app.add_option("--seed", global.seed, "seed overriding the training seed");
    app.add_flag("--verbose", g_verbose, "progress notes on stderr");

    std::function<void()> action;

    // ---- ingest ----------------------------------------------------------
    auto* ingest = app.add_subcommand(
        "ingest", "fetch blocks over JSON-RPC (or import a CSV) into a trace CSV");
    struct {
        std::string rpc_url;
        std::string from_csv;
        std::optional<uint64_t> from, to;
        std::optional<std::string> out;
        uint32_t parallelism{0};
    } ingest_opts;
    ingest->add_option("--rpc-url", ingest_opts.rpc_url, "JSON-RPC endpoint");
    ingest->add_option("--from-csv", ingest_opts.from_csv,
                       "import and validate an existing trace CSV instead of fetching");
    ingest->add_option("--from", ingest_opts.from, "first block height");
    ingest->add_option("--to", ingest_opts.to, "last block height");
    ingest->add_option("--out", ingest_opts.out, "output trace CSV path");
    ingest->add_option("--parallelism", ingest_opts.parallelism,
                       "concurrent requests (default 8)");
    ingest->callback([&] {
        action = [&] {
            const bool rpc = !ingest_opts.rpc_url.empty();
            const bool csv = !ingest_opts.from_csv.empty();
            if (rpc == csv) {
                throw CliError{1, "ingest needs exactly one of --rpc-url and --from-csv"};
            }
            const std::string out = resolve_path(ingest_opts.out, global.config(), "out", "--out");
            TraceHandle trace;
            if (rpc) {
                if (!ingest_opts.from || !ingest_opts.to) {
                    throw CliError{1, "--from and --to are required with --rpc-url"};
                }
                check(gasrec_trace_fetch(ingest_opts.rpc_url.c_str(), *ingest_opts.from,
                                         *ingest_opts.to, ingest_opts.parallelism, &trace.ptr));
                note("fetched " + std::to_string(gasrec_trace_block_count(trace.ptr)) +
                     " blocks into " + out);
            } else {
                check(gasrec_trace_read_csv(ingest_opts.from_csv.c_str(), &trace.ptr));
                note("imported " + std::to_string(gasrec_trace_block_count(trace.ptr)) +
                     " blocks into " + out);
            }
            check(gasrec_trace_write_csv(trace.ptr, out.c_str()));
        };
    });

    // ---- analyze ---------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "empirical statistics report from a trace");
    struct {
        std::optional<std::string> trace;
        std::optional<std::string> out;
        uint32_t interval{3600};
        uint32_t max_lag{144};
    } analyze_opts;
    analyze->add_option("--trace", analyze_opts.trace, "trace CSV path");
    analyze->add_option("--interval", analyze_opts.interval,
                        "aggregation interval seconds (default 3600)");
    analyze->add_option("--max-lag", analyze_opts.max_lag,
                        "autocorrelation lags (default 144)");
    analyze->add_option("--out", analyze_opts.out, "report CSV path");
    analyze->callback([&] {
        action = [&] {
            const ConfigFile* config = global.config();
            const std::string trace_path =
                resolve_path(analyze_opts.trace, config, "trace", "--trace");
            std::optional<std::string> out_path = analyze_opts.out;
            if (!out_path && config) {
                if (auto v = config->get("paths", "out")) {
                    out_path = *v;
                }
            }
            TraceHandle trace;
            check(gasrec_trace_read_csv(trace_path.c_str(), &trace.ptr));
            if (out_path) {
                check(gasrec_analyze(trace.ptr, analyze_opts.interval, analyze_opts.max_lag,
                                     out_path->c_str()));
                note("report written to " + *out_path);
            } else {
                // The library writes files only; stream through a temp file
                // to keep stdout the default, like the other report commands.
                const auto tmp = std::filesystem::temp_directory_path() /
                                 ("gasrec-analyze-" + std::to_string(getpid()) + ".csv");
                check(gasrec_analyze(trace.ptr, analyze_opts.interval, analyze_opts.max_lag,
                                     tmp.string().c_str()));
                std::ifstream in(tmp, std::ios::binary);
                std::ostringstream buffer;
                buffer << in.rdbuf();
                std::fputs(buffer.str().c_str(), stdout);
                std::error_code ignored;
                std::filesystem::remove(tmp, ignored);
            }
        };
    });

    // ---- preprocess ------------------------------------------------------
    auto* preprocess =
        app.add_subcommand("preprocess", "build the training window dataset from a trace");
    struct {
        std::optional<std::string> trace, eth_prices, out;
        std::optional<uint64_t> step_seconds, lag_steps, input_window, horizon;
        std::optional<double> outlier_k, energy_threshold, train_split;
        std::optional<bool> smoothing;
    } pre_opts;
    preprocess->add_option("--trace", pre_opts.trace, "trace CSV path");
    preprocess->add_option("--eth-prices", pre_opts.eth_prices, "ETH/USD price CSV path");
    preprocess->add_option("--out", pre_opts.out, "output windows file");
    preprocess->add_option("--step-seconds", pre_opts.step_seconds, "aggregation step");
    preprocess->add_option("--lag-steps", pre_opts.lag_steps, "24h lag in steps");
    preprocess->add_option("--outlier-k", pre_opts.outlier_k, "outlier cut in std deviations");
    preprocess->add_option("--energy-threshold", pre_opts.energy_threshold,
                           "Fourier energy retention");
    preprocess->add_option("--input-window", pre_opts.input_window, "window length");
    preprocess->add_option("--horizon", pre_opts.horizon, "forecast length");
    preprocess->add_option("--smoothing", pre_opts.smoothing, "apply per-window smoothing");
    preprocess->add_option("--train-split", pre_opts.train_split, "training fraction");
    preprocess->callback([&] {
        action = [&] {
            const ConfigFile* config = global.config();
            const std::string trace_path =
                resolve_path(pre_opts.trace, config, "trace", "--trace");
            const std::string prices_path =
                resolve_path(pre_opts.eth_prices, config, "eth_prices", "--eth-prices");
            const std::string out = resolve_path(pre_opts.out, config, "out", "--out");
            const gasrec_pipeline_config cfg = resolve_pipeline(
                config, pre_opts.step_seconds, pre_opts.lag_steps, pre_opts.outlier_k,
                pre_opts.energy_threshold, pre_opts.input_window, pre_opts.horizon,
                pre_opts.smoothing, pre_opts.train_split);
            TraceHandle trace;
            PricesHandle prices;
            check(gasrec_trace_read_csv(trace_path.c_str(), &trace.ptr));
            check(gasrec_eth_prices_read_csv(prices_path.c_str(), &prices.ptr));
            check(gasrec_preprocess(trace.ptr, prices.ptr, &cfg, out.c_str()));
            note("windows written to " + out);
        };
    });

    // ---- train -----------------------------------------------------------
    auto* train = app.add_subcommand("train", "train the forecaster on a window dataset");
    struct {
        std::optional<std::string> windows, model_out, report;
        std::optional<double> learning_rate, split_ratio, grad_clip;
        std::optional<uint64_t> epochs, batch_size, hidden_size;
        std::optional<bool> slope_from_targets;
    } train_opts;
    train->add_option("--windows", train_opts.windows, "window dataset path");
    train->add_option("--out", train_opts.model_out, "output model path");
    train->add_option("--report", train_opts.report, "per-epoch loss CSV path");
    train->add_option("--learning-rate", train_opts.learning_rate, "Adam learning rate");
    train->add_option("--epochs", train_opts.epochs, "training epochs");
    train->add_option("--batch-size", train_opts.batch_size, "mini-batch size");
    train->add_option("--split-ratio", train_opts.split_ratio, "train/validation split");
    train->add_option("--hidden-size", train_opts.hidden_size, "GRU hidden units");
    train->add_option("--grad-clip", train_opts.grad_clip, "max gradient norm (0 = off)");
    train->add_option("--slope-from-targets", train_opts.slope_from_targets,
                      "fit slope normalizer on targets instead of predictions");
    train->callback([&] {
        action = [&] {
            const ConfigFile* config = global.config();
            const std::string windows =
                resolve_path(train_opts.windows, config, "windows", "--windows");
            const std::string model_out =
                resolve_path(train_opts.model_out, config, "model", "--out");
            gasrec_train_config cfg;
            gasrec_train_config_default(&cfg);
            cfg.learning_rate = resolve<double>(train_opts.learning_rate, config, "train",
                                                "learning_rate", parse_double, cfg.learning_rate);
            if (auto v = config ? config->get("train", "beta1") : std::nullopt) {
                cfg.beta1 = parse_double(*v, "train.beta1");
            }
            if (auto v = config ? config->get("train", "beta2") : std::nullopt) {
                cfg.beta2 = parse_double(*v, "train.beta2");
            }
            if (auto v = config ? config->get("train", "epsilon") : std::nullopt) {
                cfg.epsilon = parse_double(*v, "train.epsilon");
            }
            cfg.epochs = static_cast<uint32_t>(resolve<uint64_t>(
                train_opts.epochs, config, "train", "epochs", parse_u64, cfg.epochs));
            cfg.batch_size = static_cast<uint32_t>(resolve<uint64_t>(
                train_opts.batch_size, config, "train", "batch_size", parse_u64, cfg.batch_size));
            cfg.seed = resolve<uint64_t>(global.seed, config, "train", "seed", parse_u64,
                                         cfg.seed);
            cfg.split_ratio = resolve<double>(train_opts.split_ratio, config, "train",
                                              "split_ratio", parse_double, cfg.split_ratio);
            cfg.hidden_size = static_cast<uint32_t>(
                resolve<uint64_t>(train_opts.hidden_size, config, "train", "hidden_size",
                                  parse_u64, cfg.hidden_size));
            cfg.grad_clip = resolve<double>(train_opts.grad_clip, config, "train", "grad_clip",
                                            parse_double, cfg.grad_clip);
            cfg.slope_from_targets =
                resolve<bool>(train_opts.slope_from_targets, config, "train",
                              "slope_from_targets", parse_bool, cfg.slope_from_targets != 0)
                    ? 1
                    : 0;

            const char* report =
                train_opts.report ? train_opts.report->c_str() : nullptr;
            std::string report_from_config;
            if (!report && config) {
                if (auto v = config->get("paths", "report")) {
                    report_from_config = *v;
                    report = report_from_config.c_str();
                }
            }
            gasrec_train_stats stats{};
            check(gasrec_train(windows.c_str(), &cfg, model_out.c_str(), report, &stats));
            std::printf("epochs=%u best_epoch=%u val_loss=%s train_loss=%s\n", stats.epochs_run,
                        stats.best_epoch, fmt_double(stats.best_validation_loss).c_str(),
                        fmt_double(stats.final_training_loss).c_str());
            note("model written to " + model_out + " (" +
                 fmt_double(stats.wall_seconds) + "s)");
        };
    });

    // ---- recommend -------------------------------------------------------
    auto* recommend = app.add_subcommand("recommend", "price recommendation at a block");
    struct {
        std::optional<std::string> model, trace, eth_prices;
        uint64_t at_block{0};
        double urgency{1.0};
        std::string strategy{"proposed"};
        std::optional<std::string> param;
    } rec_opts;
    recommend->add_option("--model", rec_opts.model, "model file (proposed strategy)");
    recommend->add_option("--trace", rec_opts.trace, "trace CSV path");
    recommend->add_option("--eth-prices", rec_opts.eth_prices,
                          "ETH/USD price CSV (proposed strategy)");
    recommend->add_option("--at-block", rec_opts.at_block, "block height")->required();
    recommend->add_option("--urgency", rec_opts.urgency, "urgency multiplier (default 1.0)");
    recommend->add_option("--strategy", rec_opts.strategy,
                          "proposed|geth|express|lookahead|constant");
    recommend->add_option("--param", rec_opts.param, "strategy parameter");
    recommend->callback([&] {
        action = [&] {
            const ConfigFile* config = global.config();
            const std::string trace_path =
                resolve_path(rec_opts.trace, config, "trace", "--trace");
            TraceHandle trace;
            check(gasrec_trace_read_csv(trace_path.c_str(), &trace.ptr));
            if (rec_opts.strategy == "proposed") {
                const std::string model_path =
                    resolve_path(rec_opts.model, config, "model", "--model");
                const std::string prices_path =
                    resolve_path(rec_opts.eth_prices, config, "eth_prices", "--eth-prices");
                double urgency = rec_opts.urgency;
                if (rec_opts.param) {
                    urgency = parse_double(*rec_opts.param, "urgency");
                }
                warn_urgency(urgency);
                ModelHandle model;
                PricesHandle prices;
                check(gasrec_model_load(model_path.c_str(), &model.ptr));
                check(gasrec_eth_prices_read_csv(prices_path.c_str(), &prices.ptr));
                gasrec_recommendation rec{};
                check(gasrec_recommend(model.ptr, trace.ptr, prices.ptr, rec_opts.at_block,
                                       urgency, &rec));
                std::printf(
                    "{\"strategy\":\"proposed\",\"block\":%llu,\"initial_price_gwei\":%s,"
                    "\"slope_gwei_per_step\":%s,\"slope_normalized\":%s,\"coefficient\":%s,"
                    "\"urgency\":%s,\"price_gwei\":%s,\"price_wei\":%llu}\n",
                    static_cast<unsigned long long>(rec_opts.at_block),
                    fmt_double(rec.initial_price_gwei).c_str(),
                    fmt_double(rec.slope_gwei_per_step).c_str(),
                    fmt_double(rec.slope_normalized).c_str(),
                    fmt_double(rec.coefficient).c_str(), fmt_double(rec.urgency).c_str(),
                    fmt_double(rec.price_gwei).c_str(),
                    static_cast<unsigned long long>(rec.price_wei));
            } else {
                const gasrec_strategy strategy =
                    make_strategy(rec_opts.strategy, rec_opts.param);
                uint64_t price = 0;
                check(gasrec_recommend_baseline(trace.ptr, rec_opts.at_block, &strategy,
                                                &price));
                std::printf("{\"strategy\":\"%s\",\"block\":%llu,\"price_wei\":%llu}\n",
                            rec_opts.strategy.c_str(),
                            static_cast<unsigned long long>(rec_opts.at_block),
                            static_cast<unsigned long long>(price));
            }
        };
    });

    // ---- backtest --------------------------------------------------------
    auto* backtest = app.add_subcommand("backtest", "simulate strategies over a block range");
    struct {
        std::optional<std::string> trace, model, eth_prices, out;
        std::optional<uint64_t> start, end, last;
        std::vector<std::string> strategies, params;
    } bt_opts;
    backtest->add_option("--trace", bt_opts.trace, "trace CSV path");
    backtest->add_option("--model", bt_opts.model, "model file (proposed strategy)");
    backtest->add_option("--eth-prices", bt_opts.eth_prices,
                         "ETH/USD price CSV (proposed strategy)");
    backtest->add_option("--start", bt_opts.start, "first submission block");
    backtest->add_option("--end", bt_opts.end, "last submission block");
    backtest->add_option("--last", bt_opts.last, "last simulated block");
    backtest->add_option("--strategy", bt_opts.strategies,
                         "strategy name (repeatable)");
    backtest->add_option("--param", bt_opts.params,
                         "parameter for the strategy at the same position (repeatable)");
    backtest->add_option("--out", bt_opts.out, "results CSV path (default: stdout)");
    backtest->callback([&] {
        action = [&] {
            const ConfigFile* config = global.config();
            const std::string trace_path =
                resolve_path(bt_opts.trace, config, "trace", "--trace");
            const uint64_t start = resolve<uint64_t>(bt_opts.start, config, "backtest", "start",
                                                     parse_u64, 0);
            const uint64_t end =
                resolve<uint64_t>(bt_opts.end, config, "backtest", "end", parse_u64, 0);
            const uint64_t last =
                resolve<uint64_t>(bt_opts.last, config, "backtest", "last", parse_u64, end);
            if (!bt_opts.start && !(config && config->get("backtest", "start"))) {
                throw CliError{1, "--start is required (flag or [backtest] start)"};
            }
            if (!bt_opts.end && !(config && config->get("backtest", "end"))) {
                throw CliError{1, "--end is required (flag or [backtest] end)"};
            }

            std::vector<gasrec_strategy> strategies;
            if (!bt_opts.strategies.empty()) {
                strategies = make_strategies(bt_opts.strategies, bt_opts.params);
            } else if (config) {
                if (auto list = config->get("backtest", "strategies")) {
                    strategies = parse_strategy_list(*list);
                }
            }
            if (strategies.empty()) {
                throw CliError{1, "--strategy is required (flag or [backtest] strategies)"};
            }

            bool needs_model = false;
            for (const auto& s : strategies) {
                needs_model = needs_model || s.kind == GASREC_STRATEGY_PROPOSED;
            }

            TraceHandle trace;
            check(gasrec_trace_read_csv(trace_path.c_str(), &trace.ptr));
            ModelHandle model;
            PricesHandle prices;
            if (needs_model) {
                const std::string model_path =
                    resolve_path(bt_opts.model, config, "model", "--model");
                const std::string prices_path =
                    resolve_path(bt_opts.eth_prices, config, "eth_prices", "--eth-prices");
                check(gasrec_model_load(model_path.c_str(), &model.ptr));
                check(gasrec_eth_prices_read_csv(prices_path.c_str(), &prices.ptr));
            }

            std::vector<gasrec_backtest_summary> summaries(strategies.size());
            std::optional<std::string> out_path = bt_opts.out;
            if (!out_path && config) {
                if (auto v = config->get("paths", "out")) {
                    out_path = *v;
                }
            }
            for (const auto& s : strategies) {
                note("running " + strategy_display(s));
            }
            check(gasrec_backtest(trace.ptr, model.ptr, prices.ptr, start, end, last,
                                  strategies.data(), strategies.size(),
                                  out_path ? out_path->c_str() : nullptr, summaries.data()));
            if (!out_path) {
                std::printf(
                    "strategy,parameter,n_submitted,n_included,avg_price_wei,"
                    "avg_blocks_waited\n");
                for (const auto& s : summaries) {
                    std::printf("%s,%s,%llu,%llu,%llu,%s\n", s.strategy, s.parameter,
                                static_cast<unsigned long long>(s.n_submitted),
                                static_cast<unsigned long long>(s.n_included),
                                static_cast<unsigned long long>(s.avg_price_wei),
                                fmt_double(s.avg_blocks_waited).c_str());
                }
            } else {
                note("results written to " + *out_path);
            }
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const CliError& e) {
        std::fprintf(stderr, "gasrec: %s\n", e.message.c_str());
        return e.exit_code;
    }

    try {
        if (action) {
            action();
        }
        return 0;
    } catch (const CliError& e) {
        std::fprintf(stderr, "gasrec: %s\n", e.message.c_str());
        return e.exit_code;
    }
}
