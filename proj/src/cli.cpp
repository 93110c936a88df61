#include "sentinel/cli.hpp"

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "sentinel/config.hpp"
#include "sentinel/content.hpp"
#include "sentinel/dataset.hpp"
#include "sentinel/error.hpp"
#include "sentinel/evaluation.hpp"
#include "sentinel/features.hpp"
#include "sentinel/manifest.hpp"
#include "sentinel/scoring.hpp"
#include "sentinel/service.hpp"
#include "sentinel/url.hpp"

namespace sentinel {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::kMalformedUrl:
        case ErrorCode::kUnsupportedScheme:
        case ErrorCode::kInvalidConfig:
        case ErrorCode::kSchemaError:
        case ErrorCode::kParseError:
        case ErrorCode::kDimensionMismatch:
        case ErrorCode::kInvalidWeights:
        case ErrorCode::kIoError:
        case ErrorCode::kCorruptJournal:
            return kExitData;
        case ErrorCode::kInvalidScore:
        case ErrorCode::kSessionClosed:
            return kExitInternal;
    }
    return kExitInternal;
}

// Prefixes errors with the flag and file they came from.
template <typename F>
auto with_context(const std::string& flag, const std::string& file, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        std::string_view detail = e.what();
        const std::string prefix = std::string(e.code_name()) + ": ";
        if (detail.substr(0, prefix.size()) == prefix) detail.remove_prefix(prefix.size());
        throw Error(e.code(), flag + " " + file + ": " + std::string(detail));
    }
}

std::string read_text(const std::string& flag, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, flag + " " + path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Ensemble read_bundle(const std::string& path) {
    return with_context("--bundle", path, [&] { return load_bundle(path); });
}

EngineConfig read_config(const std::optional<std::string>& path) {
    std::optional<std::filesystem::path> p;
    if (path) p = *path;
    return with_context("--config", path.value_or("<defaults>"), [&] { return resolve_config(p); });
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
    if (g_server != nullptr) g_server->stop();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"sentinel: website risk scoring engine", "sentinel"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::size_t gen_n = 0;
    double gen_ratio = 0.1;
    double gen_separation = kDefaultSeparation;
    std::uint64_t gen_seed = 42;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen-data", "Generate a labeled synthetic dataset as CSV");
    gen->add_option("--n", gen_n, "Row count")->required()->check(CLI::PositiveNumber);
    gen->add_option("--fraud-ratio", gen_ratio, "Fraction of fraud rows")->required()->check(CLI::Range(0.0, 1.0));
    gen->add_option("--separation", gen_separation, "Class separation (0 = identical classes)")->capture_default_str();
    gen->add_option("--seed", gen_seed, "RNG seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output CSV path")->required();

    std::string split_data, split_train, split_test;
    double split_fraction = 0.25;
    std::uint64_t split_seed = 42;
    auto* split = app.add_subcommand("split", "Stratified train/test split of a CSV dataset");
    split->add_option("--data", split_data, "Input CSV")->required();
    split->add_option("--test-fraction", split_fraction, "Held-out fraction")->capture_default_str();
    split->add_option("--seed", split_seed, "RNG seed")->capture_default_str();
    split->add_option("--train-out", split_train, "Training CSV output")->required();
    split->add_option("--test-out", split_test, "Test CSV output")->required();

    std::string train_data, train_bundle;
    std::optional<std::string> train_config;
    std::optional<std::string> train_resample;
    std::optional<std::uint64_t> train_seed;
    auto* train = app.add_subcommand("train", "Train the ensemble and write a model bundle");
    train->add_option("--data", train_data, "Training CSV")->required();
    train->add_option("--config", train_config, "Engine config (JSON)");
    train->add_option("--out-bundle", train_bundle, "Bundle output path")->required();
    train->add_option("--resample", train_resample, "none, undersample or smote")
        ->check(CLI::IsMember({"none", "undersample", "smote"}));
    train->add_option("--seed", train_seed, "Overrides models.seed from the config");

    std::string eval_bundle, eval_data;
    std::optional<std::string> eval_json;
    std::optional<std::string> eval_config;
    auto* eval = app.add_subcommand("eval", "Evaluate a bundle on a labeled CSV");
    eval->add_option("--bundle", eval_bundle, "Model bundle")->required();
    eval->add_option("--data", eval_data, "Labeled CSV")->required();
    eval->add_option("--json", eval_json, "Also write metrics as JSON to this path ('-' for stdout)");
    eval->add_option("--config", eval_config, "Engine config (JSON)");

    std::string an_bundle, an_url;
    std::optional<std::string> an_html, an_metadata, an_config;
    auto* analyze = app.add_subcommand("analyze", "Score one URL");
    analyze->add_option("--bundle", an_bundle, "Model bundle")->required();
    analyze->add_option("--url", an_url, "URL to score")->required();
    analyze->add_option("--html", an_html, "HTML file captured from the page");
    analyze->add_option("--metadata", an_metadata, "Domain metadata fixture (JSON)");
    analyze->add_option("--config", an_config, "Engine config (JSON)");

    std::string serve_bundle;
    std::optional<std::string> serve_store, serve_config, serve_seed_list;
    std::string serve_host = "127.0.0.1";
    int serve_port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--bundle", serve_bundle, "Model bundle")->required();
    serve->add_option("--store", serve_store, "Reputation journal path");
    serve->add_option("--seed-list", serve_seed_list, "Known-URL seed list");
    serve->add_option("--port", serve_port, "Listen port")->capture_default_str()->check(CLI::Range(0, 65535));
    serve->add_option("--host", serve_host, "Listen address")->capture_default_str();
    serve->add_option("--config", serve_config, "Engine config (JSON)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (*gen) {
            const auto ds = generate_synthetic(gen_n, gen_ratio, gen_separation, gen_seed);
            with_context("--out", gen_out, [&] { write_csv(ds, gen_out); });
            out << "wrote " << ds.size() << " rows (" << ds.count_label(1) << " fraud) to " << gen_out << "\n";
        } else if (*split) {
            const auto ds = with_context("--data", split_data, [&] { return load_csv(split_data); });
            const auto [tr, te] = with_context("--test-fraction", std::to_string(split_fraction),
                                               [&] { return stratified_split(ds, split_fraction, split_seed); });
            with_context("--train-out", split_train, [&] { write_csv(tr, split_train); });
            with_context("--test-out", split_test, [&] { write_csv(te, split_test); });
            out << "train " << tr.size() << " rows, test " << te.size() << " rows\n";
        } else if (*train) {
            auto config = read_config(train_config);
            if (train_resample) config.models.resample = parse_resample(*train_resample);
            if (train_seed) config.models.seed = *train_seed;
            const auto ds = with_context("--data", train_data, [&] { return load_csv(train_data); });
            if (ds.feature_names != config.manifest) {
                throw Error(ErrorCode::kSchemaError, "--data " + train_data + ": columns do not match the feature manifest");
            }
            const auto bundle = train_ensemble(ds, config.models);
            with_context("--out-bundle", train_bundle, [&] { save_bundle(bundle, train_bundle); });
            out << "trained on " << ds.size() << " rows (resample " << resample_name(config.models.resample)
                << ", seed " << config.models.seed << "), bundle written to " << train_bundle << "\n";
        } else if (*eval) {
            const auto config = read_config(eval_config);
            const auto bundle = read_bundle(eval_bundle);
            const auto ds = with_context("--data", eval_data, [&] { return load_csv(eval_data); });
            const auto m = with_context("--data", eval_data,
                                        [&] { return evaluate(bundle, ds, config.scoring.anomaly_floor); });
            out << format_eval_table(m);
            if (eval_json) {
                const auto text = eval_to_json(m).dump(2) + "\n";
                if (*eval_json == "-") {
                    out << text;
                } else {
                    std::ofstream f(*eval_json, std::ios::binary);
                    if (!f || !(f << text)) throw Error(ErrorCode::kIoError, "--json " + *eval_json + ": cannot write");
                }
            }
        } else if (*analyze) {
            const auto config = read_config(an_config);
            const auto bundle = read_bundle(an_bundle);
            const auto parts = with_context("--url", an_url, [&] { return parse_url(an_url); });
            std::optional<std::filesystem::path> fixture = config.metadata_fixture;
            if (an_metadata) fixture = *an_metadata;
            FixtureMetadataProvider provider;
            if (fixture) {
                provider = with_context(an_metadata ? "--metadata" : "--config", fixture->string(),
                                        [&] { return FixtureMetadataProvider::load(*fixture); });
            }
            std::optional<ContentFeatures> content;
            if (an_html) content = analyze_html(read_text("--html", *an_html), parts.host, config.content);
            const auto domain = domain_metadata(parts.host, provider, today_utc(), config.young_domain_days);
            const auto x = assemble_features(lexical_features(parts, an_url, config.lexical), domain, content);
            const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
            const auto a = assess(bundle, x, config.scoring, now);
            out << "url      " << canonicalize(an_url) << "\n";
            out << "score    " << std::fixed << std::setprecision(2) << a.score << "\n";
            out << "verdict  " << verdict_name(a.verdict) << "\n";
            out << "top contributions:\n";
            for (std::size_t i = 0; i < std::min<std::size_t>(3, a.explanation.size()); ++i) {
                out << "  " << std::left << std::setw(28) << a.explanation[i].feature << std::right << std::showpos
                    << std::setprecision(2) << a.explanation[i].delta << std::noshowpos << "\n";
            }
        } else if (*serve) {
            const auto config = read_config(serve_config);
            auto bundle = read_bundle(serve_bundle);
            const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
            std::optional<std::filesystem::path> store_path = config.store.path;
            if (serve_store) store_path = *serve_store;
            ReputationStore store(config.store.ttl_seconds);
            if (store_path) {
                if (std::filesystem::exists(*store_path)) {
                    std::vector<JournalIssue> issues;
                    store = ReputationStore::restore(*store_path, now, &issues, config.store.ttl_seconds);
                    for (const auto& i : issues) {
                        spdlog::warn("--store {}: line {} skipped: {}", store_path->string(), i.line, i.message);
                    }
                }
                store.attach_journal(*store_path);
            }
            std::optional<std::filesystem::path> seeds = config.store.seed_list;
            if (serve_seed_list) seeds = *serve_seed_list;
            if (seeds) {
                const auto n = with_context("--seed-list", seeds->string(), [&] { return store.load_seed_list(*seeds, now); });
                spdlog::info("loaded {} seed-list entries", n);
            }
            std::shared_ptr<const MetadataProvider> provider = std::make_shared<FixtureMetadataProvider>();
            if (config.metadata_fixture) {
                provider = std::make_shared<FixtureMetadataProvider>(with_context(
                    "--config", config.metadata_fixture->string(),
                    [&] { return FixtureMetadataProvider::load(*config.metadata_fixture); }));
            }
            Service service(config, std::move(store), provider);
            service.load_bundle(std::move(bundle));
            httplib::Server server;
            service.register_routes(server);
            g_server = &server;
            std::signal(SIGINT, stop_server);
            std::signal(SIGTERM, stop_server);
            spdlog::info("listening on {}:{}", serve_host, serve_port);
            if (!server.listen(serve_host, serve_port)) {
                g_server = nullptr;
                err << "error: --port " << serve_port << ": cannot listen on " << serve_host << "\n";
                return kExitInternal;
            }
            g_server = nullptr;
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace sentinel
