// geoqa command line: serve | ingest | ask | eval | gen-city
#include "geoqa/error.hpp"
#include "geoqa/eval/city.hpp"
#include "geoqa/service/config.hpp"
#include "geoqa/service/engine.hpp"
#include "geoqa/service/eval_runner.hpp"
#include "geoqa/service/http_server.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace geoqa;

namespace {

service::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server != nullptr) {
        g_server->stop();
    }
}

std::string default_config() {
    const char* env = std::getenv("GEOQA_CONFIG");
    return env != nullptr ? env : "geoqa.json";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural-language geographic question answering"};
    app.require_subcommand(1);
    std::string config_path = default_config();
    app.add_option("-c,--config", config_path, "service config JSON (default $GEOQA_CONFIG or geoqa.json)");

    auto* serve = app.add_subcommand("serve", "run the HTTP API");

    auto* ingest = app.add_subcommand("ingest", "ingest a GeoJSON file into the configured store_dir");
    std::string ds_name, ds_file, ds_table;
    ingest->add_option("name", ds_name, "dataset name")->required();
    ingest->add_option("file", ds_file, "GeoJSON FeatureCollection")->required();
    ingest->add_option("--table", ds_table, "table name (default: dataset name)");

    auto* ask = app.add_subcommand("ask", "run one prompt and print the response JSON");
    std::string prompt, session = "cli";
    ask->add_option("prompt", prompt, "the question")->required();
    ask->add_option("--session", session, "session id");

    auto* ev = app.add_subcommand("eval", "run the evaluation harness");
    std::string eval_config;
    ev->add_option("config", eval_config, "eval config JSON")->required();

    auto* gen = app.add_subcommand("gen-city", "write the synthetic city as GeoJSON files");
    std::string city_dir;
    std::uint64_t city_seed = eval::kDefaultCitySeed;
    gen->add_option("dir", city_dir, "output directory")->required();
    gen->add_option("--seed", city_seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            eval::write_city(eval::generate_city(city_seed), city_dir);
            std::cout << "wrote " << city_dir << "\n";
            return 0;
        }
        if (*ev) {
            const auto run = service::run_eval(service::EvalRunConfig::load(eval_config));
            std::cout << run.report.table();
            return run.report.overall.failures == 0 ? 0 : 3;
        }
        const auto config = service::ServiceConfig::load(config_path);
        if (*ingest) {
            if (config.store_dir.empty()) {
                throw Error(ErrorCode::InvalidArgument, "ingest needs store_dir in the config");
            }
            auto parts = service::build_parts(config);
            service::Engine engine(parts);
            const auto report = engine.ingest(ds_name, read_file(ds_file), ds_table);
            engine.store().save(config.store_dir);
            std::cout << report.to_json().dump(2) << "\n";
            return 0;
        }
        auto engine = std::make_shared<service::Engine>(service::build_parts(config));
        if (*ask) {
            const auto out = engine->query(session, prompt);
            std::cout << out.body.dump(2) << "\n";
            if (out.status != 200 || out.body["kind"] == "error") {
                std::cerr << "geoqa: " << out.body.value("message", "query failed") << "\n";
                return 2;
            }
            return 0;
        }
        if (*serve) {
            service::HttpServer server(engine);
            const int port = server.bind(config.host, config.port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "geoqa: listening on " << config.host << ":" << port << "\n";
            server.serve();
            g_server = nullptr;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "geoqa: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
