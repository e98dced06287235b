#include "hextiles/cli.hpp"

#include <algorithm>
#include <csignal>
#include <ostream>

#include <CLI11.hpp>

#include "hextiles/error.hpp"
#include "hextiles/ingest.hpp"
#include "hextiles/server.hpp"
#include "hextiles/tileset.hpp"

namespace hextiles {

namespace {

TileServer* g_serving = nullptr;

extern "C" void stop_serving(int)
{
    if (g_serving) {
        g_serving->stop();
    }
}

struct Layer {
    std::string geo;
    std::string spec;
};

Layer parse_layer(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == text.size()) {
        throw InvalidArgument("--layer expects GEO,SPEC");
    }
    return {text.substr(0, comma), text.substr(comma + 1)};
}

int do_compile(const std::string& geo, const std::string& spec, const std::string& config_path,
               const std::vector<std::string>& layers, const std::string& output, const std::string& created_at,
               std::ostream& out, std::ostream& err)
{
    const TilesetConfig config = load_tileset_config(config_path);
    Dataset dataset = load_dataset(geo, spec);
    for (const auto& l : layers) {
        const Layer layer = parse_layer(l);
        dataset = merge_datasets(dataset, load_dataset(layer.geo, layer.spec));
    }
    for (const auto& w : dataset.diagnostics().warnings) {
        err << "warning: " << w << "\n";
    }
    CompileOptions options;
    if (!created_at.empty()) {
        options.created_at = created_at;
    }
    std::vector<std::string> warnings;
    const TileSet ts = compile(dataset, config, options, &warnings);
    for (const auto& w : warnings) {
        err << "warning: " << w << "\n";
    }
    save(ts, output);
    for (const auto& [res, n] : ts.meta.tile_counts) {
        out << "resolution " << res << ": " << n << " tiles\n";
    }
    out << "content_hash " << ts.meta.content_hash << "\n";
    return 0;
}

int do_inspect(const std::string& path, const std::string& cell, std::ostream& out, std::ostream& err)
{
    const TileSet ts = load(path);
    if (!cell.empty()) {
        const HexIndex h = HexIndex::parse(cell);
        const auto report = h.resolution <= ts.meta.grid.max_resolution ? cell_report(ts, h) : std::nullopt;
        if (!report) {
            err << "no tile at " << h.to_string() << " in tileset '" << ts.meta.name << "'\n";
            return 1;
        }
        out << canonical_dump(*report) << "\n";
        return 0;
    }
    out << canonical_dump(meta_summary_json(ts.meta)) << "\n";
    for (const auto& [res, layer] : ts.tiles) {
        out << "resolution " << res << ": " << layer.size() << " tiles\n";
    }
    out << "created_at " << ts.meta.created_at << "\n";
    return 0;
}

int do_validate(const std::string& path, std::ostream& out, std::ostream& err)
{
    const TilesetConfig config = load_tileset_config(path);
    const auto variables = config_variables(config);
    const auto problems = validate_config(config, variables);
    if (!problems.empty()) {
        for (const auto& p : problems) {
            err << "error: " << p << "\n";
        }
        return 1;
    }
    if (variables.empty()) {
        err << "warning: no variables declared or referenced; channel variables not checked\n";
    }
    out << "ok: " << path << "\n";
    return 0;
}

int do_serve(const std::vector<std::string>& paths, const ServerOptions& opts, std::ostream& out)
{
    std::vector<TileSet> sets;
    for (const auto& p : paths) {
        sets.push_back(load(p));
    }
    TileServer server(std::move(sets), opts.cors);
    g_serving = &server;
    std::signal(SIGINT, stop_serving);
    std::signal(SIGTERM, stop_serving);
    out << "serving " << server.tilesets().size() << " tileset(s) on http://" << opts.bind << ":" << opts.port
        << "\n"
        << std::flush;
    server.listen(opts.bind, opts.port);
    g_serving = nullptr;
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Hierarchical hexagonal tiles for multivariate polygon data", "hextiles"};
    app.require_subcommand(1);

    std::string geo, spec, config, output, created_at;
    std::vector<std::string> layers;
    auto* compile_cmd = app.add_subcommand("compile", "Compile a dataset into a .hxt tileset");
    compile_cmd->add_option("geo", geo, "GeoJSON feature collection (lon/lat)")->required();
    compile_cmd->add_option("spec", spec, "Variable spec file")->required();
    compile_cmd->add_option("config", config, "Tileset config file")->required();
    compile_cmd->add_option("-o,--output", output, "Output .hxt path")->required();
    compile_cmd->add_option("--layer", layers, "Additional GEO,SPEC layer to merge (repeatable)");
    compile_cmd->add_option("--created-at", created_at, "Timestamp recorded in the tileset meta");

    std::string tileset, cell;
    auto* inspect_cmd = app.add_subcommand("inspect", "Print tileset meta or one cell's record");
    inspect_cmd->add_option("tileset", tileset, "Tileset file")->required();
    inspect_cmd->add_option("--cell", cell, "Cell index, e.g. r5:3:-2");

    std::vector<std::string> serve_paths;
    ServerOptions serve_opts;
    bool no_cors = false;
    auto* serve_cmd = app.add_subcommand("serve", "Serve tilesets over HTTP");
    serve_cmd->add_option("tileset", serve_paths, "Tileset file(s)")->required();
    serve_cmd->add_option("--port", serve_opts.port, "TCP port")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--bind", serve_opts.bind, "Bind address");
    serve_cmd->add_flag("--no-cors", no_cors, "Omit Access-Control-Allow-Origin");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a tileset config");
    validate_cmd->add_option("config", validate_path, "Tileset config file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return 1;
    }

    try {
        if (compile_cmd->parsed()) {
            return do_compile(geo, spec, config, layers, output, created_at, out, err);
        }
        if (inspect_cmd->parsed()) {
            return do_inspect(tileset, cell, out, err);
        }
        if (validate_cmd->parsed()) {
            return do_validate(validate_path, out, err);
        }
        if (serve_cmd->parsed()) {
            serve_opts.cors = !no_cors;
            return do_serve(serve_paths, serve_opts, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace hextiles
