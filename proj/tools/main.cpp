#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qts/cli/commands.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(std::stoi(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid quantum-classical time-series forecasting toolkit"};
    app.require_subcommand(1);

    qts::cli::GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate-data", "write a lorenz or surrogate CSV");
    generate->add_option("--source", gen.source, "lorenz | surrogate");
    generate->add_option("--points", gen.points, "number of rows");
    generate->add_option("--dt", gen.dt, "integration step (lorenz)");
    generate->add_option("--channels", gen.channels, "channel count (surrogate: 7)");
    generate->add_option("--seed", gen.seed, "generator seed (surrogate)");
    generate->add_option("--out", gen.out, "output CSV path")->required();

    qts::cli::TrainArgs train;
    std::string seeds_text;
    CLI::App* train_cmd = app.add_subcommand("train", "run a config-driven experiment");
    train_cmd->add_option("--config", train.config_path, "experiment config or manifest JSON")
        ->required();
    train_cmd->add_option("--out", train.output_dir, "override the output directory");
    train_cmd->add_option("--seeds", seeds_text, "override seeds, e.g. 0,1,2");

    qts::cli::ReportArgs report;
    CLI::App* report_cmd = app.add_subcommand("report", "merge run summaries into a table");
    report_cmd->add_option("dirs", report.run_dirs, "run directories")->required();
    report_cmd->add_option("--out", report.out_csv, "also write the table as CSV");

    qts::cli::ForecastArgs fc;
    std::string horizons_text;
    CLI::App* fc_cmd = app.add_subcommand("forecast", "rolling validation predictions");
    fc_cmd->add_option("--checkpoint", fc.checkpoint_path, "checkpoint JSON")->required();
    fc_cmd->add_option("--config", fc.config_path, "experiment config (dataset section)")
        ->required();
    fc_cmd->add_option("--horizons", horizons_text, "comma separated steps, e.g. 1,12,24");
    fc_cmd->add_option("--out", fc.out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    return qts::cli::run_command([&] {
        if (generate->parsed()) {
            qts::cli::cmd_generate_data(gen);
        } else if (train_cmd->parsed()) {
            if (!seeds_text.empty()) train.seeds = parse_int_list(seeds_text);
            qts::cli::cmd_train(train);
        } else if (report_cmd->parsed()) {
            std::cout << qts::cli::cmd_report(report);
        } else if (fc_cmd->parsed()) {
            if (!horizons_text.empty()) fc.horizons = parse_int_list(horizons_text);
            qts::cli::cmd_forecast(fc);
        }
    });
}
