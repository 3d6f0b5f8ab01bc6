#include "dcfl/cli/commands.hpp"
#include "dcfl/cli/config_file.hpp"
#include "dcfl/cli/csv.hpp"
#include "dcfl/cli/selftest.hpp"
#include "dcfl/errors.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace dcfl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "dcfl_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string tiny_config(const fs::path& out_dir, const std::string& method = "dcfl") {
    return "method = " + method + "\n"
           "clients = 2\n"
           "sessions = 2\n"
           "rounds = 4\n"
           "classes_per_session = 2\n"
           "epochs_target = 1\n"
           "epochs_diffusion = 2\n"
           "diffusion_steps = 10\n"
           "hidden_width = 8\n"
           "denoiser_hidden = 8\n"
           "time_embed = 4\n"
           "cond_embed = 4\n"
           "blob_classes = 4\n"
           "blob_samples = 40\n"
           "seed = 3\n"
           "output_dir = " +
           out_dir.string() + "\n";
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const auto path = dir / "run.cfg";
    cli::write_text_file(path, text);
    return path;
}

std::string key_of(const std::string& text) {
    try {
        (void)cli::parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

int lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(DCFL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct EnvGuard {
    explicit EnvGuard(const std::string& value) { setenv(cli::kOutputDirEnv, value.c_str(), 1); }
    ~EnvGuard() { unsetenv(cli::kOutputDirEnv); }
};

} // namespace

TEST_SUITE("config_file") {
    TEST_CASE("empty file keeps the training defaults") {
        const auto c = cli::parse_config_text("");
        CHECK(c.experiment.epochs_target == 5);
        CHECK(c.experiment.batch_size == 32);
        CHECK(c.experiment.lr_target == 1e-4);
        CHECK(c.experiment.epochs_diffusion == 100);
        CHECK(c.dataset.kind == cli::DatasetKind::Blobs);
        CHECK(c.threads == 1);
    }

    TEST_CASE("values, comments and whitespace") {
        const auto c = cli::parse_config_text("# header\n  delta = 2.5  # inline\n\nmethod=fedprox\nscenario = class_inc_noniid\n"
                                              "clients = 5\nseed = 12345678901\n");
        CHECK(c.experiment.delta == 2.5);
        CHECK(c.experiment.method == flcore::Method::FedProx);
        CHECK(c.experiment.scenario == data::Scenario::ClassIncNonIID);
        CHECK(c.experiment.clients == 5);
        CHECK(c.experiment.seed == 12345678901ULL);
    }

    TEST_CASE("errors name the key") {
        CHECK(key_of("rounds = 100\nsessions = 7\n") == "rounds");
        CHECK(key_of("delta = -1\n") == "delta");
        CHECK(key_of("colour = blue\n") == "colour");
        CHECK(key_of("clients = 3\nclients = 4\n") == "clients");
        CHECK(key_of("clients = three\n") == "clients");
        CHECK(key_of("clients = 2.5\n") == "clients");
        CHECK(key_of("method = sgd\n") == "method");
        CHECK(key_of("sessions = 6\nrounds = 60\n") != "");
        CHECK(key_of("dataset = idx\nidx_images = a\nidx_labels = b\nidx_side = 5\n") == "idx_side");
        CHECK_THROWS_AS(cli::parse_config_text("no equals sign\n"), ConfigError);
    }

    TEST_CASE("domain-incremental needs one session per domain") {
        const std::string base = "scenario = domain_inc\nblob_domains = 4\nrounds = 8\nclasses_per_session = 10\n";
        CHECK(key_of(base + "sessions = 4\n") == "");
        CHECK(key_of(base + "sessions = 2\n") != "");
        CHECK(key_of(base + "sessions = 4\ndomain_order = 3,2,1,0\n") == "");
        CHECK(key_of(base + "sessions = 4\ndomain_order = 0,0,1,2\n") == "domain_order");
    }

    TEST_CASE("default text parses back to the defaults") {
        const auto c = cli::parse_config_text(cli::default_config_text());
        const cli::RunConfig d;
        CHECK(flcore::to_config_text(c.experiment) == flcore::to_config_text(d.experiment));
        CHECK(c.output_dir == d.output_dir);
    }

    TEST_CASE("missing file is a config error") {
        CHECK_THROWS_AS(cli::parse_config("/nonexistent/dcfl.cfg"), ConfigError);
    }

    TEST_CASE("prepare_run builds a valid schedule") {
        const auto c = cli::parse_config_text(tiny_config("unused"));
        const auto p = cli::prepare_run(c);
        CHECK(p.train.size() + p.test.size() == 4 * 40);
        CHECK(p.schedule.num_clients == 2);
        CHECK(data::partition_violations(p.schedule, p.train, 2).empty());
    }
}

TEST_SUITE("csv") {
    TEST_CASE("rounds table with and without fidelity") {
        flcore::RoundRecord a{1, 1, flcore::Method::DCFL, 0.5, 0.75, 1.25, std::nullopt, 0.1};
        flcore::RoundRecord b{2, 2, flcore::Method::DCFL, 0.25, 0.5, 0.125, 3.5, 0.2};
        const std::vector<flcore::RoundRecord> recs{a, b};
        const auto text = cli::rounds_csv(recs);
        CHECK(text == std::string(cli::kRoundsHeader) + "\n" +
                          "1,1,dcfl,0.500000,0.750000,1.250000,,0.100000\n"
                          "2,2,dcfl,0.250000,0.500000,0.125000,3.500000,0.200000\n");
        CHECK(cli::mask_wall_time(text) == std::string(cli::kRoundsHeader) + "\n" +
                                               "1,1,dcfl,0.500000,0.750000,1.250000,,\n"
                                               "2,2,dcfl,0.250000,0.500000,0.125000,3.500000,\n");
    }

    TEST_CASE("summary") {
        flcore::ExperimentConfig c;
        c.method = flcore::Method::FedAvg;
        c.clients = 3;
        c.rounds = 2;
        c.sessions = 1;
        c.delta = 0.5;
        c.seed = 9;
        const std::vector<flcore::RoundRecord> recs{{1, 1, flcore::Method::FedAvg, 0.2, 0.4, 1.0, std::nullopt, 1.5},
                                                    {2, 1, flcore::Method::FedAvg, 0.6, 0.8, 0.5, std::nullopt, 2.0}};
        const auto s = cli::summarize(c, recs);
        CHECK(s.final_accuracy == 0.6);
        CHECK(s.final_encountered_accuracy == 0.8);
        CHECK(s.mean_accuracy == doctest::Approx(0.4));
        CHECK(s.total_wall_time_s == doctest::Approx(3.5));
        CHECK(cli::summary_row(s) == "fedavg,class_inc_iid,3,0.500000,9,2,0.600000,0.800000,0.400000,3.500000");
        CHECK(cli::summary_csv(s) == std::string(cli::kSummaryHeader) + "\n" + cli::summary_row(s) + "\n");
    }

    TEST_CASE("format_real") {
        CHECK(cli::format_real(0.0) == "0.000000");
        CHECK(cli::format_real(-1.5) == "-1.500000");
        CHECK(cli::format_real(1.0 / 3.0) == "0.333333");
    }
}

TEST_SUITE("commands") {
    TEST_CASE("run writes one row per round and reruns are identical") {
        const auto dir = scratch("run");
        const auto cfg = write_config(dir, tiny_config(dir / "out"));
        std::ostringstream out, err;
        REQUIRE(cli::cmd_run(cfg, out, err) == cli::kExitOk);
        const auto first = cli::read_text_file(dir / "out" / "rounds.csv");
        CHECK(lines(first) == 1 + 4);
        CHECK(first.rfind(cli::kRoundsHeader, 0) == 0);
        const auto summary = cli::read_text_file(dir / "out" / "summary.csv");
        CHECK(lines(summary) == 2);
        CHECK(out.str().find("round 4 session 2") != std::string::npos);

        REQUIRE(cli::cmd_run(cfg, out, err) == cli::kExitOk);
        const auto second = cli::read_text_file(dir / "out" / "rounds.csv");
        CHECK(cli::mask_wall_time(first) == cli::mask_wall_time(second));
    }

    TEST_CASE("environment overrides output_dir") {
        const auto dir = scratch("env");
        const auto cfg = write_config(dir, tiny_config(dir / "ignored", "fedavg"));
        EnvGuard env((dir / "chosen").string());
        std::ostringstream out, err;
        REQUIRE(cli::cmd_run(cfg, out, err) == cli::kExitOk);
        CHECK(fs::exists(dir / "chosen" / "rounds.csv"));
        CHECK_FALSE(fs::exists(dir / "ignored"));
    }

    TEST_CASE("delta sweep") {
        const auto dir = scratch("sweep");
        const auto cfg = write_config(dir, tiny_config(dir / "out"));
        std::ostringstream out, err;
        REQUIRE(cli::cmd_sweep(cfg, "delta", "0.25,1,4", out, err) == cli::kExitOk);
        const auto table = cli::read_text_file(dir / "out" / "sweep_delta.csv");
        CHECK(lines(table) == 4);
        CHECK(table.rfind("axis,value," + std::string(cli::kSummaryHeader), 0) == 0);
        for (const char* v : {"0.25", "1", "4"}) CHECK(fs::exists(dir / "out" / (std::string("delta_") + v) / "rounds.csv"));
    }

    TEST_CASE("sweep value checks") {
        CHECK(cli::parse_sweep_values(cli::SweepAxis::Delta, "0.25, 1,4") == std::vector<double>{0.25, 1, 4});
        CHECK(cli::parse_sweep_values(cli::SweepAxis::Clients, "5,10,20") == std::vector<double>{5, 10, 20});
        CHECK_THROWS_AS(cli::parse_sweep_values(cli::SweepAxis::Delta, "1,1"), ConfigError);
        CHECK_THROWS_AS(cli::parse_sweep_values(cli::SweepAxis::Delta, "-1"), ConfigError);
        CHECK_THROWS_AS(cli::parse_sweep_values(cli::SweepAxis::Delta, "1,,2"), ConfigError);
        CHECK_THROWS_AS(cli::parse_sweep_values(cli::SweepAxis::Clients, "2.5"), ConfigError);
        CHECK_THROWS_AS(cli::parse_sweep_values(cli::SweepAxis::Clients, "0"), ConfigError);
        CHECK_THROWS_AS(cli::parse_sweep_axis("rounds"), ConfigError);

        const auto dir = scratch("sweep_bad");
        const auto cfg = write_config(dir, tiny_config(dir / "out"));
        std::ostringstream out, err;
        CHECK(cli::cmd_sweep(cfg, "delta", "1,1", out, err) == cli::kExitConfigError);
        CHECK(cli::cmd_sweep(cfg, "width", "1", out, err) == cli::kExitConfigError);
    }

    TEST_CASE("selftest passes and detects a corrupted gradient") {
        const auto ok = cli::run_selftest_suites({});
        CHECK(ok.size() >= 4);
        for (const auto& s : ok) CHECK_MESSAGE(s.passed, s.name << ": " << s.detail);
        std::ostringstream out;
        CHECK(cli::print_selftest_table(ok, out));
        CHECK(out.str().find("theorem1") != std::string::npos);

        const auto bad = cli::run_selftest_suites({.corrupt_gradient = true});
        bool gradient_failed = false;
        for (const auto& s : bad) gradient_failed |= s.name == "grad_classifier" && !s.passed;
        CHECK(gradient_failed);
    }
}

TEST_SUITE("binary") {
    TEST_CASE("exit codes") {
        const auto dir = scratch("binary");
        CHECK(run_binary("--help") == 0);
        CHECK(run_binary("") == cli::kExitConfigError);
        CHECK(run_binary("frobnicate") == cli::kExitConfigError);
        CHECK(run_binary("run /nonexistent/x.cfg") == cli::kExitConfigError);

        cli::write_text_file(dir / "bad.cfg", "rounds = 100\nsessions = 7\n");
        CHECK(run_binary("run " + (dir / "bad.cfg").string()) == cli::kExitConfigError);

        // A valid config whose idx files are missing fails at runtime.
        cli::write_text_file(dir / "idx.cfg", "dataset = idx\nidx_images = /nonexistent/a\nidx_labels = /nonexistent/b\n"
                                              "output_dir = " + (dir / "out").string() + "\n");
        CHECK(run_binary("run " + (dir / "idx.cfg").string()) == cli::kExitRuntimeError);

        CHECK(run_binary("selftest") == cli::kExitOk);
        CHECK(run_binary("selftest --corrupt-gradient") == cli::kExitSelftestFailure);

        const auto cfg = write_config(dir, tiny_config(dir / "run_out"));
        CHECK(run_binary("run " + cfg.string()) == cli::kExitOk);
        CHECK(fs::exists(dir / "run_out" / "summary.csv"));
        CHECK(run_binary("sweep " + cfg.string() + " --axis clients --values 1,2") == cli::kExitOk);
        CHECK(fs::exists(dir / "run_out" / "sweep_clients.csv"));
    }
}
