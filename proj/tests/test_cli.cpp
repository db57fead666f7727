#include "askls/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace askls;

namespace {

struct TempFile {
    explicit TempFile(const std::string& name, const std::string& content) : path(name) {
        std::ofstream os(path);
        os << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
    std::string path;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const char* kSeparableCsv =
    "f0,f1,label\n"
    "0.0,0.0,0\n0.2,0.1,0\n0.1,-0.1,0\n-0.1,0.2,0\n"
    "3.0,3.0,1\n3.2,2.9,1\n2.9,3.1,1\n3.1,3.2,1\n";

}  // namespace

TEST_CASE("config file parsing and precedence plumbing") {
    TempFile f("test.cfg",
               "# comment\n"
               "gamma = 2.5\n"
               "kernel = sne\n"
               "gammas = 0.1,1,10\n"
               "trials=3   # inline comment\n");
    RunConfig cfg;
    load_config_file(cfg, f.path);
    CHECK(cfg.gamma == 2.5);
    CHECK(cfg.kernel == "sne");
    CHECK(cfg.gammas == std::vector<double>{0.1, 1, 10});
    CHECK(cfg.trials == 3);

    TempFile bad("bad.cfg", "no-such-key = 1\n");
    CHECK_THROWS_AS(load_config_file(cfg, bad.path), ConfigError);
    TempFile malformed("mal.cfg", "just words\n");
    CHECK_THROWS_AS(load_config_file(cfg, malformed.path), ConfigError);
    CHECK_THROWS_AS(load_config_file(cfg, "missing.cfg"), IoError);
}

TEST_CASE("config validation rejects bad values") {
    RunConfig cfg;
    cfg.command = "eval";
    cfg.trials = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.trials = 1;
    cfg.model = "svm";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.model = "askls";
    cfg.kernel = "quadratic";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.kernel = "rbf";
    cfg.standardize = "maybe";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg.standardize = "on";
    CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("train/predict round trip with a deterministic model file") {
    TempFile data("cli_train.csv", kSeparableCsv);
    RunConfig cfg;
    cfg.command = "train";
    cfg.data = data.path;
    cfg.kernel = "rbf";
    cfg.sigma = 1.0;
    cfg.gamma = 10.0;
    cfg.out = "cli_model.txt";
    REQUIRE(run_command(cfg) == kExitOk);
    const std::string first = slurp("cli_model.txt");
    CHECK(slurp("cli_model.txt.report.txt").find("residual[0]") != std::string::npos);

    // identical config -> bitwise-identical model file
    REQUIRE(run_command(cfg) == kExitOk);
    CHECK(slurp("cli_model.txt") == first);

    RunConfig pcfg;
    pcfg.command = "predict";
    pcfg.model_file = "cli_model.txt";
    pcfg.data = data.path;
    pcfg.out = "cli_pred.csv";
    REQUIRE(run_command(pcfg) == kExitOk);
    const std::string pred = slurp("cli_pred.csv");
    CHECK(pred.find("id,predicted") != std::string::npos);
    // separable data, trained on itself: predictions match the labels
    int zeros = 0, ones = 0;
    std::istringstream ss(pred);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.size() >= 2 && line[0] != '#' && line.find(",0") != std::string::npos) ++zeros;
        if (line.size() >= 2 && line[0] != '#' && line.find(",1") != std::string::npos) ++ones;
    }
    CHECK(zeros == 4);
    CHECK(ones == 4);

    std::remove("cli_model.txt");
    std::remove("cli_model.txt.report.txt");
    std::remove("cli_pred.csv");
}

TEST_CASE("eval produces a mean/std report and is exact on separable data") {
    TempFile data("cli_eval.csv", kSeparableCsv);
    RunConfig cfg;
    cfg.command = "eval";
    cfg.data = data.path;
    cfg.kernel = "rbf";
    cfg.sigma = 1.0;
    cfg.gamma = 10.0;
    cfg.trials = 3;
    cfg.train_frac = 0.5;
    cfg.seed = 5;
    cfg.out = "cli_eval_out";
    REQUIRE(run_command(cfg) == kExitOk);
    const std::string csv = slurp("cli_eval_out.csv");
    CHECK(csv.find("askls-rbf,accuracy,1.000000,0.000000") != std::string::npos);
    CHECK(csv.find("# command=eval") != std::string::npos);  // resolved config embedded
    std::remove("cli_eval_out.csv");
    std::remove("cli_eval_out.txt");
}

TEST_CASE("eval with a symmetric kernel matches between askls and lssvm") {
    TempFile data("cli_sym.csv", kSeparableCsv);
    RunConfig cfg;
    cfg.command = "eval";
    cfg.data = data.path;
    cfg.kernel = "rbf";
    cfg.sigma = 1.2;
    cfg.gamma = 2.0;
    cfg.trials = 4;
    cfg.train_frac = 0.5;
    cfg.seed = 11;
    cfg.out = "cli_sym_a";
    REQUIRE(run_command(cfg) == kExitOk);
    cfg.model = "lssvm";
    cfg.out = "cli_sym_b";
    REQUIRE(run_command(cfg) == kExitOk);

    auto metrics_of = [](const std::string& text) {
        std::vector<std::string> out;
        std::istringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            const auto comma = line.find(',');
            if (line.empty() || line[0] == '#' || comma == std::string::npos) continue;
            out.push_back(line.substr(comma));  // strip the method column
        }
        return out;
    };
    CHECK(metrics_of(slurp("cli_sym_a.csv")) == metrics_of(slurp("cli_sym_b.csv")));
    std::remove("cli_sym_a.csv");
    std::remove("cli_sym_a.txt");
    std::remove("cli_sym_b.csv");
    std::remove("cli_sym_b.txt");
}

TEST_CASE("cv command reports the winning cell and fold table") {
    TempFile data("cli_cv.csv", kSeparableCsv);
    RunConfig cfg;
    cfg.command = "cv";
    cfg.data = data.path;
    cfg.kernel = "rbf";
    cfg.folds = 2;
    cfg.gammas = {0.1, 10.0};
    cfg.kernel_params = {1.0};
    cfg.seed = 2;
    cfg.out = "cli_cv_out";
    REQUIRE(run_command(cfg) == kExitOk);
    const std::string table = slurp("cli_cv_out.csv");
    CHECK(table.find("gamma,kernel_param,fold,score") != std::string::npos);
    const std::string best = slurp("cli_cv_out.txt");
    CHECK(best.find("best_gamma") != std::string::npos);
    std::remove("cli_cv_out.csv");
    std::remove("cli_cv_out.txt");
}

TEST_CASE("graph-eval on a regular undirected graph equates both methods") {
    // 8-node undirected cycle (both directions): the normalized adjacency is
    // symmetric, so AsK-LS and symmetrized LS-SVM coincide (Theorem 2 path).
    std::ostringstream edges;
    edges << "#nodes 8\n";
    for (int i = 0; i < 8; ++i) {
        edges << i << ' ' << (i + 1) % 8 << '\n';
        edges << (i + 1) % 8 << ' ' << i << '\n';
    }
    TempFile ef("cli_graph_edges.txt", edges.str());
    TempFile lf("cli_graph_labels.csv", "id,label\n0,0\n1,0\n2,0\n3,0\n4,1\n5,1\n6,1\n7,1\n");

    RunConfig cfg;
    cfg.command = "graph-eval";
    cfg.edges = ef.path;
    cfg.labels = lf.path;
    cfg.kernel = "adjacency";
    cfg.gamma = 5.0;
    cfg.trials = 3;
    cfg.train_frac = 0.5;
    cfg.seed = 9;
    cfg.out = "cli_graph_out";
    REQUIRE(run_command(cfg) == kExitOk);
    const std::string csv = slurp("cli_graph_out.csv");

    // same metric rows for both methods
    std::map<std::string, std::string> rows;
    std::istringstream ss(csv);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        rows[line.substr(0, comma)] += line.substr(comma) + "|";
    }
    CHECK(rows.at("askls-adjacency") == rows.at("lssvm-symmetrized"));
    std::remove("cli_graph_out.csv");
    std::remove("cli_graph_out.txt");
}

TEST_CASE("errors map to distinct exit codes with one-line messages") {
    std::ostringstream err;
    CHECK(report_error_and_code(ConfigError("bad flag"), err) == kExitConfig);
    CHECK(report_error_and_code(IoError("no file"), err) == kExitIo);
    CHECK(report_error_and_code(DataError("bad labels"), err) == kExitData);
    CHECK(report_error_and_code(SingularSystemError("singular", 1e-17), err) == kExitNumerical);
    CHECK(report_error_and_code(NumericalError("diverged"), err) == kExitNumerical);
    const std::string lines = err.str();
    CHECK(lines.find("error: category=config message=\"bad flag\"") != std::string::npos);
    CHECK(lines.find("error: category=numerical") != std::string::npos);

    RunConfig cfg;
    cfg.command = "train";
    cfg.data = "not-there.csv";
    cfg.out = "x";
    try {
        run_command(cfg);
        FAIL("expected IoError");
    } catch (const std::exception& e) {
        std::ostringstream sink;
        CHECK(report_error_and_code(e, sink) == kExitIo);
    }
}

TEST_CASE("unknown command is a config error") {
    RunConfig cfg;
    cfg.command = "serve";
    CHECK_THROWS_AS(run_command(cfg), ConfigError);
}
