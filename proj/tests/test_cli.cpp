#include <doctest.h>

#include <array>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <vector>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = ALWS_CLI_PATH;

struct CliTempDir {
    fs::path path;
    CliTempDir() : path(fs::temp_directory_path() / "alws_cli_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~CliTempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

int run(const std::string& args, const std::string& log) {
    const std::string cmd = kCli + " " + args + " > " + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
}

}  // namespace

TEST_CASE("weights subcommand on an identity matrix") {
    CliTempDir dir;
    write(dir.file("eye.csv"), "1,0,0\n0,1,0\n0,0,1\n");
    const int code = run("weights --input " + dir.file("eye.csv") +
                             " --p 2 --out-dir " + dir.file("out"),
                         dir.file("log.txt"));
    CHECK(code == 0);
    const std::string csv = slurp(dir.file("out") + "/weights.csv");
    CHECK(csv.find("index,weight\n0,1\n1,1\n2,1\n") != std::string::npos);
    CHECK(csv.find("# sum=3") != std::string::npos);
}

TEST_CASE("malformed csv exits 4 and names the line") {
    CliTempDir dir;
    write(dir.file("bad.csv"), "1,0\n0,oops\n");
    const int code = run("weights --input " + dir.file("bad.csv") +
                             " --out-dir " + dir.file("out"),
                         dir.file("log.txt"));
    CHECK(code == 4);
    CHECK(slurp(dir.file("log.txt")).find(":2:") != std::string::npos);
}

TEST_CASE("csv and binary inputs give byte-identical weight files") {
    CliTempDir dir;
    // 6x2 matrix with non-trivial doubles; 17 digits so both encodings
    // denote identical values.
    std::ostringstream csv;
    csv.precision(17);
    for (int i = 0; i < 6; ++i) {
        csv << 0.1 * (i + 1) << "," << (i % 2 ? -1.25 : 2.5) * (i + 1) << "\n";
    }
    write(dir.file("m.csv"), csv.str());
    REQUIRE(run("weights --input " + dir.file("m.csv") + " --out-dir " +
                    dir.file("out_csv"),
                dir.file("log.txt")) == 0);

    // Convert to binary through a tiny round trip: load csv, save binary via
    // the sample of the CLI is not available, so rewrite using the dump from
    // the first run is enough: reuse the library via a second weights run on
    // a binary file produced by python-free means -- here we just write the
    // ALWM container by hand.
    std::string bin = "ALWM";
    auto put_u64 = [&bin](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bin.push_back(char((v >> (8 * i)) & 0xFF));
    };
    put_u64(6);
    put_u64(2);
    for (int i = 0; i < 6; ++i) {
        const double row[2] = {0.1 * (i + 1), (i % 2 ? -1.25 : 2.5) * (i + 1)};
        for (const double v : row) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            put_u64(bits);
        }
    }
    write(dir.file("m.alwm"), bin);
    REQUIRE(run("weights --input " + dir.file("m.alwm") + " --out-dir " +
                    dir.file("out_bin"),
                dir.file("log.txt")) == 0);

    CHECK(slurp(dir.file("out_csv") + "/weights.csv") ==
          slurp(dir.file("out_bin") + "/weights.csv"));
}

TEST_CASE("unknown config keys are rejected with exit 2") {
    CliTempDir dir;
    write(dir.file("cfg"), "seed = 1\nbogus_key = 7\n");
    const int code = run("weights --config " + dir.file("cfg"),
                         dir.file("log.txt"));
    CHECK(code == 2);
    CHECK(slurp(dir.file("log.txt")).find("bogus_key") != std::string::npos);
}

TEST_CASE("drawing without a seed exits 2") {
    CliTempDir dir;
    write(dir.file("u.csv"), "1,0\n0,1\n0.5,0.5\n1,1\n");
    write(dir.file("cfg"), "unlabeled = " + dir.file("u.csv") + "\ntau = 2\n");
    const int code = run("sample --config " + dir.file("cfg"),
                         dir.file("log.txt"));
    CHECK(code == 2);
    CHECK(slurp(dir.file("log.txt")).find("seed") != std::string::npos);
}

TEST_CASE("budgets beyond the pool exit 2 and name the constraint") {
    CliTempDir dir;
    write(dir.file("u.csv"), "1,0\n0,1\n0.5,0.5\n1,1\n");
    write(dir.file("cfg"),
          "unlabeled = " + dir.file("u.csv") + "\nseed = 1\ntau = 9\n");
    const int code = run("sample --config " + dir.file("cfg"),
                         dir.file("log.txt"));
    CHECK(code == 2);
    const std::string log = slurp(dir.file("log.txt"));
    CHECK(log.find("support") != std::string::npos);
}

TEST_CASE("sample writes distribution, plan and sampling matrix") {
    CliTempDir dir;
    std::ostringstream u;
    for (int i = 0; i < 12; ++i) u << (0.2 * i - 1) << "," << (i % 3) - 1 << "\n";
    write(dir.file("u.csv"), u.str());
    write(dir.file("cfg"), "unlabeled = " + dir.file("u.csv") +
                               "\nseed = 4\ntau = 6\nout_dir = " +
                               dir.file("out") + "\n");
    REQUIRE(run("sample --config " + dir.file("cfg"), dir.file("log.txt")) == 0);
    CHECK(slurp(dir.file("out") + "/distribution.csv").rfind("index,prob\n", 0) == 0);
    CHECK(slurp(dir.file("out") + "/plan.csv").rfind("draw_order,index\n", 0) == 0);
    CHECK(slurp(dir.file("out") + "/sampling_matrix.csv")
              .rfind("row,source_index,scale\n", 0) == 0);
}

TEST_CASE("pipeline smoke run is deterministic across reruns") {
    CliTempDir dir;
    // 3 labeled + 30 pool rows, d=2, k=1.
    std::ostringstream l, u, y;
    std::uint64_t state = 99;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(static_cast<int64_t>(state >> 33)) /
                   (1ll << 30) - 1.0;
    };
    for (int i = 0; i < 3; ++i) l << next() << "," << next() << "\n";
    for (int i = 0; i < 30; ++i) u << next() << "," << next() << "\n";
    for (int i = 0; i < 33; ++i) y << next() << "\n";
    write(dir.file("l.csv"), l.str());
    write(dir.file("u.csv"), u.str());
    write(dir.file("y.csv"), y.str());

    const std::string base_cfg = "labeled = " + dir.file("l.csv") +
                                 "\nunlabeled = " + dir.file("u.csv") +
                                 "\nlabels = " + dir.file("y.csv") +
                                 "\nseed = 11\ntau = 10\nepsilon = 0.25\n"
                                 "activation = relu\nconstrained = true\n"
                                 "oracle_restarts = 5\n";
    write(dir.file("cfg1"), base_cfg + "out_dir = " + dir.file("run1") + "\n");
    write(dir.file("cfg2"), base_cfg + "out_dir = " + dir.file("run2") + "\n");

    REQUIRE(run("pipeline --config " + dir.file("cfg1"), dir.file("log1.txt")) == 0);
    REQUIRE(run("pipeline --config " + dir.file("cfg2"), dir.file("log2.txt")) == 0);

    for (const char* name :
         {"plan.csv", "audit.csv", "theta_0.csv", "guarantee.csv"}) {
        CHECK(slurp(dir.file("run1") + "/" + name) ==
              slurp(dir.file("run2") + "/" + name));
        CHECK(!slurp(dir.file("run1") + "/" + name).empty());
    }
    const std::string report = slurp(dir.file("run1") + "/guarantee.csv");
    CHECK(report.rfind("model,loss,", 0) == 0);
}

TEST_CASE("diagnose writes curve and coverage tables") {
    CliTempDir dir;
    std::ostringstream u1, u2;
    std::uint64_t state = 5;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(static_cast<int64_t>(state >> 33)) /
                   (1ll << 30) - 1.0;
    };
    for (int i = 0; i < 20; ++i) u1 << next() << "," << next() << "\n";
    for (int i = 0; i < 20; ++i) u2 << next() << "," << next() << "\n";
    write(dir.file("u1.csv"), u1.str());
    write(dir.file("u2.csv"), u2.str());
    write(dir.file("cfg"), "unlabeled = " + dir.file("u1.csv") + "," +
                               dir.file("u2.csv") + "\nout_dir = " +
                               dir.file("out") + "\n");
    REQUIRE(run("diagnose --config " + dir.file("cfg"), dir.file("log.txt")) == 0);
    const std::string curve = slurp(dir.file("out") + "/curve.csv");
    CHECK(curve.rfind("k,T,upper_bound\n", 0) == 0);
    CHECK(curve.find("\n1,") != std::string::npos);
    CHECK(curve.find("\n2,") != std::string::npos);
    const std::string cov = slurp(dir.file("out") + "/coverage.csv");
    CHECK(cov.rfind("t,kappa\n", 0) == 0);
    CHECK(cov.find("100,1\n") != std::string::npos);
}

TEST_CASE("verify reports a pass/fail table on a healthy config") {
    CliTempDir dir;
    std::ostringstream u, y;
    std::uint64_t state = 2024;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(static_cast<int64_t>(state >> 33)) /
                   (1ll << 30) - 1.0;
    };
    std::vector<std::array<double, 2>> rows;
    for (int i = 0; i < 80; ++i) {
        rows.push_back({next(), next()});
        u << rows.back()[0] << "," << rows.back()[1] << "\n";
    }
    for (int i = 0; i < 80; ++i) {
        const double z = 0.7 * rows[i][0] - 0.2 * rows[i][1];
        y << (z > 0 ? z : 0.0) + 0.05 * next() << "\n";
    }
    write(dir.file("u.csv"), u.str());
    write(dir.file("y.csv"), y.str());
    write(dir.file("cfg"), "unlabeled = " + dir.file("u.csv") +
                               "\nlabels = " + dir.file("y.csv") +
                               "\nseed = 3\ntau = 60\nepsilon = 0.25\n"
                               "activation = relu\nconstrained = true\n"
                               "oracle_restarts = 5\nout_dir = " +
                               dir.file("out") + "\n");
    const int code = run("verify --config " + dir.file("cfg"),
                         dir.file("log.txt"));
    const std::string log = slurp(dir.file("log.txt"));
    CHECK(code == 0);
    CHECK(log.find("fixed_point_residual") != std::string::npos);
    CHECK(log.find("sampling_distortion") != std::string::npos);
    CHECK(log.find("guarantee_ratio") != std::string::npos);
    CHECK(log.find("all checks passed") != std::string::npos);

    // Seed sweep emits the per-seed CSV.
    write(dir.file("cfg2"), slurp(dir.file("cfg")) + "seed_sweep = 2\n");
    const int sweep_code = run("verify --config " + dir.file("cfg2"),
                               dir.file("log2.txt"));
    CHECK(sweep_code == 0);
    const std::string csv = slurp(dir.file("out") + "/verify_seeds.csv");
    CHECK(csv.rfind("seed,max_fp_residual,max_distortion,max_ratio,pass\n", 0) == 0);
}

TEST_CASE("shipped smoke config completes quickly") {
    CliTempDir dir;
    const auto start = std::chrono::steady_clock::now();
    // The shipped config uses paths relative to the repository root.
    const std::string cmd = std::string("cd ") + ALWS_SOURCE_DIR + " && " +
                            kCli + " pipeline --config smoke/smoke.conf"
                            " --out-dir " + dir.file("out") + " > " +
                            dir.file("log.txt") + " 2>&1";
    const int code = WEXITSTATUS(std::system(cmd.c_str()));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    CHECK(code == 0);
    CHECK(secs < 10.0);
    CHECK(!slurp(dir.file("out") + "/guarantee.csv").empty());
}

TEST_CASE("verify includes the identity self check and fails on tiny tau") {
    CliTempDir dir;
    std::ostringstream u, y;
    std::uint64_t state = 31;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(static_cast<int64_t>(state >> 33)) /
                   (1ll << 30) - 1.0;
    };
    for (int i = 0; i < 80; ++i) u << next() << "," << next() << "," << next() << "\n";
    for (int i = 0; i < 80; ++i) y << next() << "\n";
    write(dir.file("u.csv"), u.str());
    write(dir.file("y.csv"), y.str());
    // tau = 2 cannot embed an 80-row matrix: distortion must trip the gate.
    write(dir.file("cfg"), "unlabeled = " + dir.file("u.csv") +
                               "\nlabels = " + dir.file("y.csv") +
                               "\nseed = 3\ntau = 2\nepsilon = 0.25\n"
                               "activation = identity\nconstrained = true\n"
                               "oracle_restarts = 5\nout_dir = " +
                               dir.file("out") + "\n");
    const int code = run("verify --config " + dir.file("cfg"),
                         dir.file("log.txt"));
    const std::string log = slurp(dir.file("log.txt"));
    CHECK(code == 1);
    CHECK(log.find("PASS  identity_distortion") != std::string::npos);
    CHECK(log.find("FAIL  sampling_distortion[0]") != std::string::npos);
}
