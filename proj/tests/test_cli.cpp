#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_env(const std::string& env_prefix, const std::string& args) {
    std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") + SIFTLAB_BIN + " " + args +
                      " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

CmdResult run(const std::string& args) { return run_env("", args); }

} // namespace

TEST_CASE("invalid flags exit with code 2") {
    CHECK(run("simulate --protocol bogus --n 1 --k 1 --px 0.5 --trials 10 --seed 1").exit_code ==
          2);
    CHECK(run("simulate --protocol lca --n 1 --k 1 --px 0.6 --trials 10 --seed 1").exit_code ==
          2);  // MissingM
    CHECK(run("simulate --protocol iterative --n 1 --k 1 --px 0.5 --trials 10 --format json")
              .exit_code == 2);  // json output demands an explicit seed
    CHECK(run("nonsense").exit_code == 2);
}

TEST_CASE("simulate report is byte-identical across reruns and worker counts") {
    const std::string base =
        "simulate --protocol lca --n 2 --k 2 --m 10 --px 0.6 --trials 20000 --seed 99 "
        "--format json";
    CmdResult a = run(base + " --workers 1");
    CmdResult b = run(base + " --workers 4");
    CmdResult c = run(base + " --workers 1");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(a.out.find("error_rate") != std::string::npos);
}

TEST_CASE("SIFTLAB_WORKERS overrides --workers without changing results") {
    const std::string base =
        "simulate --protocol iterative --n 1 --k 2 --px 0.45 --trials 20000 --seed 4 "
        "--format json --workers 1";
    CmdResult plain = run(base);
    CmdResult env = run_env("SIFTLAB_WORKERS=3", base);
    CHECK(plain.exit_code == 0);
    CHECK(env.exit_code == 0);
    CHECK(plain.out == env.out);
}

TEST_CASE("csv output format") {
    CmdResult r = run("simulate --protocol iterative --n 1 --k 1 --px 0.5 --trials 5000 "
                      "--seed 3 --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("metric,value,std_error\n", 0) == 0);
    CHECK(r.out.find(",") != std::string::npos);
    CHECK(r.out.find("\r") == std::string::npos);  // line feeds only

    CmdResult fig = run("figure efficiency --nk-max 3 --px 0.5");
    CHECK(fig.exit_code == 0);
    CHECK(fig.out.rfind("n,eta_iterative,eta_lca,m_opt\n", 0) == 0);
    int lines = 0;
    for (char ch : fig.out) lines += ch == '\n';
    CHECK(lines == 4);
}

TEST_CASE("figure error-curves emits analytic and montecarlo rows") {
    CmdResult r = run("figure error-curves --px-min 0.5 --px-max 0.52 --step 0.01 "
                      "--trials 2000 --seed 11");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("p_x,attack,method,expected_error,std_error\n", 0) == 0);
    CHECK(r.out.find("0.5,nonuniform,analytic,") != std::string::npos);
    CHECK(r.out.find("0.5,leak,analytic,") != std::string::npos);
    CHECK(r.out.find("0.51,leak,analytic,") == std::string::npos);  // only at 0.5
    CHECK(r.out.find(",both,montecarlo,") != std::string::npos);
}

TEST_CASE("audit verdicts: biased sampling rejected, tuned sampling accepted") {
    CmdResult biased = run("audit --protocol iterative --n 1 --k 2 --px 0.3 --trials 20000 "
                           "--seed 5");
    CHECK(biased.exit_code == 1);
    CHECK(biased.out.find("\"reject\": true") != std::string::npos);

    CmdResult tuned = run("audit --protocol iterative --n 1 --k 2 --px 0.461 --trials 20000 "
                          "--seed 5");
    CHECK(tuned.exit_code == 0);

    CmdResult lca = run("audit --protocol lca --n 2 --k 2 --m 12 --px 0.7 --trials 20000 "
                        "--seed 5");
    CHECK(lca.exit_code == 0);
}

TEST_CASE("audit reports the first-agreement bias table for n = k = 1") {
    CmdResult r = run("audit --protocol iterative --n 1 --k 1 --px 0.5 --trials 5000 --seed 6");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("first_agreement") != std::string::npos);
    CHECK(r.out.find("analytic_g_z") != std::string::npos);
}

TEST_CASE("schedule files drive the schedule attack") {
    std::string path = "/tmp/siftlab_test_schedule.txt";
    {
        std::ofstream f(path);
        f << "X\nZ\n-\nZ\n";
    }
    CmdResult r = run("simulate --protocol iterative --n 1 --k 1 --px 0.5 --attack schedule:" +
                      path + " --trials 2000 --seed 8 --format csv");
    CHECK(r.exit_code == 0);
    std::remove(path.c_str());

    CmdResult missing = run("simulate --protocol iterative --n 1 --k 1 --px 0.5 "
                            "--attack schedule:/nonexistent --trials 10 --seed 8");
    CHECK(missing.exit_code != 0);
}

TEST_CASE("analytic subcommand prints JSON values") {
    CmdResult r = run("analytic pzstar --k 2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("0.5389") != std::string::npos);

    CmdResult bad = run("analytic attack-error --attack leak --px 0.7");
    CHECK(bad.exit_code == 2);  // no analytic value away from 0.5

    CmdResult eff = run("analytic efficiency --n 1 --k 1 --px 0.5 --optimize");
    CHECK(eff.exit_code == 0);
    CHECK(eff.out.find("\"m_opt\": 5") != std::string::npos);
}

TEST_CASE("simulate with parameter estimation reports a pass rate") {
    CmdResult r = run("simulate --protocol lca --n 2 --k 1 --m 8 --px 0.6 --qtol 0.2 "
                      "--pe sbpe --trials 5000 --seed 12 --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("pe_pass_rate") != std::string::npos);
    // noiseless channel, passive Eve: PE always passes
    CHECK(r.out.find("\"value\": 1.0") != std::string::npos);
}
